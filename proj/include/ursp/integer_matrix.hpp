#pragma once

// Dense square matrices over arbitrary-precision integers.
//
// Everything in this library runs on exact arithmetic: entries of long
// generator words grow without bound, so fixed-width integers are not an
// option anywhere. Values are immutable in spirit -- all operations return
// fresh matrices and never mutate shared state.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ursp {

using Int = boost::multiprecision::cpp_int;

// Remainder of a by b with minimal absolute value; ties resolved toward the
// positive representative. b must be nonzero.
inline Int symmetric_remainder(const Int& a, const Int& b) {
  Int m = abs(b);
  Int r = a % m;
  if (r < 0) r += m;
  if (2 * r > m) r -= m;
  return r;
}

// Quotient matching symmetric_remainder: a == q*b + symmetric_remainder(a,b).
inline Int symmetric_quotient(const Int& a, const Int& b) {
  return (a - symmetric_remainder(a, b)) / b;
}

struct ExtGcd {
  Int g, x, y;  // g = gcd >= 0, g == x*a + y*b
};

inline ExtGcd extended_gcd(Int a, Int b) {
  Int x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    Int q = a / b;
    Int t = a - q * b;
    a = b;
    b = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
    t = y0 - q * y1;
    y0 = y1;
    y1 = t;
  }
  if (a < 0) {
    a = -a;
    x0 = -x0;
    y0 = -y0;
  }
  return {a, x0, y0};
}

class IntegerMatrix {
 public:
  IntegerMatrix() : n_(0) {}

  explicit IntegerMatrix(std::size_t n) : n_(n), e_(n * n, Int(0)) {}

  static IntegerMatrix identity(std::size_t n) {
    IntegerMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  // Matrix with a single 1 at (i, j); zero-based indices.
  static IntegerMatrix unit(std::size_t n, std::size_t i, std::size_t j) {
    IntegerMatrix m(n);
    m.at(i, j) = 1;
    return m;
  }

  std::size_t dim() const { return n_; }

  Int& at(std::size_t i, std::size_t j) { return e_[i * n_ + j]; }
  const Int& at(std::size_t i, std::size_t j) const { return e_[i * n_ + j]; }

  bool operator==(const IntegerMatrix& o) const {
    return n_ == o.n_ && e_ == o.e_;
  }
  bool operator!=(const IntegerMatrix& o) const { return !(*this == o); }

  bool is_identity() const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (at(i, j) != (i == j ? 1 : 0)) return false;
    return true;
  }

  bool is_zero() const {
    for (const Int& v : e_)
      if (v != 0) return false;
    return true;
  }

  IntegerMatrix transpose() const {
    IntegerMatrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  IntegerMatrix operator-() const {
    IntegerMatrix r(n_);
    for (std::size_t k = 0; k < e_.size(); ++k) r.e_[k] = -e_[k];
    return r;
  }

  IntegerMatrix operator+(const IntegerMatrix& o) const {
    require_same_dim(o);
    IntegerMatrix r(n_);
    for (std::size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k] + o.e_[k];
    return r;
  }

  IntegerMatrix operator-(const IntegerMatrix& o) const {
    require_same_dim(o);
    IntegerMatrix r(n_);
    for (std::size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k] - o.e_[k];
    return r;
  }

  IntegerMatrix operator*(const IntegerMatrix& o) const {
    require_same_dim(o);
    IntegerMatrix r(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = 0; k < n_; ++k) {
        const Int& a = at(i, k);
        if (a == 0) continue;
        for (std::size_t j = 0; j < n_; ++j) {
          const Int& b = o.at(k, j);
          if (b != 0) r.at(i, j) += a * b;
        }
      }
    return r;
  }

  std::vector<Int> apply(const std::vector<Int>& v) const {
    if (v.size() != n_) throw std::invalid_argument("vector length mismatch");
    std::vector<Int> r(n_, Int(0));
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (at(i, j) != 0) r[i] += at(i, j) * v[j];
    return r;
  }

  // Entrywise residues in [0, d).
  IntegerMatrix reduced_mod(const Int& d) const {
    if (d < 2) throw std::invalid_argument("modulus must be at least 2");
    IntegerMatrix r(n_);
    for (std::size_t k = 0; k < e_.size(); ++k) {
      Int v = e_[k] % d;
      if (v < 0) v += d;
      r.e_[k] = v;
    }
    return r;
  }

  bool congruent_to_identity(const Int& d) const {
    if (d < 2) throw std::invalid_argument("modulus must be at least 2");
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if ((at(i, j) - (i == j ? 1 : 0)) % d != 0) return false;
    return true;
  }

  std::string to_text() const {
    std::ostringstream os;
    os << n_ << '\n';
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (j) os << ' ';
        os << at(i, j);
      }
      os << '\n';
    }
    return os.str();
  }

 private:
  void require_same_dim(const IntegerMatrix& o) const {
    if (n_ != o.n_) throw std::invalid_argument("matrix dimension mismatch");
  }

  std::size_t n_;
  std::vector<Int> e_;
};

inline IntegerMatrix pow(const IntegerMatrix& m, long e);

// Fraction-free Gaussian elimination (Bareiss). All divisions are exact.
inline Int determinant(IntegerMatrix a) {
  std::size_t n = a.dim();
  if (n == 0) return 1;
  int sign = 1;
  Int prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a.at(k, k) == 0) {
      std::size_t r = k + 1;
      while (r < n && a.at(r, k) == 0) ++r;
      if (r == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(r, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j)
        a.at(i, j) = (a.at(k, k) * a.at(i, j) - a.at(i, k) * a.at(k, j)) / prev;
      a.at(i, k) = 0;
    }
    prev = a.at(k, k);
  }
  return sign * a.at(n - 1, n - 1);
}

inline bool is_unimodular(const IntegerMatrix& m) {
  Int d = determinant(m);
  return d == 1 || d == -1;
}

// Exact inverse of a matrix with determinant +-1, by integer row reduction
// of the augmented matrix. Throws if the input is not unimodular.
inline IntegerMatrix unimodular_inverse(const IntegerMatrix& m) {
  std::size_t n = m.dim();
  IntegerMatrix a = m;
  IntegerMatrix inv = IntegerMatrix::identity(n);
  auto row_op = [&](std::size_t i, std::size_t j, const Int& c) {
    // row i += c * row j, applied to both halves
    for (std::size_t t = 0; t < n; ++t) {
      a.at(i, t) += c * a.at(j, t);
      inv.at(i, t) += c * inv.at(j, t);
    }
  };
  auto row_swap = [&](std::size_t i, std::size_t j) {
    for (std::size_t t = 0; t < n; ++t) {
      std::swap(a.at(i, t), a.at(j, t));
      std::swap(inv.at(i, t), inv.at(j, t));
    }
  };
  auto row_negate = [&](std::size_t i) {
    for (std::size_t t = 0; t < n; ++t) {
      a.at(i, t) = -a.at(i, t);
      inv.at(i, t) = -inv.at(i, t);
    }
  };

  for (std::size_t k = 0; k < n; ++k) {
    // Euclidean descent within column k, rows k..n-1.
    for (;;) {
      std::size_t best = n;
      for (std::size_t i = k; i < n; ++i) {
        if (a.at(i, k) == 0) continue;
        if (best == n || abs(a.at(i, k)) < abs(a.at(best, k))) best = i;
      }
      if (best == n) throw std::invalid_argument("matrix is not unimodular");
      bool cleared = true;
      for (std::size_t i = k; i < n; ++i) {
        if (i == best || a.at(i, k) == 0) continue;
        Int q = symmetric_quotient(a.at(i, k), a.at(best, k));
        row_op(i, best, -q);
        if (a.at(i, k) != 0) cleared = false;
      }
      if (cleared) {
        if (best != k) row_swap(best, k);
        break;
      }
    }
    if (a.at(k, k) < 0) row_negate(k);
    if (a.at(k, k) != 1) throw std::invalid_argument("matrix is not unimodular");
  }
  for (std::size_t k = n; k-- > 1;)
    for (std::size_t i = 0; i < k; ++i)
      if (a.at(i, k) != 0) row_op(i, k, -a.at(i, k));
  return inv;
}

inline IntegerMatrix pow(const IntegerMatrix& m, long e) {
  std::size_t n = m.dim();
  if (e == 0) return IntegerMatrix::identity(n);
  IntegerMatrix base = e < 0 ? unimodular_inverse(m) : m;
  unsigned long k = e < 0 ? ~static_cast<unsigned long>(e) + 1ul
                          : static_cast<unsigned long>(e);
  IntegerMatrix acc = IntegerMatrix::identity(n);
  while (k) {
    if (k & 1) acc = acc * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return acc;
}

struct MatrixParseError : std::runtime_error {
  MatrixParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + what),
        line(line),
        column(column) {}
  std::size_t line;
  std::size_t column;
};

// Text format: first line is the dimension n, then n lines of n
// space-separated signed decimal integers.
inline IntegerMatrix parse_matrix(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;

  auto next_line = [&](bool required) -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    ++lineno;
    if (required) throw MatrixParseError("missing row", lineno, 1);
    return false;
  };

  next_line(true);
  std::size_t pos = line.find_first_not_of(" \t\r");
  std::size_t end = line.find_first_of(" \t\r", pos);
  std::string head = line.substr(pos, end == std::string::npos ? end : end - pos);
  std::size_t n = 0;
  try {
    std::size_t used = 0;
    long long v = std::stoll(head, &used);
    if (used != head.size() || v <= 0) throw std::invalid_argument("");
    n = static_cast<std::size_t>(v);
  } catch (...) {
    throw MatrixParseError("malformed dimension '" + head + "'", lineno, pos + 1);
  }
  if (end != std::string::npos && line.find_first_not_of(" \t\r", end) != std::string::npos)
    throw MatrixParseError("trailing tokens after dimension", lineno,
                           line.find_first_not_of(" \t\r", end) + 1);

  IntegerMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    next_line(true);
    std::size_t col = 0;
    std::size_t j = 0;
    while (true) {
      col = line.find_first_not_of(" \t\r", col);
      if (col == std::string::npos) break;
      std::size_t tok_end = line.find_first_of(" \t\r", col);
      std::string tok = line.substr(col, tok_end == std::string::npos ? tok_end : tok_end - col);
      if (j >= n)
        throw MatrixParseError("row has more than " + std::to_string(n) + " entries",
                               lineno, col + 1);
      try {
        m.at(i, j) = Int(tok);
      } catch (...) {
        throw MatrixParseError("non-integer token '" + tok + "'", lineno, col + 1);
      }
      ++j;
      col = tok_end;
      if (col == std::string::npos) break;
    }
    if (j != n)
      throw MatrixParseError("row has " + std::to_string(j) + " entries, expected " +
                             std::to_string(n), lineno, line.size() + 1);
  }
  return m;
}

inline std::ostream& operator<<(std::ostream& os, const IntegerMatrix& m) {
  return os << m.to_text();
}

}  // namespace ursp
