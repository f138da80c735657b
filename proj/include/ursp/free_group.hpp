#pragma once

// Automorphisms of the free group F_g on v_1..v_g, given by images of the
// generators as reduced words. Inverse images are part of the value and are
// checked at construction, so every FreeGroupAutomorphism is genuinely
// invertible.

#include "ursp/integer_matrix.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace ursp {

// Reduced word over v_1..v_g: letter +k is v_k, -k is v_k^-1 (1-based).
using FreeWord = std::vector<int>;

inline FreeWord reduce_free(const FreeWord& w) {
  FreeWord r;
  for (int x : w) {
    if (x == 0) throw std::invalid_argument("zero letter in free word");
    if (!r.empty() && r.back() == -x)
      r.pop_back();
    else
      r.push_back(x);
  }
  return r;
}

inline FreeWord invert_free(const FreeWord& w) {
  FreeWord r;
  r.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(-*it);
  return r;
}

inline std::string free_word_str(const FreeWord& w) {
  if (w.empty()) return "1";
  std::string s;
  for (std::size_t t = 0; t < w.size(); ++t) {
    if (t) s += '*';
    s += 'v';
    s += std::to_string(std::abs(w[t]));
    if (w[t] < 0) s += "^-1";
  }
  return s;
}

// Substitute `images[k-1]` for each letter +-k of w, then reduce.
inline FreeWord apply_images(const std::vector<FreeWord>& images, const FreeWord& w) {
  FreeWord out;
  for (int x : w) {
    std::size_t k = static_cast<std::size_t>(std::abs(x)) - 1;
    if (k >= images.size()) throw std::invalid_argument("letter outside the rank");
    const FreeWord img = x > 0 ? images[k] : invert_free(images[k]);
    for (int y : img) {
      if (!out.empty() && out.back() == -y)
        out.pop_back();
      else
        out.push_back(y);
    }
  }
  return out;
}

class FreeGroupAutomorphism {
 public:
  FreeGroupAutomorphism(std::vector<FreeWord> images, std::vector<FreeWord> inverse_images)
      : images_(std::move(images)), inverse_images_(std::move(inverse_images)) {
    if (images_.size() != inverse_images_.size() || images_.empty())
      throw std::invalid_argument("image lists must have equal positive rank");
    for (auto& w : images_) w = reduce_free(w);
    for (auto& w : inverse_images_) w = reduce_free(w);
    for (std::size_t k = 0; k < images_.size(); ++k) {
      FreeWord gen{static_cast<int>(k) + 1};
      if (apply_images(images_, inverse_images_[k]) != gen ||
          apply_images(inverse_images_, images_[k]) != gen)
        throw std::invalid_argument("inverse images do not invert the images");
    }
  }

  static FreeGroupAutomorphism identity(std::size_t g) {
    std::vector<FreeWord> ws(g);
    for (std::size_t k = 0; k < g; ++k) ws[k] = {static_cast<int>(k) + 1};
    return FreeGroupAutomorphism(ws, ws);
  }

  std::size_t rank() const { return images_.size(); }
  const std::vector<FreeWord>& images() const { return images_; }
  const std::vector<FreeWord>& inverse_images() const { return inverse_images_; }

  FreeWord apply(const FreeWord& w) const { return apply_images(images_, w); }

  FreeGroupAutomorphism inverse() const {
    return FreeGroupAutomorphism(inverse_images_, images_);
  }

  // Functional composition: (f o g)(v) = f(g(v)).
  FreeGroupAutomorphism compose(const FreeGroupAutomorphism& g) const {
    if (rank() != g.rank()) throw std::invalid_argument("rank mismatch");
    std::vector<FreeWord> imgs(rank()), invs(rank());
    for (std::size_t k = 0; k < rank(); ++k) {
      imgs[k] = apply_images(images_, g.images_[k]);
      invs[k] = apply_images(g.inverse_images_, inverse_images_[k]);
    }
    return FreeGroupAutomorphism(std::move(imgs), std::move(invs));
  }

  FreeGroupAutomorphism pow(long e) const {
    FreeGroupAutomorphism acc = identity(rank());
    if (e == 0) return acc;
    FreeGroupAutomorphism base = e < 0 ? inverse() : *this;
    long k = e < 0 ? -e : e;
    for (long t = 0; t < k; ++t) acc = acc.compose(base);
    return acc;
  }

  bool operator==(const FreeGroupAutomorphism& o) const {
    return images_ == o.images_;
  }
  bool operator!=(const FreeGroupAutomorphism& o) const { return !(*this == o); }

  // Column k is the exponent vector of the image of v_{k+1}, so the map
  // factors through matrix multiplication: ab(f o g) = ab(f) ab(g).
  IntegerMatrix abelianization() const {
    IntegerMatrix m(rank());
    for (std::size_t k = 0; k < rank(); ++k)
      for (int x : images_[k]) {
        std::size_t r = static_cast<std::size_t>(std::abs(x)) - 1;
        m.at(r, k) += x > 0 ? 1 : -1;
      }
    return m;
  }

 private:
  std::vector<FreeWord> images_;
  std::vector<FreeWord> inverse_images_;
};

// Kernel of Aut(F_g) -> GL(g,Z).
inline bool is_IA(const FreeGroupAutomorphism& a) {
  return a.abelianization().is_identity();
}

// v_1 -> v_2 v_1 v_2^-1, the conjugation move generating IA_g normally.
inline FreeGroupAutomorphism conjugation_move(std::size_t g) {
  if (g < 2) throw std::invalid_argument("needs rank at least 2");
  auto id = FreeGroupAutomorphism::identity(g);
  std::vector<FreeWord> imgs = id.images(), invs = id.images();
  imgs[0] = {2, 1, -2};
  invs[0] = {-2, 1, 2};
  return FreeGroupAutomorphism(std::move(imgs), std::move(invs));
}

}  // namespace ursp
