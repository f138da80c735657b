#pragma once

// Umbrella header.

#include "ursp/congruence.hpp"
#include "ursp/corpus.hpp"
#include "ursp/free_group.hpp"
#include "ursp/generators.hpp"
#include "ursp/integer_matrix.hpp"
#include "ursp/mapping_class.hpp"
#include "ursp/symplectic.hpp"
#include "ursp/symplectic_factor.hpp"
#include "ursp/word_parse.hpp"
#include "ursp/words.hpp"
