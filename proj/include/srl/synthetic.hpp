#pragma once

// Seeded synthetic corpora for desk-scale verification: a small set the
// model must overfit, and a planted long-range set where the role of a
// distant argument is determined by a token next to the predicate.

#include "srl/corpus.hpp"

#include <cstdint>
#include <vector>

namespace srl {

// 20 sentences, n <= 8, roles {A0, A1, A2}: role-bearing word forms x0/x1/x2
// mark their own role relative to the single predicate "pred".
std::vector<Sentence> synthetic_overfit_corpus(std::uint64_t seed, int count = 20);

// Sentences of length 12: predicate at 1, selector s0/s1/s2 at 2, ambiguous
// argument form "arg" at distance >= 7. The selector determines the role of
// both the near argument (itself) and the far argument.
std::vector<Sentence> synthetic_longrange_corpus(std::uint64_t seed, int count);

}  // namespace srl
