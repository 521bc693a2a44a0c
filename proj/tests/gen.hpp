#pragma once

#include <random>

#include "wander/cantor.hpp"
#include "wander/scale.hpp"

// Seeded generators for the property tests.

namespace wander::testgen {

inline EllSpec random_ellspec(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> plen(0, 4), clen(1, 3), inc(1, 3);
  EllSpec spec;
  int np = plen(rng), nc = clen(rng);
  for (int i = 0; i < np; ++i) spec.prefix.push_back(inc(rng));
  for (int i = 0; i < nc; ++i) spec.cycle.push_back(inc(rng));
  return spec;
}

inline cantor::BetaSeq random_beta(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> plen(0, 6), bit(0, 1);
  cantor::BetaSeq beta;
  int np = plen(rng);
  for (int i = 0; i < np; ++i) beta.prefix.push_back(bit(rng));
  beta.tail = bit(rng);
  return beta;
}

}  // namespace wander::testgen
