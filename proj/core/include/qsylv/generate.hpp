#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>

#include "qsylv/phi.hpp"
#include "qsylv/rng.hpp"
#include "qsylv/sylvester.hpp"

namespace qsylv {

struct PlantOptions {
  Index min_dim = 1;
  Index max_dim = 4;
  /// Chance that a coefficient block is drawn rank-deficient (a uniform rank
  /// between 1 and min(rows, cols) - 1).
  double deficient_fraction = 0.0;
  /// When set, every coefficient is drawn with exactly this rank (capped at
  /// min(rows, cols)); deficient_fraction is ignored.
  std::optional<Index> forced_rank;
};

/// Draws a random chained system together with the planted solution it was
/// built from, so the produced system is consistent by construction.
std::pair<SylvesterSystem, SystemSolution> plant_system(Rng& rng, Index k,
                                                        const PlantOptions& opts = {});

/// Same for the phi-structured chain: planted Z blocks are symmetrized, so E
/// comes out phi-Hermitian.
std::pair<PhiSystem, PhiSolution> plant_phi_system(Rng& rng, Index k, const Involution& phi,
                                                   const PlantOptions& opts = {});

struct GenOptions {
  Index k = 1;
  Index min_dim = 1;
  Index max_dim = 4;
  bool inconsistent = false;
  double deficient_fraction = 0.0;
  std::optional<std::array<double, 3>> phi_axis;
};

struct GenResult {
  std::optional<SylvesterSystem> general;
  std::optional<PhiSystem> structured;
};

/// Deterministic instance generator: equal seeds and options give identical
/// instances. Inconsistent instances are produced by planting a consistent
/// system with low-rank coefficients and pushing E out of the reachable
/// subspace; every one is certified by the realified-system oracle before it
/// is returned. Throws GenerationError if certification keeps failing.
GenResult generate(std::uint64_t seed, const GenOptions& opts);

}  // namespace qsylv
