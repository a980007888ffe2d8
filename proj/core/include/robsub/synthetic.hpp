#pragma once

// Seeded test-data generators shared by the tools, tests and benchmarks.

#include "robsub/core.hpp"

#include <cstdint>

namespace robsub {

struct PlantedOptions {
  Index n = 1000;
  Index d = 40;
  Index k = 4;
  /// Per-entry Gaussian noise added to every row.
  double noise = 0.0;
  /// Fraction of rows replaced by gross outliers.
  double outlier_fraction = 0.0;
  /// Outlier rows are Gaussian with this per-entry scale.
  double outlier_scale = 100.0;
  std::uint64_t seed = 0;
};

struct PlantedData {
  DenseMatrix a;
  /// d x k orthonormal basis of the planted row space.
  DenseMatrix basis;
  std::vector<Index> outliers;
};

/// Rows are N(0, I_k) coefficients times the planted basis, plus noise, with a
/// random subset replaced by outliers.
PlantedData planted_low_rank(const PlantedOptions& opt);

/// n x d with each entry nonzero independently with probability `density`,
/// values N(0, 1).
SparseMatrix random_sparse(Index n, Index d, double density, std::uint64_t seed);

}  // namespace robsub
