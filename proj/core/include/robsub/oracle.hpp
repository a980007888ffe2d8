#pragma once

// Reference computations for tests: naive costs, the SVD baseline, and a
// dense candidate search for tiny instances.

#include "robsub/core.hpp"

#include <cstdint>

namespace robsub {

struct OracleResult {
  Subspace u = Subspace::empty(0);
  double cost = 0.0;
};

/// Row-by-row sum_i w_i M(||a_i - a_i U U^T||) with the projector formed explicitly.
double naive_residual_cost(const Matrix& a, const DenseMatrix& u, const WeightVector& w,
                           const LossSpec& loss);

/// Top-k right singular subspace of diag(sqrt(w)) A and its cost under loss.
OracleResult svd_truncation_cost(const Matrix& a, Index k, const WeightVector& w, const LossSpec& loss);
OracleResult svd_truncation_cost(const Matrix& a, Index k, const LossSpec& loss);

struct ExhaustiveOptions {
  int budget = 10000;
  int polish_steps = 50;
  std::uint64_t seed = 0;
};

/// Best over coordinate subspaces, SVD subspaces of row subsets up to size
/// 2k, and `budget` polished random subspaces. Needs d <= 6 and k <= 2.
OracleResult exhaustive_tiny(const Matrix& a, Index k, const LossSpec& loss,
                             const ExhaustiveOptions& opt = {});

}  // namespace robsub
