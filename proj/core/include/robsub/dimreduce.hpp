#pragma once

// Non-adaptive residual sampling: grows a bicriteria subspace X = W W^T into
// a moderate-dimensional subspace that contains a near-optimal rank-k one.

#include "robsub/core.hpp"

#include <cstdint>
#include <optional>

namespace robsub {

struct DimReduceConfig {
  double eps = 0.25;
  /// Quality bound K of the input subspace.
  double quality_k = 2.0;
  /// c1 in r1 = c1 K k^{2+p} eps^{-p-1} log(k/eps + 2).
  double r1_multiplier = 2.0;
  std::optional<double> r1_override;
  std::optional<Index> t_m_override;
  double k2 = 4.0;
  std::uint64_t seed = 0;
};

struct DimReduceResult {
  Subspace u = Subspace::empty(0);
  double r1 = 0.0;
  /// r = r1^{p+1} (Lp) or r1 (growth-2).
  double r = 0.0;
  Index t_m = 1;
  double expected_sample_size = 0.0;
  Index sample_size = 0;
  /// True when every residual score was zero and the input came back unchanged.
  bool zero_residual = false;
};

double dim_reduce_r1(Index k, double eps, double quality_k, double p, double multiplier);

/// The returned subspace contains colspace(xhat) exactly (xhat rows go first
/// into the orthonormal union).
DimReduceResult dim_reduce(const Matrix& a, Index k, const Subspace& xhat, const LossSpec& loss,
                           const DimReduceConfig& cfg = {});

}  // namespace robsub
