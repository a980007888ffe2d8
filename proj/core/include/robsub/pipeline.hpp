#pragma once

// End-to-end rank-k fitting: bicriteria subspace, residual sampling, a sparse
// embedding on the right, leverage sampling of rows, and the small solver.

#include "robsub/bicriteria.hpp"
#include "robsub/conditioning.hpp"
#include "robsub/core.hpp"
#include "robsub/dimreduce.hpp"
#include "robsub/small_approx.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace robsub {

struct PipelineConfig {
  BicriteriaConfig bicriteria;
  /// eps and seed are overwritten by the pipeline.
  DimReduceConfig dimreduce;
  /// The embedding S gets c_lopsided * m^2 rows (m = dim U); skipped when that reaches d.
  double c_lopsided = 40.0;
  /// Nonzeros per column of S; 0 uses the bicriteria sketch sparsity.
  Index lopsided_sparsity = 0;
  /// poly(k/eps) in r1 = gamma_hat * poly(k/eps), instantiated as r1_multiplier * k / eps.
  double r1_multiplier = 1.0;
  /// Exponent c in r1^{c+1}; unset means p.
  std::optional<double> c_exponent;
  double k2 = 4.0;
  double kappa = 0.1;
  /// C in eps' = eps / (C log log n).
  double c_loglog = 3.0;
  /// Row budget of the growth-2 recursion; unset uses the bicriteria budget.
  std::optional<Index> recursion_p_m;
  ConditioningConfig conditioning;
  SmallApproxOptions small;
};

struct PipelineResult {
  /// d x k, orthonormal columns.
  Subspace v = Subspace::empty(0);
  Index k_used = 0;
  bool k_clamped = false;
  Index bicriteria_dim = 0;
  Index bicriteria_p_m = 0;
  int bicriteria_depth = 0;
  bool bicriteria_shrink_failed = false;
  /// Subspace U the rank-k answer is searched in (padded to at least k).
  Subspace search_space = Subspace::empty(0);
  Index dimreduce_dim = 0;
  Index dimreduce_sample = 0;
  double dimreduce_expected = 0.0;
  /// Columns of S^T; equals d when the embedding was skipped.
  Index lopsided_cols = 0;
  bool lopsided_skipped = false;
  /// Rows handed to the small solver.
  Index small_rows = 0;
  double small_cost = 0.0;
  bool small_converged = false;
  /// Growth-2 recursion depth and per-level row counts.
  int recursion_depth = 0;
  std::vector<Index> recursion_sizes;
  bool recursion_shrink_failed = false;
  double eps_level = 0.0;
  std::vector<std::pair<std::string, double>> timings_seconds;
};

/// Lp path (p in [1, 2]).
PipelineResult approx_lp(const Matrix& a, Index k, double eps, const LossSpec& loss,
                         std::uint64_t seed, const PipelineConfig& cfg = {});

/// Growth-2 path (Huber, L1-L2, Fair).
PipelineResult approx_m2(const Matrix& a, Index k, double eps, const LossSpec& loss,
                         std::uint64_t seed, const PipelineConfig& cfg = {});

/// Dispatches on the loss kind.
PipelineResult approx_subspace(const Matrix& a, Index k, double eps, const LossSpec& loss,
                               std::uint64_t seed, const PipelineConfig& cfg = {});

struct ScoreEstimate {
  /// Calibrated so that E q'_i matches the weighted leverage score of row i.
  Vector scores;
  double gamma_hat = 0.0;
};

/// Gaussian estimates of the weighted leverage scores of A H, one basis per
/// dyadic weight bucket (H = nullptr means the identity).
ScoreEstimate estimate_leverage_scores(const Matrix& a, const DenseMatrix* h, const WeightVector& w,
                                       const LossSpec& loss, std::uint64_t seed, double kappa,
                                       const ConditioningConfig& cfg = {});

}  // namespace robsub
