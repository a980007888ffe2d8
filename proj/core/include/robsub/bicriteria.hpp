#pragma once

// Bicriteria subspaces: sketch on the right, then recursive leverage-score
// sampling of the sketched rows until at most P_M rows remain.

#include "robsub/conditioning.hpp"
#include "robsub/core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace robsub {

struct BicriteriaConfig {
  /// Sketch width m = c_r_sketch * k^2.
  double c_sketch = 40.0;
  /// Per-column sparsity s = max(1, ceil(2 / eps_const)).
  double eps_const = 0.5;
  /// poly(d') in the recursion's sample size is c_poly * d'^2.
  double c_poly = 10.0;
  /// P_M = pm_multiplier k^2 (Lp) or pm_multiplier k^2 ceil(log2^3(n + 2)) (growth-2).
  double pm_multiplier = 50.0;
  std::optional<Index> p_m_override;
  /// C in the growth-2 inflation C log log log n.
  double c_loglog = 3.0;
  ConditioningConfig conditioning;
};

struct RecurResult {
  /// Surviving rows of a_hat, rescaled in Lp mode.
  Matrix rows;
  WeightVector weights;
  /// Index of each surviving row in the original a_hat.
  std::vector<Index> origin;
  int depth = 0;
  /// Row count entering each level, starting with the input.
  std::vector<Index> level_sizes;
  /// Set when a level failed to shrink to 0.9 n' even after one reseeded retry;
  /// the recursion then stops with the current rows.
  bool shrink_failed = false;
};

Index bicriteria_row_budget(Index k, Index n, const LossSpec& loss, const BicriteriaConfig& cfg);

/// Max(1, log2 log2 log2 n), the growth-2 inflation before the constant.
double logloglog(double n);

RecurResult const_approx_recur(const Matrix& a_proj, const Matrix& a_hat, const WeightVector& w,
                               const LossSpec& loss, Index p_m, std::uint64_t seed,
                               const BicriteriaConfig& cfg = {});

struct BicriteriaResult {
  Subspace u = Subspace::empty(0);
  Index k_used = 0;
  /// k was larger than min(n, d) and got clamped.
  bool k_clamped = false;
  /// Columns of A R; equals d when the sketch was skipped (c k^2 >= d).
  Index sketch_cols = 0;
  bool sketch_skipped = false;
  Index p_m = 0;
  RecurResult recursion;
};

BicriteriaResult const_approx(const Matrix& a, Index k, const LossSpec& loss, std::uint64_t seed,
                              const BicriteriaConfig& cfg = {});

}  // namespace robsub
