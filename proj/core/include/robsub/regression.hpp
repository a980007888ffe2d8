#pragma once

// M-estimator regression: an IRLS solver and a recursive leverage-sampling
// front end that shrinks the row count before the solve.

#include "robsub/conditioning.hpp"
#include "robsub/core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace robsub {

struct IrlsOptions {
  /// Converged once the relative objective decrease is below tol and the
  /// relative step is below x_tol.
  double tol = 1e-10;
  double x_tol = 1e-9;
  int max_iter = 500;
  /// Residual floor in the weight M'(|r|) / (2 |r|).
  double floor = 1e-12;
};

struct IrlsResult {
  Vector x;
  double objective = 0.0;
  /// Objective after each accepted iterate, starting with the initial solve.
  std::vector<double> history;
  int iterations = 0;
  int step_halvings = 0;
  bool converged = false;
};

/// sum_i w_i M(b_i - a_i x).
double regression_cost(const Matrix& a, const Vector& b, const Vector& x, const WeightVector& w,
                       const LossSpec& loss);
double regression_cost(const Matrix& a, const Vector& b, const Vector& x, const LossSpec& loss);

/// Least-norm weighted least squares per step; a step that would raise the
/// objective is halved toward the previous iterate.
IrlsResult irls_solve(const Matrix& a, const Vector& b, const WeightVector& w, const LossSpec& loss,
                      const IrlsOptions& opt = {});

struct RegressionConfig {
  double delta = 0.1;
  /// c in r = c n^{1/2 + kappa} (d + 1) log(1/delta) / eps^2.
  double c_size = 1.0;
  double kappa = 0.1;
  int max_levels = 3;
  /// Rows at or below this go straight to IRLS; unset means 20 d^2 / eps^2.
  std::optional<Index> base_cap;
  IrlsOptions irls;
  ConditioningConfig conditioning;
};

struct RegressionResult {
  Vector x;
  /// Cost on the full input.
  double cost = 0.0;
  int levels = 0;
  /// Row count entering each level, then the base problem size.
  std::vector<Index> sizes;
  IrlsResult base;
};

/// `w` (optional) weights the rows of the full problem; the reported cost uses them.
RegressionResult m_regress(const Matrix& a, const Vector& b, const LossSpec& loss, double eps,
                           std::uint64_t seed, const RegressionConfig& cfg = {},
                           const WeightVector* w = nullptr);

}  // namespace robsub
