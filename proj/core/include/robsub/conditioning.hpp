#pragma once

// Well-conditioned bases and M-estimator leverage scores (sensitivities),
// including the dyadic weight-bucket variant for weighted rows.

#include "robsub/core.hpp"

#include <cstdint>
#include <optional>

namespace robsub {

struct ConditioningConfig {
  /// The embedding Pi gets c_pi * m^2 rows, m the column count of A H.
  double c_pi = 20.0;
  /// Random directions used to certify beta (p < 2).
  int beta_samples = 10000;
  double beta_safety = 2.0;
  /// Caps n * rank * samples for the beta certificate on large inputs.
  double beta_work_cap = 2e8;
  /// Relative pivot threshold for dropping dependent columns of Pi A H.
  double rank_tol = 1e-10;
};

/// U = A H R^{-1}, kept implicitly through H and the change of basis.
struct WellConditionedBasis {
  /// d x m_H; empty (zero columns) stands for the identity.
  DenseMatrix h;
  /// m_H x rank. Selects the independent pivoted columns and applies R^{-1}.
  DenseMatrix change_of_basis;
  /// ||U||_e (entrywise p-norm).
  double alpha = 0.0;
  /// ||x||_q <= beta ||U x||_p, q the dual exponent.
  double beta = 1.0;
  double p = 2.0;
  Index sketch_rows = 0;
  /// True when Pi was the identity (n small enough that embedding is moot).
  bool exact = false;

  Index rank() const { return change_of_basis.cols(); }
  /// Maps y in the basis coordinates to A-coordinates: H R^{-1} y.
  DenseMatrix coefficient_map() const;
  /// U G = A (H R^{-1} G), O(nnz(A) cols(G)).
  DenseMatrix times(const Matrix& a, const DenseMatrix& g) const;
  /// Materialized U (n x rank).
  DenseMatrix rows(const Matrix& a) const;
  Vector row(const Matrix& a, Index i) const;
};

/// QR of Pi (A H), with Pi a sparse p-stable embedding (p < 2) or a
/// CountSketch (p = 2); Pi is skipped when it would have at least n rows.
/// Dependent columns are dropped and the reduced rank is reported.
WellConditionedBasis well_conditioned_basis(const Matrix& a, const DenseMatrix* h, double p,
                                            std::uint64_t seed,
                                            const ConditioningConfig& cfg = {});

struct LeverageScores {
  Vector gamma;
  double gamma_total = 0.0;
  int bucket_count = 1;
  /// Largest basis rank over the buckets (the effective dimension).
  Index rank = 0;
};

/// gamma_i = beta^p ||U_i||_p^p for Lp, and
/// gamma_i = max{beta ||U_i||_2 / C_M, beta^2 ||U_i||_2^2} for the growth-2
/// estimators (which need a p = 2 basis).
LeverageScores leverage_scores(const Matrix& a, const WellConditionedBasis& basis,
                               const LossSpec& loss);

/// Per-bucket bases over T_j = { i : 2^{j-1} <= w_i < 2^j } and
/// gamma_i(A, M, w) = 2 * (unweighted score of row i within its bucket).
LeverageScores weighted_leverage_scores(const Matrix& a, const WeightVector& w,
                                        const LossSpec& loss, std::uint64_t seed,
                                        const DenseMatrix* h = nullptr,
                                        const ConditioningConfig& cfg = {});

/// p-norm of each row of U.
Vector basis_row_pnorms(const Matrix& a, const WellConditionedBasis& basis);

}  // namespace robsub
