#pragma once

// Row-sampling plans, realized Bernoulli draws with reweighting, and sample
// size calculators.

#include "robsub/core.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace robsub {

/// Inclusion probabilities q_i = min{1, k2 * r * q'_i / sum q'}.
struct SamplingPlan {
  Vector q;
  Vector scores;
  double r_target = 0.0;
  double oversample = 1.0;

  Index size() const { return q.size(); }
  double expected_size() const;
  /// sum q_i (1 - q_i), the variance of the realized size.
  double size_variance() const;
};

/// Probabilities below this are set to zero.
inline constexpr double kMinProbability = 1e-12;

SamplingPlan make_plan(const Vector& scores, double r, double k2);

enum class DrawMode {
  /// Rows scaled by (w_i / q_i)^{1/p}; output weights are all one.
  LpScale,
  /// Rows kept as is; output weights w_i / q_i.
  M2Weight,
};

struct SampleDraw {
  std::vector<Index> indices;
  /// w_i / q_i for each sampled index.
  Vector weights;
  /// Row multipliers: (w_i / q_i)^{1/p} in LpScale mode, 1 otherwise.
  Vector scales;
  DrawMode mode = DrawMode::M2Weight;

  Index size() const { return static_cast<Index>(indices.size()); }
};

/// Independent Bernoulli(q_i) inclusion, one uniform per index in index order.
SampleDraw draw(const SamplingPlan& plan, const WeightVector& w, std::uint64_t seed,
                DrawMode mode, double p = 1.0);

struct SampledRows {
  Matrix rows;
  WeightVector weights;
  std::vector<Index> indices;
};

/// Materializes the sampled (and rescaled) rows of a.
SampledRows apply_draw(const Matrix& a, const SampleDraw& d);

/// C z log(1/delta) / eps^2 * gamma_total. eps = 1 is nudged just below 1.
double sample_size_subspace(double z, double eps, double delta, double gamma_total,
                            double c = 8.0);

/// E|g|^p for a standard normal g.
double half_normal_moment(double p);

/// Implicit n x d operator; times(G) returns U G.
struct RowOperator {
  Index rows = 0;
  Index cols = 0;
  std::function<DenseMatrix(const DenseMatrix&)> times;
};

enum class ScoreMode { Lp, M2 };

struct GaussianScoreOptions {
  ScoreMode mode = ScoreMode::Lp;
  /// Exponent m on |U_i g| in Lp mode.
  double m_power = 1.0;
  double r1 = 1.0;
  double k2 = 4.0;
  /// Sketch width in M2 mode; 0 picks ceil(3 / kappa).
  Index t_m = 0;
  double kappa = 0.1;
  /// Scores in M2 mode are max{beta e / c_m, beta^2 e^2} for estimate e.
  double beta = 1.0;
  double c_m = 1.0;
  std::uint64_t seed = 0;
};

struct GaussianScorePlan {
  SamplingPlan plan;
  /// Raw estimates |U_i g| (Lp) or ||U_i G||_2 (M2).
  Vector estimates;
  Index t_m = 1;
};

/// Lp: one Gaussian vector, q'_i = |U_i g|^m, r = d^{m/2} r1^{m+1}.
/// M2: t columns of variance 1/t, r = r1 n^kappa log n.
GaussianScorePlan gaussian_score_plan(const RowOperator& u, const GaussianScoreOptions& opt);

}  // namespace robsub
