#include "robsub/sampling.hpp"

#include "robsub/errors.hpp"
#include "robsub/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace robsub {

double SamplingPlan::expected_size() const {
  return pairwise_sum(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())));
}

double SamplingPlan::size_variance() const {
  double v = 0.0;
  for (Index i = 0; i < q.size(); ++i) v += q[i] * (1.0 - q[i]);
  return v;
}

SamplingPlan make_plan(const Vector& scores, double r, double k2) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InputError("sampling plan: r must be positive");
  if (!(k2 > 0.0) || !std::isfinite(k2)) throw InputError("sampling plan: k2 must be positive");
  for (Index i = 0; i < scores.size(); ++i)
    if (!(scores[i] >= 0.0) || !std::isfinite(scores[i]))
      throw InputError("sampling plan: scores must be finite and nonnegative");
  const double total =
      pairwise_sum(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())));
  if (!(total > 0.0)) throw InputError("sampling plan: all scores are zero");

  SamplingPlan plan;
  plan.scores = scores;
  plan.r_target = r;
  plan.oversample = k2;
  plan.q.resize(scores.size());
  const double factor = k2 * r / total;
  for (Index i = 0; i < scores.size(); ++i) {
    const double q = std::min(1.0, factor * scores[i]);
    plan.q[i] = q < kMinProbability ? 0.0 : q;
  }
  return plan;
}

SampleDraw draw(const SamplingPlan& plan, const WeightVector& w, std::uint64_t seed,
                DrawMode mode, double p) {
  if (w.size() != plan.size()) throw InputError("draw: weight length does not match plan");
  Rng rng(derive_seed(seed, streams::kDraw));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SampleDraw out;
  out.mode = mode;
  std::vector<double> weights;
  for (Index i = 0; i < plan.size(); ++i) {
    const double u = unit(rng);
    const double q = plan.q[i];
    if (q > 0.0 && u < q) {
      out.indices.push_back(i);
      weights.push_back(w[i] / q);
    }
  }
  out.weights = Eigen::Map<Vector>(weights.data(), static_cast<Index>(weights.size()));
  if (mode == DrawMode::LpScale) {
    out.scales = out.weights.array().pow(1.0 / p).matrix();
  } else {
    out.scales = Vector::Ones(out.size());
  }
  return out;
}

SampledRows apply_draw(const Matrix& a, const SampleDraw& d) {
  SampledRows out;
  out.indices = d.indices;
  if (d.mode == DrawMode::LpScale) {
    out.rows = a.select_rows(d.indices,
                             std::span<const double>(d.scales.data(), static_cast<std::size_t>(d.size())));
    out.weights = WeightVector::ones(d.size());
  } else {
    out.rows = a.select_rows(d.indices);
    out.weights = WeightVector(d.weights);
  }
  return out;
}

double sample_size_subspace(double z, double eps, double delta, double gamma_total, double c) {
  if (!(z >= 1.0)) throw InputError("sample size: z must be at least 1");
  if (!(eps > 0.0 && eps <= 1.0)) throw InputError("sample size: eps must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("sample size: delta must lie in (0, 1)");
  if (!(gamma_total >= 0.0) || !(c > 0.0)) throw InputError("sample size: bad gamma or constant");
  eps = std::min(eps, 1.0 - 1e-9);
  return c * z * std::log(1.0 / delta) / (eps * eps) * gamma_total;
}

double half_normal_moment(double p) {
  return std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
}

GaussianScorePlan gaussian_score_plan(const RowOperator& u, const GaussianScoreOptions& opt) {
  if (!(opt.r1 >= 1.0)) throw InputError("gaussian score plan: r1 must be at least 1");
  if (!u.times) throw InputError("gaussian score plan: missing row operator");
  const Index n = u.rows;
  const Index d = u.cols;
  GaussianScorePlan out;
  Rng rng(derive_seed(opt.seed, streams::kGaussian));

  Vector scores(n);
  double r = 0.0;
  if (opt.mode == ScoreMode::Lp) {
    out.t_m = 1;
    const DenseMatrix g = gaussian_matrix(d, 1, 1.0, rng);
    const DenseMatrix ug = u.times(g);
    out.estimates = ug.col(0).cwiseAbs();
    for (Index i = 0; i < n; ++i) scores[i] = std::pow(out.estimates[i], opt.m_power);
    r = std::pow(static_cast<double>(d), opt.m_power / 2.0) * std::pow(opt.r1, opt.m_power + 1.0);
  } else {
    const Index t = opt.t_m > 0 ? opt.t_m : static_cast<Index>(std::ceil(3.0 / opt.kappa));
    const double kappa = 3.0 / static_cast<double>(t);
    out.t_m = t;
    const DenseMatrix g = gaussian_matrix(d, t, 1.0 / std::sqrt(static_cast<double>(t)), rng);
    const DenseMatrix ug = u.times(g);
    out.estimates = ug.rowwise().norm();
    for (Index i = 0; i < n; ++i) {
      const double e = out.estimates[i];
      scores[i] = std::max(opt.beta * e / opt.c_m, opt.beta * opt.beta * e * e);
    }
    const double nn = std::max<double>(static_cast<double>(n), 2.0);
    r = opt.r1 * std::pow(nn, kappa) * std::log(nn);
  }
  out.plan = make_plan(scores, r, opt.k2);
  return out;
}

}  // namespace robsub
