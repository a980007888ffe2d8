#include "robsub/regression.hpp"

#include "robsub/errors.hpp"
#include "robsub/pipeline.hpp"
#include "robsub/rng.hpp"
#include "robsub/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace robsub {

namespace {

double objective(const DenseMatrix& a, const Vector& b, const Vector& x, const WeightVector& w,
                 const LossSpec& loss) {
  const Vector r = (b - a * x).cwiseAbs();
  return cost_from_row_norms(r, w, loss);
}

Vector weighted_ls(const DenseMatrix& a, const Vector& b, const Vector& omega) {
  const Vector s = omega.cwiseSqrt();
  const DenseMatrix sa = s.asDiagonal() * a;
  const Vector sb = s.cwiseProduct(b);
  return sa.completeOrthogonalDecomposition().solve(sb);
}

}  // namespace

double regression_cost(const Matrix& a, const Vector& b, const Vector& x, const WeightVector& w,
                       const LossSpec& loss) {
  if (a.rows() != b.size() || a.cols() != x.size() || w.size() != a.rows())
    throw InputError("regression cost: shape mismatch");
  const Vector r = (b - a.times(x)).cwiseAbs();
  return cost_from_row_norms(r, w, loss);
}

double regression_cost(const Matrix& a, const Vector& b, const Vector& x, const LossSpec& loss) {
  return regression_cost(a, b, x, WeightVector::ones(a.rows()), loss);
}

IrlsResult irls_solve(const Matrix& am, const Vector& b, const WeightVector& w, const LossSpec& loss,
                      const IrlsOptions& opt) {
  if (!loss.convex()) throw InputError("irls: loss must be convex");
  if (am.rows() != b.size() || w.size() != am.rows()) throw InputError("irls: shape mismatch");
  const DenseMatrix a = am.to_dense();
  IrlsResult res;
  res.x = weighted_ls(a, b, w.values());
  double f = objective(a, b, res.x, w, loss);
  res.history.push_back(f);

  Vector omega(a.rows());
  for (int it = 0; it < opt.max_iter; ++it) {
    res.iterations = it + 1;
    const Vector r = b - a * res.x;
    for (Index i = 0; i < r.size(); ++i) omega[i] = w[i] * loss.half_slope(std::abs(r[i]), opt.floor);
    const Vector proposal = weighted_ls(a, b, omega);
    Vector step = proposal - res.x;
    double t = 1.0;
    Vector x_new = proposal;
    double f_new = objective(a, b, x_new, w, loss);
    while (f_new > f + 1e-12 * std::max(1.0, std::abs(f)) && t > 1e-9) {
      t *= 0.5;
      ++res.step_halvings;
      x_new = res.x + t * step;
      f_new = objective(a, b, x_new, w, loss);
    }
    if (f_new > f) {
      res.converged = true;
      break;
    }
    const double decrease = f - f_new;
    res.x = x_new;
    f = f_new;
    res.history.push_back(f);
    const double moved = t * step.norm();
    if (decrease <= opt.tol * std::max(f, 1e-300) && moved <= opt.x_tol * (1.0 + res.x.norm())) {
      res.converged = true;
      break;
    }
  }
  res.objective = f;
  return res;
}

RegressionResult m_regress(const Matrix& a, const Vector& b, const LossSpec& loss, double eps,
                           std::uint64_t seed, const RegressionConfig& cfg, const WeightVector* w) {
  if (!loss.convex()) throw InputError("m_regress: loss must be convex");
  if (a.rows() != b.size()) throw InputError("m_regress: rows of A must match length of b");
  if (w != nullptr && w->size() != a.rows()) throw InputError("m_regress: weight length mismatch");
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("m_regress: eps must lie in (0, 1)");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw InputError("m_regress: delta must lie in (0, 1)");
  const Index d = a.cols();
  const double dd = static_cast<double>(d);
  const Index base_cap =
      cfg.base_cap.value_or(static_cast<Index>(std::ceil(20.0 * dd * dd / (eps * eps))));

  RegressionResult out;
  Matrix cur_a = a;
  Vector cur_b = b;
  const WeightVector full_w = w != nullptr ? *w : WeightVector::ones(a.rows());
  WeightVector cur_w = full_w;
  for (int level = 0; level < cfg.max_levels; ++level) {
    const Index n = cur_a.rows();
    out.sizes.push_back(n);
    if (n <= base_cap) break;
    const Matrix ab = cur_a.append_column(cur_b);
    const ScoreEstimate est = estimate_leverage_scores(
        ab, nullptr, cur_w, loss, derive_seed(seed, streams::kStable, static_cast<std::uint64_t>(level)),
        cfg.kappa, cfg.conditioning);
    if (!(est.gamma_hat > 0.0)) break;
    const double nn = static_cast<double>(n);
    const double r = cfg.c_size * std::pow(nn, 0.5 + cfg.kappa) * (dd + 1.0) *
                     std::log(1.0 / cfg.delta) / (eps * eps);
    const SamplingPlan plan = make_plan(est.scores, r, 1.0);
    const SampleDraw sd = draw(plan, cur_w, derive_seed(seed, streams::kDraw, static_cast<std::uint64_t>(level)),
                               DrawMode::M2Weight);
    if (sd.size() == 0 || sd.size() >= n) break;
    const SampledRows rows = apply_draw(cur_a, sd);
    Vector nb(sd.size());
    for (Index t = 0; t < sd.size(); ++t) nb[t] = cur_b[sd.indices[static_cast<std::size_t>(t)]];
    cur_a = rows.rows;
    cur_b = nb;
    cur_w = rows.weights;
    ++out.levels;
  }
  if (out.sizes.empty() || out.sizes.back() != cur_a.rows()) out.sizes.push_back(cur_a.rows());
  out.base = irls_solve(cur_a, cur_b, cur_w, loss, cfg.irls);
  out.x = out.base.x;
  out.cost = regression_cost(a, b, out.x, full_w, loss);
  return out;
}

}  // namespace robsub
