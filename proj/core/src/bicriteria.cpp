#include "robsub/bicriteria.hpp"

#include "robsub/errors.hpp"
#include "robsub/rng.hpp"
#include "robsub/sampling.hpp"
#include "robsub/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace robsub {

Index bicriteria_row_budget(Index k, Index n, const LossSpec& loss, const BicriteriaConfig& cfg) {
  if (cfg.p_m_override) return std::max<Index>(1, *cfg.p_m_override);
  const double kk = static_cast<double>(k);
  double pm = cfg.pm_multiplier * kk * kk;
  if (!loss.is_lp()) pm *= std::ceil(std::pow(std::log2(static_cast<double>(n) + 2.0), 3.0));
  return std::max<Index>(1, static_cast<Index>(std::ceil(pm)));
}

double logloglog(double n) {
  if (n <= 4.0) return 1.0;
  const double l2 = std::log2(std::log2(n));
  if (l2 <= 2.0) return 1.0;
  return std::max(1.0, std::log2(l2));
}

namespace {

struct Level {
  Matrix proj;
  Matrix hat;
  WeightVector w;
  std::vector<Index> origin;
};

Level sample_level(const Level& cur, const LossSpec& loss, const BicriteriaConfig& cfg,
                   std::uint64_t seed) {
  const Index n = cur.proj.rows();
  const LeverageScores lev =
      weighted_leverage_scores(cur.proj, cur.w, loss, seed, nullptr, cfg.conditioning);
  const double dprime = static_cast<double>(cur.proj.cols());
  double r = cfg.c_poly * dprime * dprime * lev.gamma_total;
  if (!loss.is_lp()) r *= cfg.c_loglog * logloglog(static_cast<double>(n));

  Level next;
  if (!(lev.gamma_total > 0.0)) {
    // A_proj is zero: any single row already spans everything it can.
    next.proj = cur.proj.select_rows(std::vector<Index>{0});
    next.hat = cur.hat.select_rows(std::vector<Index>{0});
    next.w = WeightVector(Vector::Constant(1, cur.w.l1()));
    next.origin = {cur.origin[0]};
    return next;
  }
  const SamplingPlan plan = make_plan(lev.gamma, r, 1.0);
  const DrawMode mode = loss.is_lp() ? DrawMode::LpScale : DrawMode::M2Weight;
  const SampleDraw sd = draw(plan, cur.w, seed, mode, loss.p());
  const SampledRows sp = apply_draw(cur.proj, sd);
  next.proj = sp.rows;
  next.hat = apply_draw(cur.hat, sd).rows;
  next.w = sp.weights;
  next.origin.reserve(sd.indices.size());
  for (Index i : sd.indices) next.origin.push_back(cur.origin[i]);
  return next;
}

}  // namespace

RecurResult const_approx_recur(const Matrix& a_proj, const Matrix& a_hat, const WeightVector& w,
                               const LossSpec& loss, Index p_m, std::uint64_t seed,
                               const BicriteriaConfig& cfg) {
  if (a_proj.rows() != a_hat.rows() || w.size() != a_proj.rows())
    throw InputError("const_approx_recur: row counts of A, A-hat and w must agree");
  const Index n0 = a_proj.rows();
  const double lln = std::log2(std::max(2.0, std::log2(std::max<double>(n0, 2.0))));
  const int depth_cap = static_cast<int>(4.0 * lln) + 8;

  Level cur{a_proj, a_hat, w, std::vector<Index>(static_cast<std::size_t>(n0))};
  std::iota(cur.origin.begin(), cur.origin.end(), Index{0});

  RecurResult out;
  int depth = 0;
  while (true) {
    const Index n = cur.proj.rows();
    out.level_sizes.push_back(n);
    if (n <= p_m) break;
    if (depth >= depth_cap)
      throw NumericalError("const_approx_recur: recursion depth exceeded " +
                           std::to_string(depth_cap));
    Level next = sample_level(cur, loss, cfg, derive_seed(seed, streams::kRecursion, 2 * depth));
    const auto shrunk = [&](const Level& l) {
      return l.proj.rows() <= p_m || static_cast<double>(l.proj.rows()) <= 0.9 * static_cast<double>(n);
    };
    if (!shrunk(next)) {
      next = sample_level(cur, loss, cfg, derive_seed(seed, streams::kRecursion, 2 * depth + 1));
      if (!shrunk(next)) {
        out.shrink_failed = true;
        break;
      }
    }
    cur = std::move(next);
    ++depth;
  }
  out.rows = cur.hat;
  out.weights = cur.w;
  out.origin = cur.origin;
  out.depth = depth;
  return out;
}

BicriteriaResult const_approx(const Matrix& a, Index k, const LossSpec& loss, std::uint64_t seed,
                              const BicriteriaConfig& cfg) {
  if (k < 1) throw InputError("const_approx: k must be at least 1");
  const Index n = a.rows();
  const Index d = a.cols();
  if (n == 0 || d == 0) throw InputError("const_approx: empty matrix");

  BicriteriaResult out;
  out.k_used = std::min({k, n, d});
  out.k_clamped = out.k_used != k;
  const double kk = static_cast<double>(out.k_used);
  const auto m = static_cast<Index>(std::ceil(cfg.c_sketch * kk * kk));

  Matrix ar;
  if (m >= d) {
    out.sketch_skipped = true;
    out.sketch_cols = d;
    ar = a;
  } else {
    const Index s = std::min<Index>(m, std::max<Index>(1, static_cast<Index>(std::ceil(2.0 / cfg.eps_const))));
    const SparseSketch r = make_sparse_sketch(derive_seed(seed, streams::kSparseSketch), m, d, s);
    ar = apply_right(a, r);
    out.sketch_cols = m;
  }

  out.p_m = bicriteria_row_budget(out.k_used, n, loss, cfg);
  out.recursion = const_approx_recur(ar, a, WeightVector::ones(n), loss, out.p_m, seed, cfg);
  out.u = orthonormal_union({out.recursion.rows.to_dense()}, d);
  return out;
}

}  // namespace robsub
