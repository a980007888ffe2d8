// Acceptance suite: one PASS/FAIL line per criterion with its runtime.
// Exit status is nonzero when any criterion fails.

#include "common/helpers.hpp"
#include "common/properties.hpp"

#include "robsub/bicriteria.hpp"
#include "robsub/conditioning.hpp"
#include "robsub/dimreduce.hpp"
#include "robsub/hardness.hpp"
#include "robsub/oracle.hpp"
#include "robsub/pipeline.hpp"
#include "robsub/regression.hpp"
#include "robsub/rng.hpp"
#include "robsub/sampling.hpp"
#include "robsub/sketch.hpp"
#include "robsub/small_approx.hpp"
#include "robsub/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace robsub;
using testing::Stopwatch;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

PlantedData planted(Index n, Index d, Index k, double noise, double outliers, std::uint64_t seed) {
  PlantedOptions po;
  po.n = n;
  po.d = d;
  po.k = k;
  po.noise = noise;
  po.outlier_fraction = outliers;
  po.seed = seed;
  return planted_low_rank(po);
}

// Sum_i ||e_i - V V^T e_i||^p, by explicit projection.
double simplex_cost_direct(const DenseMatrix& v, double p) {
  const Index d = v.rows();
  const DenseMatrix resid = DenseMatrix::Identity(d, d) - v * v.transpose();
  double total = 0.0;
  for (Index i = 0; i < d; ++i) total += std::pow(resid.row(i).norm(), p);
  return total;
}

Outcome simplex_optimality() {
  Rng rng(101);
  double worst_coord = 0.0, worst_random = 0.0, worst_agree = 0.0;
  long subsets = 0, randoms = 0;
  for (Index d = 4; d <= 8; ++d) {
    for (Index k = 1; k < d; ++k) {
      for (double p : {1.0, 1.5}) {
        const double target = static_cast<double>(d - k);
        std::vector<bool> pick(d, false);
        std::fill(pick.begin(), pick.begin() + k, true);
        double best = 1e300;
        do {
          DenseMatrix v = DenseMatrix::Zero(d, k);
          Index c = 0;
          for (Index i = 0; i < d; ++i)
            if (pick[i]) v(i, c++) = 1.0;
          const double cost = simplex_cost(v, p);
          worst_agree = std::max(worst_agree, std::abs(cost - simplex_cost_direct(v, p)));
          best = std::min(best, cost);
          ++subsets;
        } while (std::prev_permutation(pick.begin(), pick.end()));
        worst_coord = std::max(worst_coord, std::abs(best - target));
        for (int t = 0; t < 1000; ++t) {
          const DenseMatrix v = random_orthonormal(d, k, rng);
          const double cost = simplex_cost(v, p);
          worst_agree = std::max(worst_agree, std::abs(cost - simplex_cost_direct(v, p)) / std::max(1.0, cost));
          worst_random = std::max(worst_random, target - cost);
          ++randoms;
        }
      }
    }
  }
  Outcome o;
  o.pass = worst_coord <= 1e-9 && worst_random <= 1e-9 && worst_agree <= 1e-9;
  o.detail = fmt("%ld coordinate sets, max |min - (d-k)| = %.2e; %ld random subspaces, max shortfall = %.2e",
                 subsets, worst_coord, randoms, worst_random);
  return o;
}

Outcome hardness_gap() {
  const double p = 1.0;
  const auto k4 = gen_gadget(complete_graph(4), 3, 1e4);
  const auto pet = gen_gadget(petersen_graph(), 3, 1e4);
  const auto best_k4 = brute_force_best_coordinate(k4, p);
  const auto best_pet = brute_force_best_coordinate(pet, p);
  const double margin = excess_cost(pet, best_pet.cost) - excess_cost(k4, best_k4.cost);
  const double bound = clique_margin_bound(1e4, 3, 3, p);
  Outcome o;
  o.pass = margin > 0.0 && margin <= 10.0 * bound && margin >= bound / 10.0;
  o.detail = fmt("margin %.4e, bound %.4e, ratio %.3f", margin, bound, margin / bound);
  return o;
}

Outcome norm_inequalities() {
  Outcome o;
  o.pass = true;
  std::ostringstream os;
  for (const auto& s : testing::all_norm_suites(7)) {
    os << s.name << " " << s.violations << "/" << s.cases << "; ";
    if (s.cases < 500 || s.violations != 0) {
      o.pass = false;
      os << "(" << s.first_violation << ") ";
    }
  }
  o.detail = os.str();
  return o;
}

Outcome sampling_concentration() {
  Rng rng(404);
  const Index n = 2000, d = 30, z = 3;
  const DenseMatrix a = gaussian_matrix(n, d, 1.0, rng);
  const DenseMatrix w = random_orthonormal(d, z, rng);
  const Matrix aw(DenseMatrix(a * w));
  const WeightVector ones = WeightVector::ones(n);
  Outcome o;
  o.pass = true;
  std::ostringstream os;
  for (const auto& loss : {LossSpec::lp(1.0), LossSpec::huber(1.0)}) {
    const auto lev = weighted_leverage_scores(aw, ones, loss, 405);
    const double r = sample_size_subspace(static_cast<double>(z), 0.2, 0.1, lev.gamma_total, 8.0);
    const auto plan = make_plan(lev.gamma, r, 1.0);
    const double truth = std::pow(v_norm_p(aw, loss), 1.0 / loss.p());
    const DrawMode mode = loss.is_lp() ? DrawMode::LpScale : DrawMode::M2Weight;
    int good = 0;
    const int draws = 200;
    for (int t = 0; t < draws; ++t) {
      const auto rows = apply_draw(aw, draw(plan, ones, derive_seed(406, streams::kDraw, t), mode, loss.p()));
      const double est = std::pow(v_norm_p(rows.rows, rows.weights, loss), 1.0 / loss.p());
      if (std::abs(est - truth) <= 0.2 * truth) ++good;
    }
    os << loss.name() << ": " << good << "/" << draws << " within 20%, expected rows " << plan.expected_size()
       << "; ";
    if (good < 170) o.pass = false;
  }
  o.detail = os.str();
  return o;
}

Outcome sketch_quality() {
  const Index n = 300, d = 40, k = 3;
  const Index m = 40 * k * k;
  const auto l1 = LossSpec::lp(1.0);
  int good = 0;
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    const auto data = planted(n, d, k, 0.1, 0.02, derive_seed(501, 0, s));
    const Matrix a(data.a);
    const auto sk = make_sparse_sketch(derive_seed(502, streams::kSparseSketch, s), m, d, 4);
    const DenseMatrix ar = apply_right(a, sk);
    const DenseMatrix x = ar.completeOrthogonalDecomposition().solve(data.a);
    const double cost = v_norm_p(Matrix(DenseMatrix(ar * x - data.a)), l1);
    const double svd = svd_truncation_cost(a, k, l1).cost;
    worst = std::max(worst, cost / svd);
    if (cost <= 2.5 * svd) ++good;
  }
  Outcome o;
  o.pass = good >= 90;
  o.detail = fmt("%d/100 seeds within 2.5x of the SVD cost (m = %d columns, worst ratio %.3g)", good,
                 static_cast<int>(m), worst);
  return o;
}

Outcome exact_recovery() {
  const auto l1 = LossSpec::lp(1.0);
  int good = 0;
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    const auto data = planted(1000, 40, 4, 0.0, 0.0, derive_seed(601, 0, s));
    const Matrix a(data.a);
    const auto res = approx_lp(a, 4, 0.25, l1, s);
    const double rel = residual_cost(a, res.v, l1) / v_norm_p(a, l1);
    worst = std::max(worst, rel);
    if (rel <= 1e-6) ++good;
  }
  Outcome o;
  o.pass = good >= 18;
  o.detail = fmt("%d/20 seeds at relative cost <= 1e-6 (worst %.2e)", good, worst);
  return o;
}

Outcome robustness_vs_svd() {
  const auto l1 = LossSpec::lp(1.0);
  const auto hub = LossSpec::huber(1.0);
  int good_l1 = 0, good_hub = 0;
  const int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    const auto data = planted(400, 20, 3, 0.05, 0.01, derive_seed(701, 0, s));
    const Matrix a(data.a);
    if (residual_cost(a, approx_lp(a, 3, 0.25, l1, s).v, l1) < svd_truncation_cost(a, 3, l1).cost) ++good_l1;
    if (residual_cost(a, approx_m2(a, 3, 0.25, hub, s).v, hub) < svd_truncation_cost(a, 3, hub).cost) ++good_hub;
  }
  Outcome o;
  o.pass = good_l1 >= 40 && good_hub >= 38;
  o.detail = fmt("l1 beats SVD on %d/50, huber on %d/50", good_l1, good_hub);
  return o;
}

Outcome dimreduce_quality() {
  const auto l1 = LossSpec::lp(1.0);
  const Index n = 600, d = 30, k = 2;
  BicriteriaConfig bcfg;
  bcfg.p_m_override = 3 * k;
  int good = 0, contained = 0;
  double worst_gap = 0.0, worst_ratio = 0.0;
  const int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    const auto data = planted(n, d, k, 0.1, 0.02, derive_seed(801, 0, s));
    const Matrix a(data.a);
    const auto bic = const_approx(a, k, l1, s, bcfg);
    DimReduceConfig cfg;
    cfg.r1_override = 3.0;
    cfg.seed = derive_seed(802, 0, s);
    const auto out = dim_reduce(a, k, bic.u, l1, cfg);
    const double gap = out.u.containment_gap(bic.u.basis());
    worst_gap = std::max(worst_gap, gap);
    if (gap <= 1e-8) ++contained;
    const auto inside = testing::best_rank_k_inside(a, out.u.basis(), k, l1, s);
    const auto ref = testing::reference_optimum(a, k, l1, s);
    const double ratio = inside.cost / ref.cost;
    worst_ratio = std::max(worst_ratio, ratio);
    if (ratio <= 1.25) ++good;
  }
  Outcome o;
  o.pass = contained == seeds && good >= 40;
  o.detail = fmt("containment gap max %.2e; best-inside within 1.25x of reference on %d/50 (worst %.3f)",
                 worst_gap, good, worst_ratio);
  return o;
}

Outcome regression_quality() {
  const auto hub = LossSpec::huber(1.0);
  const Index n = 10000, d = 20;
  int good = 0;
  bool monotone = true;
  double worst = 0.0;
  Index largest_base = 0;
  const int seeds = 50;
  auto check_monotone = [&](const IrlsResult& r) {
    for (std::size_t t = 1; t < r.history.size(); ++t)
      if (r.history[t] > r.history[t - 1] * (1.0 + 1e-12)) monotone = false;
  };
  for (int s = 0; s < seeds; ++s) {
    Rng rng(derive_seed(901, 0, s));
    const DenseMatrix x = gaussian_matrix(n, d, 1.0, rng);
    const Vector truth = gaussian_matrix(d, 1, 1.0, rng).col(0);
    Vector b = x * truth + 0.5 * gaussian_matrix(n, 1, 1.0, rng).col(0);
    std::uniform_int_distribution<Index> pick(0, n - 1);
    for (Index t = 0; t < n / 20; ++t) b[pick(rng)] += 100.0;
    RegressionConfig cfg;
    cfg.c_size = 0.002;
    cfg.base_cap = 500;
    const Matrix a(x);
    const auto sampled = m_regress(a, b, hub, 0.1, s, cfg);
    const auto full = irls_solve(a, b, WeightVector::ones(n), hub);
    check_monotone(sampled.base);
    check_monotone(full);
    largest_base = std::max(largest_base, sampled.sizes.back());
    const double ratio = sampled.cost / full.objective;
    worst = std::max(worst, ratio);
    if (ratio <= 1.1) ++good;
  }
  Outcome o;
  o.pass = good >= 45 && monotone;
  o.detail = fmt("sampled/full <= 1.1 on %d/50 (worst %.4f, base rows <= %d of %d); IRLS monotone: %s", good,
                 worst, static_cast<int>(largest_base), static_cast<int>(n), monotone ? "yes" : "no");
  return o;
}

// P(chi^2 with dof (even) degrees of freedom <= x).
double chi2_cdf_even(int dof, double x) {
  double term = 1.0, sum = 1.0;
  for (int j = 1; j < dof / 2; ++j) {
    term *= (x / 2.0) / j;
    sum += term;
  }
  return 1.0 - std::exp(-x / 2.0) * sum;
}

Outcome gaussian_calibration() {
  std::ostringstream os;
  // t = 1: |A_i g| / ||A_i|| has mean sqrt(2/pi).
  Rng rng(1001);
  const DenseMatrix a1 = gaussian_matrix(10, 8, 1.0, rng);
  const Vector norms1 = Matrix(a1).row_norms();
  double sum = 0.0;
  long count = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto g = make_gaussian_sketch(derive_seed(1002, streams::kGaussian, t), 8, 1);
    const Vector est = gaussian_row_norm_estimates(Matrix(a1), nullptr, g);
    for (Index i = 0; i < est.size(); ++i, ++count) sum += est[i] / norms1[i];
  }
  const double ratio = (sum / count) / std::sqrt(2.0 / std::numbers::pi);
  const bool part_a = std::abs(ratio - 1.0) <= 0.02;
  os << "t=1 mean ratio " << fmt("%.4f", ratio) << " over " << count << " draws; ";

  // t = ceil(3/kappa): every row must satisfy g_i >= ||A_i||^2 / n^kappa.
  const double kappa = 0.1;
  const Index n = 1000, d = 8;
  const auto t = static_cast<Index>(std::ceil(3.0 / kappa));
  const DenseMatrix a2 = gaussian_matrix(n, d, 1.0, rng);
  const Vector sq = Matrix(a2).row_norms().array().square();
  const double thresh = std::pow(static_cast<double>(n), -kappa);
  const int seeds = 200;
  int violated = 0;
  for (int s = 0; s < seeds; ++s) {
    const auto g = make_gaussian_sketch(derive_seed(1003, streams::kGaussian, s), d, t);
    const Vector est = gaussian_row_norm_estimates(Matrix(a2), nullptr, g);
    bool bad = false;
    for (Index i = 0; i < n && !bad; ++i) bad = est[i] * est[i] < thresh * sq[i];
    if (bad) ++violated;
  }
  const double p_row = chi2_cdf_even(static_cast<int>(t), static_cast<double>(t) * thresh);
  const double p_seed = 1.0 - std::pow(1.0 - p_row, static_cast<double>(n));
  const bool part_b = violated < seeds / 100.0;
  os << "t=" << t << " min-row bound violated on " << violated << "/" << seeds << " seeds (chi-square per row "
     << fmt("%.4f", p_row) << ", independent-rows seed rate " << fmt("%.4f", p_seed) << ")";
  return {part_a && part_b, os.str()};
}

Outcome nnz_scaling() {
  const Index n = 20000, d = 400, k = 3;
  const auto sketch = make_sparse_sketch(1101, 40 * k * k, d, 4);
  std::vector<double> xs, ys;
  for (double density : {0.02, 0.05, 0.1, 0.2}) {
    const Matrix a(random_sparse(n, d, density, 1102));
    double best = 1e300;
    for (int r = 0; r < 3; ++r) {
      Stopwatch sw;
      const DenseMatrix out = apply_right(a, sketch);
      best = std::min(best, sw.seconds());
      if (out.rows() != n) return {false, "bad output shape"};
    }
    xs.push_back(static_cast<double>(a.nnz()));
    ys.push_back(best);
  }
  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double cov = sxy - sx * sy / m, vx = sxx - sx * sx / m, vy = syy - sy * sy / m;
  const double r2 = vy > 0.0 ? cov * cov / (vx * vy) : 0.0;
  std::ostringstream os;
  os << "R^2 " << fmt("%.4f", r2) << "; (nnz, s):";
  for (std::size_t i = 0; i < xs.size(); ++i) os << fmt(" (%.0f, %.4f)", xs[i], ys[i]);
  return {r2 >= 0.9 && cov > 0.0, os.str()};
}

Outcome small_approx_sanity() {
  const auto l1 = LossSpec::lp(1.0);
  int within = 0;
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    Rng rng(derive_seed(1201, 0, s));
    SmallProblem prob;
    prob.a_hat = gaussian_matrix(8, 8, 1.0, rng);
    prob.b = DenseMatrix::Identity(8, 8);
    prob.c = prob.a_hat;
    prob.w = WeightVector::ones(8);
    prob.k = 2;
    const auto ls = small_approx(prob, l1, SmallMethod::LocalSearch, s);
    const auto ex = small_approx(prob, l1, SmallMethod::ExhaustiveTiny, s);
    worst = std::max(worst, ls.cost / ex.cost);
    if (ls.cost <= 1.05 * ex.cost) ++within;
  }
  int recovered = 0;
  double worst_planted = 0.0;
  for (int s = 0; s < 10; ++s) {
    Rng rng(derive_seed(1202, 0, s));
    SmallProblem prob;
    prob.a_hat = gaussian_matrix(60, 8, 1.0, rng);
    prob.b = gaussian_matrix(8, 10, 1.0, rng);
    const DenseMatrix w0 = random_orthonormal(8, 2, rng);
    prob.c = prob.a_hat * w0 * w0.transpose() * prob.b;
    prob.w = WeightVector::ones(60);
    prob.k = 2;
    const auto res = small_approx(prob, l1, SmallMethod::LocalSearch, s);
    worst_planted = std::max(worst_planted, res.cost);
    if (res.cost <= 1e-8) ++recovered;
  }
  Outcome o;
  o.pass = within == 20 && recovered == 10;
  o.detail = fmt("local search within 1.05x on %d/20 (worst %.4f); planted recovered %d/10 (worst cost %.2e)",
                 within, worst, recovered, worst_planted);
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "simplex optimality", 2, simplex_optimality},
      {2, "hardness gap", 5, hardness_gap},
      {3, "norm inequalities", 5, norm_inequalities},
      {4, "sampling concentration", 30, sampling_concentration},
      {5, "sketch quality", 60, sketch_quality},
      {6, "exact recovery", 60, exact_recovery},
      {7, "robustness vs SVD", 180, robustness_vs_svd},
      {8, "dimreduce containment and quality", 120, dimreduce_quality},
      {9, "regression", 120, regression_quality},
      {10, "gaussian estimator calibration", 30, gaussian_calibration},
      {11, "nnz scaling", 120, nnz_scaling},
      {12, "small_approx sanity", 60, small_approx_sanity},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Stopwatch sw;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = sw.seconds();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s [%2d] %s (%.2f s, budget %.0f s%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                c.budget_seconds, in_time ? "" : ", over budget", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
