#include "robsub/pipeline.hpp"

#include "robsub/errors.hpp"
#include "robsub/rng.hpp"
#include "robsub/sampling.hpp"
#include "robsub/sketch.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

namespace robsub {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Ensures U has at least k columns by appending random orthogonal directions.
Subspace pad_to(const Subspace& u, Index k, std::uint64_t seed) {
  if (u.dim() >= k) return u;
  Rng rng(derive_seed(seed, streams::kCandidates));
  std::vector<DenseMatrix> blocks;
  if (u.dim() > 0) blocks.push_back(u.basis().transpose());
  blocks.push_back(gaussian_matrix(k, u.ambient_dim(), 1.0, rng));
  const Subspace grown = orthonormal_union(blocks, u.ambient_dim());
  return Subspace(grown.basis().leftCols(k));
}

struct Front {
  Subspace u = Subspace::empty(0);
  std::optional<SparseSketch> s;
  DenseMatrix h;  // [S^T U], empty when S is skipped
};

/// Stages shared by both paths: bicriteria, residual sampling, embedding S.
Front front_stages(const Matrix& a, Index& k, double eps, const LossSpec& loss, std::uint64_t seed,
                   const PipelineConfig& cfg, PipelineResult& out) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("approx: eps must lie in (0, 1)");
  if (k < 1) throw InputError("approx: k must be at least 1");
  const Index d = a.cols();

  auto t0 = Clock::now();
  BicriteriaConfig bcfg = cfg.bicriteria;
  bcfg.conditioning = cfg.conditioning;
  const BicriteriaResult bic = const_approx(a, k, loss, derive_seed(seed, streams::kRecursion, 1000), bcfg);
  out.timings_seconds.emplace_back("bicriteria", seconds_since(t0));
  k = bic.k_used;
  out.k_used = k;
  out.k_clamped = bic.k_clamped;
  out.bicriteria_dim = bic.u.dim();
  out.bicriteria_p_m = bic.p_m;
  out.bicriteria_depth = bic.recursion.depth;
  out.bicriteria_shrink_failed = bic.recursion.shrink_failed;

  t0 = Clock::now();
  DimReduceConfig dcfg = cfg.dimreduce;
  dcfg.eps = eps;
  dcfg.seed = derive_seed(seed, streams::kGaussian, 1000);
  const DimReduceResult dr = dim_reduce(a, k, bic.u, loss, dcfg);
  out.timings_seconds.emplace_back("dimreduce", seconds_since(t0));
  out.dimreduce_dim = dr.u.dim();
  out.dimreduce_sample = dr.sample_size;
  out.dimreduce_expected = dr.expected_sample_size;

  Front f;
  f.u = pad_to(dr.u, k, seed);
  out.search_space = f.u;
  const double m = static_cast<double>(f.u.dim());
  const auto rows = static_cast<Index>(std::ceil(cfg.c_lopsided * m * m));
  if (rows >= d) {
    out.lopsided_skipped = true;
    out.lopsided_cols = d;
  } else {
    Index s = cfg.lopsided_sparsity;
    if (s <= 0) s = std::max<Index>(1, static_cast<Index>(std::ceil(2.0 / cfg.bicriteria.eps_const)));
    s = std::min(s, rows);
    f.s = make_sparse_sketch(derive_seed(seed, streams::kLopsided), rows, d, s);
    out.lopsided_cols = rows;
    f.h.resize(d, rows + f.u.dim());
    f.h << f.s->to_dense().transpose(), f.u.basis();
  }
  return f;
}

SmallProblem build_small(const Matrix& ta, const WeightVector& w, const Front& f, Index k, double eps) {
  SmallProblem prob;
  const DenseMatrix& u = f.u.basis();
  prob.a_hat = ta.times(u);
  if (f.s) {
    prob.b = (f.s->to_dense() * u).transpose();
    prob.c = apply_right(ta, *f.s);
  } else {
    prob.b = u.transpose();
    prob.c = ta.to_dense();
  }
  prob.w = w;
  prob.k = k;
  prob.eps = eps;
  return prob;
}

Subspace finish(const Front& f, const SmallResult& sr, Index k) {
  DenseMatrix v = f.u.basis() * sr.w;
  if (v.cols() > k) v.conservativeResize(Eigen::NoChange, k);
  // Guard against round-off drift before the orthonormality check.
  Eigen::HouseholderQR<DenseMatrix> qr(v);
  DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(v.rows(), v.cols());
  for (Index j = 0; j < q.cols(); ++j)
    if (qr.matrixQR()(j, j) < 0) q.col(j) = -q.col(j);
  return Subspace(q);
}

double loglog(double n) { return std::max(1.0, std::log2(std::max(2.0, std::log2(std::max(n, 2.0))))); }

}  // namespace

ScoreEstimate estimate_leverage_scores(const Matrix& a, const DenseMatrix* h, const WeightVector& w,
                                       const LossSpec& loss, std::uint64_t seed, double kappa,
                                       const ConditioningConfig& cfg) {
  if (w.size() != a.rows()) throw InputError("score estimates: weight length mismatch");
  const double p = loss.p();
  const double basis_p = loss.is_lp() ? p : 2.0;
  ScoreEstimate out;
  out.scores = Vector::Zero(a.rows());
  const auto buckets = w.buckets();
  const double moment = half_normal_moment(p);
  const auto t = static_cast<Index>(std::ceil(3.0 / kappa));
  for (std::size_t j = 0; j < buckets.size(); ++j) {
    const auto& rows = buckets[j];
    if (rows.empty()) continue;
    const Matrix sub = a.select_rows(rows);
    const WellConditionedBasis basis =
        well_conditioned_basis(sub, h, basis_p, derive_seed(seed, streams::kBasis, j + 1), cfg);
    if (basis.rank() == 0) continue;
    Rng rng(derive_seed(seed, streams::kGaussian, j + 1));
    const double beta = basis.beta;
    if (loss.is_lp()) {
      const DenseMatrix ug = basis.times(sub, gaussian_matrix(basis.rank(), 1, 1.0, rng));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const double e = std::abs(ug(static_cast<Index>(i), 0));
        out.scores[rows[i]] = 2.0 * std::pow(beta * e, p) / moment;
      }
    } else {
      const DenseMatrix g = gaussian_matrix(basis.rank(), t, 1.0 / std::sqrt(static_cast<double>(t)), rng);
      const DenseMatrix ug = basis.times(sub, g);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const double e = ug.row(static_cast<Index>(i)).norm();
        out.scores[rows[i]] = 2.0 * std::max(beta * e / loss.c_m(), beta * beta * e * e);
      }
    }
  }
  out.gamma_hat = pairwise_sum(std::span<const double>(out.scores.data(), static_cast<std::size_t>(out.scores.size())));
  return out;
}

PipelineResult approx_lp(const Matrix& a, Index k, double eps, const LossSpec& loss,
                         std::uint64_t seed, const PipelineConfig& cfg) {
  if (!loss.is_lp()) throw InputError("approx_lp: needs an Lp loss");
  PipelineResult out;
  const Front f = front_stages(a, k, eps, loss, seed, cfg, out);
  const double p = loss.p();
  const Index n = a.rows();

  auto t0 = Clock::now();
  const DenseMatrix* h = f.s ? &f.h : nullptr;
  const ScoreEstimate est = estimate_leverage_scores(a, h, WeightVector::ones(n), loss,
                                                     derive_seed(seed, streams::kStable, 1000), cfg.kappa,
                                                     cfg.conditioning);
  Matrix ta = a;
  WeightVector tw = WeightVector::ones(n);
  if (est.gamma_hat > 0.0) {
    const double d_hat = static_cast<double>(h ? h->cols() : a.cols());
    const double r1 = est.gamma_hat * cfg.r1_multiplier * static_cast<double>(k) / eps;
    const double c = cfg.c_exponent.value_or(p);
    const double r = std::pow(d_hat, p / 2.0) * std::pow(r1, c + 1.0);
    const SamplingPlan plan = make_plan(est.scores, std::min(r, 1e300), cfg.k2);
    const SampleDraw sd = draw(plan, tw, derive_seed(seed, streams::kDraw, 1000), DrawMode::LpScale, p);
    const SampledRows sr = apply_draw(a, sd);
    ta = sr.rows;
    tw = sr.weights;
  }
  out.timings_seconds.emplace_back("row_sampling", seconds_since(t0));
  out.small_rows = ta.rows();

  t0 = Clock::now();
  const SmallProblem prob = build_small(ta, tw, f, k, eps);
  const SmallResult sr = small_approx(prob, loss, SmallMethod::LocalSearch,
                                      derive_seed(seed, streams::kRestart, 1000), cfg.small);
  out.timings_seconds.emplace_back("small_solve", seconds_since(t0));
  out.small_cost = sr.cost;
  out.small_converged = sr.converged;
  out.eps_level = eps;
  out.v = finish(f, sr, k);
  return out;
}

PipelineResult approx_m2(const Matrix& a, Index k, double eps, const LossSpec& loss,
                         std::uint64_t seed, const PipelineConfig& cfg) {
  if (loss.is_lp()) throw InputError("approx_m2: needs a growth-2 loss (Huber, L1-L2, Fair)");
  PipelineResult out;
  const Front f = front_stages(a, k, eps, loss, seed, cfg, out);
  const Index n = a.rows();
  const double eps_level = eps / (cfg.c_loglog * loglog(static_cast<double>(n)));
  out.eps_level = eps_level;
  const Index p_m = cfg.recursion_p_m.value_or(bicriteria_row_budget(k, n, loss, cfg.bicriteria));
  const double lln = std::log2(std::max(2.0, std::log2(std::max<double>(n, 2.0))));
  const int depth_cap = static_cast<int>(4.0 * lln) + 8;

  auto t0 = Clock::now();
  const DenseMatrix* h = f.s ? &f.h : nullptr;
  Matrix cur = a;
  WeightVector cw = WeightVector::ones(n);
  int depth = 0;
  while (true) {
    const Index nc = cur.rows();
    out.recursion_sizes.push_back(nc);
    if (nc <= p_m) break;
    if (depth >= depth_cap) throw NumericalError("approx_m2: recursion depth exceeded");
    const ScoreEstimate est = estimate_leverage_scores(
        cur, h, cw, loss, derive_seed(seed, streams::kStable, static_cast<std::uint64_t>(depth)), cfg.kappa,
        cfg.conditioning);
    if (!(est.gamma_hat > 0.0)) break;
    const double nn = static_cast<double>(nc);
    const double r1 = est.gamma_hat * cfg.r1_multiplier * static_cast<double>(k) / eps_level;
    const double r = std::pow(nn, cfg.kappa) * std::log(nn) * std::max(1.0, std::log(std::log(nn))) * r1;
    const SamplingPlan plan = make_plan(est.scores, r, 1.0);
    const SampleDraw sd = draw(plan, cw, derive_seed(seed, streams::kDraw, static_cast<std::uint64_t>(depth)),
                               DrawMode::M2Weight);
    if (sd.size() == 0 || static_cast<double>(sd.size()) > 0.9 * nn) {
      out.recursion_shrink_failed = true;
      break;
    }
    const SampledRows sr = apply_draw(cur, sd);
    cur = sr.rows;
    cw = sr.weights;
    ++depth;
  }
  out.recursion_depth = depth;
  out.timings_seconds.emplace_back("recursion", seconds_since(t0));
  out.small_rows = cur.rows();

  t0 = Clock::now();
  const SmallProblem prob = build_small(cur, cw, f, k, eps_level);
  const SmallResult sr = small_approx(prob, loss, SmallMethod::LocalSearch,
                                      derive_seed(seed, streams::kRestart, 1000), cfg.small);
  out.timings_seconds.emplace_back("small_solve", seconds_since(t0));
  out.small_cost = sr.cost;
  out.small_converged = sr.converged;
  out.v = finish(f, sr, k);
  return out;
}

PipelineResult approx_subspace(const Matrix& a, Index k, double eps, const LossSpec& loss,
                               std::uint64_t seed, const PipelineConfig& cfg) {
  return loss.is_lp() ? approx_lp(a, k, eps, loss, seed, cfg) : approx_m2(a, k, eps, loss, seed, cfg);
}

}  // namespace robsub
