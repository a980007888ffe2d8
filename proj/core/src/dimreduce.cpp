#include "robsub/dimreduce.hpp"

#include "robsub/errors.hpp"
#include "robsub/rng.hpp"
#include "robsub/sampling.hpp"
#include "robsub/sketch.hpp"

#include <cmath>

namespace robsub {

namespace {
constexpr double kResidualRelTol = 1e-10;
}  // namespace

double dim_reduce_r1(Index k, double eps, double quality_k, double p, double multiplier) {
  const double kk = static_cast<double>(k);
  return multiplier * quality_k * std::pow(kk, 2.0 + p) * std::pow(eps, -p - 1.0) *
         std::log(kk / eps + 2.0);
}

DimReduceResult dim_reduce(const Matrix& a, Index k, const Subspace& xhat, const LossSpec& loss,
                           const DimReduceConfig& cfg) {
  const Index n = a.rows();
  const Index d = a.cols();
  if (k < 1 || k > d) throw InputError("dim_reduce: k must lie in [1, d]");
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw InputError("dim_reduce: eps must lie in (0, 1)");
  if (!(cfg.quality_k >= 1.0)) throw InputError("dim_reduce: quality bound must be at least 1");
  if (xhat.ambient_dim() != d) throw InputError("dim_reduce: subspace dimension mismatch");

  const double p = loss.p();
  DimReduceResult out;
  out.r1 = cfg.r1_override.value_or(dim_reduce_r1(k, cfg.eps, cfg.quality_k, p, cfg.r1_multiplier));
  if (loss.is_lp()) {
    out.t_m = 1;
    out.r = std::pow(out.r1, p + 1.0);
  } else {
    out.t_m = cfg.t_m_override.value_or(
        static_cast<Index>(std::ceil(2.0 * std::log2(static_cast<double>(n) + 2.0))));
    out.r = out.r1;
  }
  if (out.t_m < 1) throw InputError("dim_reduce: t_M must be positive");

  const GaussianSketch g = make_gaussian_sketch(derive_seed(cfg.seed, streams::kGaussian), d, out.t_m);
  const Subspace* deflate = xhat.dim() > 0 ? &xhat : nullptr;
  Vector est = gaussian_row_norm_estimates(a, deflate, g);
  if (deflate != nullptr) {
    // Rows inside colspace(xhat) leave rounding residue; count it as zero.
    const Vector raw = gaussian_row_norm_estimates(a, nullptr, g);
    for (Index i = 0; i < n; ++i)
      if (est[i] <= kResidualRelTol * raw[i]) est[i] = 0.0;
  }
  Vector scores(n);
  for (Index i = 0; i < n; ++i) scores[i] = loss.value(est[i]);

  if (!(scores.sum() > 0.0)) {
    out.u = xhat;
    out.zero_residual = true;
    return out;
  }

  const SamplingPlan plan = make_plan(scores, out.r, cfg.k2);
  out.expected_sample_size = plan.expected_size();
  const SampleDraw sd = draw(plan, WeightVector::ones(n), cfg.seed, DrawMode::M2Weight);
  out.sample_size = sd.size();

  std::vector<DenseMatrix> blocks;
  if (xhat.dim() > 0) blocks.push_back(xhat.basis().transpose());
  if (sd.size() > 0) blocks.push_back(a.select_rows(sd.indices).to_dense());
  out.u = orthonormal_union(blocks, d);
  return out;
}

}  // namespace robsub
