#include "robsub/errors.hpp"
#include "robsub/oracle.hpp"
#include "robsub/pipeline.hpp"
#include "robsub/rng.hpp"
#include "robsub/synthetic.hpp"

#include <doctest.h>

#include <cmath>

using namespace robsub;

namespace {

PlantedData planted(Index n, Index d, Index k, double outliers, std::uint64_t seed, double noise = 0.0) {
  PlantedOptions po;
  po.n = n;
  po.d = d;
  po.k = k;
  po.noise = noise;
  po.outlier_fraction = outliers;
  po.seed = seed;
  return planted_low_rank(po);
}

}  // namespace

TEST_CASE("exact rank-k input is recovered") {
  for (const auto& loss : {LossSpec::lp(1.0), LossSpec::lp(1.5), LossSpec::huber(1.0), LossSpec::fair(1.0)}) {
    int pass = 0;
    for (int s = 0; s < 10; ++s) {
      const auto data = planted(300, 20, 3, 0.0, derive_seed(1, 0, s));
      const Matrix a(data.a);
      const auto res = approx_subspace(a, 3, 0.25, loss, s);
      CHECK(res.v.dim() == 3);
      CHECK(res.v.orthonormality_error() <= 1e-8);
      if (residual_cost(a, res.v, loss) <= 1e-6 * v_norm_p(a, loss)) ++pass;
    }
    INFO(loss.name());
    CHECK(pass >= 9);
  }
}

TEST_CASE("k equal to the full dimension costs nothing") {
  Rng rng(2);
  const DenseMatrix a = gaussian_matrix(50, 6, 1.0, rng);
  const auto res = approx_lp(Matrix(a), 6, 0.25, LossSpec::lp(1.0), 1);
  CHECK(res.v.dim() == 6);
  CHECK(residual_cost(Matrix(a), res.v, LossSpec::lp(1.0)) <= 1e-10);
  const auto clamped = approx_lp(Matrix(a), 9, 0.25, LossSpec::lp(1.0), 1);
  CHECK(clamped.k_clamped);
  CHECK(clamped.v.dim() == 6);
}

TEST_CASE("answer lies in the search space and costs at least its projection") {
  for (int s = 0; s < 4; ++s) {
    const auto data = planted(400, 25, 2, 0.01, derive_seed(3, 0, s), 0.1);
    const Matrix a(data.a);
    PipelineConfig cfg;
    cfg.bicriteria.c_poly = 0.02;
    cfg.dimreduce.r1_override = 3.0;
    for (const auto& loss : {LossSpec::lp(1.0), LossSpec::huber(1.0)}) {
      const auto res = approx_subspace(a, 2, 0.25, loss, s, cfg);
      CHECK(res.search_space.containment_gap(res.v.basis()) <= 1e-8);
      CHECK(residual_cost(a, res.v, loss) >= residual_cost(a, res.search_space, loss) - 1e-9);
    }
  }
}

TEST_CASE("bit-for-bit determinism") {
  const auto data = planted(300, 15, 2, 0.01, 4, 0.1);
  const Matrix a(data.a);
  for (const auto& loss : {LossSpec::lp(1.0), LossSpec::huber(1.0)}) {
    const auto x = approx_subspace(a, 2, 0.25, loss, 77);
    const auto y = approx_subspace(a, 2, 0.25, loss, 77);
    CHECK((x.v.basis() - y.v.basis()).norm() == 0.0);
  }
}

TEST_CASE("growth-2 recursion depth stays doubly logarithmic") {
  const Index n = 20000;
  const auto data = planted(n, 8, 2, 0.01, 5, 0.1);
  PipelineConfig cfg;
  cfg.recursion_p_m = 200;
  cfg.r1_multiplier = 1e-3;
  const auto res = approx_m2(Matrix(data.a), 2, 0.25, LossSpec::huber(1.0), 5, cfg);
  const double bound = 2.0 * std::log2(std::log2(static_cast<double>(n))) + 2.0;
  INFO("depth " << res.recursion_depth << " sizes " << res.recursion_sizes.size());
  CHECK(res.recursion_depth >= 1);
  CHECK(static_cast<double>(res.recursion_depth) <= bound);
  for (std::size_t l = 0; l + 1 < res.recursion_sizes.size(); ++l)
    CHECK(static_cast<double>(res.recursion_sizes[l + 1]) <= 0.9 * static_cast<double>(res.recursion_sizes[l]));
}

TEST_CASE("planted outliers: the robust pipeline beats the SVD truncation") {
  int pass_l1 = 0, pass_huber = 0;
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    const auto data = planted(400, 20, 3, 0.01, derive_seed(6, 0, s), 0.05);
    const Matrix a(data.a);
    const auto l1 = LossSpec::lp(1.0);
    const auto hub = LossSpec::huber(1.0);
    if (residual_cost(a, approx_lp(a, 3, 0.25, l1, s).v, l1) <= svd_truncation_cost(a, 3, l1).cost) ++pass_l1;
    if (residual_cost(a, approx_m2(a, 3, 0.25, hub, s).v, hub) <= svd_truncation_cost(a, 3, hub).cost) ++pass_huber;
  }
  CHECK(pass_l1 >= 8);
  CHECK(pass_huber >= 7);
}

TEST_CASE("leverage estimates are calibrated on average") {
  // At p = 2 with n small the basis and beta are exact, so only the Gaussian
  // vector changes with the seed and E[score_i] = 2 beta^2 ||U_i||^2.
  Rng rng(7);
  const DenseMatrix a = gaussian_matrix(200, 4, 1.0, rng);
  const auto l2 = LossSpec::lp(2.0);
  const auto basis = well_conditioned_basis(Matrix(a), nullptr, 2.0, 0);
  REQUIRE(basis.exact);
  const Vector truth =
      2.0 * basis.beta * basis.beta * basis.rows(Matrix(a)).rowwise().squaredNorm();
  Vector mean = Vector::Zero(200);
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    const auto est = estimate_leverage_scores(Matrix(a), nullptr, WeightVector::ones(200), l2, t, 0.1);
    CHECK(est.gamma_hat == doctest::Approx(est.scores.sum()));
    mean += est.scores;
  }
  mean /= trials;
  CHECK(mean.sum() == doctest::Approx(truth.sum()).epsilon(0.02));
  for (Index i = 0; i < 200; ++i) CHECK(mean[i] == doctest::Approx(truth[i]).epsilon(0.12));
}

TEST_CASE("argument validation") {
  const DenseMatrix a = DenseMatrix::Identity(5, 5);
  CHECK_THROWS_AS(approx_lp(Matrix(a), 2, 0.25, LossSpec::huber(1.0), 1), InputError);
  CHECK_THROWS_AS(approx_m2(Matrix(a), 2, 0.25, LossSpec::lp(1.0), 1), InputError);
  CHECK_THROWS_AS(approx_lp(Matrix(a), 2, 1.5, LossSpec::lp(1.0), 1), InputError);
  CHECK_THROWS_AS(approx_lp(Matrix(a), 0, 0.25, LossSpec::lp(1.0), 1), InputError);
}
