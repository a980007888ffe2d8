#include "robsub/errors.hpp"
#include "robsub/rng.hpp"
#include "robsub/small_approx.hpp"

#include <doctest.h>

#include <cmath>

using namespace robsub;

namespace {

SmallProblem subspace_problem(const DenseMatrix& a, Index k) {
  SmallProblem prob;
  prob.a_hat = a;
  prob.b = DenseMatrix::Identity(a.cols(), a.cols());
  prob.c = a;
  prob.w = WeightVector::ones(a.rows());
  prob.k = k;
  return prob;
}

double orthonormality(const DenseMatrix& w) {
  return (w.transpose() * w - DenseMatrix::Identity(w.cols(), w.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("objective matches a direct evaluation") {
  Rng rng(1);
  SmallProblem prob;
  prob.a_hat = gaussian_matrix(12, 5, 1.0, rng);
  prob.b = gaussian_matrix(5, 7, 1.0, rng);
  prob.c = gaussian_matrix(12, 7, 1.0, rng);
  prob.w = WeightVector(Vector::LinSpaced(12, 1.0, 4.0));
  prob.k = 2;
  const DenseMatrix w = random_orthonormal(5, 2, rng);
  const auto fair = LossSpec::fair(1.0);
  double direct = 0.0;
  const DenseMatrix r = prob.a_hat * w * w.transpose() * prob.b - prob.c;
  for (Index i = 0; i < 12; ++i) direct += prob.w[i] * fair.value(r.row(i).norm());
  CHECK(small_objective(prob, fair, w) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("planted projector is recovered") {
  for (int s = 0; s < 5; ++s) {
    Rng rng(derive_seed(2, 0, s));
    SmallProblem prob;
    prob.a_hat = gaussian_matrix(60, 8, 1.0, rng);
    prob.b = gaussian_matrix(8, 10, 1.0, rng);
    const DenseMatrix w0 = random_orthonormal(8, 2, rng);
    prob.c = prob.a_hat * w0 * w0.transpose() * prob.b;
    prob.w = WeightVector::ones(60);
    prob.k = 2;
    for (const auto& loss : {LossSpec::lp(1.0), LossSpec::huber(1.0)}) {
      const auto res = small_approx(prob, loss, SmallMethod::LocalSearch, s);
      CHECK(res.cost <= 1e-8);
      CHECK(orthonormality(res.w) <= 1e-10);
      const DenseMatrix gap = res.w * res.w.transpose() - w0 * w0.transpose();
      CHECK(gap.norm() <= 1e-4);
    }
  }
}

TEST_CASE("full rank returns the identity") {
  Rng rng(3);
  const auto prob = subspace_problem(gaussian_matrix(10, 4, 1.0, rng), 4);
  const auto res = small_approx(prob, LossSpec::lp(1.0), SmallMethod::LocalSearch, 1);
  CHECK((res.w - DenseMatrix::Identity(4, 4)).norm() == 0.0);
  CHECK(res.cost <= 1e-20);
}

TEST_CASE("local search matches the exhaustive tiny search") {
  int pass = 0;
  for (int s = 0; s < 20; ++s) {
    Rng rng(derive_seed(4, 0, s));
    const auto prob = subspace_problem(gaussian_matrix(8, 8, 1.0, rng), 2);
    const auto l1 = LossSpec::lp(1.0);
    const auto ls = small_approx(prob, l1, SmallMethod::LocalSearch, s);
    const auto ex = small_approx(prob, l1, SmallMethod::ExhaustiveTiny, s);
    CHECK(orthonormality(ls.w) <= 1e-10);
    CHECK(orthonormality(ex.w) <= 1e-10);
    if (ls.cost <= 1.05 * ex.cost) ++pass;
  }
  CHECK(pass == 20);
}

TEST_CASE("polish never increases the objective") {
  Rng rng(5);
  SmallProblem prob;
  prob.a_hat = gaussian_matrix(40, 6, 1.0, rng);
  prob.b = gaussian_matrix(6, 6, 1.0, rng);
  prob.c = gaussian_matrix(40, 6, 1.0, rng);
  prob.w = WeightVector::ones(40);
  prob.k = 2;
  for (const auto& loss : {LossSpec::lp(1.0), LossSpec::lp(1.5), LossSpec::l1l2()}) {
    for (int t = 0; t < 5; ++t) {
      const DenseMatrix w0 = random_orthonormal(6, 2, rng);
      const auto res = polish_subspace(prob, loss, w0);
      CHECK(res.cost <= small_objective(prob, loss, w0) * (1.0 + 1e-12));
      CHECK(res.cost == doctest::Approx(small_objective(prob, loss, res.w)).epsilon(1e-12));
    }
  }
}

TEST_CASE("validation and caps") {
  Rng rng(6);
  auto prob = subspace_problem(gaussian_matrix(20, 14, 1.0, rng), 2);
  CHECK_THROWS_AS(small_approx(prob, LossSpec::lp(1.0), SmallMethod::ExhaustiveTiny, 1), InputError);
  SmallApproxOptions tight;
  tight.side_cap = 10;
  CHECK_THROWS_AS(small_approx(prob, LossSpec::lp(1.0), SmallMethod::LocalSearch, 1, tight), InputError);
  tight = {};
  tight.row_cap = 10;
  CHECK_THROWS_AS(small_approx(prob, LossSpec::lp(1.0), SmallMethod::LocalSearch, 1, tight), InputError);
  prob.c = DenseMatrix::Zero(19, 14);
  CHECK_THROWS_AS(small_approx(prob, LossSpec::lp(1.0), SmallMethod::LocalSearch, 1), InputError);
}

TEST_CASE("deterministic for a fixed seed") {
  Rng rng(7);
  const auto prob = subspace_problem(gaussian_matrix(50, 9, 1.0, rng), 3);
  const auto x = small_approx(prob, LossSpec::huber(0.5), SmallMethod::LocalSearch, 42);
  const auto y = small_approx(prob, LossSpec::huber(0.5), SmallMethod::LocalSearch, 42);
  CHECK((x.w - y.w).norm() == 0.0);
  CHECK(x.cost == y.cost);
}
