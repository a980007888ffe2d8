#pragma once

#include "robsub/core.hpp"
#include "robsub/small_approx.hpp"

#include <chrono>
#include <cstdint>
#include <optional>

namespace robsub::testing {

struct InsideResult {
  /// d x k, orthonormal.
  DenseMatrix v;
  double cost = 0.0;
};

/// Best rank-k subspace found inside span(u) (u is d x m orthonormal). When
/// `start` (d x k, inside span(u)) is given it is polished as an extra
/// candidate, so the result never costs more than the start.
inline InsideResult best_rank_k_inside(const Matrix& a, const DenseMatrix& u, Index k, const LossSpec& loss,
                                       std::uint64_t seed, const DenseMatrix* start = nullptr,
                                       SmallApproxOptions opt = {}) {
  SmallProblem prob;
  prob.a_hat = a.times(u);
  prob.b = u.transpose();
  prob.c = a.to_dense();
  prob.w = WeightVector::ones(a.rows());
  prob.k = k;
  opt.side_cap = std::max<Index>(opt.side_cap, std::max(u.rows(), u.cols()));
  opt.row_cap = std::max<Index>(opt.row_cap, a.rows());
  SmallResult best = small_approx(prob, loss, SmallMethod::LocalSearch, seed, opt);
  if (start != nullptr && k < u.cols()) {
    const DenseMatrix w0 = u.transpose() * (*start);
    Eigen::HouseholderQR<DenseMatrix> qr(w0);
    const DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(w0.rows(), w0.cols());
    const SmallResult polished = polish_subspace(prob, loss, q, opt);
    if (polished.cost < best.cost) best = polished;
  }
  InsideResult out;
  out.v = u * best.w;
  out.cost = best.cost;
  return out;
}

/// Reference optimum over all rank-k subspaces by local search on the full problem.
inline InsideResult reference_optimum(const Matrix& a, Index k, const LossSpec& loss, std::uint64_t seed,
                                      SmallApproxOptions opt = {}) {
  return best_rank_k_inside(a, DenseMatrix::Identity(a.cols(), a.cols()), k, loss, seed, nullptr, opt);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace robsub::testing
