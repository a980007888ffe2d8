#include "robsub/small_approx.hpp"

#include "robsub/errors.hpp"
#include "robsub/parallel.hpp"
#include "robsub/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace robsub {

namespace {

void validate(const SmallProblem& prob, const SmallApproxOptions& opt) {
  const Index n = prob.a_hat.rows();
  const Index u = prob.a_hat.cols();
  if (prob.b.rows() != u) throw InputError("small_approx: B must have as many rows as A has columns");
  if (prob.c.rows() != n || prob.c.cols() != prob.b.cols())
    throw InputError("small_approx: C must be (rows of A) x (columns of B)");
  if (prob.w.size() != n) throw InputError("small_approx: weight length mismatch");
  if (prob.k < 1) throw InputError("small_approx: k must be at least 1");
  if (n > opt.row_cap || u > opt.side_cap || prob.b.cols() > opt.side_cap)
    throw InputError("small_approx: problem of size " + std::to_string(n) + " x " +
                     std::to_string(u) + " x " + std::to_string(prob.b.cols()) +
                     " exceeds the small-problem caps (row cap " + std::to_string(opt.row_cap) +
                     ", side cap " + std::to_string(opt.side_cap) + "); raise them in the config");
}

DenseMatrix orthonormalize(const DenseMatrix& m) {
  Eigen::HouseholderQR<DenseMatrix> qr(m);
  return qr.householderQ() * DenseMatrix::Identity(m.rows(), m.cols());
}

DenseMatrix top_eigenvectors(const DenseMatrix& sym, Index k) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(0.5 * (sym + sym.transpose()));
  const Index u = sym.rows();
  DenseMatrix out(u, k);
  // Eigenvalues ascend; take the last k, largest first.
  for (Index j = 0; j < k; ++j) out.col(j) = eig.eigenvectors().col(u - 1 - j);
  return orthonormalize(out);
}

DenseMatrix residual(const SmallProblem& prob, const DenseMatrix& w) {
  return (prob.a_hat * w) * (w.transpose() * prob.b) - prob.c;
}

/// Majorizer weights: M(rho) <= M(rho0) + h(rho0) (rho^2 - rho0^2), h = M'/(2 rho).
Vector mm_weights(const SmallProblem& prob, const LossSpec& loss, const Vector& rho) {
  Vector omega(rho.size());
  for (Index i = 0; i < rho.size(); ++i) omega[i] = prob.w[i] * loss.half_slope(rho[i]);
  return omega;
}

/// Top-k eigenvectors of 2 sym(A^T Om C B^T) - A^T Om A. Exact minimizer of
/// the weighted least-squares surrogate when B B^T = I.
DenseMatrix mm_proposal(const SmallProblem& prob, const Vector& omega) {
  const DenseMatrix oa = omega.asDiagonal() * prob.a_hat;
  const DenseMatrix cross = (oa.transpose() * prob.c) * prob.b.transpose();
  const DenseMatrix quad = prob.a_hat.transpose() * oa;
  return top_eigenvectors(cross + cross.transpose() - quad, prob.k);
}

bool mm_affordable(const SmallProblem& prob, const SmallApproxOptions& opt) {
  const double n = static_cast<double>(prob.rows());
  const double u = static_cast<double>(prob.dim());
  const double s = static_cast<double>(prob.b.cols());
  return n * u * std::max(u, s) <= opt.mm_work_cap;
}

std::vector<DenseMatrix> deterministic_starts(const SmallProblem& prob) {
  const Index k = prob.k;
  std::vector<DenseMatrix> starts;
  // Unconstrained least squares X = A^+ C B^+, then its top-k eigenspace.
  {
    const DenseMatrix y = prob.a_hat.completeOrthogonalDecomposition().solve(prob.c);
    const DenseMatrix bt = prob.b.transpose();
    const DenseMatrix xt = bt.completeOrthogonalDecomposition().solve(y.transpose());
    starts.push_back(top_eigenvectors(xt.transpose(), k));
  }
  // Weighted right singular vectors of A.
  {
    const DenseMatrix sa = prob.w.values().cwiseSqrt().asDiagonal() * prob.a_hat;
    Eigen::BDCSVD<DenseMatrix> svd(sa, Eigen::ComputeThinV);
    DenseMatrix v = svd.matrixV();
    if (v.cols() >= k) {
      starts.push_back(orthonormalize(v.leftCols(k)));
    }
  }
  // Least-squares surrogate with the given row weights.
  starts.push_back(mm_proposal(prob, prob.w.values()));
  return starts;
}

}  // namespace

double small_objective(const SmallProblem& prob, const LossSpec& loss, const DenseMatrix& w) {
  const Vector rho = residual(prob, w).rowwise().norm();
  return cost_from_row_norms(rho, prob.w, loss);
}

SmallResult polish_subspace(const SmallProblem& prob, const LossSpec& loss, const DenseMatrix& w0,
                            const SmallApproxOptions& opt) {
  SmallResult res;
  res.w = orthonormalize(w0);
  DenseMatrix d = residual(prob, res.w);
  Vector rho = d.rowwise().norm();
  double f = cost_from_row_norms(rho, prob.w, loss);
  const bool use_mm = mm_affordable(prob, opt);
  double step = -1.0;

  for (int it = 0; it < opt.max_iters; ++it) {
    res.iterations = it + 1;
    const double f_start = f;
    if (f <= 0.0) {
      res.converged = true;
      break;
    }

    if (use_mm) {
      const DenseMatrix cand = mm_proposal(prob, mm_weights(prob, loss, rho));
      const DenseMatrix dc = residual(prob, cand);
      const Vector rc = dc.rowwise().norm();
      const double fc = cost_from_row_norms(rc, prob.w, loss);
      if (fc < f) {
        res.w = cand;
        d = dc;
        rho = rc;
        f = fc;
      }
    }

    // Euclidean gradient (K + K^T) W with K = A^T G B^T, G = diag(w M'/rho) D.
    Vector g(rho.size());
    for (Index i = 0; i < rho.size(); ++i) g[i] = 2.0 * prob.w[i] * loss.half_slope(rho[i]);
    const DenseMatrix gd = g.asDiagonal() * d;
    const DenseMatrix grad = prob.a_hat.transpose() * (gd * (prob.b.transpose() * res.w)) +
                             prob.b * (gd.transpose() * (prob.a_hat * res.w));
    const DenseMatrix xi = grad - res.w * (res.w.transpose() * grad);
    const double xnorm2 = xi.squaredNorm();
    if (xnorm2 > 0.0 && std::isfinite(xnorm2)) {
      if (step <= 0.0) step = 0.1 / std::sqrt(xnorm2);
      bool accepted = false;
      for (int bt = 0; bt < 40; ++bt) {
        const DenseMatrix cand = orthonormalize(res.w - step * xi);
        const DenseMatrix dc = residual(prob, cand);
        const Vector rc = dc.rowwise().norm();
        const double fc = cost_from_row_norms(rc, prob.w, loss);
        if (fc <= f - 1e-4 * step * xnorm2) {
          res.w = cand;
          d = dc;
          rho = rc;
          f = fc;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (accepted) step *= 2.0;
    }

    if (f_start - f <= opt.tol * f_start) {
      res.converged = true;
      break;
    }
  }
  res.cost = f;
  return res;
}

SmallResult small_approx(const SmallProblem& prob, const LossSpec& loss, SmallMethod method,
                         std::uint64_t seed, const SmallApproxOptions& opt) {
  validate(prob, opt);
  const Index u = prob.dim();
  const Index k = prob.k;
  if (k >= u) {
    SmallResult res;
    res.w = DenseMatrix::Identity(u, u);
    res.cost = small_objective(prob, loss, res.w);
    res.converged = true;
    return res;
  }

  std::vector<DenseMatrix> starts = deterministic_starts(prob);

  if (method == SmallMethod::LocalSearch) {
    const int total = std::max(opt.restarts, 1);
    if (static_cast<int>(starts.size()) > total) starts.resize(static_cast<std::size_t>(total));
    for (int j = static_cast<int>(starts.size()); j < total; ++j) {
      Rng rng(derive_seed(seed, streams::kRestart, static_cast<std::uint64_t>(j)));
      starts.push_back(random_orthonormal(u, k, rng));
    }
    std::vector<SmallResult> results(starts.size());
    parallel_for(starts.size(), [&](std::size_t j) { results[j] = polish_subspace(prob, loss, starts[j], opt); });
    std::size_t best = 0;
    for (std::size_t j = 1; j < results.size(); ++j)
      if (results[j].cost < results[best].cost) best = j;
    return results[best];
  }

  if (u > 12 || k > 3) throw InputError("small_approx: exhaustive search needs u <= 12 and k <= 3");
  // Coordinate subspaces.
  std::vector<Index> pick(static_cast<std::size_t>(k));
  std::iota(pick.begin(), pick.end(), Index{0});
  while (true) {
    DenseMatrix e = DenseMatrix::Zero(u, k);
    for (Index j = 0; j < k; ++j) e(pick[static_cast<std::size_t>(j)], j) = 1.0;
    starts.push_back(e);
    Index pos = k - 1;
    while (pos >= 0 && pick[static_cast<std::size_t>(pos)] == u - k + pos) --pos;
    if (pos < 0) break;
    ++pick[static_cast<std::size_t>(pos)];
    for (Index j = pos + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  Rng rng(derive_seed(seed, streams::kCandidates));
  for (int j = 0; j < opt.tiny_candidates; ++j) starts.push_back(random_orthonormal(u, k, rng));

  std::vector<double> costs(starts.size());
  parallel_for(starts.size(), [&](std::size_t j) { costs[j] = small_objective(prob, loss, starts[j]); });
  std::vector<std::size_t> order(starts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return costs[x] < costs[y]; });
  const std::size_t npolish = std::min(order.size(), static_cast<std::size_t>(std::max(opt.tiny_polish, 1)));
  std::vector<SmallResult> results(npolish);
  parallel_for(npolish, [&](std::size_t j) { results[j] = polish_subspace(prob, loss, starts[order[j]], opt); });
  std::size_t best = 0;
  for (std::size_t j = 1; j < results.size(); ++j)
    if (results[j].cost < results[best].cost) best = j;
  return results[best];
}

}  // namespace robsub
