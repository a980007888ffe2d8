#include "robsub/oracle.hpp"

#include "robsub/errors.hpp"
#include "robsub/parallel.hpp"
#include "robsub/rng.hpp"
#include "robsub/small_approx.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace robsub {

namespace {

DenseMatrix top_right_singular(const DenseMatrix& m, Index k) {
  Eigen::BDCSVD<DenseMatrix> svd(m, Eigen::ComputeThinV);
  const DenseMatrix& v = svd.matrixV();
  DenseMatrix out = DenseMatrix::Zero(m.cols(), k);
  const Index have = std::min(k, v.cols());
  out.leftCols(have) = v.leftCols(have);
  if (have < k) {
    // Fill with coordinate directions, then orthonormalize.
    for (Index j = have; j < k; ++j) out(j % m.cols(), j) = 1.0;
    Eigen::HouseholderQR<DenseMatrix> qr(out);
    out = qr.householderQ() * DenseMatrix::Identity(m.cols(), k);
  }
  return out;
}

bool next_subset(std::vector<Index>& s, Index n) {
  const auto k = static_cast<Index>(s.size());
  Index pos = k - 1;
  while (pos >= 0 && s[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
  if (pos < 0) return false;
  ++s[static_cast<std::size_t>(pos)];
  for (Index j = pos + 1; j < k; ++j) s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

}  // namespace

double naive_residual_cost(const Matrix& a, const DenseMatrix& u, const WeightVector& w,
                           const LossSpec& loss) {
  if (u.rows() != a.cols() || w.size() != a.rows()) throw InputError("naive cost: shape mismatch");
  const DenseMatrix proj = DenseMatrix::Identity(a.cols(), a.cols()) - u * u.transpose();
  double total = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    const Vector res = proj * a.row(i);
    total += w[i] * loss.value(res.norm());
  }
  return total;
}

OracleResult svd_truncation_cost(const Matrix& a, Index k, const WeightVector& w, const LossSpec& loss) {
  if (k < 0 || k > std::min(a.rows(), a.cols())) throw InputError("svd baseline: k out of range");
  if (w.size() != a.rows()) throw InputError("svd baseline: weight length mismatch");
  OracleResult out;
  if (k == 0) {
    out.u = Subspace::empty(a.cols());
  } else {
    const DenseMatrix m = w.values().cwiseSqrt().asDiagonal() * a.to_dense();
    out.u = Subspace(top_right_singular(m, k));
  }
  out.cost = residual_cost(a, out.u, w, loss);
  return out;
}

OracleResult svd_truncation_cost(const Matrix& a, Index k, const LossSpec& loss) {
  return svd_truncation_cost(a, k, WeightVector::ones(a.rows()), loss);
}

OracleResult exhaustive_tiny(const Matrix& am, Index k, const LossSpec& loss, const ExhaustiveOptions& opt) {
  const Index d = am.cols();
  const Index n = am.rows();
  if (d > 6 || k > 2 || k < 1 || k > d) throw InputError("exhaustive oracle: needs d <= 6 and 1 <= k <= 2");
  const DenseMatrix a = am.to_dense();

  std::vector<DenseMatrix> cands;
  {
    std::vector<Index> s(static_cast<std::size_t>(k));
    std::iota(s.begin(), s.end(), Index{0});
    do {
      DenseMatrix e = DenseMatrix::Zero(d, k);
      for (Index j = 0; j < k; ++j) e(s[static_cast<std::size_t>(j)], j) = 1.0;
      cands.push_back(e);
    } while (next_subset(s, d));
  }
  // SVD subspaces of row subsets of size 1..2k, capped to keep this tiny.
  for (Index size = 1; size <= std::min<Index>(2 * k, n); ++size) {
    std::vector<Index> s(static_cast<std::size_t>(size));
    std::iota(s.begin(), s.end(), Index{0});
    std::int64_t count = 0;
    do {
      DenseMatrix sub(size, d);
      for (Index t = 0; t < size; ++t) sub.row(t) = a.row(s[static_cast<std::size_t>(t)]);
      cands.push_back(top_right_singular(sub, k));
    } while (++count < 20000 && next_subset(s, n));
  }
  cands.push_back(top_right_singular(a, k));
  const std::size_t fixed = cands.size();
  Rng rng(derive_seed(opt.seed, streams::kCandidates));
  for (int j = 0; j < opt.budget; ++j) cands.push_back(random_orthonormal(d, k, rng));

  SmallProblem prob;
  prob.a_hat = a;
  prob.b = DenseMatrix::Identity(d, d);
  prob.c = a;
  prob.w = WeightVector::ones(n);
  prob.k = k;
  SmallApproxOptions sopt;
  sopt.max_iters = opt.polish_steps;
  sopt.row_cap = std::max<Index>(n, sopt.row_cap);

  std::vector<double> costs(cands.size());
  std::vector<DenseMatrix> finals(cands.size());
  parallel_for(cands.size(), [&](std::size_t j) {
    if (j < fixed) {
      finals[j] = cands[j];
      costs[j] = small_objective(prob, loss, cands[j]);
      const SmallResult pol = polish_subspace(prob, loss, cands[j], sopt);
      if (pol.cost < costs[j]) {
        finals[j] = pol.w;
        costs[j] = pol.cost;
      }
    } else {
      const SmallResult pol = polish_subspace(prob, loss, cands[j], sopt);
      finals[j] = pol.w;
      costs[j] = pol.cost;
    }
  });
  std::size_t best = 0;
  for (std::size_t j = 1; j < costs.size(); ++j)
    if (costs[j] < costs[best]) best = j;

  OracleResult out;
  Eigen::HouseholderQR<DenseMatrix> qr(finals[best]);
  out.u = Subspace(qr.householderQ() * DenseMatrix::Identity(d, k));
  out.cost = residual_cost(am, out.u, loss);
  return out;
}

}  // namespace robsub
