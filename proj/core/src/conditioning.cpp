#include "robsub/conditioning.hpp"

#include "robsub/errors.hpp"
#include "robsub/rng.hpp"
#include "robsub/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace robsub {

namespace {

double row_pnorm(const Eigen::Ref<const Vector>& v, double p) {
  if (p == 2.0) return v.norm();
  if (p == 1.0) return v.cwiseAbs().sum();
  return std::pow(v.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

double dual_norm(const Eigen::Ref<const Vector>& x, double p) {
  if (p == 1.0) return x.cwiseAbs().maxCoeff();
  const double q = p / (p - 1.0);
  return std::pow(x.cwiseAbs().array().pow(q).sum(), 1.0 / q);
}

}  // namespace

DenseMatrix WellConditionedBasis::coefficient_map() const {
  if (h.cols() == 0) return change_of_basis;
  return h * change_of_basis;
}

DenseMatrix WellConditionedBasis::times(const Matrix& a, const DenseMatrix& g) const {
  if (g.rows() != rank()) throw InputError("basis product: operand has wrong row count");
  return a.times(coefficient_map() * g);
}

DenseMatrix WellConditionedBasis::rows(const Matrix& a) const { return a.times(coefficient_map()); }

Vector WellConditionedBasis::row(const Matrix& a, Index i) const {
  return (a.row(i).transpose() * coefficient_map()).transpose();
}

WellConditionedBasis well_conditioned_basis(const Matrix& a, const DenseMatrix* h, double p,
                                            std::uint64_t seed, const ConditioningConfig& cfg) {
  if (!(p >= 1.0 && p <= 2.0)) throw InputError("well-conditioned basis needs p in [1, 2]");
  if (h != nullptr && h->rows() != a.cols())
    throw InputError("well-conditioned basis: H row count must equal A column count");

  const DenseMatrix ah = h != nullptr ? a.times(*h) : a.to_dense();
  const Index n = ah.rows();
  const Index mh = ah.cols();

  WellConditionedBasis basis;
  basis.p = p;
  basis.h = h != nullptr ? *h : DenseMatrix(0, 0);

  const double wanted = std::ceil(cfg.c_pi * static_cast<double>(mh) * static_cast<double>(mh));
  DenseMatrix pah;
  if (wanted >= static_cast<double>(n)) {
    basis.exact = true;
    basis.sketch_rows = n;
    pah = ah;
  } else {
    const auto s = static_cast<Index>(wanted);
    basis.sketch_rows = s;
    const std::uint64_t pi_seed = derive_seed(seed, streams::kBasis);
    pah = p < 2.0 ? make_pstable_sketch(pi_seed, s, n, p).apply(ah)
                  : make_l2_row_embedding(pi_seed, s, n).apply(ah);
  }

  Index rank = 0;
  basis.change_of_basis = DenseMatrix::Zero(mh, 0);
  if (pah.size() > 0) {
    Eigen::ColPivHouseholderQR<DenseMatrix> qr(pah);
    const DenseMatrix& r = qr.matrixQR();
    const Index diag = std::min(r.rows(), r.cols());
    const double lead = diag > 0 ? std::abs(r(0, 0)) : 0.0;
    while (rank < diag && lead > 0.0 && std::abs(r(rank, rank)) > cfg.rank_tol * lead) ++rank;
    if (rank > 0) {
      const DenseMatrix r11 = r.topLeftCorner(rank, rank).triangularView<Eigen::Upper>();
      const DenseMatrix rinv =
          r11.triangularView<Eigen::Upper>().solve(DenseMatrix::Identity(rank, rank));
      basis.change_of_basis = DenseMatrix::Zero(mh, rank);
      const auto& perm = qr.colsPermutation().indices();
      for (Index t = 0; t < rank; ++t) basis.change_of_basis.row(perm[t]) = rinv.row(t);
    }
  }

  if (rank == 0) {
    basis.alpha = 0.0;
    basis.beta = 1.0;
    return basis;
  }

  const DenseMatrix u = ah * basis.change_of_basis;
  basis.alpha = p == 1.0 ? u.cwiseAbs().sum() : std::pow(u.cwiseAbs().array().pow(p).sum(), 1.0 / p);

  if (p == 2.0) {
    // Exact: beta = 1 / sigma_min(U).
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(u.transpose() * u, Eigen::EigenvaluesOnly);
    const double lmin = std::max(eig.eigenvalues()(0), std::numeric_limits<double>::min());
    basis.beta = 1.0 / std::sqrt(lmin);
  } else {
    const double per_sample = static_cast<double>(n) * static_cast<double>(rank);
    const auto samples = static_cast<Index>(std::clamp(
        cfg.beta_work_cap / std::max(per_sample, 1.0), 64.0, static_cast<double>(cfg.beta_samples)));
    Rng rng(derive_seed(seed, streams::kBeta));
    const DenseMatrix x = gaussian_matrix(rank, samples, 1.0, rng);
    const DenseMatrix ux = u * x;
    double worst = 0.0;
    for (Index j = 0; j < samples; ++j) {
      const double denom = row_pnorm(ux.col(j), p);
      if (denom > 0.0) worst = std::max(worst, dual_norm(x.col(j), p) / denom);
    }
    basis.beta = cfg.beta_safety * worst;
  }
  return basis;
}

Vector basis_row_pnorms(const Matrix& a, const WellConditionedBasis& basis) {
  const DenseMatrix u = basis.rows(a);
  Vector out(u.rows());
  for (Index i = 0; i < u.rows(); ++i) out[i] = row_pnorm(u.row(i).transpose(), basis.p);
  return out;
}

LeverageScores leverage_scores(const Matrix& a, const WellConditionedBasis& basis,
                               const LossSpec& loss) {
  LeverageScores out;
  out.rank = basis.rank();
  if (loss.is_lp()) {
    if (std::abs(basis.p - loss.p()) > 1e-12)
      throw InputError("leverage scores: basis p does not match the Lp exponent");
  } else if (basis.p != 2.0) {
    throw InputError("leverage scores: growth-2 estimators need an orthogonal (p = 2) basis");
  }
  const Index n = a.rows();
  if (basis.rank() == 0) {
    out.gamma = Vector::Zero(n);
    return out;
  }
  const Vector norms = basis_row_pnorms(a, basis);
  out.gamma.resize(n);
  const double beta = basis.beta;
  for (Index i = 0; i < n; ++i) {
    const double u = norms[i];
    if (loss.is_lp()) {
      out.gamma[i] = std::pow(beta * u, loss.p());
    } else {
      out.gamma[i] = std::max(beta * u / loss.c_m(), beta * beta * u * u);
    }
  }
  out.gamma_total = pairwise_sum(std::span<const double>(out.gamma.data(), static_cast<std::size_t>(n)));
  return out;
}

LeverageScores weighted_leverage_scores(const Matrix& a, const WeightVector& w,
                                        const LossSpec& loss, std::uint64_t seed,
                                        const DenseMatrix* h, const ConditioningConfig& cfg) {
  if (w.size() != a.rows()) throw InputError("weighted leverage scores: weight length mismatch");
  const double basis_p = loss.is_lp() ? loss.p() : 2.0;
  LeverageScores out;
  out.gamma = Vector::Zero(a.rows());
  const auto buckets = w.buckets();
  out.bucket_count = static_cast<int>(buckets.size());
  for (std::size_t j = 0; j < buckets.size(); ++j) {
    const auto& rows = buckets[j];
    if (rows.empty()) continue;
    const Matrix sub = a.select_rows(rows);
    const WellConditionedBasis basis =
        well_conditioned_basis(sub, h, basis_p, derive_seed(seed, streams::kBasis, j + 1), cfg);
    const LeverageScores local = leverage_scores(sub, basis, loss);
    out.rank = std::max(out.rank, local.rank);
    for (std::size_t t = 0; t < rows.size(); ++t)
      out.gamma[rows[t]] = 2.0 * local.gamma[static_cast<Index>(t)];
  }
  out.gamma_total =
      pairwise_sum(std::span<const double>(out.gamma.data(), static_cast<std::size_t>(out.gamma.size())));
  return out;
}

}  // namespace robsub
