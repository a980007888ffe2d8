#include "robsub/sketch.hpp"

#include "robsub/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace robsub {

SparseSketch::SparseSketch(std::uint64_t seed, Index m, Index d, Index s)
    : seed_(seed), m_(m), d_(d), s_(s) {
  if (m < 1 || d < 0 || s < 1) throw InputError("sparse sketch needs m >= 1, s >= 1");
  if (s > m) throw InputError("sparse sketch sparsity s exceeds row count m");
  Rng rng(derive_seed(seed, streams::kSparseSketch));
  std::uniform_int_distribution<Index> row_dist(0, m - 1);
  std::bernoulli_distribution coin(0.5);
  const double mag = 1.0 / std::sqrt(static_cast<double>(s));
  pos_.resize(static_cast<std::size_t>(d * s));
  val_.resize(static_cast<std::size_t>(d * s));
  std::vector<Index> pool;
  for (Index j = 0; j < d; ++j) {
    Index* out = pos_.data() + j * s;
    if (2 * s <= m) {
      // Rejection sampling of s distinct rows.
      Index filled = 0;
      while (filled < s) {
        const Index r = row_dist(rng);
        if (std::find(out, out + filled, r) == out + filled) out[filled++] = r;
      }
    } else {
      // Partial Fisher-Yates when s is a large fraction of m.
      pool.resize(static_cast<std::size_t>(m));
      for (Index r = 0; r < m; ++r) pool[static_cast<std::size_t>(r)] = r;
      for (Index t = 0; t < s; ++t) {
        std::uniform_int_distribution<Index> pick(t, m - 1);
        std::swap(pool[static_cast<std::size_t>(t)], pool[static_cast<std::size_t>(pick(rng))]);
        out[t] = pool[static_cast<std::size_t>(t)];
      }
    }
    for (Index t = 0; t < s; ++t) val_[static_cast<std::size_t>(j * s + t)] = coin(rng) ? mag : -mag;
  }
}

DenseMatrix SparseSketch::to_dense() const {
  DenseMatrix out = DenseMatrix::Zero(m_, d_);
  for (Index j = 0; j < d_; ++j) {
    auto p = positions(j);
    auto v = values(j);
    for (Index t = 0; t < s_; ++t) out(p[t], j) = v[t];
  }
  return out;
}

SparseSketch make_sparse_sketch(std::uint64_t seed, Index m, Index d, Index s) {
  return SparseSketch(seed, m, d, s);
}

DenseMatrix apply_right(const Matrix& a, const SparseSketch& r, SketchWork* work) {
  if (a.cols() != r.cols()) throw InputError("apply_right: sketch built for a different column count");
  DenseMatrix out = DenseMatrix::Zero(a.rows(), r.rows());
  std::uint64_t count = 0;
  const Index s = r.sparsity();
  for (Index i = 0; i < a.rows(); ++i) {
    a.for_each_in_row(i, [&](Index j, double v) {
      if (v == 0.0) return;
      auto p = r.positions(j);
      auto w = r.values(j);
      for (Index t = 0; t < s; ++t) out(i, p[t]) += v * w[t];
      count += static_cast<std::uint64_t>(s);
    });
  }
  if (work) work->multiply_adds += count;
  return out;
}

GaussianSketch make_gaussian_sketch(std::uint64_t seed, Index d, Index t) {
  if (t < 1) throw InputError("Gaussian sketch needs at least one column");
  Rng rng(derive_seed(seed, streams::kGaussian));
  return GaussianSketch{gaussian_matrix(d, t, 1.0 / std::sqrt(static_cast<double>(t)), rng), seed};
}

Vector gaussian_row_norm_estimates(const Matrix& a, const Subspace* deflate,
                                   const GaussianSketch& g) {
  if (g.g.rows() != a.cols()) throw InputError("Gaussian sketch row count does not match columns");
  DenseMatrix ag = a.times(g.g);
  if (deflate != nullptr && deflate->dim() > 0) {
    if (deflate->ambient_dim() != a.cols()) throw InputError("deflation subspace dimension mismatch");
    const DenseMatrix& w = deflate->basis();
    ag -= a.times(w) * (w.transpose() * g.g);
  }
  return ag.rowwise().norm();
}

double sample_symmetric_stable(double p, Rng& rng) {
  std::uniform_real_distribution<double> uni(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);
  std::exponential_distribution<double> expo(1.0);
  const double v = uni(rng);
  if (p == 1.0) return std::tan(v);
  const double w = expo(rng);
  return std::sin(p * v) / std::pow(std::cos(v), 1.0 / p) *
         std::pow(std::cos(v - p * v) / w, (1.0 - p) / p);
}

PStableSketch::PStableSketch(std::uint64_t seed, Index s, Index n, double p)
    : seed_(seed), s_(s), p_(p) {
  if (s < 1 || n < 0) throw InputError("p-stable sketch needs s >= 1");
  if (!(p >= 1.0 && p <= 2.0)) throw InputError("p-stable sketch needs p in [1, 2]");
  Rng rng(derive_seed(seed, streams::kStable));
  std::uniform_int_distribution<Index> row_dist(0, s - 1);
  std::bernoulli_distribution coin(0.5);
  row_.resize(static_cast<std::size_t>(n));
  val_.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    row_[static_cast<std::size_t>(i)] = row_dist(rng);
    val_[static_cast<std::size_t>(i)] = p == 2.0 ? (coin(rng) ? 1.0 : -1.0) : sample_symmetric_stable(p, rng);
  }
}

DenseMatrix PStableSketch::apply(const DenseMatrix& x) const {
  if (x.rows() != cols()) throw InputError("p-stable sketch applied to wrong row count");
  DenseMatrix out = DenseMatrix::Zero(s_, x.cols());
  for (Index i = 0; i < x.rows(); ++i)
    out.row(row_[static_cast<std::size_t>(i)]) += val_[static_cast<std::size_t>(i)] * x.row(i);
  return out;
}

DenseMatrix PStableSketch::to_dense() const {
  DenseMatrix out = DenseMatrix::Zero(s_, cols());
  for (Index i = 0; i < cols(); ++i) out(row_[static_cast<std::size_t>(i)], i) = val_[static_cast<std::size_t>(i)];
  return out;
}

PStableSketch make_pstable_sketch(std::uint64_t seed, Index s, Index n, double p) {
  if (!(p >= 1.0 && p < 2.0)) throw InputError("p-stable sketch requires p in [1, 2)");
  return PStableSketch(seed, s, n, p);
}

PStableSketch make_l2_row_embedding(std::uint64_t seed, Index s, Index n) {
  return PStableSketch(seed, s, n, 2.0);
}

Subspace orthonormal_union(const std::vector<DenseMatrix>& blocks, std::optional<Index> ambient_dim) {
  Index d = ambient_dim.value_or(blocks.empty() ? 0 : blocks.front().cols());
  for (const auto& b : blocks)
    if (b.cols() != d) throw InputError("orthonormal_union: blocks disagree on column count");
  constexpr double kPivotTol = 1e-8;
  DenseMatrix basis(d, 0);
  for (const auto& block : blocks) {
    if (basis.cols() == d) break;
    DenseMatrix cand(d, block.rows());
    Index used = 0;
    for (Index i = 0; i < block.rows(); ++i) {
      const double nrm = block.row(i).norm();
      if (nrm > 0.0 && std::isfinite(nrm)) cand.col(used++) = block.row(i).transpose() / nrm;
    }
    if (used == 0) continue;
    cand.conservativeResize(d, used);
    for (int pass = 0; pass < 2 && basis.cols() > 0; ++pass)
      cand -= basis * (basis.transpose() * cand);
    Eigen::ColPivHouseholderQR<DenseMatrix> qr(cand);
    const auto& r = qr.matrixQR();
    Index rank = 0;
    const Index diag = std::min(r.rows(), r.cols());
    while (rank < diag && std::abs(r(rank, rank)) > kPivotTol) ++rank;
    rank = std::min(rank, d - basis.cols());
    if (rank == 0) continue;
    DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(d, rank);
    if (basis.cols() > 0) {
      q -= basis * (basis.transpose() * q);
      Eigen::HouseholderQR<DenseMatrix> reqr(q);
      q = reqr.householderQ() * DenseMatrix::Identity(d, rank);
    }
    DenseMatrix grown(d, basis.cols() + rank);
    grown << basis, q;
    basis = std::move(grown);
  }
  return Subspace(std::move(basis));
}

}  // namespace robsub
