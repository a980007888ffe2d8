#pragma once

// Random sketching primitives: sparse embeddings applied on the right,
// Gaussian row-norm sketches, sparse p-stable embeddings, and the
// rank-revealing orthonormal union used to assemble subspaces.

#include "robsub/core.hpp"
#include "robsub/rng.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace robsub {

/// Multiply-add counter filled by the instrumented apply routines.
struct SketchWork {
  std::uint64_t multiply_adds = 0;
};

/// OSNAP-style sparse embedding S (m x d): every column holds exactly s
/// nonzeros in distinct rows, each equal to +-1/sqrt(s).
class SparseSketch {
 public:
  SparseSketch(std::uint64_t seed, Index m, Index d, Index s);

  Index rows() const { return m_; }
  Index cols() const { return d_; }
  Index sparsity() const { return s_; }
  std::uint64_t seed() const { return seed_; }

  /// Row positions of the nonzeros in column j (length s).
  std::span<const Index> positions(Index j) const {
    return {pos_.data() + j * s_, static_cast<std::size_t>(s_)};
  }
  std::span<const double> values(Index j) const {
    return {val_.data() + j * s_, static_cast<std::size_t>(s_)};
  }

  /// The m x d matrix S.
  DenseMatrix to_dense() const;

 private:
  std::uint64_t seed_;
  Index m_, d_, s_;
  std::vector<Index> pos_;
  std::vector<double> val_;
};

SparseSketch make_sparse_sketch(std::uint64_t seed, Index m, Index d, Index s);

/// A S^T (n x m) in exactly s * nnz(A) multiply-adds.
DenseMatrix apply_right(const Matrix& a, const SparseSketch& r, SketchWork* work = nullptr);

/// d x t matrix of i.i.d. N(0, 1/t) entries.
struct GaussianSketch {
  DenseMatrix g;
  std::uint64_t seed = 0;
  Index cols() const { return g.cols(); }
};

GaussianSketch make_gaussian_sketch(std::uint64_t seed, Index d, Index t);

/// ||A_i (I - W W^T) G||_2 per row, computed as A_i G - (A_i W)(W^T G) so the
/// deflated matrix is never formed.
Vector gaussian_row_norm_estimates(const Matrix& a, const Subspace* deflate,
                                   const GaussianSketch& g);

/// Sparse-composed p-stable embedding Pi (s x n): column i has a single
/// nonzero at a hashed row, drawn i.i.d. from the symmetric p-stable law with
/// unit scale (standard Cauchy at p = 1). With p = 2 the values are +-1, which
/// gives a CountSketch l2 subspace embedding.
class PStableSketch {
 public:
  PStableSketch(std::uint64_t seed, Index s, Index n, double p);

  Index rows() const { return s_; }
  Index cols() const { return static_cast<Index>(row_.size()); }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Index>& hashed_rows() const { return row_; }
  const std::vector<double>& entries() const { return val_; }

  /// Pi X for X with n rows.
  DenseMatrix apply(const DenseMatrix& x) const;
  DenseMatrix to_dense() const;

 private:
  std::uint64_t seed_;
  Index s_;
  double p_;
  std::vector<Index> row_;
  std::vector<double> val_;
};

/// Requires p in [1, 2).
PStableSketch make_pstable_sketch(std::uint64_t seed, Index s, Index n, double p);
/// The p = 2 (Rademacher) variant used to condition orthogonal bases.
PStableSketch make_l2_row_embedding(std::uint64_t seed, Index s, Index n);

/// One draw from the symmetric p-stable law, p in (0, 2], via
/// Chambers-Mallows-Stuck.
double sample_symmetric_stable(double p, Rng& rng);

/// Orthonormal basis for the union of the row spaces of `blocks` (each with d
/// columns). Rows are normalized, blocks are processed in order, and a
/// direction is kept only if its residual pivot exceeds 1e-8, so every
/// earlier block is contained exactly.
Subspace orthonormal_union(const std::vector<DenseMatrix>& blocks,
                           std::optional<Index> ambient_dim = std::nullopt);

}  // namespace robsub
