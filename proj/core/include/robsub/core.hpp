#pragma once

// Loss functions, weighted row measures, and the domain types shared by every
// stage of the subspace-approximation pipeline.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace robsub {

using Index = Eigen::Index;
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class LossKind { Lp, Huber, L1L2, Fair };

/// A nice M-estimator: even, monotone, polynomially bounded with degree p,
/// linearly bounded below with constant c_m, and with M^{1/p} subadditive.
///
/// Huber, L1-L2 and Fair all have growth exponent p = 2. For L1-L2 and Fair
/// the lower-growth constant is certified numerically at construction.
class LossSpec {
 public:
  static LossSpec lp(double p);
  static LossSpec huber(double tau);
  static LossSpec l1l2();
  static LossSpec fair(double c);

  LossKind kind() const { return kind_; }
  double p() const { return p_; }
  double c_m() const { return c_m_; }
  double param() const { return param_; }
  bool is_lp() const { return kind_ == LossKind::Lp; }
  /// Every supported estimator is convex.
  bool convex() const { return true; }
  std::string name() const;

  /// M(x). No finiteness check; use m_value() at API boundaries.
  double value(double x) const;
  /// M'(|x|) for the right derivative on x >= 0.
  double derivative(double x) const;
  /// M'(r) / (2 r) with r floored at `floor`; the IRLS weight for residual r
  /// and also the derivative of t -> M(sqrt(t)).
  double half_slope(double r, double floor = 1e-12) const;

 private:
  LossSpec(LossKind kind, double p, double c_m, double param)
      : kind_(kind), p_(p), c_m_(c_m), param_(param) {}

  LossKind kind_;
  double p_;
  double c_m_;
  double param_;
};

/// Parses "l1", "l2", "lp:1.5", "huber[:tau]", "l1l2", "fair[:c]".
LossSpec parse_loss(const std::string& text);

/// Smallest M(a) b / (M(b) a) over a >= b on a log grid in [1e-6, 1e6].
double lower_growth_constant(const LossSpec& loss);

/// Evaluates M(x); throws InputError for non-finite x.
double m_value(const LossSpec& loss, double x);

/// Row weights, each >= 1. Rows fall into dyadic buckets
/// T_j = { i : 2^{j-1} <= w_i < 2^j }, j = 1..N with N = ceil(log2(1 + max w)).
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(Vector w);
  static WeightVector ones(Index n);

  Index size() const { return w_.size(); }
  double operator[](Index i) const { return w_[i]; }
  const Vector& values() const { return w_; }
  bool is_unit() const;
  double max() const;
  double l1() const;

  int bucket_of(Index i) const;
  int bucket_count() const;
  /// Row indices per bucket; element j-1 holds T_j (possibly empty).
  std::vector<std::vector<Index>> buckets() const;

 private:
  Vector w_;
};

/// Dense or row-major sparse n x d operand.
class Matrix {
 public:
  Matrix() = default;
  Matrix(DenseMatrix m);  // NOLINT(google-explicit-constructor)
  Matrix(SparseMatrix m);  // NOLINT(google-explicit-constructor)

  Index rows() const;
  Index cols() const;
  /// Stored nonzeros for sparse, nonzero entries for dense.
  Index nnz() const;
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(data_); }

  const DenseMatrix& dense() const;
  const SparseMatrix& sparse() const;
  DenseMatrix to_dense() const;

  /// A * B.
  DenseMatrix times(const DenseMatrix& b) const;
  /// A^T * B.
  DenseMatrix transpose_times(const DenseMatrix& b) const;
  /// A^T diag(weights) A.
  DenseMatrix weighted_gram(const Vector& weights) const;
  Vector row(Index i) const;
  Vector row_norms() const;

  /// Rows idx[t] scaled by scale[t] (or 1 when scale is empty).
  Matrix select_rows(std::span<const Index> idx, std::span<const double> scale = {}) const;
  /// [A b].
  Matrix append_column(const Vector& b) const;

  template <class Fn>
  void for_each_in_row(Index i, Fn&& fn) const {
    if (const auto* s = std::get_if<SparseMatrix>(&data_)) {
      for (SparseMatrix::InnerIterator it(*s, i); it; ++it) fn(it.col(), it.value());
    } else {
      const auto& d = std::get<DenseMatrix>(data_);
      for (Index j = 0; j < d.cols(); ++j) fn(j, d(i, j));
    }
  }

 private:
  std::variant<DenseMatrix, SparseMatrix> data_{DenseMatrix{}};
};

/// Orthonormal column factor U (d x m) of the projector X = U U^T.
class Subspace {
 public:
  /// Throws InputError unless U^T U = I within 1e-8.
  explicit Subspace(DenseMatrix u, std::optional<double> quality_k = std::nullopt);
  static Subspace empty(Index ambient_dim);
  static Subspace full(Index ambient_dim);

  Index ambient_dim() const { return u_.rows(); }
  Index dim() const { return u_.cols(); }
  const DenseMatrix& basis() const { return u_; }
  DenseMatrix projector() const { return u_ * u_.transpose(); }
  std::optional<double> quality_k() const { return quality_k_; }
  void set_quality_k(double k) { quality_k_ = k; }

  /// Frobenius norm of (I - U U^T) W.
  double containment_gap(const DenseMatrix& w) const;
  /// max |U^T U - I|.
  double orthonormality_error() const;

 private:
  DenseMatrix u_;
  std::optional<double> quality_k_;
};

/// Costs and timings attached to a pipeline run.
struct CostReport {
  double v_cost_p = 0.0;
  double v_cost = 0.0;
  std::optional<double> baseline_v_cost_p;
  std::optional<double> baseline_v_cost;
  std::vector<std::pair<std::string, double>> timings_seconds;
  std::uint64_t seed = 0;

  static CostReport from_cost_p(double cost_p, double p, std::uint64_t seed);
};

/// Pairwise summation over a fixed reduction tree, so results do not depend
/// on how callers chunk work across threads.
double pairwise_sum(std::span<const double> values);

/// Sum_i w_i M(||a_i||_2), the p-th power of the weighted v-norm.
double v_norm_p(const Matrix& a, const WeightVector& w, const LossSpec& loss);
double v_norm_p(const Matrix& a, const LossSpec& loss);
/// Sum_{i,j} w_i M(a_ij), the p-th power of the entrywise norm.
double entrywise_norm_p(const Matrix& a, const WeightVector& w, const LossSpec& loss);
double entrywise_norm_p(const Matrix& a, const LossSpec& loss);

/// ||a_i (I - U U^T)||_2 per row, evaluated without forming I - U U^T.
Vector residual_row_norms(const Matrix& a, const Subspace& x);
/// v_norm_p of A (I - U U^T).
double residual_cost(const Matrix& a, const Subspace& x, const WeightVector& w,
                     const LossSpec& loss);
double residual_cost(const Matrix& a, const Subspace& x, const LossSpec& loss);

/// Sum_i w_i M(r_i) for precomputed row norms r.
double cost_from_row_norms(const Vector& norms, const WeightVector& w, const LossSpec& loss);

}  // namespace robsub
