#include "robsub/core.hpp"

#include "robsub/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace robsub {

namespace {

double l1l2_value(double x) {
  // 2(sqrt(1 + x^2/2) - 1) rewritten to avoid cancellation near 0.
  const double x2 = x * x;
  return x2 / (std::sqrt(1.0 + 0.5 * x2) + 1.0);
}

double fair_value(double x, double c) {
  const double u = std::abs(x) / c;
  if (u < 1e-4) return c * c * (u * u / 2.0 - u * u * u / 3.0 + u * u * u * u / 4.0);
  return c * c * (u - std::log1p(u));
}

}  // namespace

LossSpec LossSpec::lp(double p) {
  if (!(p >= 1.0 && p <= 2.0)) throw InputError("Lp loss requires p in [1, 2]");
  return LossSpec(LossKind::Lp, p, 1.0, 0.0);
}

LossSpec LossSpec::huber(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InputError("Huber loss requires tau > 0");
  return LossSpec(LossKind::Huber, 2.0, 0.5, tau);
}

LossSpec LossSpec::l1l2() {
  LossSpec loss(LossKind::L1L2, 2.0, 1.0, 0.0);
  loss.c_m_ = lower_growth_constant(loss);
  return loss;
}

LossSpec LossSpec::fair(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InputError("Fair loss requires c > 0");
  LossSpec loss(LossKind::Fair, 2.0, 1.0, c);
  loss.c_m_ = lower_growth_constant(loss);
  return loss;
}

std::string LossSpec::name() const {
  std::ostringstream os;
  switch (kind_) {
    case LossKind::Lp: os << "lp:" << p_; break;
    case LossKind::Huber: os << "huber:" << param_; break;
    case LossKind::L1L2: os << "l1l2"; break;
    case LossKind::Fair: os << "fair:" << param_; break;
  }
  return os.str();
}

double LossSpec::value(double x) const {
  const double a = std::abs(x);
  switch (kind_) {
    case LossKind::Lp:
      if (p_ == 1.0) return a;
      if (p_ == 2.0) return a * a;
      return std::pow(a, p_);
    case LossKind::Huber:
      return a <= param_ ? a * a / (2.0 * param_) : a - param_ / 2.0;
    case LossKind::L1L2:
      return l1l2_value(a);
    case LossKind::Fair:
      return fair_value(a, param_);
  }
  return 0.0;
}

double LossSpec::derivative(double x) const {
  const double a = std::abs(x);
  switch (kind_) {
    case LossKind::Lp:
      if (p_ == 1.0) return 1.0;
      return p_ * std::pow(a, p_ - 1.0);
    case LossKind::Huber:
      return a <= param_ ? a / param_ : 1.0;
    case LossKind::L1L2:
      return a / std::sqrt(1.0 + 0.5 * a * a);
    case LossKind::Fair:
      return a / (1.0 + a / param_);
  }
  return 0.0;
}

double LossSpec::half_slope(double r, double floor) const {
  const double a = std::max(std::abs(r), floor);
  switch (kind_) {
    case LossKind::Lp:
      if (p_ == 2.0) return 1.0;
      return 0.5 * p_ * std::pow(a, p_ - 2.0);
    case LossKind::Huber:
      return a <= param_ ? 1.0 / (2.0 * param_) : 0.5 / a;
    case LossKind::L1L2:
      return 0.5 / std::sqrt(1.0 + 0.5 * a * a);
    case LossKind::Fair:
      return 0.5 / (1.0 + a / param_);
  }
  return 0.0;
}

LossSpec parse_loss(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  std::optional<double> arg;
  if (colon != std::string::npos) {
    try {
      arg = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw InputError("bad loss parameter in '" + text + "'");
    }
  }
  if (head == "l1") return LossSpec::lp(1.0);
  if (head == "l2") return LossSpec::lp(2.0);
  if (head == "lp") {
    if (!arg) throw InputError("lp loss needs an exponent, e.g. lp:1.5");
    return LossSpec::lp(*arg);
  }
  if (head == "huber") return LossSpec::huber(arg.value_or(1.0));
  if (head == "l1l2") return LossSpec::l1l2();
  if (head == "fair") return LossSpec::fair(arg.value_or(1.0));
  throw InputError("unknown loss '" + text + "'");
}

double lower_growth_constant(const LossSpec& loss) {
  constexpr int kPerDecade = 40;
  constexpr int kDecades = 12;
  std::vector<double> grid;
  std::vector<double> values;
  for (int t = 0; t <= kPerDecade * kDecades; ++t) {
    const double x = std::pow(10.0, -6.0 + static_cast<double>(t) / kPerDecade);
    grid.push_back(x);
    values.push_back(loss.value(x));
  }
  double best = 1.0;
  for (std::size_t ib = 0; ib < grid.size(); ++ib) {
    const double slope_b = values[ib] / grid[ib];
    for (std::size_t ia = ib; ia < grid.size(); ++ia)
      best = std::min(best, (values[ia] / grid[ia]) / slope_b);
  }
  return best;
}

double m_value(const LossSpec& loss, double x) {
  if (!std::isfinite(x)) throw InputError("M-estimator evaluated at a non-finite value");
  return loss.value(x);
}

// ---------------------------------------------------------------------------

WeightVector::WeightVector(Vector w) : w_(std::move(w)) {
  for (Index i = 0; i < w_.size(); ++i)
    if (!(w_[i] >= 1.0) || !std::isfinite(w_[i]))
      throw InputError("weights must be finite and >= 1");
}

WeightVector WeightVector::ones(Index n) { return WeightVector(Vector::Ones(n)); }

bool WeightVector::is_unit() const { return (w_.array() == 1.0).all(); }

double WeightVector::max() const { return w_.size() ? w_.maxCoeff() : 1.0; }

double WeightVector::l1() const {
  return pairwise_sum(std::span<const double>(w_.data(), static_cast<std::size_t>(w_.size())));
}

int WeightVector::bucket_of(Index i) const {
  return static_cast<int>(std::floor(std::log2(w_[i]))) + 1;
}

int WeightVector::bucket_count() const {
  return static_cast<int>(std::ceil(std::log2(1.0 + max())));
}

std::vector<std::vector<Index>> WeightVector::buckets() const {
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(bucket_count()));
  for (Index i = 0; i < w_.size(); ++i) {
    const auto j = static_cast<std::size_t>(bucket_of(i));
    if (j > out.size()) out.resize(j);
    out[j - 1].push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------

Matrix::Matrix(DenseMatrix m) : data_(std::move(m)) {}
Matrix::Matrix(SparseMatrix m) : data_(std::move(m)) { std::get<SparseMatrix>(data_).makeCompressed(); }

Index Matrix::rows() const {
  return std::visit([](const auto& m) { return static_cast<Index>(m.rows()); }, data_);
}

Index Matrix::cols() const {
  return std::visit([](const auto& m) { return static_cast<Index>(m.cols()); }, data_);
}

Index Matrix::nnz() const {
  if (const auto* s = std::get_if<SparseMatrix>(&data_)) return s->nonZeros();
  return (std::get<DenseMatrix>(data_).array() != 0.0).count();
}

const DenseMatrix& Matrix::dense() const {
  if (is_sparse()) throw InputError("matrix is sparse");
  return std::get<DenseMatrix>(data_);
}

const SparseMatrix& Matrix::sparse() const {
  if (!is_sparse()) throw InputError("matrix is dense");
  return std::get<SparseMatrix>(data_);
}

DenseMatrix Matrix::to_dense() const {
  if (const auto* s = std::get_if<SparseMatrix>(&data_)) return DenseMatrix(*s);
  return std::get<DenseMatrix>(data_);
}

DenseMatrix Matrix::times(const DenseMatrix& b) const {
  if (b.rows() != cols()) throw InputError("Matrix::times: shape mismatch");
  return std::visit([&](const auto& m) -> DenseMatrix { return m * b; }, data_);
}

DenseMatrix Matrix::transpose_times(const DenseMatrix& b) const {
  if (b.rows() != rows()) throw InputError("Matrix::transpose_times: shape mismatch");
  return std::visit([&](const auto& m) -> DenseMatrix { return m.transpose() * b; }, data_);
}

DenseMatrix Matrix::weighted_gram(const Vector& weights) const {
  if (weights.size() != rows()) throw InputError("weighted_gram: weight length mismatch");
  if (const auto* s = std::get_if<SparseMatrix>(&data_)) {
    SparseMatrix ws = weights.asDiagonal() * (*s);
    return DenseMatrix(s->transpose() * ws);
  }
  const auto& d = std::get<DenseMatrix>(data_);
  return d.transpose() * weights.asDiagonal() * d;
}

Vector Matrix::row(Index i) const {
  Vector out = Vector::Zero(cols());
  for_each_in_row(i, [&](Index j, double v) { out[j] = v; });
  return out;
}

Vector Matrix::row_norms() const {
  if (const auto* s = std::get_if<SparseMatrix>(&data_)) {
    Vector out(s->rows());
    for (Index i = 0; i < s->rows(); ++i) out[i] = s->row(i).norm();
    return out;
  }
  return std::get<DenseMatrix>(data_).rowwise().norm();
}

Matrix Matrix::select_rows(std::span<const Index> idx, std::span<const double> scale) const {
  if (!scale.empty() && scale.size() != idx.size())
    throw InputError("select_rows: scale length mismatch");
  const auto n = static_cast<Index>(idx.size());
  auto factor = [&](std::size_t t) { return scale.empty() ? 1.0 : scale[t]; };
  if (const auto* s = std::get_if<SparseMatrix>(&data_)) {
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t t = 0; t < idx.size(); ++t)
      for (SparseMatrix::InnerIterator it(*s, idx[t]); it; ++it)
        trip.emplace_back(static_cast<int>(t), static_cast<int>(it.col()), it.value() * factor(t));
    SparseMatrix out(n, s->cols());
    out.setFromTriplets(trip.begin(), trip.end());
    return Matrix(std::move(out));
  }
  const auto& d = std::get<DenseMatrix>(data_);
  DenseMatrix out(n, d.cols());
  for (std::size_t t = 0; t < idx.size(); ++t)
    out.row(static_cast<Index>(t)) = d.row(idx[t]) * factor(t);
  return Matrix(std::move(out));
}

Matrix Matrix::append_column(const Vector& b) const {
  if (b.size() != rows()) throw InputError("append_column: length mismatch");
  if (const auto* s = std::get_if<SparseMatrix>(&data_)) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(s->nonZeros() + b.size()));
    for (Index i = 0; i < s->rows(); ++i) {
      for (SparseMatrix::InnerIterator it(*s, i); it; ++it)
        trip.emplace_back(static_cast<int>(i), static_cast<int>(it.col()), it.value());
      if (b[i] != 0.0) trip.emplace_back(static_cast<int>(i), static_cast<int>(s->cols()), b[i]);
    }
    SparseMatrix out(s->rows(), s->cols() + 1);
    out.setFromTriplets(trip.begin(), trip.end());
    return Matrix(std::move(out));
  }
  const auto& d = std::get<DenseMatrix>(data_);
  DenseMatrix out(d.rows(), d.cols() + 1);
  out << d, b;
  return Matrix(std::move(out));
}

// ---------------------------------------------------------------------------

Subspace::Subspace(DenseMatrix u, std::optional<double> quality_k)
    : u_(std::move(u)), quality_k_(quality_k) {
  if (quality_k_ && !(*quality_k_ >= 1.0)) throw InputError("subspace quality K must be >= 1");
  if (u_.cols() > u_.rows()) throw InputError("subspace has more columns than ambient dimension");
  if (orthonormality_error() > 1e-8) throw InputError("subspace basis is not orthonormal");
}

Subspace Subspace::empty(Index ambient_dim) { return Subspace(DenseMatrix(ambient_dim, 0)); }

Subspace Subspace::full(Index ambient_dim) {
  return Subspace(DenseMatrix::Identity(ambient_dim, ambient_dim));
}

double Subspace::containment_gap(const DenseMatrix& w) const {
  if (w.rows() != ambient_dim()) throw InputError("containment_gap: dimension mismatch");
  return (w - u_ * (u_.transpose() * w)).norm();
}

double Subspace::orthonormality_error() const {
  if (u_.cols() == 0) return 0.0;
  return (u_.transpose() * u_ - DenseMatrix::Identity(u_.cols(), u_.cols())).cwiseAbs().maxCoeff();
}

CostReport CostReport::from_cost_p(double cost_p, double p, std::uint64_t seed) {
  CostReport r;
  r.v_cost_p = cost_p;
  r.v_cost = std::pow(cost_p, 1.0 / p);
  r.seed = seed;
  return r;
}

// ---------------------------------------------------------------------------

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 64;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double cost_from_row_norms(const Vector& norms, const WeightVector& w, const LossSpec& loss) {
  if (w.size() != norms.size()) throw InputError("weight vector length does not match row count");
  std::vector<double> terms(static_cast<std::size_t>(norms.size()));
  for (Index i = 0; i < norms.size(); ++i)
    terms[static_cast<std::size_t>(i)] = w[i] * loss.value(norms[i]);
  return pairwise_sum(terms);
}

double v_norm_p(const Matrix& a, const WeightVector& w, const LossSpec& loss) {
  if (w.size() != a.rows()) throw InputError("weight vector length does not match row count");
  return cost_from_row_norms(a.row_norms(), w, loss);
}

double v_norm_p(const Matrix& a, const LossSpec& loss) {
  return v_norm_p(a, WeightVector::ones(a.rows()), loss);
}

double entrywise_norm_p(const Matrix& a, const WeightVector& w, const LossSpec& loss) {
  if (w.size() != a.rows()) throw InputError("weight vector length does not match row count");
  std::vector<double> terms(static_cast<std::size_t>(a.rows()));
  for (Index i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    a.for_each_in_row(i, [&](Index, double v) { s += loss.value(v); });
    terms[static_cast<std::size_t>(i)] = w[i] * s;
  }
  return pairwise_sum(terms);
}

double entrywise_norm_p(const Matrix& a, const LossSpec& loss) {
  return entrywise_norm_p(a, WeightVector::ones(a.rows()), loss);
}

Vector residual_row_norms(const Matrix& a, const Subspace& x) {
  if (x.ambient_dim() != a.cols()) throw InputError("subspace dimension does not match columns");
  const DenseMatrix& u = x.basis();
  if (u.cols() == 0) return a.row_norms();
  const DenseMatrix coords = a.times(u);
  Vector out(a.rows());
  // Rows are processed in blocks so the dense residual never exceeds a block.
  constexpr Index kBlock = 512;
  for (Index start = 0; start < a.rows(); start += kBlock) {
    const Index len = std::min(kBlock, a.rows() - start);
    DenseMatrix block = -coords.middleRows(start, len) * u.transpose();
    for (Index t = 0; t < len; ++t)
      a.for_each_in_row(start + t, [&](Index j, double v) { block(t, j) += v; });
    out.segment(start, len) = block.rowwise().norm();
  }
  return out;
}

double residual_cost(const Matrix& a, const Subspace& x, const WeightVector& w,
                     const LossSpec& loss) {
  return cost_from_row_norms(residual_row_norms(a, x), w, loss);
}

double residual_cost(const Matrix& a, const Subspace& x, const LossSpec& loss) {
  return residual_cost(a, x, WeightVector::ones(a.rows()), loss);
}

}  // namespace robsub
