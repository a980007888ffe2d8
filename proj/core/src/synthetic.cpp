#include "robsub/synthetic.hpp"

#include "robsub/errors.hpp"
#include "robsub/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace robsub {

PlantedData planted_low_rank(const PlantedOptions& opt) {
  if (opt.k < 0 || opt.k > opt.d || opt.n < 1) throw InputError("planted data: bad shape");
  if (!(opt.outlier_fraction >= 0.0 && opt.outlier_fraction <= 1.0))
    throw InputError("planted data: outlier fraction must lie in [0, 1]");
  Rng rng(opt.seed);
  PlantedData out;
  out.basis = random_orthonormal(opt.d, opt.k, rng);
  const DenseMatrix coeff = gaussian_matrix(opt.n, opt.k, 1.0, rng);
  out.a = coeff * out.basis.transpose();
  if (opt.noise > 0.0) out.a += gaussian_matrix(opt.n, opt.d, opt.noise, rng);
  const auto n_out = static_cast<Index>(std::llround(opt.outlier_fraction * static_cast<double>(opt.n)));
  if (n_out > 0) {
    std::vector<Index> idx(static_cast<std::size_t>(opt.n));
    std::iota(idx.begin(), idx.end(), Index{0});
    for (Index t = 0; t < n_out; ++t) {
      std::uniform_int_distribution<Index> pick(t, opt.n - 1);
      std::swap(idx[static_cast<std::size_t>(t)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    out.outliers.assign(idx.begin(), idx.begin() + n_out);
    std::sort(out.outliers.begin(), out.outliers.end());
    for (Index i : out.outliers) out.a.row(i) = gaussian_matrix(1, opt.d, opt.outlier_scale, rng);
  }
  return out;
}

SparseMatrix random_sparse(Index n, Index d, double density, std::uint64_t seed) {
  if (!(density > 0.0 && density <= 1.0)) throw InputError("random sparse: density must lie in (0, 1]");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(density * static_cast<double>(n) * static_cast<double>(d) * 1.1) + 16);
  // Geometric skipping keeps generation proportional to nnz.
  const double log_q = std::log1p(-std::min(density, 1.0 - 1e-15));
  const double total = static_cast<double>(n) * static_cast<double>(d);
  double pos = -1.0;
  while (true) {
    const double u = unit(rng);
    pos += density >= 1.0 ? 1.0 : 1.0 + std::floor(std::log1p(-u) / log_q);
    if (pos >= total) break;
    const auto flat = static_cast<long long>(pos);
    trip.emplace_back(static_cast<Index>(flat / d), static_cast<Index>(flat % d), normal(rng));
  }
  SparseMatrix m(n, d);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

}  // namespace robsub
