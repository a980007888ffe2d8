#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace robsub {

using Rng = std::mt19937_64;

/// Mixes a parent seed with a stream tag and an index into an independent
/// child seed (splitmix64 finalizer). Children of distinct (stream, index)
/// pairs never share a generator state in practice.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ (stream * 0x632be59bd9b4e019ULL)) ^ index);
}

/// Stream tags used with derive_seed, one per randomized stage.
namespace streams {
inline constexpr std::uint64_t kSparseSketch = 1;
inline constexpr std::uint64_t kGaussian = 2;
inline constexpr std::uint64_t kStable = 3;
inline constexpr std::uint64_t kDraw = 4;
inline constexpr std::uint64_t kBasis = 5;
inline constexpr std::uint64_t kBeta = 6;
inline constexpr std::uint64_t kRecursion = 7;
inline constexpr std::uint64_t kRestart = 8;
inline constexpr std::uint64_t kLopsided = 9;
inline constexpr std::uint64_t kCandidates = 10;
}  // namespace streams

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                       double stddev, Rng& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  Eigen::MatrixXd g(rows, cols);
  // Column-major fill order is part of the determinism contract.
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
  return g;
}

/// Haar-distributed d x k matrix with orthonormal columns.
inline Eigen::MatrixXd random_orthonormal(Eigen::Index d, Eigen::Index k, Rng& rng) {
  Eigen::MatrixXd g = gaussian_matrix(d, k, 1.0, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
  // Fix the sign ambiguity of Householder QR so the distribution is Haar.
  for (Eigen::Index j = 0; j < k; ++j)
    if (qr.matrixQR()(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace robsub
