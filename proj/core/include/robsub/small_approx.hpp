#pragma once

// Desk-scale solver for min over rank-k projectors X = W W^T of
// sum_i w_i M(||(A X B - C)_i||_2), by multi-start local search on the
// Grassmannian or, for tiny instances, dense candidate enumeration.

#include "robsub/core.hpp"

#include <cstdint>

namespace robsub {

struct SmallProblem {
  /// n x u.
  DenseMatrix a_hat;
  /// u x s.
  DenseMatrix b;
  /// n x s.
  DenseMatrix c;
  WeightVector w;
  Index k = 1;
  double eps = 0.25;

  Index rows() const { return a_hat.rows(); }
  Index dim() const { return a_hat.cols(); }
};

enum class SmallMethod { LocalSearch, ExhaustiveTiny };

struct SmallApproxOptions {
  int restarts = 10;
  int max_iters = 200;
  /// Stop once a full iteration improves the objective by less than this (relative).
  double tol = 1e-12;
  Index row_cap = 20000;
  Index side_cap = 400;
  /// Random candidates added to the coordinate subsets in ExhaustiveTiny.
  int tiny_candidates = 2000;
  /// Candidates polished after the ExhaustiveTiny scan.
  int tiny_polish = 20;
  /// Skip majorize-minimize proposals when n u max(u, s) exceeds this.
  double mm_work_cap = 2e8;
};

struct SmallResult {
  /// u x k with orthonormal columns (u x u identity when k >= u).
  DenseMatrix w;
  double cost = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// sum_i w_i M(||(A W W^T B - C)_i||_2).
double small_objective(const SmallProblem& prob, const LossSpec& loss, const DenseMatrix& w);

/// Local refinement from a start W0: majorize-minimize eigen-proposals plus
/// Riemannian gradient steps with a QR retraction and Armijo backtracking.
SmallResult polish_subspace(const SmallProblem& prob, const LossSpec& loss, const DenseMatrix& w0,
                            const SmallApproxOptions& opt = {});

SmallResult small_approx(const SmallProblem& prob, const LossSpec& loss, SmallMethod method,
                         std::uint64_t seed, const SmallApproxOptions& opt = {});

}  // namespace robsub
