#pragma once

// The clique-to-subspace gadget: B2 implicit copies of the standard simplex
// plus a normalized adjacency block, with closed-form and brute-force costs.

#include "robsub/core.hpp"

#include <cstdint>
#include <vector>

namespace robsub {

using Adjacency = Eigen::MatrixXi;

struct GadgetInstance {
  Index d = 0;
  Index r = 0;
  Index k = 0;
  double b1 = 1e4;
  /// Number of simplex copies; never materialized unless asked.
  std::int64_t b2 = 1000000;
  /// Solves (1 - 1/b1)^2 + c^2 / b1 = 1.
  double c = 0.0;
  Adjacency adjacency;
  /// d x d: diagonal 1 - 1/b1, c / sqrt(b1 r) on edges. Rows have unit norm.
  DenseMatrix a;

  /// Q with `copies` simplex copies on top of the rows of a; throws past 1e6 rows.
  DenseMatrix q_points(std::int64_t copies) const;
};

/// Throws InputError unless adj is symmetric 0/1 with a zero diagonal and
/// every vertex has the same degree r >= 1, and 1 <= k <= r.
GadgetInstance gen_gadget(const Adjacency& adj, Index k, double b1 = 1e4, std::int64_t b2 = 1000000);

/// Degree r of a regular graph; throws for irregular or malformed input.
Index regular_degree(const Adjacency& adj);

/// Edges from vertex i into the set s.
Index edges_into(const GadgetInstance& inst, Index i, const std::vector<Index>& s);

/// b2 (d - k) + sum_i (1 - ||A_i^S||^2)^{p/2} from the closed forms.
double coordinate_subspace_cost(const GadgetInstance& inst, const std::vector<Index>& s, double p);

/// sum_i (1 - ||V_i||^2)^{p/2}: cost of the simplex against span(V).
double simplex_cost(const DenseMatrix& v, double p);

/// b2 c(E, V) + sum_i dist(A_i, V)^p by direct projection, for any orthonormal V.
double gadget_subspace_cost(const GadgetInstance& inst, const DenseMatrix& v, double p);

struct CoordinateOptimum {
  std::vector<Index> s;
  double cost = 0.0;
  std::int64_t evaluated = 0;
};

/// Exhaustive minimum over coordinate k-subsets; ties go to the
/// lexicographically smallest set. Throws when C(d, k) > cap.
CoordinateOptimum brute_force_best_coordinate(const GadgetInstance& inst, double p,
                                              std::int64_t cap = 1000000);

/// Lower bound (d - k) + ((1 - v)^{p/2} + v^{p/2} - 1) for v in [0, 1 - 1/(k+1)].
double perturbed_simplex_cost(Index d, Index k, double v, double p);

/// (k+1)-th largest squared row norm of V (0 when d <= k).
double kth_plus_one_row_mass(const DenseMatrix& v, Index k);

/// (2/b1)^{p/2} [(1 - (k-2)/r)^{p/2} - (1 - (k-1)/r)^{p/2}].
double clique_margin_bound(double b1, Index k, Index r, double p);

/// Cost of a k-clique coordinate set: (b2 + 1)(d - k) + (2/b1)^{p/2} k (1 - (k-1)/r)^{p/2},
/// up to the O(d^2 / b1) slack.
double clique_formula_cost(const GadgetInstance& inst, double p);

/// cost - (b2 + 1)(d - k): the part above the simplex and far-row baseline.
double excess_cost(const GadgetInstance& inst, double cost);

bool has_clique(const Adjacency& adj, Index k);

Adjacency complete_graph(Index n);
Adjacency cycle_graph(Index n);
Adjacency petersen_graph();
Adjacency graph_from_edges(Index n, const std::vector<std::pair<Index, Index>>& edges);

}  // namespace robsub
