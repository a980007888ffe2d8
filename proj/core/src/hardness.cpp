#include "robsub/hardness.hpp"

#include "robsub/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace robsub {

namespace {

double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (Index j = 1; j <= k; ++j) out = out * static_cast<double>(n - k + j) / static_cast<double>(j);
  return out;
}

/// Advances s to the next k-subset of [0, n) in lexicographic order.
bool next_subset(std::vector<Index>& s, Index n) {
  const auto k = static_cast<Index>(s.size());
  Index pos = k - 1;
  while (pos >= 0 && s[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
  if (pos < 0) return false;
  ++s[static_cast<std::size_t>(pos)];
  for (Index j = pos + 1; j < k; ++j) s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

double row_distance_p(const DenseMatrix& v, const Eigen::Ref<const Vector>& q, double p) {
  const Vector res = q - v * (v.transpose() * q);
  return std::pow(res.squaredNorm(), p / 2.0);
}

}  // namespace

Index regular_degree(const Adjacency& adj) {
  if (adj.rows() != adj.cols() || adj.rows() == 0) throw InputError("graph: adjacency must be square and nonempty");
  const Index d = adj.rows();
  Index r = -1;
  for (Index i = 0; i < d; ++i) {
    if (adj(i, i) != 0) throw InputError("graph: self loops are not allowed");
    Index deg = 0;
    for (Index j = 0; j < d; ++j) {
      const int v = adj(i, j);
      if (v != 0 && v != 1) throw InputError("graph: adjacency entries must be 0 or 1");
      if (v != adj(j, i)) throw InputError("graph: adjacency must be symmetric");
      deg += v;
    }
    if (r < 0) r = deg;
    if (deg != r) throw InputError("graph: not regular (degrees " + std::to_string(r) + " and " +
                                   std::to_string(deg) + ")");
  }
  if (r < 1) throw InputError("graph: regular degree must be at least 1");
  return r;
}

GadgetInstance gen_gadget(const Adjacency& adj, Index k, double b1, std::int64_t b2) {
  const Index r = regular_degree(adj);
  if (k < 1 || k > r) throw InputError("gadget: k must lie in [1, r] (r = " + std::to_string(r) + ")");
  if (!(b1 > 1.0)) throw InputError("gadget: B1 must exceed 1");
  if (b2 < 0) throw InputError("gadget: B2 must be nonnegative");
  GadgetInstance inst;
  inst.d = adj.rows();
  inst.r = r;
  inst.k = k;
  inst.b1 = b1;
  inst.b2 = b2;
  inst.c = std::sqrt(2.0 - 1.0 / b1);
  inst.adjacency = adj;
  inst.a = DenseMatrix::Zero(inst.d, inst.d);
  const double off = inst.c / std::sqrt(b1 * static_cast<double>(r));
  for (Index i = 0; i < inst.d; ++i) {
    inst.a(i, i) = 1.0 - 1.0 / b1;
    for (Index j = 0; j < inst.d; ++j)
      if (adj(i, j) == 1) inst.a(i, j) = off;
  }
  return inst;
}

DenseMatrix GadgetInstance::q_points(std::int64_t copies) const {
  if (copies < 0 || (copies + 1) * d > 1000000) throw InputError("gadget: too many rows to materialize");
  DenseMatrix q(static_cast<Index>(copies + 1) * d, d);
  for (std::int64_t t = 0; t < copies; ++t) q.middleRows(static_cast<Index>(t) * d, d).setIdentity();
  q.bottomRows(d) = a;
  return q;
}

Index edges_into(const GadgetInstance& inst, Index i, const std::vector<Index>& s) {
  Index e = 0;
  for (Index j : s) e += inst.adjacency(i, j);
  return e;
}

double coordinate_subspace_cost(const GadgetInstance& inst, const std::vector<Index>& s, double p) {
  if (static_cast<Index>(s.size()) != inst.k) throw InputError("gadget: index set must have size k");
  std::vector<char> in(static_cast<std::size_t>(inst.d), 0);
  for (Index j : s) {
    if (j < 0 || j >= inst.d || in[static_cast<std::size_t>(j)]) throw InputError("gadget: bad index set");
    in[static_cast<std::size_t>(j)] = 1;
  }
  const double rr = static_cast<double>(inst.r);
  const double c2 = inst.c * inst.c;
  double rows = 0.0;
  for (Index i = 0; i < inst.d; ++i) {
    const double e = static_cast<double>(edges_into(inst, i, s));
    // 1 - ||A_i^S||^2; for i in S this is 2/b1 - 1/b1^2 - e c^2/(b1 r) = (c^2/b1)(1 - e/r).
    const double gap = in[static_cast<std::size_t>(i)] ? (c2 / inst.b1) * (1.0 - e / rr)
                                                       : 1.0 - e * c2 / (inst.b1 * rr);
    rows += std::pow(std::max(gap, 0.0), p / 2.0);
  }
  return static_cast<double>(inst.b2) * static_cast<double>(inst.d - inst.k) + rows;
}

double simplex_cost(const DenseMatrix& v, double p) {
  double total = 0.0;
  for (Index i = 0; i < v.rows(); ++i) {
    Vector e = Vector::Zero(v.rows());
    e[i] = 1.0;
    total += row_distance_p(v, e, p);
  }
  return total;
}

double gadget_subspace_cost(const GadgetInstance& inst, const DenseMatrix& v, double p) {
  if (v.rows() != inst.d) throw InputError("gadget: subspace dimension mismatch");
  double rows = 0.0;
  for (Index i = 0; i < inst.d; ++i) rows += row_distance_p(v, inst.a.row(i).transpose(), p);
  return static_cast<double>(inst.b2) * simplex_cost(v, p) + rows;
}

CoordinateOptimum brute_force_best_coordinate(const GadgetInstance& inst, double p, std::int64_t cap) {
  if (binomial(inst.d, inst.k) > static_cast<double>(cap))
    throw InputError("gadget: C(d, k) exceeds the enumeration cap");
  std::vector<Index> s(static_cast<std::size_t>(inst.k));
  std::iota(s.begin(), s.end(), Index{0});
  CoordinateOptimum best;
  best.cost = std::numeric_limits<double>::infinity();
  do {
    const double cost = coordinate_subspace_cost(inst, s, p);
    ++best.evaluated;
    if (cost < best.cost) {
      best.cost = cost;
      best.s = s;
    }
  } while (next_subset(s, inst.d));
  return best;
}

double perturbed_simplex_cost(Index d, Index k, double v, double p) {
  if (k < 1 || k >= d) throw InputError("perturbed simplex: need 1 <= k < d");
  const double hi = 1.0 - 1.0 / static_cast<double>(k + 1);
  if (!(v >= 0.0 && v <= hi + 1e-12)) throw InputError("perturbed simplex: v out of range");
  return static_cast<double>(d - k) + (std::pow(1.0 - v, p / 2.0) + std::pow(v, p / 2.0) - 1.0);
}

double kth_plus_one_row_mass(const DenseMatrix& v, Index k) {
  if (v.rows() <= k) return 0.0;
  std::vector<double> m(static_cast<std::size_t>(v.rows()));
  for (Index i = 0; i < v.rows(); ++i) m[static_cast<std::size_t>(i)] = v.row(i).squaredNorm();
  std::nth_element(m.begin(), m.begin() + k, m.end(), std::greater<>());
  return m[static_cast<std::size_t>(k)];
}

double clique_margin_bound(double b1, Index k, Index r, double p) {
  const double rr = static_cast<double>(r);
  const double kk = static_cast<double>(k);
  return std::pow(2.0 / b1, p / 2.0) *
         (std::pow(1.0 - (kk - 2.0) / rr, p / 2.0) - std::pow(1.0 - (kk - 1.0) / rr, p / 2.0));
}

double clique_formula_cost(const GadgetInstance& inst, double p) {
  const double kk = static_cast<double>(inst.k);
  return static_cast<double>(inst.b2 + 1) * static_cast<double>(inst.d - inst.k) +
         std::pow(2.0 / inst.b1, p / 2.0) * kk * std::pow(1.0 - (kk - 1.0) / static_cast<double>(inst.r), p / 2.0);
}

double excess_cost(const GadgetInstance& inst, double cost) {
  return cost - static_cast<double>(inst.b2 + 1) * static_cast<double>(inst.d - inst.k);
}

bool has_clique(const Adjacency& adj, Index k) {
  const Index d = adj.rows();
  if (k <= 1) return k <= d;
  if (k > d) return false;
  std::vector<Index> s(static_cast<std::size_t>(k));
  std::iota(s.begin(), s.end(), Index{0});
  do {
    bool ok = true;
    for (std::size_t x = 0; x < s.size() && ok; ++x)
      for (std::size_t y = x + 1; y < s.size() && ok; ++y) ok = adj(s[x], s[y]) == 1;
    if (ok) return true;
  } while (next_subset(s, d));
  return false;
}

Adjacency graph_from_edges(Index n, const std::vector<std::pair<Index, Index>>& edges) {
  Adjacency adj = Adjacency::Zero(n, n);
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n || u == v) throw InputError("graph: bad edge");
    adj(u, v) = 1;
    adj(v, u) = 1;
  }
  return adj;
}

Adjacency complete_graph(Index n) {
  Adjacency adj = Adjacency::Ones(n, n);
  adj.diagonal().setZero();
  return adj;
}

Adjacency cycle_graph(Index n) {
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return graph_from_edges(n, edges);
}

Adjacency petersen_graph() {
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i < 5; ++i) {
    edges.emplace_back(i, (i + 1) % 5);          // outer cycle
    edges.emplace_back(i, i + 5);                // spokes
    edges.emplace_back(5 + i, 5 + (i + 2) % 5);  // inner pentagram
  }
  return graph_from_edges(10, edges);
}

}  // namespace robsub
