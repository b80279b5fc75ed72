#pragma once

// Kantorovich-Rubinstein norm of finitely supported free vectors.
//
// Real coefficients: exact via min-cost flow on the complete graph over the
// support plus the base point, with a 1-Lipschitz dual witness extracted from
// the node potentials (strong duality certifies the value).
//
// Complex coefficients: certified sandwich.  The lower bound pairs a real
// 1-Lipschitz witness obtained from rotated real subproblems; the upper bound
// solves the transport primal with flow phases restricted to the K-th roots
// of unity, which overshoots by at most a factor sec(pi/K).

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "lipfree/detail/min_cost_flow.hpp"
#include "lipfree/detail/simplex.hpp"
#include "lipfree/free_vector.hpp"

namespace lipfree {

struct FlowTerm {
  int from = -1;
  int to = -1;
  cx mass;  // transports delta(from) - delta(to) scaled by mass
};

struct NormCertificate {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<FlowTerm> primal_flow;        // cost equals `upper`
  std::vector<cx> dual_function;            // 1-Lipschitz, g(0) = 0, |<g,v>| = lower
  int grid_order = 0;                       // 0 for the exact real path

  double width() const { return upper - lower; }
};

namespace detail {

// Extends dual values given on `nodes` to every point, 1-Lipschitz, by the
// inf-convolution against the distance.
inline std::vector<cx> extend_dual(const PointedMetricSpace& space,
                                   const std::vector<int>& nodes,
                                   const std::vector<double>& values) {
  std::vector<cx> g(space.size(), cx(0.0, 0.0));
  for (int p = 0; p < space.size(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < nodes.size(); ++k)
      best = std::min(best, values[k] + space.dist(p, nodes[k]));
    g[p] = best;
  }
  // The base point is a node with value 0, so g(0) = 0 already; re-pin it
  // against rounding.
  g[space.base_index()] = 0.0;
  return g;
}

struct RealNormSolution {
  double value = 0.0;
  std::vector<FlowTerm> flow;
  std::vector<cx> dual;  // full-space extension
};

// Exact optimal transport of the real coefficient vector, base point acting
// as a free source/sink.
inline RealNormSolution real_transport(const PointedMetricSpace& space,
                                       const std::vector<std::pair<int, double>>& coeff) {
  RealNormSolution out;
  std::vector<int> nodes;
  nodes.push_back(space.base_index());
  double base_supply = 0.0;
  for (const auto& [idx, a] : coeff) {
    nodes.push_back(idx);
    base_supply -= a;
  }
  const int nn = static_cast<int>(nodes.size());
  std::vector<double> supply(nn, 0.0);
  supply[0] = base_supply;
  for (int k = 1; k < nn; ++k) supply[k] = coeff[k - 1].second;

  if (nn == 1) {
    out.dual = extend_dual(space, nodes, {0.0});
    return out;
  }

  MinCostFlow flow(nn + 2);
  const int src = nn, snk = nn + 1;
  std::vector<std::vector<int>> pair_arc(nn, std::vector<int>(nn, -1));
  for (int u = 0; u < nn; ++u)
    for (int v = 0; v < nn; ++v) {
      if (u == v) continue;
      pair_arc[u][v] = flow.add_arc(u, v, std::numeric_limits<double>::infinity(),
                                    space.dist(nodes[u], nodes[v]));
    }
  for (int u = 0; u < nn; ++u) {
    if (supply[u] > 0.0) flow.add_arc(src, u, supply[u], 0.0);
    if (supply[u] < 0.0) flow.add_arc(u, snk, -supply[u], 0.0);
  }
  out.value = flow.run(src, snk);

  for (int u = 0; u < nn; ++u)
    for (int v = 0; v < nn; ++v) {
      if (pair_arc[u][v] < 0) continue;
      const double f = flow.flow_on(pair_arc[u][v]);
      if (f > 0.0) out.flow.push_back({nodes[u], nodes[v], cx(f, 0.0)});
    }

  // Dual witness from potentials: g = pi(0) - pi(x) on nodes, extended.
  const std::vector<double>& pot = flow.potentials();
  std::vector<double> g_nodes(nn);
  for (int k = 0; k < nn; ++k) g_nodes[k] = pot[0] - pot[k];
  out.dual = extend_dual(space, nodes, g_nodes);
  return out;
}

// If all coefficients lie on one line through the origin, returns the unit
// phase u with coeff = u * (real vector).  The test is exact.
inline std::optional<cx> common_phase(const FreeVector& v) {
  cx ref(0.0, 0.0);
  for (const auto& [idx, c] : v.coefficients()) {
    if (ref == cx(0.0, 0.0)) ref = c;
    const double cross = c.imag() * ref.real() - c.real() * ref.imag();
    if (cross != 0.0) return std::nullopt;
  }
  if (ref == cx(0.0, 0.0)) return cx(1.0, 0.0);
  return ref / std::abs(ref);
}

inline std::vector<std::pair<int, double>> rotated_real_part(const FreeVector& v,
                                                             cx rotation) {
  std::vector<std::pair<int, double>> coeff;
  for (const auto& [idx, c] : v.coefficients()) {
    const double re = (rotation * c).real();
    if (re != 0.0) coeff.push_back({idx, re});
  }
  return coeff;
}

}  // namespace detail

// Exact norm for real coefficients.  Primal flow and dual witness agree to
// solver tolerance (strong duality of the finite transport problem).
inline NormCertificate norm_real(const FreeVector& v) {
  if (!v.real_coefficients())
    throw std::invalid_argument("norm_real needs real coefficients");
  const auto& space = *v.space();
  std::vector<std::pair<int, double>> coeff;
  for (const auto& [idx, c] : v.coefficients()) coeff.push_back({idx, c.real()});

  detail::RealNormSolution sol = detail::real_transport(space, coeff);
  NormCertificate cert;
  cert.lower = sol.value;
  cert.upper = sol.value;
  cert.primal_flow = std::move(sol.flow);
  cert.dual_function = std::move(sol.dual);
  cert.grid_order = 0;
  return cert;
}

// Certified lower/upper bounds for complex coefficients; exact when the
// coefficients are a complex multiple of a real vector.
inline NormCertificate norm_bounds(const FreeVector& v, int grid_order = 16) {
  if (grid_order < 4 || grid_order % 2 != 0)
    throw std::invalid_argument("grid order must be even and at least 4");
  const auto& space = *v.space();

  if (v.zero()) {
    NormCertificate cert;
    cert.dual_function.assign(space.size(), cx(0.0, 0.0));
    cert.grid_order = grid_order;
    return cert;
  }

  // One-line coefficients rotate onto the exact real path.
  if (auto phase = detail::common_phase(v)) {
    detail::RealNormSolution sol =
        detail::real_transport(space, detail::rotated_real_part(v, std::conj(*phase)));
    NormCertificate cert;
    cert.lower = cert.upper = sol.value;
    for (FlowTerm& t : sol.flow) t.mass *= *phase;
    cert.primal_flow = std::move(sol.flow);
    cert.dual_function = std::move(sol.dual);
    cert.grid_order = grid_order;
    return cert;
  }

  NormCertificate cert;
  cert.grid_order = grid_order;

  // Lower bound: each rotation theta yields a real transport dual g_theta;
  // |<g_theta, v>| is a valid bound and can only sharpen the rotated value.
  double best_pairing = 0.0;
  std::vector<cx> best_dual(space.size(), cx(0.0, 0.0));
  for (int k = 0; k < grid_order; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / grid_order;
    const cx rot(std::cos(theta), std::sin(theta));
    const auto coeff = detail::rotated_real_part(v, rot);
    detail::RealNormSolution sol = detail::real_transport(space, coeff);
    const double pairing = std::abs(dual_pairing(sol.dual, v));
    if (pairing > best_pairing) {
      best_pairing = pairing;
      best_dual = std::move(sol.dual);
    }
  }
  cert.lower = best_pairing;
  cert.dual_function = std::move(best_dual);

  // Upper bound: transport primal with masses restricted to the phases
  // exp(2 pi i k / K).  Columns are (unordered pair, phase); each carries the
  // pair distance as cost and matches real and imaginary balance at both
  // endpoints.
  std::vector<int> nodes;
  nodes.push_back(space.base_index());
  for (const auto& [idx, c] : v.coefficients()) nodes.push_back(idx);
  const int nn = static_cast<int>(nodes.size());

  std::vector<int> row_of_node(nn, -1);  // 2 rows per nonbase node
  int rows = 0;
  for (int k = 1; k < nn; ++k) {
    row_of_node[k] = rows;
    rows += 2;
  }

  std::vector<detail::SparseColumn> columns;
  std::vector<double> cost;
  struct ColMeta {
    int u, v, phase;
  };
  std::vector<ColMeta> meta;
  for (int u = 0; u < nn; ++u)
    for (int w = u + 1; w < nn; ++w)
      for (int k = 0; k < grid_order; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / grid_order;
        const double cth = std::cos(theta), sth = std::sin(theta);
        detail::SparseColumn col;
        if (row_of_node[u] >= 0) {
          col.entries.push_back({row_of_node[u], cth});
          col.entries.push_back({row_of_node[u] + 1, sth});
        }
        if (row_of_node[w] >= 0) {
          col.entries.push_back({row_of_node[w], -cth});
          col.entries.push_back({row_of_node[w] + 1, -sth});
        }
        columns.push_back(std::move(col));
        cost.push_back(space.dist(nodes[u], nodes[w]));
        meta.push_back({u, w, k});
      }

  std::vector<double> rhs(rows, 0.0);
  for (int k = 1; k < nn; ++k) {
    const cx a = v.coefficient(nodes[k]);
    rhs[row_of_node[k]] = a.real();
    rhs[row_of_node[k] + 1] = a.imag();
  }

  detail::RevisedSimplex lp(rows, std::move(columns), std::move(cost), std::move(rhs));
  detail::LpResult sol = lp.solve();
  cert.upper = sol.objective;
  for (size_t j = 0; j < sol.x.size(); ++j) {
    if (sol.x[j] <= 1e-12) continue;
    const double theta = 2.0 * std::numbers::pi * meta[j].phase / grid_order;
    cert.primal_flow.push_back({nodes[meta[j].u], nodes[meta[j].v],
                                sol.x[j] * cx(std::cos(theta), std::sin(theta))});
  }
  // Rounding can land the LP value a hair under the certified lower bound.
  if (cert.upper < cert.lower) cert.upper = cert.lower;
  return cert;
}

// Norm of a vector supported on two points, restricted to the three edges
// through the base: a weighted Fermat-Weber problem over the sites
// {0, a, -b}.  Real-proportional input hits a breakpoint exactly; otherwise
// Weiszfeld iteration refines it and the certified sandwich clamps the
// result.
inline double two_point_norm(const SpacePtr& space, cx a, int u, cx b, int w_point) {
  const auto& sp = *space;
  if (u == w_point || u == sp.base_index() || w_point == sp.base_index())
    throw std::invalid_argument("two_point_norm needs distinct nonbase points");
  const double duv = sp.dist(u, w_point);
  const double du0 = sp.radius(u);
  const double dv0 = sp.radius(w_point);

  const auto objective = [&](cx s) {
    return std::abs(s) * duv + std::abs(a - s) * du0 + std::abs(b + s) * dv0;
  };

  // Vertex candidates are optimal for one-line coefficients and always valid
  // upper bounds.
  double best = std::min({objective(cx(0.0, 0.0)), objective(a), objective(-b)});

  FreeVector vec(space);
  vec.add(u, a);
  vec.add(w_point, b);
  if (detail::common_phase(vec)) return best;

  // Weiszfeld on the three weighted sites, warm-started at the best vertex.
  const cx sites[3] = {cx(0.0, 0.0), a, -b};
  const double weights[3] = {duv, du0, dv0};
  cx s = (a - b) / 2.0;
  for (int iter = 0; iter < 200; ++iter) {
    cx num(0.0, 0.0);
    double den = 0.0;
    bool at_site = false;
    for (int k = 0; k < 3; ++k) {
      const double d = std::abs(s - sites[k]);
      if (d < 1e-15) {
        at_site = true;
        break;
      }
      num += weights[k] / d * sites[k];
      den += weights[k] / d;
    }
    if (at_site || den == 0.0) break;
    const cx next = num / den;
    const double step = std::abs(next - s);
    s = next;
    if (step <= 1e-12) break;
  }
  best = std::min(best, objective(s));

  const NormCertificate sandwich = norm_bounds(vec, 16);
  if (best < sandwich.lower) return sandwich.lower;
  if (best > sandwich.upper) return sandwich.upper;
  return best;
}

// Feasible upper bound routing every coefficient straight to the base point;
// exact on sum-radial metrics.
inline double radial_upper_bound(const FreeVector& v) {
  double s = 0.0;
  for (const auto& [idx, c] : v.coefficients())
    s += std::abs(c) * v.space()->radius(idx);
  return s;
}

}  // namespace lipfree
