#pragma once

// Functional-graph structure of a self-map: cycles with orbit order and
// weight products, and tail points with their entry distance to the cyclic
// part.

#include <complex>
#include <vector>

#include "lipfree/metric_space.hpp"

namespace lipfree {

struct Cycle {
  std::vector<int> points;  // orbit order, starting at the smallest index
  cx weight_product{1.0, 0.0};
  bool weights_nonzero = true;
  bool contains_base = false;

  int length() const { return static_cast<int>(points.size()); }
};

struct Tail {
  int point = -1;
  int entry_distance = 0;  // steps until the orbit first hits a cycle point
};

struct CycleDecomposition {
  std::vector<Cycle> cycles;
  std::vector<Tail> tails;
  bool base_on_cycle = false;  // a base cycle exists and is never eigen-producing
  std::vector<int> cycle_of_point;  // cycle index per point, -1 for tails

  // Nonbase periodic points of order exactly n.
  std::vector<int> periodic_points(int n) const {
    std::vector<int> pts;
    for (const Cycle& c : cycles)
      if (c.length() == n && !c.contains_base)
        pts.insert(pts.end(), c.points.begin(), c.points.end());
    std::sort(pts.begin(), pts.end());
    return pts;
  }

  // Cycle lengths that produce eigenvalues: nonbase cycles only.
  std::vector<int> eigen_cycle_lengths() const {
    std::vector<int> lengths;
    for (const Cycle& c : cycles)
      if (!c.contains_base) lengths.push_back(c.length());
    std::sort(lengths.begin(), lengths.end());
    lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
    return lengths;
  }
};

inline CycleDecomposition decompose(const PointedMetricSpace& space,
                                    const SelfMap& f, const Weight& w) {
  const int n = space.size();
  if (f.size() != n || w.size() != n)
    throw std::invalid_argument("map and weight must cover every point");

  CycleDecomposition out;
  out.cycle_of_point.assign(n, -1);

  // color: 0 unvisited, 1 on the current walk, 2 settled
  std::vector<int> color(n, 0);
  std::vector<int> walk;
  for (int start = 0; start < n; ++start) {
    if (color[start] != 0) continue;
    walk.clear();
    int x = start;
    while (color[x] == 0) {
      color[x] = 1;
      walk.push_back(x);
      x = f(x);
    }
    if (color[x] == 1) {
      // Found a new cycle: the suffix of the walk starting at x.
      size_t pos = 0;
      while (walk[pos] != x) ++pos;
      Cycle cycle;
      for (size_t k = pos; k < walk.size(); ++k) cycle.points.push_back(walk[k]);
      // Canonical orbit order: rotate to start at the smallest index.
      size_t smallest = 0;
      for (size_t k = 1; k < cycle.points.size(); ++k)
        if (cycle.points[k] < cycle.points[smallest]) smallest = k;
      std::rotate(cycle.points.begin(), cycle.points.begin() + smallest,
                  cycle.points.end());
      for (int p : cycle.points) {
        if (p == space.base_index()) cycle.contains_base = true;
        if (w.is_zero(p)) cycle.weights_nonzero = false;
        cycle.weight_product *= w(p);
      }
      if (cycle.contains_base) out.base_on_cycle = true;
      const int cycle_index = static_cast<int>(out.cycles.size());
      for (int p : cycle.points) out.cycle_of_point[p] = cycle_index;
      out.cycles.push_back(std::move(cycle));
    }
    for (int p : walk) color[p] = 2;
  }

  // Entry distances for tail points.
  std::vector<int> entry(n, -1);
  for (int p = 0; p < n; ++p)
    if (out.cycle_of_point[p] >= 0) entry[p] = 0;
  for (int p = 0; p < n; ++p) {
    if (entry[p] >= 0) continue;
    // Walk until a known entry distance, then backfill.
    std::vector<int> chain;
    int x = p;
    while (entry[x] < 0) {
      chain.push_back(x);
      x = f(x);
    }
    int d = entry[x];
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) entry[*it] = ++d;
  }
  for (int p = 0; p < n; ++p)
    if (out.cycle_of_point[p] < 0) out.tails.push_back({p, entry[p]});

  return out;
}

}  // namespace lipfree
