#pragma once

// Successive-shortest-path min-cost flow with Dijkstra and node potentials.
// Capacities and costs are doubles; graphs are dense and tiny, so Dijkstra
// uses a linear scan.  Costs must be nonnegative.

#include <limits>
#include <vector>

#include "lipfree/errors.hpp"

namespace lipfree::detail {

class MinCostFlow {
 public:
  explicit MinCostFlow(int n) : n_(n), head_(n) {}

  // Adds arc and its zero-capacity reverse; returns the arc id.
  int add_arc(int from, int to, double cap, double cost) {
    const int id = static_cast<int>(arcs_.size());
    arcs_.push_back({to, cap, cost, 0.0});
    head_[from].push_back(id);
    arcs_.push_back({from, 0.0, -cost, 0.0});
    head_[to].push_back(id + 1);
    return id;
  }

  double flow_on(int arc_id) const { return arcs_[arc_id].flow; }
  const std::vector<double>& potentials() const { return pot_; }

  // Pushes flow from source to sink until the source is exhausted; returns
  // the total cost.  The instance must be feasible.
  double run(int source, int sink) {
    pot_.assign(n_, 0.0);
    double total_cost = 0.0;
    while (true) {
      if (!dijkstra(source)) break;
      if (dist_[sink] == kInf) break;
      for (int v = 0; v < n_; ++v)
        if (dist_[v] < kInf) pot_[v] += dist_[v];

      // Bottleneck along the path.
      double push = kInf;
      for (int v = sink; v != source;) {
        const Arc& a = arcs_[prev_arc_[v]];
        push = std::min(push, a.cap - a.flow);
        v = arcs_[prev_arc_[v] ^ 1].to;
      }
      if (!(push > 0.0)) break;
      for (int v = sink; v != source;) {
        Arc& a = arcs_[prev_arc_[v]];
        a.flow += push;
        arcs_[prev_arc_[v] ^ 1].flow -= push;
        total_cost += push * a.cost;
        v = arcs_[prev_arc_[v] ^ 1].to;
      }
    }
    return total_cost;
  }

 private:
  struct Arc {
    int to;
    double cap;
    double cost;
    double flow;
  };

  static constexpr double kInf = std::numeric_limits<double>::infinity();

  bool dijkstra(int source) {
    dist_.assign(n_, kInf);
    prev_arc_.assign(n_, -1);
    done_.assign(n_, false);
    dist_[source] = 0.0;
    bool any = false;
    for (int round = 0; round < n_; ++round) {
      int u = -1;
      double best = kInf;
      for (int v = 0; v < n_; ++v)
        if (!done_[v] && dist_[v] < best) {
          best = dist_[v];
          u = v;
        }
      if (u < 0) break;
      done_[u] = true;
      any = true;
      for (int id : head_[u]) {
        const Arc& a = arcs_[id];
        if (a.cap - a.flow <= 0.0) continue;
        // Reduced cost; clamp the rounding fuzz so Dijkstra stays valid.
        double rc = a.cost + pot_[u] - pot_[a.to];
        if (rc < 0.0) rc = 0.0;
        if (dist_[u] + rc < dist_[a.to]) {
          dist_[a.to] = dist_[u] + rc;
          prev_arc_[a.to] = id;
        }
      }
    }
    return any;
  }

  int n_;
  std::vector<std::vector<int>> head_;
  std::vector<Arc> arcs_;
  std::vector<double> pot_;
  std::vector<double> dist_;
  std::vector<int> prev_arc_;
  std::vector<char> done_;
};

}  // namespace lipfree::detail
