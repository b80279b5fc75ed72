#pragma once

// Finite pointed metric spaces: validation, Lipschitz constants, flatness
// predicates and the generator families used throughout (sum-radial,
// geometric d_lambda, dyadic shift).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lipfree/errors.hpp"

namespace lipfree {

using cx = std::complex<double>;

enum class MetricKind { Explicit, SumRadial, Geometric, Shift };

struct MetricDescriptor {
  MetricKind kind = MetricKind::Explicit;
  std::vector<double> rho;   // SumRadial: radius of each nonbase point
  double lambda_abs = 0.0;   // Geometric: |lambda|
  int n = 0;                 // Geometric/Shift: number of nonbase points
};

class PointedMetricSpace;
using SpacePtr = std::shared_ptr<const PointedMetricSpace>;

// Immutable finite pointed metric space. Distances are stored as a dense
// symmetric matrix; the base point is index `base_index()` and is always
// printed as "0" in reports.
class PointedMetricSpace {
 public:
  int size() const { return n_; }
  int base_index() const { return base_; }

  double dist(int i, int j) const { return d_[static_cast<size_t>(i) * n_ + j]; }
  // Distance to the base point.
  double radius(int i) const { return dist(i, base_); }

  const std::string& name(int i) const { return names_[i]; }
  // Base point is reported as "0" regardless of its id in the input file.
  std::string report_name(int i) const {
    return i == base_ ? std::string("0") : names_[i];
  }
  const std::vector<std::string>& names() const { return names_; }
  const MetricDescriptor& descriptor() const { return desc_; }

  bool sum_radial_like() const {
    return desc_.kind == MetricKind::SumRadial ||
           desc_.kind == MetricKind::Geometric ||
           desc_.kind == MetricKind::Shift;
  }

  static SpacePtr explicit_matrix(std::vector<std::string> names, int base,
                                  std::vector<std::vector<double>> d) {
    const int n = static_cast<int>(names.size());
    if (n < 1) throw std::invalid_argument("space needs at least one point");
    if (base < 0 || base >= n) throw std::invalid_argument("base index out of range");
    if (static_cast<int>(d.size()) != n)
      throw std::invalid_argument("distance matrix row count mismatch");
    PointedMetricSpace s;
    s.names_ = std::move(names);
    s.base_ = base;
    s.n_ = n;
    s.d_.resize(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(d[i].size()) != n)
        throw std::invalid_argument("distance matrix column count mismatch");
      for (int j = 0; j < n; ++j) s.d_[static_cast<size_t>(i) * n + j] = d[i][j];
    }
    s.desc_.kind = MetricKind::Explicit;
    return std::make_shared<const PointedMetricSpace>(std::move(s));
  }

  // d(x,y) = rho(x) + rho(y) for distinct nonbase points, d(x,0) = rho(x).
  // Point ids are "0", "1", ..., "n".
  static SpacePtr sum_radial(const std::vector<double>& rho) {
    MetricDescriptor desc;
    desc.kind = MetricKind::SumRadial;
    desc.rho = rho;
    return make_sum_radial(rho, std::move(desc));
  }

  // d(k,0) = (2|lambda|)^-k for k = 1..n.
  static SpacePtr geometric(double lambda_abs, int n) {
    if (!(lambda_abs > 0.0)) throw std::invalid_argument("geometric needs |lambda| > 0");
    if (n < 1) throw std::invalid_argument("geometric needs n >= 1");
    std::vector<double> rho(n);
    for (int k = 1; k <= n; ++k) rho[k - 1] = std::pow(2.0 * lambda_abs, -k);
    MetricDescriptor desc;
    desc.kind = MetricKind::Geometric;
    desc.lambda_abs = lambda_abs;
    desc.n = n;
    return make_sum_radial(rho, std::move(desc));
  }

  // d(k,0) = 2^k for k = 1..n.
  static SpacePtr shift(int n) {
    if (n < 1) throw std::invalid_argument("shift needs n >= 1");
    std::vector<double> rho(n);
    for (int k = 1; k <= n; ++k) rho[k - 1] = std::ldexp(1.0, k);
    MetricDescriptor desc;
    desc.kind = MetricKind::Shift;
    desc.n = n;
    return make_sum_radial(rho, std::move(desc));
  }

 private:
  static SpacePtr make_sum_radial(const std::vector<double>& rho,
                                  MetricDescriptor desc) {
    for (double r : rho)
      if (!(r > 0.0)) throw std::invalid_argument("radii must be positive");
    const int n = static_cast<int>(rho.size());
    PointedMetricSpace s;
    s.n_ = n + 1;
    s.base_ = 0;
    s.names_.resize(n + 1);
    for (int i = 0; i <= n; ++i) s.names_[i] = std::to_string(i);
    s.d_.assign(static_cast<size_t>(n + 1) * (n + 1), 0.0);
    auto at = [&](int i, int j) -> double& {
      return s.d_[static_cast<size_t>(i) * (n + 1) + j];
    };
    for (int i = 1; i <= n; ++i) {
      at(0, i) = at(i, 0) = rho[i - 1];
      for (int j = 1; j <= n; ++j)
        if (i != j) at(i, j) = rho[i - 1] + rho[j - 1];
    }
    s.desc_ = std::move(desc);
    return std::make_shared<const PointedMetricSpace>(std::move(s));
  }

  std::vector<std::string> names_;
  std::vector<double> d_;
  MetricDescriptor desc_;
  int n_ = 0;
  int base_ = 0;
};

struct MetricViolation {
  std::string axiom;  // "diagonal", "positivity", "symmetry", "triangle"
  int i = -1, j = -1, k = -1;
};

struct ValidationReport {
  std::vector<MetricViolation> violations;
  bool valid() const { return violations.empty(); }
};

// Exhaustive O(n^3) check of the metric axioms; every violation carries the
// witnessing indices. Triangle witness (i,k,j) means d(i,j) > d(i,k) + d(k,j).
inline ValidationReport validate_metric(const PointedMetricSpace& space) {
  ValidationReport report;
  const int n = space.size();
  for (int i = 0; i < n; ++i) {
    if (space.dist(i, i) != 0.0)
      report.violations.push_back({"diagonal", i, i, -1});
    for (int j = i + 1; j < n; ++j) {
      if (!(space.dist(i, j) > 0.0))
        report.violations.push_back({"positivity", i, j, -1});
      if (space.dist(i, j) != space.dist(j, i))
        report.violations.push_back({"symmetry", i, j, -1});
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (space.dist(i, j) > space.dist(i, k) + space.dist(k, j))
          report.violations.push_back({"triangle", i, j, k});
      }
    }
  return report;
}

// Self-map of the point set, stored as index -> index.
struct SelfMap {
  std::vector<int> image;

  int operator()(int i) const { return image[i]; }
  int size() const { return static_cast<int>(image.size()); }

  int iterate(int x, int k) const {
    for (int step = 0; step < k; ++step) x = image[x];
    return x;
  }

  static SelfMap identity(int n) {
    SelfMap f;
    f.image.resize(n);
    for (int i = 0; i < n; ++i) f.image[i] = i;
    return f;
  }

  static SelfMap constant(int n, int target) {
    SelfMap f;
    f.image.assign(n, target);
    return f;
  }

  SelfMap compose_after(const SelfMap& g) const {
    // (*this) o g
    SelfMap h;
    h.image.resize(g.size());
    for (int i = 0; i < g.size(); ++i) h.image[i] = image[g.image[i]];
    return h;
  }
};

// Complex weight on the point set. The zero test is exact by default; a
// nonzero tolerance reclassifies near-zero values, so it stays opt-in.
struct Weight {
  std::vector<cx> values;
  double zero_tol = 0.0;

  int size() const { return static_cast<int>(values.size()); }
  cx operator()(int i) const { return values[i]; }
  bool is_zero(int i) const { return std::abs(values[i]) <= zero_tol; }

  std::vector<int> cozero() const {
    std::vector<int> coz;
    for (int i = 0; i < size(); ++i)
      if (!is_zero(i)) coz.push_back(i);
    return coz;
  }

  double sup_norm() const {
    double m = 0.0;
    for (const cx& v : values) m = std::max(m, std::abs(v));
    return m;
  }

  static Weight ones(int n) { return Weight{std::vector<cx>(n, cx(1.0, 0.0)), 0.0}; }
};

// Best Lipschitz constant of a scalar function given by its values,
// sup over all pairs of |g(x)-g(y)| / d(x,y).
inline double lipschitz_constant(const PointedMetricSpace& space,
                                 std::span<const cx> g) {
  if (static_cast<int>(g.size()) != space.size())
    throw std::invalid_argument("function values must cover every point");
  double lip = 0.0;
  for (int i = 0; i < space.size(); ++i)
    for (int j = i + 1; j < space.size(); ++j)
      lip = std::max(lip, std::abs(g[i] - g[j]) / space.dist(i, j));
  return lip;
}

inline double lipschitz_constant(const PointedMetricSpace& space,
                                 const std::vector<cx>& g) {
  return lipschitz_constant(space, std::span<const cx>(g));
}

// Lip(f) for a self-map, sup over pairs of d(f(x),f(y)) / d(x,y).
inline double map_lipschitz(const PointedMetricSpace& space, const SelfMap& f) {
  if (f.size() != space.size())
    throw std::invalid_argument("self-map must cover every point");
  double lip = 0.0;
  for (int i = 0; i < space.size(); ++i)
    for (int j = i + 1; j < space.size(); ++j)
      lip = std::max(lip, space.dist(f(i), f(j)) / space.dist(i, j));
  return lip;
}

struct FlatnessResult {
  bool flat = true;
  double worst_ratio = 0.0;
  // Pair attaining the worst ratio among pairs with d(x,y) <= r; absent when
  // no pair qualifies (then the predicate holds vacuously).
  std::optional<std::pair<int, int>> witness;
};

// f is (r,eps)-flat when every pair at distance <= r contracts by factor eps.
inline FlatnessResult is_r_eps_flat(const PointedMetricSpace& space,
                                    const SelfMap& f, double r, double eps) {
  if (!(r > 0.0) || !(eps > 0.0))
    throw std::invalid_argument("flatness scales must be positive");
  FlatnessResult result;
  for (int i = 0; i < space.size(); ++i)
    for (int j = i + 1; j < space.size(); ++j) {
      const double dij = space.dist(i, j);
      if (dij > r) continue;
      const double ratio = space.dist(f(i), f(j)) / dij;
      if (!result.witness || ratio > result.worst_ratio) {
        result.worst_ratio = ratio;
        result.witness = std::make_pair(i, j);
      }
    }
  result.flat = result.worst_ratio <= eps;
  return result;
}

// Smallest realized radius R0 such that every realized R >= R0 satisfies
// f(B(0,R)) inside B(0,R/2); absent when no radius works.
inline std::optional<double> radial_flat_threshold(
    const PointedMetricSpace& space, const SelfMap& f) {
  std::vector<double> radii;
  for (int i = 0; i < space.size(); ++i)
    if (i != space.base_index()) radii.push_back(space.radius(i));
  if (radii.empty()) return std::nullopt;
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  auto holds_at = [&](double R) {
    for (int x = 0; x < space.size(); ++x)
      if (space.radius(x) <= R && space.radius(f(x)) > R / 2.0) return false;
    return true;
  };

  for (size_t c = 0; c < radii.size(); ++c) {
    bool all = true;
    for (size_t r = c; r < radii.size(); ++r)
      if (!holds_at(radii[r])) {
        all = false;
        break;
      }
    if (all) return radii[c];
  }
  return std::nullopt;
}

}  // namespace lipfree
