#pragma once

// The weighted Lipschitz operator built from (space, self-map, weight): delta
// basis matrix, boundedness constants, application to free vectors, powers,
// operator-norm interval and the adjoint weighted composition action.

#include <optional>
#include <utility>
#include <vector>

#include "lipfree/free_vector.hpp"
#include "lipfree/kr_norm.hpp"
#include "lipfree/linalg.hpp"
#include "lipfree/metric_space.hpp"

namespace lipfree {

struct BoundednessConstants {
  double A = 0.0;
  double B = 0.0;
  std::pair<int, int> witness_A{-1, -1};
  std::pair<int, int> witness_B{-1, -1};
};

struct NormInterval {
  double lo = 0.0;
  double hi = 0.0;
  std::pair<int, int> witness{-1, -1};  // pair attaining hi
};

class WeightedLipOperator {
 public:
  // Requires f(0) = 0 or w(0) = 0; otherwise the delta of the base point
  // would need to carry mass, which it cannot.
  static WeightedLipOperator build(SpacePtr space, SelfMap f, Weight w) {
    const int n = space->size();
    if (f.size() != n || w.size() != n)
      throw std::invalid_argument("map and weight must cover every point");
    const int base = space->base_index();
    if (f(base) != base && !w.is_zero(base))
      throw admissibility_error("operator needs f(0) = 0 or w(0) = 0");
    WeightedLipOperator op;
    op.space_ = std::move(space);
    op.f_ = std::move(f);
    op.w_ = std::move(w);
    op.build_matrix();
    op.compute_boundedness();
    return op;
  }

  const SpacePtr& space() const { return space_; }
  const SelfMap& map() const { return f_; }
  const Weight& weight() const { return w_; }
  const linalg::Matrix& matrix() const { return matrix_; }
  const BoundednessConstants& boundedness() const { return constants_; }

  // Index of a nonbase point in the delta basis, and back.
  int basis_index(int point) const { return basis_index_[point]; }
  int point_of_basis(int k) const { return basis_points_[k]; }
  const std::vector<int>& basis_points() const { return basis_points_; }

  FreeVector apply(const FreeVector& v) const {
    if (v.space().get() != space_.get())
      throw std::invalid_argument("free vector lives on a different space");
    FreeVector out(space_);
    for (const auto& [idx, c] : v.coefficients()) out.add(f_(idx), c * w_(idx));
    return out;
  }

  // Adjoint action g -> w * (g o f); satisfies the exact duality
  // <adjoint(g), v> = <g, apply(v)>.
  std::vector<cx> adjoint_apply(const std::vector<cx>& g) const {
    if (static_cast<int>(g.size()) != space_->size())
      throw std::invalid_argument("function values must cover every point");
    if (g[space_->base_index()] != cx(0.0, 0.0))
      throw std::invalid_argument("adjoint needs g(0) = 0");
    std::vector<cx> out(g.size());
    for (int x = 0; x < space_->size(); ++x) out[x] = w_(x) * g[f_(x)];
    return out;
  }

  // Operator with map f^n and weight x -> prod_{k<n} w(f^k(x)).
  WeightedLipOperator power(int n) const {
    if (n < 1) throw std::invalid_argument("power needs n >= 1");
    SelfMap fn = SelfMap::identity(space_->size());
    Weight wn{std::vector<cx>(space_->size(), cx(1.0, 0.0)), w_.zero_tol};
    for (int k = 0; k < n; ++k) {
      for (int x = 0; x < space_->size(); ++x) wn.values[x] *= w_(fn(x));
      fn = f_.compose_after(fn);
    }
    return build(space_, std::move(fn), std::move(wn));
  }

  // Interval certain to contain the operator norm, computed as the Lipschitz
  // constant of x -> w(x) delta(f(x)) with per-pair molecule norms.  The
  // interval collapses whenever every molecule has one-line coefficients.
  const NormInterval& operator_norm() const {
    if (!norm_cache_) norm_cache_ = compute_norm_interval();
    return *norm_cache_;
  }

 private:
  void build_matrix() {
    const int n = space_->size();
    const int base = space_->base_index();
    basis_index_.assign(n, -1);
    basis_points_.clear();
    for (int x = 0; x < n; ++x)
      if (x != base) {
        basis_index_[x] = static_cast<int>(basis_points_.size());
        basis_points_.push_back(x);
      }
    const int m = static_cast<int>(basis_points_.size());
    matrix_ = linalg::Matrix(m, m);
    for (int col = 0; col < m; ++col) {
      const int x = basis_points_[col];
      const int img = f_(x);
      if (img == base) continue;
      matrix_(basis_index_[img], col) = w_(x);
    }
  }

  void compute_boundedness() {
    const int n = space_->size();
    BoundednessConstants c;
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        if (x == y) continue;
        const double d = space_->dist(x, y);
        const double rfx = space_->radius(f_(x));
        if (y > x) {
          const double a = std::abs(w_(x) * rfx - w_(y) * space_->radius(f_(y))) / d;
          if (a > c.A) {
            c.A = a;
            c.witness_A = {x, y};
          }
        }
        const double b =
            std::abs(w_(x) * rfx - w_(y) * (rfx - space_->dist(f_(x), f_(y)))) / d;
        if (b > c.B) {
          c.B = b;
          c.witness_B = {x, y};
        }
      }
    constants_ = c;
  }

  NormInterval compute_norm_interval() const {
    const int n = space_->size();
    NormInterval interval;
    for (int x = 0; x < n; ++x)
      for (int y = x + 1; y < n; ++y) {
        FreeVector molecule(space_);
        molecule.add(f_(x), w_(x));
        molecule.add(f_(y), -w_(y));
        const double d = space_->dist(x, y);
        double lo = 0.0, hi = 0.0;
        if (molecule.zero()) {
          // nothing
        } else if (molecule.support_size() == 1) {
          const auto& [pt, coef] = *molecule.coefficients().begin();
          lo = hi = std::abs(coef) * space_->radius(pt);
        } else {
          const auto support = molecule.support();
          if (detail::common_phase(molecule)) {
            lo = hi = two_point_norm(space_, molecule.coefficient(support[0]),
                                     support[0], molecule.coefficient(support[1]),
                                     support[1]);
          } else {
            const NormCertificate cert = norm_bounds(molecule, 16);
            lo = cert.lower;
            hi = cert.upper;
          }
        }
        interval.lo = std::max(interval.lo, lo / d);
        if (hi / d > interval.hi) {
          interval.hi = hi / d;
          interval.witness = {x, y};
        }
      }
    return interval;
  }

  SpacePtr space_;
  SelfMap f_;
  Weight w_;
  linalg::Matrix matrix_;
  BoundednessConstants constants_;
  std::vector<int> basis_index_;
  std::vector<int> basis_points_;
  // Lazily filled on first use; call operator_norm() once before sharing the
  // operator across threads.
  mutable std::optional<NormInterval> norm_cache_;
};

// Radial band cutoff: identity map with the three-branch weight that vanishes
// inside radius 2^n, ramps linearly across [2^n, 2^{n+1}] and is 1 outside.
inline WeightedLipOperator cutoff_operator(SpacePtr space, int band_exponent) {
  const int n = space->size();
  const double lo = std::ldexp(1.0, band_exponent);
  const double hi = std::ldexp(1.0, band_exponent + 1);
  Weight w{std::vector<cx>(n, cx(0.0, 0.0)), 0.0};
  for (int x = 0; x < n; ++x) {
    const double r = space->radius(x);
    if (r < lo)
      w.values[x] = 0.0;
    else if (r <= hi)
      w.values[x] = std::ldexp(r, -band_exponent) - 1.0;
    else
      w.values[x] = 1.0;
  }
  return WeightedLipOperator::build(std::move(space), SelfMap::identity(n), std::move(w));
}

}  // namespace lipfree
