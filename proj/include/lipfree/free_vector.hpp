#pragma once

// Finitely supported elements of the free space over a pointed metric space:
// complex combinations of evaluation functionals with the base point
// quotiented out.

#include <complex>
#include <map>
#include <vector>

#include "lipfree/metric_space.hpp"

namespace lipfree {

// Sparse complex combination of point evaluations.  The support is canonical:
// exactly-zero coefficients are dropped and the base point never carries one.
class FreeVector {
 public:
  FreeVector() = default;
  explicit FreeVector(SpacePtr space) : space_(std::move(space)) {}

  FreeVector(SpacePtr space, const std::vector<std::pair<int, cx>>& terms)
      : space_(std::move(space)) {
    for (const auto& [idx, c] : terms) add(idx, c);
  }

  static FreeVector delta(SpacePtr space, int point) {
    FreeVector v(std::move(space));
    v.add(point, cx(1.0, 0.0));
    return v;
  }

  const SpacePtr& space() const { return space_; }
  bool zero() const { return coeff_.empty(); }
  int support_size() const { return static_cast<int>(coeff_.size()); }

  const std::map<int, cx>& coefficients() const { return coeff_; }

  cx coefficient(int point) const {
    auto it = coeff_.find(point);
    return it == coeff_.end() ? cx(0.0, 0.0) : it->second;
  }

  std::vector<int> support() const {
    std::vector<int> s;
    s.reserve(coeff_.size());
    for (const auto& [idx, c] : coeff_) s.push_back(idx);
    return s;
  }

  // Accumulate a term; contributions at the base point and exact zeros vanish.
  void add(int point, cx c) {
    if (point < 0 || point >= space_->size())
      throw std::invalid_argument("point index out of range");
    if (point == space_->base_index()) return;
    if (c == cx(0.0, 0.0)) return;
    auto [it, inserted] = coeff_.try_emplace(point, c);
    if (!inserted) {
      it->second += c;
      if (it->second == cx(0.0, 0.0)) coeff_.erase(it);
    }
  }

  FreeVector operator+(const FreeVector& other) const {
    require_same_space(other);
    FreeVector out(*this);
    for (const auto& [idx, c] : other.coeff_) out.add(idx, c);
    return out;
  }

  FreeVector operator-(const FreeVector& other) const {
    require_same_space(other);
    FreeVector out(*this);
    for (const auto& [idx, c] : other.coeff_) out.add(idx, -c);
    return out;
  }

  friend FreeVector operator*(cx s, const FreeVector& v) {
    FreeVector out(v.space_);
    for (const auto& [idx, c] : v.coeff_) out.add(idx, s * c);
    return out;
  }

  bool real_coefficients() const {
    for (const auto& [idx, c] : coeff_)
      if (c.imag() != 0.0) return false;
    return true;
  }

  void require_same_space(const FreeVector& other) const {
    if (space_.get() != other.space_.get())
      throw std::invalid_argument("free vectors live on different spaces");
  }

 private:
  SpacePtr space_;
  std::map<int, cx> coeff_;
};

// Duality pairing of a scalar function (vanishing at the base point) with a
// free vector: the coefficient-weighted sum of its values.
inline cx dual_pairing(const std::vector<cx>& g, const FreeVector& v) {
  if (static_cast<int>(g.size()) != v.space()->size())
    throw std::invalid_argument("function values must cover every point");
  if (g[v.space()->base_index()] != cx(0.0, 0.0))
    throw std::invalid_argument("pairing needs g(0) = 0");
  cx s(0.0, 0.0);
  for (const auto& [idx, c] : v.coefficients()) s += c * g[idx];
  return s;
}

}  // namespace lipfree
