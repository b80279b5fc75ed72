#pragma once

// Backward-shift realizations on radial metrics: the diagonal conjugation
// between the delta-basis matrix and the weighted-shift matrix on coefficient
// space, truncation spectra, resolvent-norm grids and the explicit family of
// approximate eigenvectors on the geometric metric.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "lipfree/linalg.hpp"
#include "lipfree/spectrum.hpp"
#include "lipfree/weighted_operator.hpp"

namespace lipfree {

struct ShiftModel {
  SpacePtr space;
  WeightedLipOperator op;              // f(n) = n-1, f(0) = 0, w == 1
  std::vector<double> radii;           // r_n = d(n, 0), n = 1..N
  std::vector<cx> conjugated_weights;  // T e_n = weight_n e_{n-1}, n = 2..N
  linalg::Matrix delta_matrix;
  linalg::Matrix conjugated_matrix;
};

// Builds the backward-shift operator on a shift(N) or geometric(|lambda|,N)
// metric and its conjugation to coefficient space: the isometry sends the
// n-th unit vector to delta(n)/r_n, so the shift weight at n is r_{n-1}/r_n.
inline ShiftModel build_shift(const MetricDescriptor& descriptor) {
  SpacePtr space;
  if (descriptor.kind == MetricKind::Shift)
    space = PointedMetricSpace::shift(descriptor.n);
  else if (descriptor.kind == MetricKind::Geometric)
    space = PointedMetricSpace::geometric(descriptor.lambda_abs, descriptor.n);
  else
    throw std::invalid_argument("shift models need a shift or geometric descriptor");
  if (descriptor.n < 2) throw std::invalid_argument("shift model needs n >= 2");

  const int n = descriptor.n;
  SelfMap f;
  f.image.resize(n + 1);
  f.image[0] = 0;
  for (int k = 1; k <= n; ++k) f.image[k] = k - 1;

  ShiftModel model{space,
                   WeightedLipOperator::build(space, f, Weight::ones(n + 1)),
                   {},
                   {},
                   {},
                   {}};
  model.radii.resize(n);
  for (int k = 1; k <= n; ++k) model.radii[k - 1] = space->radius(k);

  model.delta_matrix = model.op.matrix();
  model.conjugated_matrix = linalg::Matrix(n, n);
  model.conjugated_weights.resize(n, cx(0.0, 0.0));
  for (int k = 2; k <= n; ++k) {
    const cx weight = model.radii[k - 2] / model.radii[k - 1];
    model.conjugated_weights[k - 1] = weight;
    model.conjugated_matrix(k - 2, k - 1) = weight;
  }
  return model;
}

struct TruncationReport {
  SpectrumReport spectrum;
  std::string caveat;
};

// Spectrum of the truncated model.  Every truncation of a backward shift is
// nilpotent, so the report is all zeros no matter how large N grows; the
// caveat records that truncation spectra say nothing about the limit
// operator, whose spectrum fills a disc.
inline TruncationReport truncation_eigen_report(const ShiftModel& model) {
  TruncationReport report{point_spectrum(model.op, true),
                          "finite truncations of shift-type operators are "
                          "nilpotent: their spectra stay at 0 and do not "
                          "approximate the disc spectrum of the infinite "
                          "model"};
  return report;
}

struct GridSpec {
  double re0 = -0.8, re1 = 0.8;
  double im0 = -0.8, im1 = 0.8;
  int resolution = 81;
};

struct GridScan {
  GridSpec grid;
  std::vector<double> sigma_min;  // row-major, imaginary axis outer

  double at(int iy, int ix) const { return sigma_min[static_cast<size_t>(iy) * grid.resolution + ix]; }

  int count_below(double eps) const {
    int c = 0;
    for (double s : sigma_min)
      if (s <= eps) ++c;
    return c;
  }
};

inline double resolvent_sigma_min(const linalg::Matrix& m, cx lambda) {
  linalg::Matrix shifted = m;
  for (int i = 0; i < shifted.rows(); ++i) shifted(i, i) -= lambda;
  return linalg::smallest_singular_value(shifted);
}

// Smallest singular value of (matrix - lambda I) over the grid; small values
// certify approximate eigenvalues of the truncation.
inline GridScan resolvent_scan(const linalg::Matrix& matrix, const GridSpec& grid) {
  if (grid.resolution < 2) throw std::invalid_argument("grid needs resolution >= 2");
  GridScan scan{grid, {}};
  scan.sigma_min.reserve(static_cast<size_t>(grid.resolution) * grid.resolution);
  for (int iy = 0; iy < grid.resolution; ++iy) {
    const double im = grid.im0 + (grid.im1 - grid.im0) * iy / (grid.resolution - 1);
    for (int ix = 0; ix < grid.resolution; ++ix) {
      const double re = grid.re0 + (grid.re1 - grid.re0) * ix / (grid.resolution - 1);
      scan.sigma_min.push_back(resolvent_sigma_min(matrix, cx(re, im)));
    }
  }
  return scan;
}

inline GridScan resolvent_scan(const ShiftModel& model, const GridSpec& grid) {
  return resolvent_scan(model.conjugated_matrix, grid);
}

// CSV rows re,im,sigma_min with 17 significant digits.
inline void write_grid_csv(std::ostream& out, const GridScan& scan) {
  out << "re,im,sigma_min\n";
  char buffer[128];
  const GridSpec& g = scan.grid;
  for (int iy = 0; iy < g.resolution; ++iy) {
    const double im = g.im0 + (g.im1 - g.im0) * iy / (g.resolution - 1);
    for (int ix = 0; ix < g.resolution; ++ix) {
      const double re = g.re0 + (g.re1 - g.re0) * ix / (g.resolution - 1);
      std::snprintf(buffer, sizeof(buffer), "%.17g,%.17g,%.17g\n", re, im,
                    scan.at(iy, ix));
      out << buffer;
    }
  }
}

// Relative residual of the truncated eigenvector family gamma_N = sum
// lambda^k delta(k) on the geometric metric matching |lambda|.  The exact
// image satisfies f(gamma_N) - lambda gamma_N = -lambda^{N+1} delta(N), and
// both norms are computed in the sum-metric closed form.
inline double approx_eigenvector_residual(cx lambda, int truncation) {
  if (lambda == cx(0.0, 0.0))
    throw std::invalid_argument("the eigenvector family needs lambda != 0");
  if (truncation < 4) throw std::invalid_argument("needs truncation >= 4");
  auto space = PointedMetricSpace::geometric(std::abs(lambda), truncation);

  SelfMap f;
  f.image.resize(truncation + 1);
  f.image[0] = 0;
  for (int k = 1; k <= truncation; ++k) f.image[k] = k - 1;
  auto op = WeightedLipOperator::build(space, f, Weight::ones(truncation + 1));

  FreeVector gamma(space);
  cx coeff(1.0, 0.0);
  for (int k = 1; k <= truncation; ++k) {
    coeff *= lambda;
    gamma.add(k, coeff);
  }
  const FreeVector residual = op.apply(gamma) - lambda * gamma;
  return radial_upper_bound(residual) / radial_upper_bound(gamma);
}

}  // namespace lipfree
