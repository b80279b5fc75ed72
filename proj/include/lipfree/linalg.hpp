#pragma once

// Self-contained dense complex kernels: LU solves, eigenvalues via balancing
// (permute + scale) followed by Householder Hessenberg reduction and shifted
// QR, singular values via one-sided Jacobi, smallest singular value via
// inverse iteration on M^H M, and inverse-iteration eigenvectors.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "lipfree/errors.hpp"

namespace lipfree::linalg {

using cx = std::complex<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  cx& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const cx& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double max_abs() const {
    double m = 0.0;
    for (const cx& v : a_) m = std::max(m, std::abs(v));
    return m;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const cx& v : a_) s += std::norm(v);
    return std::sqrt(s);
  }

  Matrix adjoint() const {
    Matrix m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const cx aik = a(i, k);
        if (aik == cx(0.0, 0.0)) continue;
        for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows_, a.cols_);
    for (size_t idx = 0; idx < a.a_.size(); ++idx) c.a_[idx] = a.a_[idx] - b.a_[idx];
    return c;
  }

  friend Matrix operator*(cx s, const Matrix& a) {
    Matrix c(a.rows_, a.cols_);
    for (size_t idx = 0; idx < a.a_.size(); ++idx) c.a_[idx] = s * a.a_[idx];
    return c;
  }

  Matrix power(int n) const {
    Matrix result = identity(rows_);
    for (int k = 0; k < n; ++k) result = result * (*this);
    return result;
  }

  std::vector<cx> apply(const std::vector<cx>& x) const {
    std::vector<cx> y(rows_, cx(0.0, 0.0));
    for (int i = 0; i < rows_; ++i) {
      cx s(0.0, 0.0);
      for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<cx> a_;
};

inline double vec_norm(const std::vector<cx>& v) {
  double s = 0.0;
  for (const cx& x : v) s += std::norm(x);
  return std::sqrt(s);
}

inline void vec_scale(std::vector<cx>& v, double s) {
  for (cx& x : v) x *= s;
}

inline cx vec_dot(const std::vector<cx>& a, const std::vector<cx>& b) {
  cx s(0.0, 0.0);
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// ---------------------------------------------------------------------------
// LU factorization with partial pivoting.  solve() and solve_adjoint() share
// the factorization; exact zero pivots flag structural singularity.
// ---------------------------------------------------------------------------

class LU {
 public:
  explicit LU(Matrix a) : lu_(std::move(a)), n_(lu_.rows()), perm_(n_) {
    std::iota(perm_.begin(), perm_.end(), 0);
    for (int k = 0; k < n_; ++k) {
      int piv = k;
      double best = std::abs(lu_(k, k));
      for (int i = k + 1; i < n_; ++i)
        if (std::abs(lu_(i, k)) > best) {
          best = std::abs(lu_(i, k));
          piv = i;
        }
      if (piv != k) {
        for (int j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(piv, j));
        std::swap(perm_[k], perm_[piv]);
      }
      if (lu_(k, k) == cx(0.0, 0.0)) {
        singular_ = true;
        continue;
      }
      for (int i = k + 1; i < n_; ++i) {
        lu_(i, k) /= lu_(k, k);
        const cx lik = lu_(i, k);
        if (lik == cx(0.0, 0.0)) continue;
        for (int j = k + 1; j < n_; ++j) lu_(i, j) -= lik * lu_(k, j);
      }
    }
  }

  bool singular() const { return singular_; }

  // Solve A x = b.
  std::vector<cx> solve(const std::vector<cx>& b) const {
    std::vector<cx> x(n_);
    for (int i = 0; i < n_; ++i) x[i] = b[perm_[i]];
    for (int i = 1; i < n_; ++i)
      for (int j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (int i = n_ - 1; i >= 0; --i) {
      for (int j = i + 1; j < n_; ++j) x[i] -= lu_(i, j) * x[j];
      x[i] /= lu_(i, i);
    }
    return x;
  }

  // Solve A^H x = b.  A^H = U^H L^H P, so forward solve with U^H, back solve
  // with L^H (unit diagonal), and undo the row permutation.
  std::vector<cx> solve_adjoint(const std::vector<cx>& b) const {
    std::vector<cx> z(b);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < i; ++j) z[i] -= std::conj(lu_(j, i)) * z[j];
      z[i] /= std::conj(lu_(i, i));
    }
    for (int i = n_ - 1; i >= 0; --i)
      for (int j = i + 1; j < n_; ++j) z[i] -= std::conj(lu_(j, i)) * z[j];
    std::vector<cx> x(n_);
    for (int i = 0; i < n_; ++i) x[perm_[i]] = z[i];
    return x;
  }

 private:
  Matrix lu_;
  int n_;
  std::vector<int> perm_;
  bool singular_ = false;
};

// ---------------------------------------------------------------------------
// Eigenvalues.
// ---------------------------------------------------------------------------

namespace detail {

// Permutation phase of balancing: repeatedly isolate rows/columns whose
// off-diagonal part is exactly zero.  Each isolated diagonal entry is an exact
// eigenvalue; the remaining active block is returned.  On functional-graph
// matrices this peels nilpotent tail chains entry by entry, which keeps the
// QR iteration away from high-order Jordan structure.
inline Matrix isolate_exact_eigenvalues(const Matrix& input, std::vector<cx>& isolated) {
  const int n = input.rows();
  std::vector<int> active(n);
  std::iota(active.begin(), active.end(), 0);
  Matrix a = input;

  bool changed = true;
  while (changed && !active.empty()) {
    changed = false;
    const int m = static_cast<int>(active.size());
    for (int ii = 0; ii < m; ++ii) {
      bool row_zero = true, col_zero = true;
      for (int jj = 0; jj < m; ++jj) {
        if (jj == ii) continue;
        if (a(active[ii], active[jj]) != cx(0.0, 0.0)) row_zero = false;
        if (a(active[jj], active[ii]) != cx(0.0, 0.0)) col_zero = false;
      }
      if (row_zero || col_zero) {
        isolated.push_back(a(active[ii], active[ii]));
        active.erase(active.begin() + ii);
        changed = true;
        break;
      }
    }
  }

  const int m = static_cast<int>(active.size());
  Matrix core(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) core(i, j) = a(active[i], active[j]);
  return core;
}

// Scaling phase of balancing: diagonal similarity with powers of two that
// brings row and column norms together.
inline void balance_scale(Matrix& a) {
  const int n = a.rows();
  const double radix = 2.0;
  bool converged = false;
  int passes = 0;
  while (!converged && passes++ < 32) {
    converged = true;
    for (int i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      while (c < r / radix) {
        c *= radix;
        r /= radix;
        f *= radix;
      }
      while (c >= r * radix) {
        c /= radix;
        r *= radix;
        f /= radix;
      }
      if (c + r < 0.95 * s && f != 1.0) {
        converged = false;
        for (int j = 0; j < n; ++j) a(i, j) /= f;
        for (int j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

inline void hessenberg_reduce(Matrix& a) {
  const int n = a.rows();
  for (int k = 0; k + 2 < n; ++k) {
    // Householder vector for column k below the subdiagonal.
    double xnorm = 0.0;
    for (int i = k + 1; i < n; ++i) xnorm += std::norm(a(i, k));
    xnorm = std::sqrt(xnorm);
    if (xnorm == 0.0) continue;
    cx x0 = a(k + 1, k);
    cx alpha = (x0 == cx(0.0, 0.0)) ? cx(-xnorm, 0.0) : -(x0 / std::abs(x0)) * xnorm;
    std::vector<cx> v(n, cx(0.0, 0.0));
    for (int i = k + 1; i < n; ++i) v[i] = a(i, k);
    v[k + 1] -= alpha;
    double vnorm2 = 0.0;
    for (int i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
    if (vnorm2 == 0.0) continue;
    const double tau = 2.0 / vnorm2;

    // A <- P A with P = I - tau v v^H
    for (int j = 0; j < n; ++j) {
      cx s(0.0, 0.0);
      for (int i = k + 1; i < n; ++i) s += std::conj(v[i]) * a(i, j);
      s *= tau;
      for (int i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
    }
    // A <- A P
    for (int i = 0; i < n; ++i) {
      cx s(0.0, 0.0);
      for (int j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      s *= tau;
      for (int j = k + 1; j < n; ++j) a(i, j) -= s * std::conj(v[j]);
    }
    a(k + 1, k) = alpha;
    for (int i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

struct Givens {
  double c;  // real cosine
  cx s;      // complex sine
};

// Rotation with [c, s; -conj(s), c] * [f; g] = [r; 0].
inline Givens make_givens(cx f, cx g, cx& r) {
  if (g == cx(0.0, 0.0)) {
    r = f;
    return {1.0, cx(0.0, 0.0)};
  }
  if (f == cx(0.0, 0.0)) {
    r = std::abs(g);
    return {0.0, std::conj(g) / std::abs(g)};
  }
  const double af = std::abs(f), ag = std::abs(g);
  const double d = std::hypot(af, ag);
  const double c = af / d;
  const cx fs = f / af;
  const cx s = fs * std::conj(g) / d;
  r = fs * d;
  return {c, s};
}

inline cx wilkinson_shift(cx a, cx b, cx c, cx d) {
  // Eigenvalue of [[a,b],[c,d]] closest to d.
  const cx tr2 = (a + d) / 2.0;
  const cx det = a * d - b * c;
  const cx disc = std::sqrt(tr2 * tr2 - det);
  const cx l1 = tr2 + disc, l2 = tr2 - disc;
  return (std::abs(l1 - d) < std::abs(l2 - d)) ? l1 : l2;
}

// Shifted QR on an upper Hessenberg matrix; returns the eigenvalues.
inline std::vector<cx> hessenberg_qr(Matrix h) {
  const int n = h.rows();
  std::vector<cx> eig;
  eig.reserve(n);
  if (n == 0) return eig;

  const double ulp = std::numeric_limits<double>::epsilon();
  int hi = n - 1;
  int iter_since_deflation = 0;
  const int max_iter_per_eig = 60;

  while (hi >= 0) {
    if (hi == 0) {
      eig.push_back(h(0, 0));
      break;
    }
    // Deflate any negligible subdiagonal in the active block.
    int lo = hi;
    while (lo > 0) {
      const double sub = std::abs(h(lo, lo - 1));
      const double scale = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
      if (sub <= ulp * scale || sub == 0.0) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      eig.push_back(h(hi, hi));
      --hi;
      iter_since_deflation = 0;
      continue;
    }
    if (lo == hi - 1) {
      // 2x2 block: closed form.
      const cx a = h(lo, lo), b = h(lo, hi), c = h(hi, lo), d = h(hi, hi);
      const cx tr2 = (a + d) / 2.0;
      const cx disc = std::sqrt(tr2 * tr2 - (a * d - b * c));
      eig.push_back(tr2 + disc);
      eig.push_back(tr2 - disc);
      hi -= 2;
      iter_since_deflation = 0;
      continue;
    }

    if (++iter_since_deflation > max_iter_per_eig) {
      std::ostringstream msg;
      msg << "QR iteration failed to converge: dimension " << n
          << ", active block [" << lo << "," << hi << "], subdiagonal "
          << std::abs(h(hi, hi - 1));
      throw numerical_error(msg.str());
    }

    cx shift = wilkinson_shift(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
    if (iter_since_deflation % 12 == 0 && iter_since_deflation > 0) {
      // Exceptional shift to break symmetric stagnation.
      shift = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1));
    }

    // Explicit single-shift QR sweep on [lo..hi]: factor H - shift I with
    // Givens rotations, then form R Q and restore the shift.
    for (int i = lo; i <= hi; ++i) h(i, i) -= shift;
    std::vector<Givens> rot(hi - lo);
    for (int k = lo; k < hi; ++k) {
      cx r;
      const Givens gv = make_givens(h(k, k), h(k + 1, k), r);
      rot[k - lo] = gv;
      h(k, k) = r;
      h(k + 1, k) = 0.0;
      for (int j = k + 1; j <= hi; ++j) {
        const cx t1 = h(k, j), t2 = h(k + 1, j);
        h(k, j) = gv.c * t1 + gv.s * t2;
        h(k + 1, j) = -std::conj(gv.s) * t1 + gv.c * t2;
      }
    }
    for (int k = lo; k < hi; ++k) {
      const Givens gv = rot[k - lo];
      for (int i = lo; i <= std::min(k + 2, hi); ++i) {
        const cx t1 = h(i, k), t2 = h(i, k + 1);
        h(i, k) = gv.c * t1 + std::conj(gv.s) * t2;
        h(i, k + 1) = -gv.s * t1 + gv.c * t2;
      }
    }
    for (int i = lo; i <= hi; ++i) h(i, i) += shift;
  }
  return eig;
}

}  // namespace detail

// Eigenvalues of a general square complex matrix to roughly 1e-10 accuracy.
// Dimension is capped: this is a desk-scale oracle, not a BLAS replacement.
inline std::vector<cx> eigenvalues(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eigenvalues: matrix not square");
  if (a.rows() > 512) throw std::invalid_argument("eigenvalues: dimension above 512");
  std::vector<cx> isolated;
  Matrix core = detail::isolate_exact_eigenvalues(a, isolated);
  detail::balance_scale(core);
  detail::hessenberg_reduce(core);
  std::vector<cx> eig = detail::hessenberg_qr(std::move(core));
  eig.insert(eig.end(), isolated.begin(), isolated.end());
  return eig;
}

// ---------------------------------------------------------------------------
// Singular values via one-sided Jacobi on the columns.  Small singular values
// come out with absolute accuracy near eps * sigma_max, which is what the
// rank threshold needs.
// ---------------------------------------------------------------------------

inline std::vector<double> singular_values(Matrix a) {
  const int n = a.cols();
  const int m = a.rows();
  const double tol = 1e-14;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0;
        cx gamma(0.0, 0.0);
        for (int i = 0; i < m; ++i) {
          alpha += std::norm(a(i, p));
          beta += std::norm(a(i, q));
          gamma += std::conj(a(i, p)) * a(i, q);
        }
        const double ag = std::abs(gamma);
        if (ag <= tol * std::sqrt(alpha * beta) || ag == 0.0) continue;
        rotated = true;
        const cx phase = gamma / ag;
        const double zeta = (beta - alpha) / (2.0 * ag);
        const double t = ((zeta >= 0.0) ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int i = 0; i < m; ++i) {
          const cx ap = a(i, p);
          const cx bq = std::conj(phase) * a(i, q);
          a(i, p) = c * ap - s * bq;
          a(i, q) = phase * (s * ap + c * bq);
        }
      }
    if (!rotated) break;
  }
  std::vector<double> sigma(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += std::norm(a(i, j));
    sigma[j] = std::sqrt(s);
  }
  std::sort(sigma.rbegin(), sigma.rend());
  return sigma;
}

// Number of singular values above the threshold.
inline int rank(const Matrix& a, double threshold) {
  const std::vector<double> sigma = singular_values(a);
  int r = 0;
  for (double s : sigma)
    if (s > threshold) ++r;
  return r;
}

// Rank with the default threshold 1e-10 * max |a_ij|.
inline int rank(const Matrix& a) { return rank(a, 1e-10 * a.max_abs()); }

// ---------------------------------------------------------------------------
// Smallest singular value via inverse iteration on M^H M.  Every iterate
// ||M v|| / ||v|| is an upper bound on sigma_min, decreasing to it; exact
// singularity is detected through the LU pivots.
// ---------------------------------------------------------------------------

inline double smallest_singular_value(const Matrix& m) {
  const int n = m.rows();
  if (n == 0) return 0.0;
  const LU lu(m);
  if (lu.singular()) return 0.0;

  std::mt19937_64 rng(0x5eed5eedULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cx> v(n);
  for (cx& x : v) x = cx(gauss(rng), gauss(rng));
  vec_scale(v, 1.0 / vec_norm(v));

  double prev = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<cx> z = lu.solve_adjoint(v);
    const double zn = vec_norm(z);
    if (!(zn > 0.0) || !std::isfinite(zn)) break;
    vec_scale(z, 1.0 / zn);
    std::vector<cx> x = lu.solve(z);
    const double xn = vec_norm(x);
    if (!(xn > 0.0) || !std::isfinite(xn)) break;
    vec_scale(x, 1.0 / xn);
    v = std::move(x);
    const double est = 1.0 / std::sqrt(zn * xn);
    if (std::abs(est - prev) <= 1e-13 * est) {
      prev = est;
      break;
    }
    prev = est;
  }
  // Report ||M v|| at the converged right singular vector: a clean upper
  // bound that equals sigma_min at convergence.
  const std::vector<cx> mv = m.apply(v);
  return vec_norm(mv);
}

// ---------------------------------------------------------------------------
// Inverse iteration eigenvectors for a known (approximate) eigenvalue.
// Orthogonalizes against previously found vectors so clustered eigenvalues
// yield independent basis vectors.
// ---------------------------------------------------------------------------

inline std::vector<std::vector<cx>> eigenvectors_for(const Matrix& a, cx lambda,
                                                     int count) {
  const int n = a.rows();
  std::vector<std::vector<cx>> found;
  if (n == 0 || count <= 0) return found;
  const double scale = std::max(1.0, a.max_abs());

  Matrix shifted = a;
  // Tiny perturbation keeps the LU factorization usable when lambda is exact.
  const cx mu = lambda + cx(1e-13 * scale, 1e-13 * scale);
  for (int i = 0; i < n; ++i) shifted(i, i) -= mu;
  const LU lu(shifted);

  std::mt19937_64 rng(0xabcdef12ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (int k = 0; k < count; ++k) {
    std::vector<cx> v(n);
    for (cx& x : v) x = cx(gauss(rng), gauss(rng));
    for (int iter = 0; iter < 50; ++iter) {
      for (const auto& u : found) {
        const cx proj = vec_dot(u, v);
        for (int i = 0; i < n; ++i) v[i] -= proj * u[i];
      }
      const double vn = vec_norm(v);
      if (!(vn > 0.0)) break;
      vec_scale(v, 1.0 / vn);
      std::vector<cx> w = lu.solve(v);
      const double wn = vec_norm(w);
      if (!std::isfinite(wn) || !(wn > 0.0)) break;
      vec_scale(w, 1.0 / wn);
      v = std::move(w);
    }
    for (const auto& u : found) {
      const cx proj = vec_dot(u, v);
      for (int i = 0; i < n; ++i) v[i] -= proj * u[i];
    }
    const double vn = vec_norm(v);
    if (vn > 0.0) {
      vec_scale(v, 1.0 / vn);
      found.push_back(std::move(v));
    }
  }
  return found;
}

}  // namespace lipfree::linalg
