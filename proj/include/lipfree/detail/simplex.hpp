#pragma once

// Two-phase revised simplex for  min c.x  s.t.  A x = b, x >= 0,  with sparse
// columns and an explicit basis inverse.  Problem sizes here are tiny (a few
// dozen rows), so numerical hygiene is periodic refactorization plus a Bland
// fallback against cycling.

#include <cmath>
#include <functional>
#include <vector>

#include "lipfree/errors.hpp"

namespace lipfree::detail {

struct SparseColumn {
  std::vector<std::pair<int, double>> entries;  // (row, value)
};

struct LpResult {
  double objective = 0.0;
  std::vector<double> x;  // solution over the structural columns
};

class RevisedSimplex {
 public:
  RevisedSimplex(int rows, std::vector<SparseColumn> columns, std::vector<double> cost,
                 std::vector<double> rhs)
      : m_(rows), cols_(std::move(columns)), cost_(std::move(cost)), b_(std::move(rhs)) {
    for (int i = 0; i < m_; ++i)
      if (b_[i] < 0.0) {
        b_[i] = -b_[i];
        flip_.push_back(i);
      }
    for (int f : flip_)
      for (auto& col : cols_)
        for (auto& [row, v] : col.entries)
          if (row == f) v = -v;
  }

  LpResult solve() {
    const int n = static_cast<int>(cols_.size());
    basis_.resize(m_);
    in_basis_.assign(n, false);
    for (int i = 0; i < m_; ++i) basis_[i] = n + i;  // artificials
    binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_at(i, i) = 1.0;
    xb_ = b_;

    run_phase(/*phase1=*/true);
    double infeas = 0.0;
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= n) infeas += xb_[i];
    if (infeas > 1e-7)
      throw numerical_error("simplex phase 1 ended infeasible");
    drive_out_artificials();
    run_phase(/*phase1=*/false);

    LpResult result;
    result.x.assign(n, 0.0);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n) result.x[basis_[i]] = std::max(0.0, xb_[i]);
    for (int j = 0; j < n; ++j) result.objective += cost_[j] * result.x[j];
    return result;
  }

 private:
  double& binv_at(int i, int j) { return binv_[static_cast<size_t>(i) * m_ + j]; }
  double binv_get(int i, int j) const { return binv_[static_cast<size_t>(i) * m_ + j]; }

  double column_cost(int j, bool phase1) const {
    const int n = static_cast<int>(cols_.size());
    if (phase1) return j >= n ? 1.0 : 0.0;
    return j >= n ? 0.0 : cost_[j];
  }

  // B^-1 * (column j of A).
  std::vector<double> ftran(int j) const {
    const int n = static_cast<int>(cols_.size());
    std::vector<double> d(m_, 0.0);
    if (j >= n) {
      const int r = j - n;
      for (int i = 0; i < m_; ++i) d[i] = binv_get(i, r);
      return d;
    }
    for (const auto& [row, v] : cols_[j].entries)
      for (int i = 0; i < m_; ++i) d[i] += binv_get(i, row) * v;
    return d;
  }

  void refactorize() {
    // Rebuild B^-1 by Gauss-Jordan on the basis columns.
    std::vector<double> work(static_cast<size_t>(m_) * 2 * m_, 0.0);
    auto w = [&](int i, int j) -> double& { return work[static_cast<size_t>(i) * 2 * m_ + j]; };
    const int n = static_cast<int>(cols_.size());
    for (int k = 0; k < m_; ++k) {
      const int j = basis_[k];
      if (j >= n)
        w(j - n, k) = 1.0;
      else
        for (const auto& [row, v] : cols_[j].entries) w(row, k) = v;
    }
    for (int i = 0; i < m_; ++i) w(i, m_ + i) = 1.0;
    for (int k = 0; k < m_; ++k) {
      int piv = k;
      for (int i = k + 1; i < m_; ++i)
        if (std::abs(w(i, k)) > std::abs(w(piv, k))) piv = i;
      if (std::abs(w(piv, k)) < 1e-14) throw numerical_error("simplex basis became singular");
      if (piv != k)
        for (int j = 0; j < 2 * m_; ++j) std::swap(w(k, j), w(piv, j));
      const double inv = 1.0 / w(k, k);
      for (int j = 0; j < 2 * m_; ++j) w(k, j) *= inv;
      for (int i = 0; i < m_; ++i) {
        if (i == k) continue;
        const double f = w(i, k);
        if (f == 0.0) continue;
        for (int j = 0; j < 2 * m_; ++j) w(i, j) -= f * w(k, j);
      }
    }
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) binv_at(i, j) = w(i, m_ + j);
    xb_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) xb_[i] += binv_get(i, j) * b_[j];
  }

  void run_phase(bool phase1) {
    const int n = static_cast<int>(cols_.size());
    const double rc_tol = 1e-10;
    int degenerate_streak = 0;
    int since_refactor = 0;

    for (int iter = 0; iter < 50000; ++iter) {
      // Dual vector y = c_B B^-1.
      std::vector<double> y(m_, 0.0);
      for (int i = 0; i < m_; ++i) {
        const double cb = column_cost(basis_[i], phase1);
        if (cb == 0.0) continue;
        for (int j = 0; j < m_; ++j) y[j] += cb * binv_get(i, j);
      }

      const bool bland = degenerate_streak > 800;
      int entering = -1;
      double best_rc = -rc_tol;
      for (int j = 0; j < n; ++j) {
        if (in_basis_[j]) continue;
        double rc = column_cost(j, phase1);
        for (const auto& [row, v] : cols_[j].entries) rc -= y[row] * v;
        if (rc < (bland ? -rc_tol : best_rc)) {
          entering = j;
          if (bland) break;
          best_rc = rc;
        }
      }
      if (entering < 0) return;  // optimal for this phase

      const std::vector<double> d = ftran(entering);
      int leave = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (d[i] > 1e-11) {
          const double ratio = xb_[i] / d[i];
          if (leave < 0 || ratio < best_ratio - 1e-13 ||
              (ratio < best_ratio + 1e-13 && basis_[i] > basis_[leave])) {
            // ties prefer kicking artificials (largest index) out first
            leave = i;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0) throw numerical_error("simplex detected an unbounded direction");

      if (best_ratio <= 1e-13)
        ++degenerate_streak;
      else
        degenerate_streak = 0;

      pivot(entering, leave, d, best_ratio);
      if (++since_refactor >= 120) {
        refactorize();
        since_refactor = 0;
      }
    }
    throw numerical_error("simplex iteration limit reached");
  }

  void pivot(int entering, int leave, const std::vector<double>& d, double ratio) {
    for (int i = 0; i < m_; ++i) xb_[i] -= ratio * d[i];
    xb_[leave] = ratio;
    const double piv = d[leave];
    for (int j = 0; j < m_; ++j) binv_at(leave, j) /= piv;
    for (int i = 0; i < m_; ++i) {
      if (i == leave) continue;
      const double f = d[i];
      if (f == 0.0) continue;
      for (int j = 0; j < m_; ++j) binv_at(i, j) -= f * binv_at(leave, j);
    }
    const int n = static_cast<int>(cols_.size());
    if (basis_[leave] < n) in_basis_[basis_[leave]] = false;
    if (entering < n) in_basis_[entering] = true;
    basis_[leave] = entering;
  }

  // Replace zero-level artificials in the basis with structural columns when
  // a nonzero pivot exists; rows with no such column are structurally
  // redundant and the stuck artificial stays at zero forever.
  void drive_out_artificials() {
    const int n = static_cast<int>(cols_.size());
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n) continue;
      for (int j = 0; j < n; ++j) {
        if (in_basis_[j]) continue;
        const std::vector<double> d = ftran(j);
        if (std::abs(d[i]) > 1e-9) {
          pivot(j, i, d, std::max(0.0, xb_[i] / d[i]));
          break;
        }
      }
    }
  }

  int m_;
  std::vector<SparseColumn> cols_;
  std::vector<double> cost_;
  std::vector<double> b_;
  std::vector<int> flip_;
  std::vector<int> basis_;
  std::vector<char> in_basis_;
  std::vector<double> binv_;
  std::vector<double> xb_;
};

}  // namespace lipfree::detail
