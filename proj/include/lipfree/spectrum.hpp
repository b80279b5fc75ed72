#pragma once

// Point spectra of weighted Lipschitz operators on finite spaces: the cycle
// formula, eigenvector recursion, an independent dense eigenvalue oracle with
// multiset matching, eigenspace dimensions, Gelfand sequences and the
// combinatorial zero-in-spectrum / surjectivity / isomorphism predicates.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "lipfree/cycles.hpp"
#include "lipfree/kr_norm.hpp"
#include "lipfree/linalg.hpp"
#include "lipfree/weighted_operator.hpp"

namespace lipfree {

struct CycleEigenvalue {
  cx value;
  int cycle_index = -1;
};

// Canonical eigenvalue order: modulus descending, then argument ascending.
inline void sort_eigenvalues(std::vector<cx>& values) {
  std::sort(values.begin(), values.end(), [](const cx& a, const cx& b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    return std::arg(a) < std::arg(b);
  });
}

// Nonzero eigenvalues from the cycle formula: every nonbase cycle whose
// weights never vanish contributes the n-th roots of its weight product.
inline std::vector<CycleEigenvalue> cycle_eigenvalues(const CycleDecomposition& decomp) {
  std::vector<CycleEigenvalue> eig;
  for (size_t ci = 0; ci < decomp.cycles.size(); ++ci) {
    const Cycle& c = decomp.cycles[ci];
    if (c.contains_base || !c.weights_nonzero) continue;
    const int n = c.length();
    const double mod = std::pow(std::abs(c.weight_product), 1.0 / n);
    const double arg = std::arg(c.weight_product) / n;
    for (int k = 0; k < n; ++k) {
      const double theta = arg + 2.0 * std::numbers::pi * k / n;
      eig.push_back({cx(mod * std::cos(theta), mod * std::sin(theta)),
                     static_cast<int>(ci)});
    }
  }
  std::sort(eig.begin(), eig.end(), [](const CycleEigenvalue& a, const CycleEigenvalue& b) {
    const double ma = std::abs(a.value), mb = std::abs(b.value);
    if (ma != mb) return ma > mb;
    return std::arg(a.value) < std::arg(b.value);
  });
  return eig;
}

// Eigenvector for a cycle eigenvalue via the orbit recursion a_{i+1} =
// w(x_i) a_i / lambda; requires lambda^n to match the cycle's weight product.
inline FreeVector eigenvector_for(const WeightedLipOperator& op, const Cycle& cycle,
                                  cx lambda) {
  if (lambda == cx(0.0, 0.0))
    throw std::invalid_argument("eigenvector recursion needs lambda != 0");
  if (cycle.contains_base || !cycle.weights_nonzero)
    throw std::invalid_argument("cycle does not produce nonzero eigenvalues");
  cx pow(1.0, 0.0);
  for (int k = 0; k < cycle.length(); ++k) pow *= lambda;
  if (std::abs(pow - cycle.weight_product) >
      1e-9 * (1.0 + std::abs(cycle.weight_product)))
    throw std::invalid_argument("lambda is not an eigenvalue of this cycle");

  FreeVector v(op.space());
  cx a(1.0, 0.0);
  for (int i = 0; i < cycle.length(); ++i) {
    v.add(cycle.points[i], a);
    a *= op.weight()(cycle.points[i]) / lambda;
  }
  return v;
}

struct ZeroMembership {
  bool in_point_spectrum = false;
  std::vector<std::string> reasons;
};

// Combinatorial characterization of 0 in the point spectrum, evaluated on the
// nonbase points (the delta basis).  Equivalent to singularity of the matrix.
inline ZeroMembership zero_membership_predicate(const WeightedLipOperator& op) {
  const auto& space = *op.space();
  const int base = space.base_index();
  ZeroMembership out;

  for (int x = 0; x < space.size(); ++x) {
    if (x == base) continue;
    if (op.weight().is_zero(x)) {
      out.reasons.push_back("w vanishes at nonbase point " + space.report_name(x));
      break;
    }
  }
  for (int x = 0; x < space.size(); ++x) {
    if (x == base) continue;
    if (op.map()(x) == base) {
      out.reasons.push_back("f maps nonbase point " + space.report_name(x) +
                            " to the base point");
      break;
    }
  }
  // Collision scan over nonbase points with nonzero weight and nonbase image.
  std::vector<int> image_seen(space.size(), -1);
  for (int x = 0; x < space.size(); ++x) {
    if (x == base || op.weight().is_zero(x) || op.map()(x) == base) continue;
    const int img = op.map()(x);
    if (image_seen[img] >= 0) {
      out.reasons.push_back("f is not injective: " +
                            space.report_name(image_seen[img]) + " and " +
                            space.report_name(x) + " share their image");
      break;
    }
    image_seen[img] = x;
  }
  out.in_point_spectrum = !out.reasons.empty();
  return out;
}

inline double singularity_threshold(const linalg::Matrix& m) {
  return 1e-10 * m.max_abs();
}

inline bool matrix_singular(const WeightedLipOperator& op) {
  const auto& m = op.matrix();
  if (m.rows() == 0) return false;
  return linalg::rank(m, singularity_threshold(m)) < m.rows();
}

// Eigenvalues of a general square complex matrix, canonically sorted;
// the independent oracle against the cycle formula.
inline std::vector<cx> dense_eigenvalues(const linalg::Matrix& m) {
  std::vector<cx> eig = linalg::eigenvalues(m);
  sort_eigenvalues(eig);
  return eig;
}

struct SpectrumReport {
  CycleDecomposition decomposition;
  std::vector<CycleEigenvalue> cycle_eigenvalues;
  ZeroMembership zero;
  bool matrix_is_singular = false;
  std::vector<cx> oracle_eigenvalues;  // empty when the oracle is off
  bool oracle_ran = false;
  bool unweighted = false;             // w == 1 on every nonbase point
  std::vector<int> cycle_length_set;   // the set A
  std::vector<cx> roots_of_unity;      // union of U_n over A, when unweighted
};

// Full point-spectrum report.  The nonzero part comes from the cycle
// formula; membership of 0 is decided by the rank of the delta-basis matrix
// and annotated with the combinatorial reasons.
inline SpectrumReport point_spectrum(const WeightedLipOperator& op,
                                     bool with_oracle = true) {
  SpectrumReport report;
  report.decomposition = decompose(*op.space(), op.map(), op.weight());
  report.cycle_eigenvalues = cycle_eigenvalues(report.decomposition);
  report.zero = zero_membership_predicate(op);
  report.matrix_is_singular = matrix_singular(op);
  if (report.matrix_is_singular &&
      std::find(report.zero.reasons.begin(), report.zero.reasons.end(),
                std::string("matrix is rank deficient")) == report.zero.reasons.end())
    report.zero.reasons.push_back("matrix is rank deficient");
  report.zero.in_point_spectrum = report.matrix_is_singular;
  report.cycle_length_set = report.decomposition.eigen_cycle_lengths();

  report.unweighted = true;
  for (int x = 0; x < op.space()->size(); ++x)
    if (x != op.space()->base_index() && op.weight()(x) != cx(1.0, 0.0))
      report.unweighted = false;
  if (report.unweighted) {
    for (int n : report.cycle_length_set)
      for (int k = 0; k < n; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / n;
        const cx root(std::cos(theta), std::sin(theta));
        bool seen = false;
        for (const cx& r : report.roots_of_unity)
          if (std::abs(r - root) <= 1e-12) seen = true;
        if (!seen) report.roots_of_unity.push_back(root);
      }
    sort_eigenvalues(report.roots_of_unity);
  }

  if (with_oracle && op.matrix().rows() <= 512) {
    report.oracle_eigenvalues = dense_eigenvalues(op.matrix());
    report.oracle_ran = true;
  }
  return report;
}

namespace detail {

// O(n^3) Hungarian assignment on a square cost matrix; returns the column
// matched to each row.
inline std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> match(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) match[p[j] - 1] = j - 1;
  return match;
}

}  // namespace detail

struct OracleComparison {
  bool match = false;
  double max_pair_distance = 0.0;
  int nonzero_count_formula = 0;
  int nonzero_count_oracle = 0;
  int zero_count_oracle = 0;
  double zero_threshold = 0.0;
  bool rank_consistent = false;
  std::string failure;
};

// Multiset comparison of the cycle-formula eigenvalues against the dense
// oracle.  Greedy nearest matching first, optimal assignment as fallback.
// Oracle eigenvalues below the zero threshold count as zero; the threshold
// is far above QR rounding and far below the cycle moduli of sane weights.
inline OracleComparison oracle_compare(const WeightedLipOperator& op,
                                       double pair_tolerance = 1e-7) {
  OracleComparison out;
  const auto decomp = decompose(*op.space(), op.map(), op.weight());
  const auto formula = cycle_eigenvalues(decomp);
  const std::vector<cx> oracle = dense_eigenvalues(op.matrix());

  out.zero_threshold = std::max(1e-8, 1e-10 * op.matrix().max_abs());
  std::vector<cx> oracle_nonzero;
  for (const cx& l : oracle) {
    if (std::abs(l) > out.zero_threshold)
      oracle_nonzero.push_back(l);
    else
      ++out.zero_count_oracle;
  }
  out.nonzero_count_formula = static_cast<int>(formula.size());
  out.nonzero_count_oracle = static_cast<int>(oracle_nonzero.size());

  // Zero multiplicities reconcile through the rank: geometric deficiency is
  // positive exactly when the matrix is singular.
  const int dim = op.matrix().rows();
  const bool singular = matrix_singular(op);
  out.rank_consistent = (out.zero_count_oracle > 0) == singular ||
                        (dim == 0 && !singular);

  if (out.nonzero_count_formula != out.nonzero_count_oracle) {
    out.failure = "nonzero eigenvalue counts differ";
    return out;
  }

  const int n = out.nonzero_count_formula;
  if (n == 0) {
    out.match = out.rank_consistent;
    if (!out.match) out.failure = "zero multiplicity inconsistent with rank";
    return out;
  }

  // Greedy nearest pairing.
  std::vector<bool> used(n, false);
  double worst = 0.0;
  bool greedy_ok = true;
  for (const CycleEigenvalue& ce : formula) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = std::abs(ce.value - oracle_nonzero[j]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
    if (best_d > pair_tolerance) greedy_ok = false;
  }

  if (!greedy_ok) {
    // Collision clusters can fool the greedy pass; rerun as an assignment.
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        cost[i][j] = std::abs(formula[i].value - oracle_nonzero[j]);
    const std::vector<int> match = detail::hungarian(cost);
    worst = 0.0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, cost[i][match[i]]);
  }

  out.max_pair_distance = worst;
  out.match = worst <= pair_tolerance && out.rank_consistent;
  if (!out.match)
    out.failure = worst > pair_tolerance ? "eigenvalue pairing exceeds tolerance"
                                         : "zero multiplicity inconsistent with rank";
  return out;
}

// Dimension of the eigenspace for lambda != 0: the number of cycles whose
// length n and weight product p satisfy lambda^n = p.  Tests cross-check it
// against the rank deficiency of (matrix - lambda I).
inline int eigenspace_dimension(const WeightedLipOperator& op, cx lambda) {
  if (lambda == cx(0.0, 0.0))
    throw std::invalid_argument("eigenspace_dimension needs lambda != 0");
  const auto decomp = decompose(*op.space(), op.map(), op.weight());
  int count = 0;
  for (const Cycle& c : decomp.cycles) {
    if (c.contains_base || !c.weights_nonzero) continue;
    cx pow(1.0, 0.0);
    for (int k = 0; k < c.length(); ++k) pow *= lambda;
    if (std::abs(pow - c.weight_product) <= 1e-9 * (1.0 + std::abs(c.weight_product)))
      ++count;
  }
  return count;
}

inline int rank_deficiency_at(const WeightedLipOperator& op, cx lambda) {
  linalg::Matrix shifted = op.matrix();
  for (int i = 0; i < shifted.rows(); ++i) shifted(i, i) -= lambda;
  if (shifted.rows() == 0) return 0;
  return shifted.rows() - linalg::rank(shifted, singularity_threshold(shifted));
}

struct GelfandPoint {
  int n = 0;
  double bound = 0.0;  // ||op^n||^(1/n) upper bound
};

struct GelfandReport {
  std::vector<GelfandPoint> terms;
  double spectral_radius = 0.0;  // max |oracle eigenvalue|
};

// Norm-power upper bounds on the spectral radius; every term dominates the
// exact radius and for unit weights the terms are Lip(f^n)^(1/n).
inline GelfandReport gelfand_sequence(const WeightedLipOperator& op, int n_max) {
  if (n_max < 1) throw std::invalid_argument("gelfand_sequence needs n_max >= 1");
  GelfandReport report;
  for (int n = 1; n <= n_max; ++n) {
    const auto powered = op.power(n);
    report.terms.push_back({n, std::pow(powered.operator_norm().hi, 1.0 / n)});
  }
  for (const cx& l : dense_eigenvalues(op.matrix()))
    report.spectral_radius = std::max(report.spectral_radius, std::abs(l));
  return report;
}

struct DiscretePredicates {
  ZeroMembership zero;
  bool surjective = false;
  double surjectivity_constant = 0.0;  // min over targets of max preimage |w|
  bool isomorphism = false;
};

// Combinatorial predicates for finite (uniformly discrete) spaces.  The
// isomorphism verdict is the conjunction route; it coincides with matrix
// nonsingularity.
inline DiscretePredicates discrete_predicates(const WeightedLipOperator& op) {
  const auto& space = *op.space();
  const int base = space.base_index();
  DiscretePredicates out;
  out.zero = zero_membership_predicate(op);

  out.surjective = true;
  out.surjectivity_constant = std::numeric_limits<double>::infinity();
  for (int y = 0; y < space.size(); ++y) {
    if (y == base) continue;
    double best = 0.0;
    for (int x = 0; x < space.size(); ++x)
      if (op.map()(x) == y) best = std::max(best, std::abs(op.weight()(x)));
    if (best == 0.0) out.surjective = false;
    out.surjectivity_constant = std::min(out.surjectivity_constant, best);
  }
  if (space.size() == 1) out.surjectivity_constant = 0.0;
  if (!std::isfinite(out.surjectivity_constant)) out.surjectivity_constant = 0.0;

  out.isomorphism = !out.zero.in_point_spectrum;
  return out;
}

struct LocalizationCheck {
  bool sup_bound_pass = true;     // |lambda| <= sup |w| + tol
  bool cycle_band_pass = true;    // min cycle |w| - tol <= |lambda| <= max + tol
  std::vector<std::string> failures;
};

// Localization of the point spectrum: the sup-norm disc for every nonzero
// eigenvalue (oracle included) and the per-cycle weight band for the cycle
// ones.
inline LocalizationCheck localization_check(const SpectrumReport& report,
                                            const Weight& w,
                                            double tolerance = 1e-7) {
  LocalizationCheck out;
  const double sup = w.sup_norm();
  for (const CycleEigenvalue& ce : report.cycle_eigenvalues) {
    const double mod = std::abs(ce.value);
    if (mod > sup + tolerance) {
      out.sup_bound_pass = false;
      out.failures.push_back("cycle eigenvalue above the weight sup norm");
    }
    const Cycle& c = report.decomposition.cycles[ce.cycle_index];
    double wmin = std::numeric_limits<double>::infinity(), wmax = 0.0;
    for (int p : c.points) {
      wmin = std::min(wmin, std::abs(w(p)));
      wmax = std::max(wmax, std::abs(w(p)));
    }
    if (mod < wmin - tolerance || mod > wmax + tolerance) {
      out.cycle_band_pass = false;
      out.failures.push_back("cycle eigenvalue outside the cycle weight band");
    }
  }
  for (const cx& l : report.oracle_eigenvalues)
    if (std::abs(l) > sup + tolerance) {
      out.sup_bound_pass = false;
      out.failures.push_back("oracle eigenvalue above the weight sup norm");
    }
  return out;
}

}  // namespace lipfree
