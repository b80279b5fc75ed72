#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "lipfree/linalg.hpp"

using namespace lipfree;
using linalg::Matrix;
using linalg::cx;

namespace {

// Multisets agree under greedy nearest matching, within tol per pair.
void require_multiset_close(std::vector<cx> a, std::vector<cx> b, double tol) {
  REQUIRE(a.size() == b.size());
  std::vector<bool> used(b.size(), false);
  for (const cx& x : a) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(x - b[j]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(j);
      }
    }
    CAPTURE(x, best_d);
    REQUIRE(best_d <= tol);
    used[best] = true;
  }
}

Matrix random_matrix(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cx(gauss(rng), gauss(rng));
  return a;
}

}  // namespace

TEST_CASE("LU solves against known right-hand sides") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    Matrix a = random_matrix(rng, n);
    std::vector<cx> x(n);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& v : x) v = cx(gauss(rng), gauss(rng));
    const std::vector<cx> b = a.apply(x);

    linalg::LU lu(a);
    REQUIRE_FALSE(lu.singular());
    const std::vector<cx> sol = lu.solve(b);
    double err = 0.0;
    for (int i = 0; i < n; ++i) err = std::max(err, std::abs(sol[i] - x[i]));
    REQUIRE(err <= 1e-9);

    const std::vector<cx> badj = a.adjoint().apply(x);
    const std::vector<cx> sadj = lu.solve_adjoint(badj);
    err = 0.0;
    for (int i = 0; i < n; ++i) err = std::max(err, std::abs(sadj[i] - x[i]));
    REQUIRE(err <= 1e-9);
  }
}

TEST_CASE("eigenvalues of hand-checked matrices") {
  SECTION("diagonal") {
    Matrix a(3, 3);
    a(0, 0) = cx(2, 1);
    a(1, 1) = cx(-1, 0);
    a(2, 2) = cx(0, 3);
    require_multiset_close(linalg::eigenvalues(a), {cx(2, 1), cx(-1, 0), cx(0, 3)}, 1e-12);
  }
  SECTION("identity") {
    require_multiset_close(linalg::eigenvalues(Matrix::identity(3)),
                           {cx(1, 0), cx(1, 0), cx(1, 0)}, 1e-12);
  }
  SECTION("weighted 2-cycle [[0,3],[2,0]] gives plus and minus sqrt(6)") {
    Matrix a(2, 2);
    a(0, 1) = 3.0;
    a(1, 0) = 2.0;
    const double s6 = std::sqrt(6.0);
    require_multiset_close(linalg::eigenvalues(a), {cx(s6, 0), cx(-s6, 0)}, 1e-12);
  }
  SECTION("3-cycle permutation gives cube roots of unity") {
    Matrix a(3, 3);
    a(1, 0) = 1.0;
    a(2, 1) = 1.0;
    a(0, 2) = 1.0;
    const double c = std::cos(2.0 * M_PI / 3.0), s = std::sin(2.0 * M_PI / 3.0);
    require_multiset_close(linalg::eigenvalues(a),
                           {cx(1, 0), cx(c, s), cx(c, -s)}, 1e-10);
  }
  SECTION("nilpotent tail chain is peeled to exact zeros") {
    // x1 -> x2 -> x3 -> x4 collapsing to nothing: strictly shifted entries.
    Matrix a(4, 4);
    a(1, 0) = 0.7;
    a(2, 1) = 1.3;
    a(3, 2) = 0.2;
    const auto eig = linalg::eigenvalues(a);
    for (const cx& l : eig) REQUIRE(std::abs(l) == 0.0);
  }
}

TEST_CASE("eigenvalues of a random similarity of a known diagonal") {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 14);
    std::vector<cx> d(n);
    for (auto& v : d) v = cx(gauss(rng), gauss(rng));
    // Unitary similarity from a Householder reflector keeps conditioning
    // perfect, so the spectrum is reproduced to near machine precision.
    std::vector<cx> u(n);
    for (auto& v : u) v = cx(gauss(rng), gauss(rng));
    double un = 0.0;
    for (auto& v : u) un += std::norm(v);
    un = std::sqrt(un);
    for (auto& v : u) v /= un;
    Matrix q(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        q(i, j) = (i == j ? cx(1, 0) : cx(0, 0)) - 2.0 * u[i] * std::conj(u[j]);
    Matrix diag(n, n);
    for (int i = 0; i < n; ++i) diag(i, i) = d[i];
    const Matrix a = q * diag * q.adjoint();
    require_multiset_close(linalg::eigenvalues(a), d, 1e-9);
  }
}

TEST_CASE("eigenvalues rejects oversized and non-square input") {
  CHECK_THROWS_AS(linalg::eigenvalues(Matrix(513, 513)), std::invalid_argument);
  CHECK_THROWS_AS(linalg::eigenvalues(Matrix(2, 3)), std::invalid_argument);
}

TEST_CASE("singular values match the Jordan-Wielandt eigenvalue route") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 7);
    Matrix a = random_matrix(rng, n);
    const std::vector<double> sigma = linalg::singular_values(a);

    // Independent route: eigenvalues of [[0, A], [A^H, 0]] are plus/minus
    // the singular values of A.
    Matrix jw(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        jw(i, n + j) = a(i, j);
        jw(n + i, j) = std::conj(a(j, i));
      }
    std::vector<double> mags;
    for (const cx& l : linalg::eigenvalues(jw)) mags.push_back(std::abs(l));
    std::sort(mags.rbegin(), mags.rend());
    for (int i = 0; i < n; ++i) {
      CAPTURE(trial, i);
      REQUIRE_THAT(mags[2 * i], Catch::Matchers::WithinAbs(sigma[i], 1e-8));
      REQUIRE_THAT(mags[2 * i + 1], Catch::Matchers::WithinAbs(sigma[i], 1e-8));
    }
  }
}

TEST_CASE("rank thresholds structural zeros correctly") {
  Matrix a(3, 3);
  a(0, 1) = 2.0;  // two independent columns, one zero column
  a(1, 2) = 0.5;
  CHECK(linalg::rank(a) == 2);
  CHECK(linalg::rank(Matrix(4, 4)) == 0);
  CHECK(linalg::rank(Matrix::identity(5)) == 5);
}

TEST_CASE("smallest singular value agrees with the Jacobi SVD") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 10);
    Matrix a = random_matrix(rng, n);
    const double via_jacobi = linalg::singular_values(a).back();
    const double via_inverse_iteration = linalg::smallest_singular_value(a);
    REQUIRE_THAT(via_inverse_iteration,
                 Catch::Matchers::WithinRel(via_jacobi, 1e-8));
  }
}

TEST_CASE("smallest singular value of a singular matrix is zero") {
  Matrix a(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;  // third row/col zero
  CHECK(linalg::smallest_singular_value(a) == 0.0);
}

TEST_CASE("inverse iteration recovers eigenvectors") {
  Matrix a(3, 3);
  a(0, 0) = 2.0;
  a(1, 1) = cx(0, 1);
  a(2, 2) = -1.0;
  a(0, 1) = 0.3;
  a(1, 2) = cx(0.2, 0.1);
  const auto vecs = linalg::eigenvectors_for(a, cx(0, 1), 1);
  REQUIRE(vecs.size() == 1);
  const auto av = a.apply(vecs[0]);
  double resid = 0.0;
  for (int i = 0; i < 3; ++i) resid = std::max(resid, std::abs(av[i] - cx(0, 1) * vecs[0][i]));
  REQUIRE(resid <= 1e-8);
}

TEST_CASE("eigenvalues at moderate dimension keep full accuracy") {
  std::mt19937_64 rng(909);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = 64;
  std::vector<cx> d(n);
  for (auto& v : d) v = cx(gauss(rng), gauss(rng));
  std::vector<cx> u(n);
  for (auto& v : u) v = cx(gauss(rng), gauss(rng));
  double un = 0.0;
  for (auto& v : u) un += std::norm(v);
  un = std::sqrt(un);
  for (auto& v : u) v /= un;
  Matrix q(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      q(i, j) = (i == j ? cx(1, 0) : cx(0, 0)) - 2.0 * u[i] * std::conj(u[j]);
  Matrix diag(n, n);
  for (int i = 0; i < n; ++i) diag(i, i) = d[i];
  require_multiset_close(linalg::eigenvalues(q * diag * q.adjoint()), d, 1e-8);
}
