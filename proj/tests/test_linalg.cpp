#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "istiefel/linalg.hpp"
#include "istiefel/manifold.hpp"

#include <random>

using namespace istiefel;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

// I (x) S + S (x) I, the matrix of U -> S U + U S on column-major vec(U)
Matrix lyapunov_operator(const Matrix& s) {
  const Index k = s.rows();
  Matrix op = Matrix::Zero(k * k, k * k);
  for (Index j = 0; j < k; ++j) {
    op.block(j * k, j * k, k, k) += s;
    for (Index i = 0; i < k; ++i) op.block(i * k, j * k, k, k) += s(i, j) * Matrix::Identity(k, k);
  }
  return op;
}

SymMatrix random_spd(Index k, std::mt19937_64& rng) {
  const Matrix g = random_normal(k, k, rng);
  return SymMatrix(g * g.transpose() + 0.1 * Matrix::Identity(k, k), 1e-8);
}

}  // namespace

TEST_CASE("sym and skew parts") {
  const Matrix m = mat2(1, 2, 3, 4);
  CHECK((sym(m).matrix() - mat2(1, 2.5, 2.5, 4)).norm() == 0.0);
  CHECK((skew(m) - mat2(0, -0.5, 0.5, 0)).norm() == 0.0);
  CHECK((sym(m).matrix() + skew(m) - m).norm() == 0.0);

  const Matrix s = mat2(2, 1, 1, 3);
  CHECK((sym(s).matrix() - s).norm() == 0.0);
  CHECK(sym(mat2(0, 1, -1, 0)).matrix().norm() == 0.0);
  CHECK((skew(mat2(0, 1, -1, 0)) - mat2(0, 1, -1, 0)).norm() == 0.0);
  CHECK(skew(Matrix::Identity(3, 3)).norm() == 0.0);

  CHECK_THROWS_AS(sym(Matrix::Zero(2, 3)), LinalgError);
  CHECK_THROWS_AS(skew(Matrix::Zero(3, 2)), LinalgError);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Matrix w = random_normal(5, 5, rng);
    CHECK((sym(w).matrix() + skew(w) - w).norm() <= 1e-15 * w.norm());
  }
}

TEST_CASE("SymMatrix stores an exactly symmetric matrix") {
  Matrix m = mat2(1, 2, 2 + 1e-13, 5);
  const SymMatrix s(m);
  CHECK((s.matrix() - s.matrix().transpose()).norm() == 0.0);
  CHECK_THROWS_AS(SymMatrix(mat2(1, 2, 3, 4)), LinalgError);
  CHECK_THROWS_AS(SymMatrix(Matrix::Zero(2, 3)), LinalgError);
  CHECK(SymMatrix::diagonal(Vector::Ones(3)).is_diagonal());
  CHECK_FALSE(SymMatrix(mat2(1, 1, 1, 1)).is_diagonal());
}

TEST_CASE("inertia") {
  Vector d(200);
  for (int i = 0; i < 150; ++i) d(i) = i + 1;
  for (int i = 0; i < 50; ++i) d(150 + i) = -(50 - i);
  CHECK(inertia(SymMatrix::diagonal(d)) == Inertia{150, 50, 0});

  CHECK(inertia(SymMatrix(Matrix::Zero(4, 4))) == Inertia{0, 0, 4});

  Vector t(3);
  t << 2, -3, 1e-16;
  CHECK(inertia(SymMatrix::diagonal(t)) == Inertia{1, 1, 1});

  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> sign(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    Vector v(9);
    Inertia expect;
    for (int i = 0; i < 9; ++i) {
      const int s = sign(rng);
      v(i) = s * (1.0 + i);
      (s > 0 ? expect.n_pos : s < 0 ? expect.n_neg : expect.n_zero) += 1;
    }
    CHECK(inertia(SymMatrix::diagonal(v)) == expect);
  }
}

TEST_CASE("Lyapunov solver") {
  std::mt19937_64 rng(5);
  SUBCASE("identity coefficient halves the right-hand side") {
    const SymMatrix c = sym(random_normal(4, 4, rng));
    CHECK((solve_lyapunov(SymMatrix::identity(4), c).matrix() - 0.5 * c.matrix()).norm() <= 1e-15);
  }
  SUBCASE("scalar") {
    const SymMatrix u = solve_lyapunov(SymMatrix(Matrix::Constant(1, 1, 3.0)), SymMatrix(Matrix::Constant(1, 1, 12.0)));
    CHECK(u(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("matches the Kronecker linear system") {
    const Index k = 6;
    const SymMatrix s = random_spd(k, rng);
    const SymMatrix c = sym(random_normal(k, k, rng));
    const Matrix big = lyapunov_operator(s.matrix());
    const Vector rhs = Eigen::Map<const Vector>(c.matrix().data(), k * k);
    const Vector sol = big.lu().solve(rhs);
    const Matrix oracle = Eigen::Map<const Matrix>(sol.data(), k, k);
    CHECK((solve_lyapunov(s, c).matrix() - oracle).norm() <= 1e-10 * oracle.norm());
  }
  SUBCASE("residual bound over random pairs") {
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const Index k = 1 + i % 20;
      const SymMatrix s = random_spd(k, rng);
      const SymMatrix c = sym(random_normal(k, k, rng));
      const Matrix u = solve_lyapunov(s, c).matrix();
      const double res = (s.matrix() * u + u * s.matrix() - c.matrix()).norm();
      worst = std::max(worst, res / (s.matrix().norm() * u.norm() + c.matrix().norm()));
    }
    CHECK(worst <= 1e-12);
  }
  SUBCASE("rejects an indefinite coefficient") {
    CHECK_THROWS_AS(solve_lyapunov(SymMatrix(mat2(1, 0, 0, -1)), SymMatrix::identity(2)), LinalgError);
  }
}

TEST_CASE("symmetric eigendecomposition") {
  Vector d(3);
  d << 3, 1, 2;
  const SymEig e = sym_eig(SymMatrix::diagonal(d));
  CHECK(e.values(0) == 1.0);
  CHECK(e.values(1) == 2.0);
  CHECK(e.values(2) == 3.0);
  CHECK((e.vectors.cwiseAbs().colwise().sum() - Eigen::RowVector3d::Ones()).norm() == 0.0);

  const SymEig f = sym_eig(SymMatrix(mat2(0, 1, 1, 0)));
  CHECK(f.values(0) == doctest::Approx(-1.0));
  CHECK(f.values(1) == doctest::Approx(1.0));

  std::mt19937_64 rng(8);
  const SymMatrix s = sym(random_normal(8, 8, rng));
  const SymEig g = sym_eig(s);
  CHECK((g.vectors * g.values.asDiagonal() * g.vectors.transpose() - s.matrix()).norm() <= 1e-12 * s.matrix().norm());
  CHECK((g.vectors.transpose() * g.vectors - Matrix::Identity(8, 8)).norm() <= 1e-12 * 8);
}

TEST_CASE("named test matrices") {
  Matrix lehmer3(3, 3);
  lehmer3 << 1, 1.0 / 2, 1.0 / 3, 1.0 / 2, 1, 2.0 / 3, 1.0 / 3, 2.0 / 3, 1;
  CHECK((test_matrix(TestMatrix::lehmer, 3).matrix() - lehmer3).norm() <= 1e-16);
  CHECK((test_matrix(TestMatrix::tridiag, 2).matrix() - mat2(2, -1, -1, 2)).norm() == 0.0);
  CHECK((test_matrix(TestMatrix::kms, 2, 0.5).matrix() - mat2(1, 0.5, 0.5, 1)).norm() == 0.0);

  Matrix minij3(3, 3);
  minij3 << 1, 1, 1, 1, 2, 2, 1, 2, 3;
  CHECK((test_matrix(TestMatrix::minij, 3).matrix() - minij3).norm() == 0.0);
  Matrix gcd4(4, 4);
  gcd4 << 1, 1, 1, 1, 1, 2, 1, 2, 1, 1, 3, 1, 1, 2, 1, 4;
  CHECK((test_matrix(TestMatrix::gcdmat, 4).matrix() - gcd4).norm() == 0.0);

  // U^T U with U = [[1, a, a], [0, 1, a], [0, 0, 1]]
  const double a = -0.5;
  Matrix u = Matrix::Identity(3, 3);
  u(0, 1) = u(0, 2) = u(1, 2) = a;
  CHECK((test_matrix(TestMatrix::moler, 3, a).matrix() - u.transpose() * u).norm() <= 1e-15);

  CHECK(parse_test_matrix("mohler") == TestMatrix::moler);
  CHECK_THROWS_AS(parse_test_matrix("hilbert"), LinalgError);
  CHECK_THROWS_AS(test_matrix(TestMatrix::kms, 3), LinalgError);
  CHECK_THROWS_AS(test_matrix(TestMatrix::kms, 3, 1.5), LinalgError);
  CHECK_THROWS_AS(test_matrix(TestMatrix::lehmer, 3, 0.5), LinalgError);
  CHECK_THROWS_AS(test_matrix(TestMatrix::lehmer, 0), LinalgError);

  for (Index n : {1, 7, 50, 200}) {
    const std::pair<TestMatrix, std::optional<double>> cases[] = {
        {TestMatrix::lehmer, {}}, {TestMatrix::minij, {}},  {TestMatrix::kms, 0.5},
        {TestMatrix::gcdmat, {}}, {TestMatrix::moler, 0.5}, {TestMatrix::tridiag, {}}};
    for (const auto& [kind, param] : cases) {
      CAPTURE(to_string(kind));
      CAPTURE(n);
      const SymMatrix s = test_matrix(kind, n, param);
      CHECK(s.order() == n);
      CHECK(sym_eigenvalues(s).minCoeff() > 0.0);
    }
  }
}

TEST_CASE("orthonormal complement and norms") {
  std::mt19937_64 rng(2);
  const Matrix x = random_normal(9, 3, rng);
  const Matrix perp = orthonormal_complement(x);
  CHECK(perp.cols() == 6);
  CHECK((perp.transpose() * perp - Matrix::Identity(6, 6)).norm() <= 1e-14);
  CHECK((x.transpose() * perp).norm() <= 1e-13 * x.norm());

  CHECK(spectral_norm(mat2(3, 0, 0, -4)) == doctest::Approx(4.0));
  CHECK(spectral_norm(SymMatrix(mat2(3, 0, 0, -4))) == doctest::Approx(4.0));
  CHECK(frobenius_inner(mat2(1, 2, 3, 4), mat2(1, 1, 1, 1)) == 10.0);
}
