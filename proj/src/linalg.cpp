#include "istiefel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace istiefel {

SymMatrix::SymMatrix(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw LinalgError("SymMatrix: matrix is " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()) + ", expected square");
  }
  const double asym = (m - m.transpose()).norm();
  if (asym > tol * std::max(1.0, m.norm())) {
    throw LinalgError("SymMatrix: input is not symmetric (||M - M^T||_F = " +
                      std::to_string(asym) + ")");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Index n) { return SymMatrix(Matrix::Identity(n, n)); }

SymMatrix SymMatrix::diagonal(const Vector& d) { return SymMatrix(Matrix(d.asDiagonal())); }

bool SymMatrix::is_diagonal() const {
  for (Index j = 0; j < m_.cols(); ++j) {
    for (Index i = 0; i < m_.rows(); ++i) {
      if (i != j && m_(i, j) != 0.0) return false;
    }
  }
  return true;
}

SymMatrix sym(const Matrix& omega) {
  if (omega.rows() != omega.cols()) throw LinalgError("sym: matrix is not square");
  return SymMatrix(0.5 * (omega + omega.transpose()));
}

Matrix skew(const Matrix& omega) {
  if (omega.rows() != omega.cols()) throw LinalgError("skew: matrix is not square");
  return 0.5 * (omega - omega.transpose());
}

Inertia inertia_from_eigenvalues(const Vector& eigenvalues, double tol) {
  const double scale = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  const double cut = tol * scale;
  Inertia in;
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    const double l = eigenvalues(i);
    if (scale > 0.0 && l > cut) {
      ++in.n_pos;
    } else if (scale > 0.0 && l < -cut) {
      ++in.n_neg;
    } else {
      ++in.n_zero;
    }
  }
  return in;
}

Inertia inertia(const SymMatrix& s, double tol) {
  return inertia_from_eigenvalues(sym_eigenvalues(s), tol);
}

SymMatrix solve_lyapunov(const SymMatrix& s, const SymMatrix& c) {
  if (s.order() != c.order()) throw LinalgError("solve_lyapunov: order mismatch");
  const SymEig eig = sym_eig(s);
  const Index k = s.order();
  if (k == 0) return SymMatrix();
  const double lmax = eig.values.cwiseAbs().maxCoeff();
  if (!(eig.values(0) > 1e-14 * lmax)) {
    throw LinalgError("solve_lyapunov: coefficient matrix is not positive definite (min eigenvalue " +
                      std::to_string(eig.values(0)) + ")");
  }
  const Matrix& q = eig.vectors;
  Matrix u = q.transpose() * c.matrix() * q;
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < k; ++i) u(i, j) /= eig.values(i) + eig.values(j);
  }
  return SymMatrix(q * u * q.transpose(), 1e-6);
}

SymEig sym_eig(const SymMatrix& s) {
  if (s.order() == 0) return {};
  if (s.is_diagonal()) {
    const Vector d = s.matrix().diagonal();
    std::vector<Index> perm(d.size());
    std::iota(perm.begin(), perm.end(), Index{0});
    std::stable_sort(perm.begin(), perm.end(), [&](Index a, Index b) { return d(a) < d(b); });
    SymEig out{Vector(d.size()), Matrix::Zero(d.size(), d.size())};
    for (Index i = 0; i < d.size(); ++i) {
      out.values(i) = d(perm[i]);
      out.vectors(perm[i], i) = 1.0;
    }
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s.matrix());
  if (solver.info() != Eigen::Success) throw LinalgError("sym_eig: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Vector sym_eigenvalues(const SymMatrix& s) {
  if (s.is_diagonal()) {
    Vector d = s.matrix().diagonal();
    std::sort(d.data(), d.data() + d.size());
    return d;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw LinalgError("sym_eig: eigensolver did not converge");
  return solver.eigenvalues();
}

TestMatrix parse_test_matrix(std::string_view name) {
  if (name == "lehmer") return TestMatrix::lehmer;
  if (name == "minij") return TestMatrix::minij;
  if (name == "kms") return TestMatrix::kms;
  if (name == "gcdmat") return TestMatrix::gcdmat;
  if (name == "moler" || name == "mohler") return TestMatrix::moler;
  if (name == "tridiag") return TestMatrix::tridiag;
  throw LinalgError("unknown test matrix '" + std::string(name) + "'");
}

std::string_view to_string(TestMatrix kind) {
  switch (kind) {
    case TestMatrix::lehmer: return "lehmer";
    case TestMatrix::minij: return "minij";
    case TestMatrix::kms: return "kms";
    case TestMatrix::gcdmat: return "gcdmat";
    case TestMatrix::moler: return "moler";
    case TestMatrix::tridiag: return "tridiag";
  }
  return "?";
}

bool test_matrix_takes_param(TestMatrix kind) {
  return kind == TestMatrix::kms || kind == TestMatrix::moler;
}

SymMatrix test_matrix(TestMatrix kind, Index n, std::optional<double> param) {
  if (n < 1) throw LinalgError("test_matrix: order must be positive");
  if (test_matrix_takes_param(kind)) {
    if (!param) throw LinalgError(std::string(to_string(kind)) + " requires a parameter");
    if (!std::isfinite(*param)) throw LinalgError("test_matrix: parameter must be finite");
    if (kind == TestMatrix::kms && std::abs(*param) >= 1.0) {
      throw LinalgError("kms: |rho| must be < 1 for a positive definite matrix");
    }
  } else if (param) {
    throw LinalgError(std::string(to_string(kind)) + " takes no parameter");
  }

  Matrix m(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double a = static_cast<double>(std::min(i, j) + 1);
      const double b = static_cast<double>(std::max(i, j) + 1);
      switch (kind) {
        case TestMatrix::lehmer: m(i, j) = a / b; break;
        case TestMatrix::minij: m(i, j) = a; break;
        case TestMatrix::kms: m(i, j) = std::pow(*param, std::abs(static_cast<double>(i - j))); break;
        case TestMatrix::gcdmat: m(i, j) = static_cast<double>(std::gcd(i + 1, j + 1)); break;
        case TestMatrix::moler: {
          // (U^T U)_ij = sum_{l <= min(i,j)} U_li U_lj
          const double alpha = *param;
          m(i, j) = (a - 1.0) * alpha * alpha + (i == j ? 1.0 : alpha);
          break;
        }
        case TestMatrix::tridiag:
          m(i, j) = i == j ? 2.0 : (std::abs(static_cast<double>(i - j)) == 1.0 ? -1.0 : 0.0);
          break;
      }
    }
  }
  return SymMatrix(m, 0.0);
}

Matrix orthonormal_complement(const Matrix& x) {
  const Index n = x.rows();
  const Index k = x.cols();
  if (k >= n) return Matrix(n, 0);
  Eigen::HouseholderQR<Matrix> qr(x);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return q.rightCols(n - k);
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double spectral_norm(const SymMatrix& s) {
  if (s.order() == 0) return 0.0;
  return sym_eigenvalues(s).cwiseAbs().maxCoeff();
}

}  // namespace istiefel
