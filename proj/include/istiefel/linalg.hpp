#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace istiefel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense symmetric matrix. The stored entries are exactly symmetric: the
/// constructor accepts a nearly symmetric input and replaces it with its
/// symmetric part.
class SymMatrix {
 public:
  SymMatrix() = default;

  /// Throws LinalgError when `m` is not square or when
  /// ||m - m^T||_F > tol * max(1, ||m||_F).
  explicit SymMatrix(const Matrix& m, double tol = 1e-10);

  static SymMatrix identity(Index n);
  static SymMatrix diagonal(const Vector& d);

  Index order() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

  bool is_diagonal() const;

 private:
  Matrix m_;
};

struct Inertia {
  Index n_pos = 0;
  Index n_neg = 0;
  Index n_zero = 0;

  bool operator==(const Inertia&) const = default;
};

SymMatrix sym(const Matrix& omega);
Matrix skew(const Matrix& omega);

/// Counts eigenvalues above tol*||S||_2 as positive and below -tol*||S||_2 as
/// negative.
Inertia inertia(const SymMatrix& s, double tol = 1e-12);
Inertia inertia_from_eigenvalues(const Vector& eigenvalues, double tol = 1e-12);

/// Unique symmetric U with S U + U S = C for spd S, via the
/// eigendecomposition S = Q diag(l) Q^T.
SymMatrix solve_lyapunov(const SymMatrix& s, const SymMatrix& c);

struct SymEig {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns
};

SymEig sym_eig(const SymMatrix& s);
Vector sym_eigenvalues(const SymMatrix& s);

enum class TestMatrix { lehmer, minij, kms, gcdmat, moler, tridiag };

TestMatrix parse_test_matrix(std::string_view name);
std::string_view to_string(TestMatrix kind);
bool test_matrix_takes_param(TestMatrix kind);

/// Named spd test matrices with 1-based index formulas:
///   lehmer  min(i,j)/max(i,j)
///   minij   min(i,j)
///   kms     rho^|i-j|                (param rho, |rho| < 1)
///   gcdmat  gcd(i,j)
///   moler   U^T U, U unit upper triangular with alpha above the diagonal
///   tridiag tridiagonal(-1, 2, -1)
SymMatrix test_matrix(TestMatrix kind, Index n, std::optional<double> param = {});

/// Orthonormal basis of the orthogonal complement of range(X), n x (n-k).
Matrix orthonormal_complement(const Matrix& x);

double spectral_norm(const Matrix& m);
double spectral_norm(const SymMatrix& s);

/// Frobenius inner product tr(A^T B).
inline double frobenius_inner(const Matrix& a, const Matrix& b) {
  return (a.array() * b.array()).sum();
}

}  // namespace istiefel
