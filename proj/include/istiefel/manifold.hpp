#pragma once

#include "istiefel/linalg.hpp"

#include <functional>
#include <memory>
#include <random>
#include <vector>

namespace istiefel {

class ManifoldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The indefinite Stiefel manifold {X in R^{n x k} : X^T A X = J} for a
/// nonsingular symmetric A and a symmetric involution J.
///
/// Construction validates J^2 = I, nonsingularity of A and the inertia
/// conditions i+(J) <= i+(A), i-(J) <= i-(A) (the set is empty otherwise),
/// and caches a factorization of A. Copies share the cached data.
class ManifoldSpec {
 public:
  ManifoldSpec(SymMatrix a, SymMatrix j);

  /// Same as above with the eigenvalues of A supplied by the caller (any
  /// order), which skips the eigenvalue computation for large structured A.
  ManifoldSpec(SymMatrix a, SymMatrix j, Vector a_eigenvalues);

  Index n() const;
  Index k() const;
  const Matrix& a() const;
  const Matrix& j() const;
  const SymMatrix& a_sym() const;
  const SymMatrix& j_sym() const;
  const Inertia& a_inertia() const;
  const Inertia& j_inertia() const;
  bool a_is_diagonal() const;

  /// nk - k(k+1)/2
  Index dimension() const;

  Matrix apply_a(const Matrix& y) const;
  Matrix apply_a_inverse(const Matrix& y) const;

  /// Base points farther than this from the constraint are rejected.
  double feasibility_tolerance() const;

 private:
  struct Data;
  void init(SymMatrix a, SymMatrix j, Vector a_eigenvalues);
  std::shared_ptr<const Data> d_;
};

/// The spd operator M_X of the tractable metric g(Z1, Z2) = tr(Z1^T M_X Z2).
class Metric {
 public:
  enum class Kind { euclidean, weighted, pointwise };
  using PointFn = std::function<SymMatrix(const Matrix& x)>;

  static Metric euclidean();
  /// Constant spd M; throws ManifoldError when M is not positive definite.
  static Metric weighted(const SymMatrix& m);
  /// Point-dependent M_X; factorized on every call.
  static Metric pointwise(PointFn fn);

  Kind kind() const { return kind_; }
  Matrix apply(const Matrix& x, const Matrix& z) const;
  Matrix apply_inverse(const Matrix& x, const Matrix& z) const;

 private:
  struct Weighted;
  Kind kind_ = Kind::euclidean;
  std::shared_ptr<const Weighted> weighted_;
  PointFn pointwise_;
};

struct TangentVector {
  Matrix base;
  Matrix value;
};

/// ||X^T A X - J||_F
double feasibility(const ManifoldSpec& spec, const Matrix& x);

/// Eigen-directions of A used to assemble a feasible point. `positive[i]`
/// picks the i-th positive eigenvalue counted from the one closest to zero,
/// `negative[i]` likewise among the negative eigenvalues.
struct PointSelector {
  std::vector<Index> positive;
  std::vector<Index> negative;

  /// The k_p positive and k_m negative eigenvalues of smallest magnitude.
  static PointSelector smallest(Index k_p, Index k_m);
  /// The k_p positive and k_m negative eigenvalues of largest magnitude
  /// (needs the inertia of A to resolve the indices).
  static PointSelector largest(const Inertia& a_inertia, Index k_p, Index k_m);
};

/// Feasible point V U^T where V holds the selected eigenvectors of A scaled
/// by |lambda|^{-1/2} and U is orthogonal with U^T J U = diag(I, -I).
Matrix make_point(const ManifoldSpec& spec, const PointSelector& selector);

/// Same construction from a caller-supplied eigenbasis of A (values in any
/// order, matching orthonormal columns of `vectors`).
Matrix make_point(const ManifoldSpec& spec, const Vector& a_eigenvalues, const Matrix& a_eigenvectors,
                  const PointSelector& selector);

/// Z = X W + A^{-1} X_perp K with J W skew and K standard normal.
TangentVector random_tangent(const ManifoldSpec& spec, const Matrix& x, std::mt19937_64& rng);

/// Feasible point obtained by moving make_point(smallest) with a random
/// A-isometry Q = (I - S A / 2)^{-1} (I + S A / 2), S skew with
/// ||S A||_2 = spread. Intended for small test instances.
Matrix random_point(const ManifoldSpec& spec, std::mt19937_64& rng, double spread = 0.5);

Matrix random_normal(Index rows, Index cols, std::mt19937_64& rng);

double metric_inner(const Metric& metric, const Matrix& x, const Matrix& z1, const Matrix& z2);
double metric_norm(const Metric& metric, const Matrix& x, const Matrix& z);
/// Throws ManifoldError when the tangent vectors live at different points.
double metric_inner(const Metric& metric, const TangentVector& z1, const TangentVector& z2);
double metric_norm(const Metric& metric, const TangentVector& z);

/// g-orthogonal projection onto the tangent space:
///   Y - M_X^{-1} A X U,  (X^T A M_X^{-1} A X) U + U (X^T A M_X^{-1} A X) = 2 sym(X^T A Y).
TangentVector project_tangent(const ManifoldSpec& spec, const Metric& metric, const Matrix& x,
                              const Matrix& y);
Matrix project_normal(const ManifoldSpec& spec, const Metric& metric, const Matrix& x,
                      const Matrix& y);

/// Riemannian gradient w.r.t. g_{M_X} given the Euclidean gradient of any
/// smooth extension of f.
TangentVector riemannian_gradient(const ManifoldSpec& spec, const Metric& metric, const Matrix& x,
                                  const Matrix& egrad);

/// ||Z^T A X + X^T A Z||_F
double tangency_residual(const ManifoldSpec& spec, const Matrix& x, const Matrix& z);

}  // namespace istiefel
