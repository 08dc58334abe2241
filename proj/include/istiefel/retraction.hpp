#pragma once

#include "istiefel/manifold.hpp"

#include <string_view>

namespace istiefel {

/// Raised when the linear system behind a Cayley step is singular to working
/// precision. The optimizer treats it as a rejected trial step.
class WellDefinednessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Algebraic form used to evaluate the Cayley curve:
///   full  n x n solve with I - (t/2) S A
///   mid   2k x 2k solve (Sherman-Morrison-Woodbury reduction)
///   econ  k x k solve
enum class CayleyForm { full, mid, econ };

CayleyForm parse_cayley_form(std::string_view name);
std::string_view to_string(CayleyForm form);

/// econ when k <= n/4, full otherwise.
CayleyForm default_cayley_form(Index n, Index k);

/// Per-call quantities of the reduced Cayley formulas, with J_X = X^T A X
/// standing in for J (identical on the manifold) and Z replaced by its
/// tangent part Z - X J_X^{-1} (Z^T A X + X^T A Z) / 2.
struct EconCache {
  Matrix x_plus;              // J_X^{-1} X^T A, k x n
  Matrix m;                   // X^+ Z, k x k
  Matrix lambda;              // Z - X M, n x k
  Matrix lambda_plus_lambda;  // J_X^{-1} Lambda^T A Lambda, k x k
};

EconCache make_econ_cache(const ManifoldSpec& spec, const Matrix& x, const Matrix& z);

/// S_{X,Z} = Q J X^T - X J Q^T with Q = Z - X J X^T A Z / 2. Skew-symmetric for
/// every Z and equal to X J Z^T A X J X^T - X J Z^T + Z J X^T when Z is tangent,
/// so S_{X,Z} A X = Z on the tangent space.
Matrix s_matrix(const ManifoldSpec& spec, const Matrix& x, const Matrix& z);

/// Point t along the Cayley curve cay((t/2) S_{X,Z} A) X. Throws
/// WellDefinednessError when the system is singular at this t.
Matrix retract(const ManifoldSpec& spec, const Matrix& x, const Matrix& z, double t, CayleyForm form);

/// R(tZ) - X, formed directly so that difference quotients do not lose
/// digits to cancellation against X.
Matrix retraction_step(const ManifoldSpec& spec, const Matrix& x, const Matrix& z, double t, CayleyForm form);

/// Radius 1/(|X|^3 |J|^2 |A|^2 + 2 |X| |J| |A|) in spectral norms; every tangent
/// Z with |Z|_2 below it gives a well-defined retraction at t = 1.
double definedness_radius(const ManifoldSpec& spec, const Matrix& x, const Matrix& z);

struct AxiomErrors {
  double r1 = 0.0;  // ||R(0) - X||_F
  double r2 = 0.0;  // ||(R(hZ) - X)/h - Z||_F
};

AxiomErrors retraction_axioms_check(const ManifoldSpec& spec, const Matrix& x, const Matrix& z, double h,
                                    CayleyForm form = CayleyForm::full);

/// ||(R(hZ) - R(-hZ))/(2h) - Z||_F from the increments, second order in h.
double central_difference_error(const ManifoldSpec& spec, const Matrix& x, const Matrix& z, double h,
                                CayleyForm form = CayleyForm::full);

/// True when every eigenvalue of S A has |Re| <= 1e-10 ||S A||_2.
bool spectrum_is_imaginary(const Matrix& s, const Matrix& a);

/// J X^T S_{X,Z} A Z; it is symmetric whenever the second derivative of the
/// Cayley curve at t = 0 is a Euclidean normal vector.
Matrix second_order_defect(const ManifoldSpec& spec, const Matrix& x, const Matrix& z);

}  // namespace istiefel
