#include "istiefel/retraction.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace istiefel {
namespace {

// Reciprocal condition estimate below which a Cayley system counts as singular.
constexpr double kMinRcond = 1e-14;

void check_args(const ManifoldSpec& spec, const Matrix& x, const Matrix& z) {
  if (x.rows() != spec.n() || x.cols() != spec.k() || z.rows() != spec.n() || z.cols() != spec.k()) {
    throw ManifoldError("retraction: X and Z must be " + std::to_string(spec.n()) + "x" +
                        std::to_string(spec.k()));
  }
}

Eigen::PartialPivLU<Matrix> factor_or_throw(const Matrix& system, double t, const char* which) {
  Eigen::PartialPivLU<Matrix> lu(system);
  const double rcond = lu.rcond();
  if (!(rcond >= kMinRcond)) {
    throw WellDefinednessError(std::string("Cayley ") + which + " system is singular at t = " +
                               std::to_string(t) + " (rcond " + std::to_string(rcond) + ")");
  }
  return lu;
}

Matrix finite_or_throw(Matrix y, double t) {
  if (!y.allFinite()) {
    throw WellDefinednessError("Cayley step produced non-finite values at t = " + std::to_string(t));
  }
  return y;
}

// Q = Z - X J (X^T A Z) / 2
Matrix skew_generator(const ManifoldSpec& spec, const Matrix& x, const Matrix& ax, const Matrix& z) {
  return z - 0.5 * x * (spec.j() * (ax.transpose() * z));
}

// Each form returns the increment R(tZ) - X, computed without subtracting X.

// t (I - (t/2) S A)^{-1} S A X
Matrix step_full(const ManifoldSpec& spec, const Matrix& x, const Matrix& z, double t) {
  const Index n = spec.n();
  const Matrix& j = spec.j();
  const Matrix ax = spec.apply_a(x);
  const Matrix q = skew_generator(spec, x, ax, z);
  const Matrix aq = spec.apply_a(q);
  // S A = Q J (A X)^T - X J (A Q)^T
  const Matrix qj = q * j;
  const Matrix xj = x * j;
  Matrix system = Matrix::Identity(n, n);
  system.noalias() -= (0.5 * t) * (qj * ax.transpose());
  system.noalias() += (0.5 * t) * (xj * aq.transpose());
  const Matrix sax = qj * (ax.transpose() * x) - xj * (aq.transpose() * x);
  const auto lu = factor_or_throw(system, t, "n x n");
  return finite_or_throw(t * lu.solve(sax), t);
}

Matrix step_mid(const ManifoldSpec& spec, const Matrix& x, const Matrix& z, double t) {
  const Index k = spec.k();
  const EconCache c = make_econ_cache(spec, x, z);
  const Matrix id = Matrix::Identity(k, k);

  Matrix kmat(spec.n(), 2 * k);
  kmat.leftCols(k) = 0.5 * x * c.m + c.lambda;
  kmat.rightCols(k) = -x;

  Matrix ntk(2 * k, 2 * k);
  ntk.topLeftCorner(k, k) = 0.5 * c.m;
  ntk.topRightCorner(k, k) = -id;
  ntk.bottomLeftCorner(k, k) = c.lambda_plus_lambda - 0.25 * c.m * c.m;
  ntk.bottomRightCorner(k, k) = 0.5 * c.m;

  Matrix ntx(2 * k, k);
  ntx.topRows(k) = id;
  ntx.bottomRows(k) = -0.5 * c.m;

  const Matrix system = Matrix::Identity(2 * k, 2 * k) - (0.5 * t) * ntk;
  const auto lu = factor_or_throw(system, t, "2k x 2k");
  return finite_or_throw(t * (kmat * lu.solve(ntx)), t);
}

// (t Lambda + 2X) Gamma^{-1} - 2X = t (Lambda + X M - (t/2) X Lambda^+ Lambda) Gamma^{-1}
Matrix step_econ(const ManifoldSpec& spec, const Matrix& x, const Matrix& z, double t) {
  const Index k = spec.k();
  const EconCache c = make_econ_cache(spec, x, z);
  const Matrix gamma = (0.25 * t * t) * c.lambda_plus_lambda - (0.5 * t) * c.m + Matrix::Identity(k, k);
  const auto lu = factor_or_throw(gamma.transpose(), t, "k x k");
  const Matrix lhs = c.lambda + x * (c.m - (0.5 * t) * c.lambda_plus_lambda);
  return finite_or_throw(t * lu.solve(lhs.transpose()).transpose(), t);
}

}  // namespace

CayleyForm parse_cayley_form(std::string_view name) {
  if (name == "full") return CayleyForm::full;
  if (name == "mid") return CayleyForm::mid;
  if (name == "econ") return CayleyForm::econ;
  throw std::invalid_argument("unknown Cayley form '" + std::string(name) + "' (full, mid, econ)");
}

std::string_view to_string(CayleyForm form) {
  switch (form) {
    case CayleyForm::full: return "full";
    case CayleyForm::mid: return "mid";
    case CayleyForm::econ: return "econ";
  }
  return "?";
}

CayleyForm default_cayley_form(Index n, Index k) { return 4 * k <= n ? CayleyForm::econ : CayleyForm::full; }

EconCache make_econ_cache(const ManifoldSpec& spec, const Matrix& x, const Matrix& z) {
  check_args(spec, x, z);
  const Matrix ax = spec.apply_a(x);
  // J_X = X^T A X in place of J: the reduced formulas then map the level set
  // through X to itself, so an existing constraint error is carried along
  // instead of amplified. J_X = J on the manifold.
  const Matrix gram = 0.5 * (ax.transpose() * x + x.transpose() * ax);
  const Eigen::PartialPivLU<Matrix> gram_lu(gram);
  const Matrix xaz = ax.transpose() * z;
  // make Z exactly tangent to that level set
  const Matrix zt = z - 0.5 * x * gram_lu.solve(xaz + xaz.transpose());
  EconCache c;
  c.x_plus = gram_lu.solve(ax.transpose());
  c.m = c.x_plus * zt;
  c.lambda = zt - x * c.m;
  c.lambda_plus_lambda = gram_lu.solve(c.lambda.transpose() * spec.apply_a(c.lambda));
  return c;
}

Matrix s_matrix(const ManifoldSpec& spec, const Matrix& x, const Matrix& z) {
  check_args(spec, x, z);
  const Matrix& j = spec.j();
  const Matrix ax = spec.apply_a(x);
  const Matrix q = skew_generator(spec, x, ax, z);
  const Matrix half = q * j * x.transpose();
  return half - half.transpose();
}

Matrix retraction_step(const ManifoldSpec& spec, const Matrix& x, const Matrix& z, double t, CayleyForm form) {
  check_args(spec, x, z);
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("retract: t must be finite and >= 0");
  switch (form) {
    case CayleyForm::full: return step_full(spec, x, z, t);
    case CayleyForm::mid: return step_mid(spec, x, z, t);
    case CayleyForm::econ: return step_econ(spec, x, z, t);
  }
  return Matrix::Zero(x.rows(), x.cols());
}

Matrix retract(const ManifoldSpec& spec, const Matrix& x, const Matrix& z, double t, CayleyForm form) {
  return x + retraction_step(spec, x, z, t, form);
}

double definedness_radius(const ManifoldSpec& spec, const Matrix& x, const Matrix& z) {
  check_args(spec, x, z);
  const double nx = spectral_norm(x);
  const double nj = spectral_norm(spec.j_sym());
  const double na = spectral_norm(spec.a_sym());
  return 1.0 / (nx * nx * nx * nj * nj * na * na + 2.0 * nx * nj * na);
}

AxiomErrors retraction_axioms_check(const ManifoldSpec& spec, const Matrix& x, const Matrix& z, double h,
                                    CayleyForm form) {
  AxiomErrors e;
  e.r1 = (retract(spec, x, z, 0.0, form) - x).norm();
  e.r2 = (retraction_step(spec, x, z, h, form) / h - z).norm();
  return e;
}

double central_difference_error(const ManifoldSpec& spec, const Matrix& x, const Matrix& z, double h,
                                CayleyForm form) {
  const Matrix fwd = retraction_step(spec, x, z, h, form);
  const Matrix bwd = retraction_step(spec, x, Matrix(-z), h, form);
  return ((fwd - bwd) / (2.0 * h) - z).norm();
}

bool spectrum_is_imaginary(const Matrix& s, const Matrix& a) {
  const Matrix sa = s * a;
  const double scale = spectral_norm(sa);
  if (scale == 0.0) return true;
  Eigen::EigenSolver<Matrix> solver(sa, false);
  if (solver.info() != Eigen::Success) throw LinalgError("spectrum_is_imaginary: eigensolver failed");
  return solver.eigenvalues().real().cwiseAbs().maxCoeff() <= 1e-10 * scale;
}

Matrix second_order_defect(const ManifoldSpec& spec, const Matrix& x, const Matrix& z) {
  const Matrix saz = s_matrix(spec, x, z) * spec.apply_a(z);
  return spec.j() * (x.transpose() * saz);
}

}  // namespace istiefel
