#pragma once

#include "istiefel/problem.hpp"

#include <random>
#include <string_view>

namespace istiefel {

/// euclidean: M_X = I. hessian: M_X = the constant matrix of the quadratic
/// term (M for trace minimization, G^T G for least squares).
enum class MetricChoice { euclidean, hessian };
MetricChoice parse_metric_choice(std::string_view name);
std::string_view to_string(MetricChoice choice);

/// f(X) = tr(X^T M X) on X^T A X = J. Throws std::invalid_argument when M is
/// not positive definite or its size differs from A.
Problem trace_min_problem(const SymMatrix& m, const ManifoldSpec& spec, MetricChoice choice);
Problem trace_min_problem(const SymMatrix& m, const SymMatrix& a, const SymMatrix& j, MetricChoice choice);

struct PencilEigResult {
  Vector lambda_plus;   // ascending
  Vector lambda_minus;  // descending, closest to zero first
  Matrix v;             // columns match (lambda_plus, lambda_minus)
  double rel_err = 0.0;  // ||M V - A V D||_F / ||A V D||_F
};

/// Eigenpairs of M - lambda A recovered from a trace minimizer X with
/// J = diag(I_kp, -I_km): rotates X by the eigenvectors of the diagonal
/// blocks of X^T M X.
PencilEigResult extract_eigenpairs(const SymMatrix& m, const ManifoldSpec& spec, const Matrix& x, Index k_p,
                                   Index k_m);

struct PencilOracleResult {
  Vector lambda_plus;   // k_p smallest positive eigenvalues, ascending
  Vector lambda_minus;  // k_m negative eigenvalues closest to zero, descending
  double optimal_value = 0.0;  // sum(lambda_plus) - sum(lambda_minus)
};

/// Dense generalized eigensolve of M - lambda A with M spd. Throws
/// std::invalid_argument when M is not positive definite, when the pencil
/// has too few eigenvalues of either sign, or when an eigenvalue of (A, M)
/// is too close to zero to assign a sign.
PencilOracleResult pencil_oracle(const SymMatrix& m, const SymMatrix& a, Index k_p, Index k_m);

/// Trace minimization of H = diag(K, Mm) under X^T G X = I_k with
/// G = [[0, I], [I, 0]]; metric M_X = H.
Problem lrevp_problem(const SymMatrix& k_mat, const SymMatrix& m_mat, Index k);
/// [V; V] / sqrt(2) with V a random p x k matrix with orthonormal columns.
Matrix lrevp_initial_guess(Index p, Index k, std::mt19937_64& rng);
/// The (H, G) pencil of lrevp_problem, for pencil_oracle.
SymMatrix lrevp_h(const SymMatrix& k_mat, const SymMatrix& m_mat);
SymMatrix lrevp_g(Index p);

/// f(X) = ||G X - B||_F^2 on the J-orthogonal group (A = J).
Problem procrustes_problem(const Matrix& g, const Matrix& b, const SymMatrix& j, MetricChoice choice);

/// f(X) = ||G X - B||_F^2 with G spd on X^T A X = J. When G^{-1} B is
/// feasible it is recorded as the known minimizer with optimal value 0.
Problem matrix_equation_problem(const SymMatrix& g, const Matrix& b, const ManifoldSpec& spec,
                                MetricChoice choice);

/// diag(+-1) with k_p ones followed by k_m minus ones.
SymMatrix signature(Index k_p, Index k_m);

/// Diagonal A with p positive and m negative entries:
///   increasing  diag(1, ..., p, -m, ..., -1)
///   mirrored    diag(1, ..., p, -1, ..., -m)
enum class ALayout { increasing, mirrored };
ALayout parse_a_layout(std::string_view name);
std::string_view to_string(ALayout layout);
SymMatrix layout_matrix(ALayout layout, Index p, Index m);
Vector layout_diagonal(ALayout layout, Index p, Index m);

/// Which eigen-directions of A build the starting point.
enum class InitChoice { smallest, largest, random };
InitChoice parse_init_choice(std::string_view name);
std::string_view to_string(InitChoice choice);

/// A problem with its starting point and, when known, the point the
/// instance was built around.
struct Instance {
  Problem problem;
  Matrix x0;
  std::optional<Matrix> reference;
  std::optional<SymMatrix> trace_matrix;  // M of tr(X^T M X) for trace problems
};

struct TraceMinSetup {
  TestMatrix matrix = TestMatrix::lehmer;
  std::optional<double> matrix_param;
  Index p = 0, m = 0, k_p = 0, k_m = 0;
  ALayout layout = ALayout::increasing;
  MetricChoice metric = MetricChoice::hessian;
  InitChoice init = InitChoice::smallest;
};
/// Named M against a diagonal A; `rng` is used only for InitChoice::random.
Instance trace_min_instance(const TraceMinSetup& setup, std::mt19937_64& rng);

/// G standard normal l x n, prescribed V = diag(V1, V2) with V1 in SO(p),
/// V2 in SO(m), B = G V, X0 = I.
Instance procrustes_instance(Index l, Index p, Index m, MetricChoice choice, std::mt19937_64& rng);

struct MatrixEquationSetup {
  TestMatrix matrix = TestMatrix::lehmer;
  std::optional<double> matrix_param;
  Index p = 0, m = 0, k = 0;
  MetricChoice metric = MetricChoice::hessian;
  InitChoice init = InitChoice::largest;
};
/// G a named spd matrix, A = Q diag(1..p, -1..-m) Q^T with Q random
/// orthogonal, J = I_k and B = G [q_1 .. q_k] diag(1/sqrt(i)), so G^{-1} B is
/// the unique solution.
Instance matrix_equation_instance(const MatrixEquationSetup& setup, std::mt19937_64& rng);

/// Random orthogonal n x n matrix with determinant +1.
Matrix random_rotation(Index n, std::mt19937_64& rng);

}  // namespace istiefel
