#pragma once

#include "istiefel/problem.hpp"
#include "istiefel/retraction.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace istiefel {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inner product used in the Barzilai-Borwein quotients.
enum class BBInner { euclidean, metric };

struct SolverConfig {
  double beta = 1e-4;   // sufficient decrease
  double delta = 0.5;   // backtracking factor
  double gamma0 = 1e-3;
  double gamma_min = 1e-15;
  double gamma_max = 1e5;
  double alpha = 0.85;  // nonmonotone averaging weight; 0 gives monotone Armijo
  double rstop = 1e-9;
  int max_iter = 10000;
  int max_backtracks = 60;
  std::optional<CayleyForm> cayley_form;  // default_cayley_form(n, k) when empty
  BBInner bb_inner = BBInner::euclidean;

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

enum class RunStatus { converged, max_iter, stalled };
std::string_view to_string(RunStatus status);

struct IterationRow {
  int iter = 0;
  double f = 0.0;
  double gradnorm = 0.0;
  double tau = 0.0;  // step accepted to reach this iterate (0 for the start)
  double feas = 0.0;
  double time_s = 0.0;
  int backtracks = 0;
  double c_ref = 0.0;  // nonmonotone reference value used to accept this iterate
};

struct RunRecord {
  std::vector<IterationRow> rows;
  RunStatus status = RunStatus::max_iter;
  Matrix x_final;
  double f_final = 0.0;
  double gradnorm_final = 0.0;
  double gradnorm_initial = 0.0;
  double feas_final = 0.0;
  int iterations = 0;
  int fevals = 0;
  double cpu_s = 0.0;
  CayleyForm form = CayleyForm::full;

  /// Columns iter,f,gradnorm,tau,feas,time_s.
  void write_csv(std::ostream& out) const;
};

struct SolverState {
  Matrix x;
  Matrix z;  // negative Riemannian gradient
  double f = 0.0;
  double gradnorm = 0.0;  // metric norm of the gradient
  double q = 1.0;
  double c = 0.0;
  double gamma = 0.0;
  double tau = 0.0;
  int j = 0;
  Matrix prev_x;
  Matrix prev_z;
};

/// Alternating BB step: odd j gives <W,W>/|<W,Y>|, even j |<W,Y>|/<Y,Y>,
/// clamped to [gamma_min, gamma_max]; gamma0 (clamped) when degenerate.
double bb_trial_step(double ww, double wy, double yy, int j, const SolverConfig& config);
double bb_trial_step(const Matrix& w, const Matrix& y, int j, const SolverConfig& config);

struct SearchResult {
  double tau = 0.0;
  Matrix x_next;
  double f_next = 0.0;
  int ell = 0;
  int fevals = 0;
  bool accepted = false;
};

/// Smallest ell >= 0 with f(R(tau Z)) <= c - beta tau ||grad||^2 for
/// tau = gamma delta^ell. Singular Cayley systems and non-finite values count
/// as failed trials.
SearchResult nonmonotone_search(const Problem& problem, const SolverState& state, const SolverConfig& config);

/// Riemannian gradient descent with alternating BB trial steps and the
/// Zhang-Hager nonmonotone backtracking.
RunRecord solve(const Problem& problem, const Matrix& x0, const SolverConfig& config);

/// Max over `directions` random tangent Z of
/// |(f(R(hZ)) - f(X))/h - g(grad, Z)| / (1 + |g(grad, Z)|).
double gradient_check(const Problem& problem, const Matrix& x, double h, std::mt19937_64& rng,
                      int directions = 20, CayleyForm form = CayleyForm::full);

}  // namespace istiefel
