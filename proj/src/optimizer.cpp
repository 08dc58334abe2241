#include "istiefel/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace istiefel {

void SolverConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("SolverConfig: " + what); };
  if (!(beta > 0.0 && beta < 1.0)) fail("beta must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) fail("delta must lie in (0,1)");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in [0,1]");
  if (!(gamma_min > 0.0 && gamma_min < gamma_max)) fail("need 0 < gamma_min < gamma_max");
  if (!(gamma0 > 0.0)) fail("gamma0 must be positive");
  if (!(rstop >= 0.0)) fail("rstop must be non-negative");
  if (max_iter < 0) fail("max_iter must be non-negative");
  if (max_backtracks < 0) fail("max_backtracks must be non-negative");
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_iter: return "max_iter";
    case RunStatus::stalled: return "stalled";
  }
  return "?";
}

void RunRecord::write_csv(std::ostream& out) const {
  const auto old_precision = out.precision();
  out << "iter,f,gradnorm,tau,feas,time_s\n" << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.iter << ',' << r.f << ',' << r.gradnorm << ',' << r.tau << ',' << r.feas << ',' << r.time_s
        << '\n';
  }
  out.precision(old_precision);
}

double bb_trial_step(double ww, double wy, double yy, int j, const SolverConfig& config) {
  const double awy = std::abs(wy);
  double gamma = config.gamma0;
  if (j % 2 == 1) {
    if (awy > 0.0 && std::isfinite(ww / awy)) gamma = ww / awy;
  } else {
    if (yy > 0.0 && std::isfinite(awy / yy)) gamma = awy / yy;
  }
  // a zero numerator is as degenerate as a zero denominator
  if (!(gamma > 0.0)) gamma = config.gamma0;
  return std::max(config.gamma_min, std::min(gamma, config.gamma_max));
}

double bb_trial_step(const Matrix& w, const Matrix& y, int j, const SolverConfig& config) {
  return bb_trial_step(frobenius_inner(w, w), frobenius_inner(w, y), frobenius_inner(y, y), j, config);
}

SearchResult nonmonotone_search(const Problem& problem, const SolverState& state, const SolverConfig& config) {
  const CayleyForm form = config.cayley_form.value_or(default_cayley_form(problem.spec.n(), problem.spec.k()));
  // g(grad, Z) = -||grad||^2 since Z = -grad
  const double slope = -state.gradnorm * state.gradnorm;
  SearchResult out;
  double tau = state.gamma;
  for (int ell = 0; ell <= config.max_backtracks; ++ell, tau *= config.delta) {
    Matrix trial;
    try {
      trial = retract(problem.spec, state.x, state.z, tau, form);
    } catch (const WellDefinednessError&) {
      continue;
    }
    const double f_trial = problem.cost(trial);
    ++out.fevals;
    if (std::isfinite(f_trial) && f_trial <= state.c + config.beta * tau * slope) {
      out.tau = tau;
      out.x_next = std::move(trial);
      out.f_next = f_trial;
      out.ell = ell;
      out.accepted = true;
      return out;
    }
  }
  out.ell = config.max_backtracks + 1;
  return out;
}

RunRecord solve(const Problem& problem, const Matrix& x0, const SolverConfig& config) {
  config.validate();
  const ManifoldSpec& spec = problem.spec;
  SolverConfig cfg = config;
  if (!cfg.cayley_form) cfg.cayley_form = default_cayley_form(spec.n(), spec.k());

  const double feas0 = feasibility(spec, x0);
  if (!(feas0 <= spec.feasibility_tolerance())) {
    throw SolverError("initial point is infeasible: ||X0^T A X0 - J||_F = " + std::to_string(feas0));
  }

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  RunRecord rec;
  rec.form = *cfg.cayley_form;

  SolverState st;
  st.x = x0;
  st.f = problem.cost(st.x);
  rec.fevals = 1;
  if (!std::isfinite(st.f)) throw SolverError("cost is not finite at the initial point");

  auto update_gradient = [&] {
    const TangentVector grad = riemannian_gradient(spec, problem.metric, st.x, problem.egrad(st.x));
    st.z = -grad.value;
    st.gradnorm = metric_norm(problem.metric, grad);
    if (!std::isfinite(st.gradnorm)) throw SolverError("Riemannian gradient is not finite");
  };
  update_gradient();
  st.q = 1.0;
  st.c = st.f;
  rec.gradnorm_initial = st.gradnorm;
  rec.rows.push_back({0, st.f, st.gradnorm, 0.0, feas0, elapsed(), 0, st.c});

  for (st.j = 0;; ++st.j) {
    if (st.gradnorm <= cfg.rstop * rec.gradnorm_initial) {
      rec.status = RunStatus::converged;
      break;
    }
    if (st.j >= cfg.max_iter) {
      rec.status = RunStatus::max_iter;
      break;
    }

    if (st.j == 0) {
      st.gamma = std::max(cfg.gamma_min, std::min(cfg.gamma0, cfg.gamma_max));
    } else {
      const Matrix w = st.x - st.prev_x;
      const Matrix y = st.z - st.prev_z;
      if (cfg.bb_inner == BBInner::metric) {
        const Metric& g = problem.metric;
        st.gamma = bb_trial_step(metric_inner(g, st.x, w, w), metric_inner(g, st.x, w, y),
                                 metric_inner(g, st.x, y, y), st.j, cfg);
      } else {
        st.gamma = bb_trial_step(w, y, st.j, cfg);
      }
    }

    SearchResult step = nonmonotone_search(problem, st, cfg);
    rec.fevals += step.fevals;
    if (!step.accepted) {
      rec.status = RunStatus::stalled;
      break;
    }

    const double c_used = st.c;
    st.prev_x = std::move(st.x);
    st.prev_z = std::move(st.z);
    st.x = std::move(step.x_next);
    st.f = step.f_next;
    st.tau = step.tau;
    const double q_next = cfg.alpha * st.q + 1.0;
    st.c = (cfg.alpha * st.q / q_next) * st.c + st.f / q_next;
    st.q = q_next;
    update_gradient();

    rec.iterations = st.j + 1;
    rec.rows.push_back(
        {st.j + 1, st.f, st.gradnorm, st.tau, feasibility(spec, st.x), elapsed(), step.ell, c_used});
  }

  rec.cpu_s = elapsed();
  rec.x_final = st.x;
  rec.f_final = st.f;
  rec.gradnorm_final = st.gradnorm;
  rec.feas_final = rec.rows.back().feas;
  return rec;
}

double gradient_check(const Problem& problem, const Matrix& x, double h, std::mt19937_64& rng, int directions,
                      CayleyForm form) {
  const double f0 = problem.cost(x);
  const TangentVector grad = riemannian_gradient(problem.spec, problem.metric, x, problem.egrad(x));
  double worst = 0.0;
  for (int d = 0; d < directions; ++d) {
    Matrix z = random_tangent(problem.spec, x, rng).value;
    const double nz = z.norm();
    if (nz == 0.0) continue;
    z /= nz;
    const double predicted = metric_inner(problem.metric, x, grad.value, z);
    const double fd = (problem.cost(retract(problem.spec, x, z, h, form)) - f0) / h;
    worst = std::max(worst, std::abs(fd - predicted) / (1.0 + std::abs(predicted)));
  }
  return worst;
}

}  // namespace istiefel
