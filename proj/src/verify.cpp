#include "istiefel/experiment.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace istiefel {
namespace {

constexpr int kDraws = 50;

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(2) << v;
  return s.str();
}

class Reporter {
 public:
  Reporter(VerifyReport& report, std::ostream& out) : report_(report), out_(out) {}

  void add(std::string name, bool passed, std::string detail) {
    out_ << (passed ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    report_.items.push_back({std::move(name), passed, std::move(detail)});
  }

  // Records `worst <= tol` as one item.
  void bound(std::string name, double worst, double tol) {
    add(std::move(name), worst <= tol, "worst " + sci(worst) + " (tol " + sci(tol) + ")");
  }

 private:
  VerifyReport& report_;
  std::ostream& out_;
};

Matrix rotated(const Vector& d, const Matrix& q) { return q * d.asDiagonal() * q.transpose(); }

}  // namespace

VerifyReport run_verify(const ExperimentConfig& config, std::ostream& out) {
  ExperimentConfig c = config;
  c.problem = "tracemin";
  const bool spd = c.verify_a == "spd";
  if (c.p == 0 && c.m == 0) {
    c.p = spd ? 12 : 8;
    c.m = spd ? 0 : 4;
    c.n = 0;
  }
  if (c.kp + c.km == 0) {
    c.kp = 2;
    c.km = c.m > 0 ? 1 : 0;
    c.k = 0;
  }
  c.resolve();
  if (spd && c.m != 0) throw ConfigError("verify-a = spd needs m = 0");

  VerifyReport report;
  Reporter rep(report, out);
  std::mt19937_64 rng(c.seed);
  const Index n = c.n;

  Vector d = layout_diagonal(ALayout::increasing, c.p, c.m);
  if (c.verify_a == "singular") d(0) = 0.0;
  const Matrix qa = random_rotation(n, rng);
  const Matrix qj = random_rotation(c.k, rng);
  const SymMatrix j_diag = signature(c.kp, c.km);

  std::optional<ManifoldSpec> spec_opt;
  try {
    spec_opt.emplace(SymMatrix(rotated(d, qa), 1e-8), SymMatrix(rotated(j_diag.matrix().diagonal(), qj), 1e-8));
  } catch (const std::exception& e) {
    rep.add("manifold construction", false, e.what());
    return report;
  }
  const ManifoldSpec& spec = *spec_opt;
  rep.add("manifold construction", true,
          "n = " + std::to_string(n) + ", k = " + std::to_string(c.k) + ", dimension " +
              std::to_string(spec.dimension()));

  const SymMatrix m = test_matrix(parse_test_matrix(c.matrix), n, c.matrix_param);
  const Metric metric = Metric::weighted(m);
  const double a_norm = spec.a().norm();
  const Problem prob = trace_min_problem(m, spec, MetricChoice::hessian);

  double feas = 0, tang = 0, idem = 0, ortho = 0, dual = 0, lyap = 0;
  double r1 = 0, cross = 0, retr_feas = 0, s_skew = 0, s_id = 0;
  for (int i = 0; i < kDraws; ++i) {
    const Matrix x = random_point(spec, rng);
    feas = std::max(feas, feasibility(spec, x));
    const Matrix y = random_normal(n, c.k, rng);

    const Matrix z = random_tangent(spec, x, rng).value;
    tang = std::max(tang, tangency_residual(spec, x, z) / (a_norm * x.norm() * z.norm()));

    const Matrix pt = project_tangent(spec, metric, x, y).value;
    const Matrix pn = project_normal(spec, metric, x, y);
    tang = std::max(tang, tangency_residual(spec, x, pt) / (a_norm * x.norm() * pt.norm()));
    idem = std::max(idem, (project_tangent(spec, metric, x, pt).value - pt).norm() / pt.norm());
    ortho = std::max(ortho, std::abs(metric_inner(metric, x, pn, z)) /
                                (metric_norm(metric, x, pn) * metric_norm(metric, x, z)));

    const Matrix egrad = prob.egrad(x);
    const Matrix grad = riemannian_gradient(spec, metric, x, egrad).value;
    dual = std::max(dual, std::abs(metric_inner(metric, x, grad, z) - frobenius_inner(egrad, z)) /
                              (egrad.norm() * z.norm()));

    const SymMatrix ls(rotated(Vector(random_normal(c.k, 1, rng).col(0).cwiseAbs().array() + 0.1), random_rotation(c.k, rng)),
                       1e-8);
    const SymMatrix lc = sym(random_normal(c.k, c.k, rng));
    const Matrix u = solve_lyapunov(ls, lc).matrix();
    lyap = std::max(lyap, (ls.matrix() * u + u * ls.matrix() - lc.matrix()).norm() /
                              (ls.matrix().norm() * u.norm() + lc.matrix().norm()));

    const Matrix zs = z * (0.5 * definedness_radius(spec, x, z) / spectral_norm(z));
    r1 = std::max(r1, retraction_axioms_check(spec, x, zs, 1e-5).r1);
    const Matrix full = retract(spec, x, zs, 1.0, CayleyForm::full);
    for (CayleyForm f : {CayleyForm::full, CayleyForm::mid, CayleyForm::econ}) {
      const Matrix r = retract(spec, x, zs, 1.0, f);
      retr_feas = std::max(retr_feas, feasibility(spec, r));
      cross = std::max(cross, (r - full).norm() / x.norm());
    }
    const Matrix s = s_matrix(spec, x, z);
    s_skew = std::max(s_skew, (s + s.transpose()).norm() / s.norm());
    s_id = std::max(s_id, (s * spec.apply_a(x) - z).norm() / z.norm());
  }
  rep.bound("sampled points feasible", feas, 1e-10);
  rep.bound("tangency of sampled and projected vectors", tang, 1e-10);
  rep.bound("projection idempotent", idem, 1e-12);
  rep.bound("normal part metric-orthogonal to tangent space", ortho, 1e-10);
  rep.bound("gradient duality g(grad, Z) = <egrad, Z>", dual, 1e-10);
  rep.bound("Lyapunov residual", lyap, 1e-12);
  rep.bound("retraction R(0) = X", r1, 1e-13);
  rep.bound("retraction keeps feasibility (all forms)", retr_feas, 1e-8);
  rep.bound("full, mid and econ forms agree", cross, 1e-9);
  rep.bound("S is skew", s_skew, 1e-12);
  rep.bound("S A X = Z", s_id, 1e-10);

  {
    const Matrix x = random_point(spec, rng);
    Matrix z = random_tangent(spec, x, rng).value;
    z /= z.norm();
    const double e1 = central_difference_error(spec, x, z, 1e-3);
    const double e2 = central_difference_error(spec, x, z, 1e-4);
    rep.add("central difference is second order", e2 < e1 / 30.0 || e1 < 1e-10,
            "error " + sci(e1) + " at h=1e-3, " + sci(e2) + " at h=1e-4");
  }
  {
    double worst = 0;
    for (int i = 0; i < 5; ++i) worst = std::max(worst, gradient_check(prob, random_point(spec, rng), 1e-6, rng));
    rep.bound("finite-difference gradient check", worst, 1e-4);
  }

  if (spd) {
    bool imaginary = true, defined = true;
    for (int i = 0; i < kDraws; ++i) {
      const Matrix x = random_point(spec, rng);
      const Matrix z = random_tangent(spec, x, rng).value;
      imaginary = imaginary && spectrum_is_imaginary(s_matrix(spec, x, z), spec.a());
      for (double t : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
        try {
          retract(spec, x, z, t, CayleyForm::full);
        } catch (const WellDefinednessError&) {
          defined = false;
        }
      }
    }
    rep.add("spectrum of S A purely imaginary (spd A)", imaginary, std::to_string(kDraws) + " draws");
    rep.add("Cayley step defined for t up to 1e3 (spd A)", defined, std::to_string(kDraws) + " draws");
  }

  try {
    const ManifoldSpec diag_spec(SymMatrix(rotated(d, qa), 1e-8), j_diag);
    const Problem p = trace_min_problem(m, diag_spec, MetricChoice::hessian);
    const PencilOracleResult o = pencil_oracle(m, diag_spec.a_sym(), c.kp, c.km);
    SolverConfig sc;
    sc.rstop = 1e-10;
    sc.cayley_form = CayleyForm::full;
    const RunRecord r = solve(p, make_point(diag_spec, PointSelector::smallest(c.kp, c.km)), sc);
    const double rel = std::abs(r.f_final - o.optimal_value) / std::abs(o.optimal_value);
    rep.add("solver matches pencil oracle", rel <= 1e-6 && r.status == RunStatus::converged,
            "relative gap " + sci(rel) + ", " + std::string(to_string(r.status)) + " after " +
                std::to_string(r.iterations) + " iterations");
  } catch (const std::exception& e) {
    rep.add("solver matches pencil oracle", false, e.what());
  }
  return report;
}

}  // namespace istiefel
