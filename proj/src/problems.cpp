#include "istiefel/problems.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace istiefel {
namespace {

void require_spd(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw std::invalid_argument(std::string(what) + " is not positive definite");
}

double trace_quadratic(const Matrix& m, const Matrix& x) { return frobenius_inner(x, m * x); }

Matrix orthonormal_columns(Index n, Index k, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_normal(n, k, rng));
  return qr.householderQ() * Matrix::Identity(n, k);
}

PointSelector random_selector(const Inertia& in, Index k_p, Index k_m, std::mt19937_64& rng) {
  auto pick = [&](Index pool, Index count) {
    std::vector<Index> idx(static_cast<std::size_t>(pool));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(static_cast<std::size_t>(count));
    return idx;
  };
  PointSelector s;
  s.positive = pick(in.n_pos, k_p);
  s.negative = pick(in.n_neg, k_m);
  return s;
}

PointSelector selector_for(InitChoice init, const Inertia& in, Index k_p, Index k_m, std::mt19937_64& rng) {
  switch (init) {
    case InitChoice::smallest: return PointSelector::smallest(k_p, k_m);
    case InitChoice::largest: return PointSelector::largest(in, k_p, k_m);
    case InitChoice::random: return random_selector(in, k_p, k_m, rng);
  }
  return PointSelector::smallest(k_p, k_m);
}

}  // namespace

MetricChoice parse_metric_choice(std::string_view name) {
  if (name == "euclidean") return MetricChoice::euclidean;
  if (name == "hessian") return MetricChoice::hessian;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "' (euclidean, hessian)");
}

std::string_view to_string(MetricChoice choice) {
  return choice == MetricChoice::euclidean ? "euclidean" : "hessian";
}

Problem trace_min_problem(const SymMatrix& m, const ManifoldSpec& spec, MetricChoice choice) {
  if (m.order() != spec.n()) throw std::invalid_argument("trace_min_problem: M and A differ in size");
  require_spd(m.matrix(), "M");
  auto mm = std::make_shared<const Matrix>(m.matrix());
  Problem p{spec,
            choice == MetricChoice::hessian ? Metric::weighted(m) : Metric::euclidean(),
            [mm](const Matrix& x) { return trace_quadratic(*mm, x); },
            [mm](const Matrix& x) -> Matrix { return 2.0 * (*mm * x); },
            "tracemin",
            {{"metric", std::string(to_string(choice))}},
            {},
            {}};
  return p;
}

Problem trace_min_problem(const SymMatrix& m, const SymMatrix& a, const SymMatrix& j, MetricChoice choice) {
  return trace_min_problem(m, ManifoldSpec(a, j), choice);
}

PencilEigResult extract_eigenpairs(const SymMatrix& m, const ManifoldSpec& spec, const Matrix& x, Index k_p,
                                   Index k_m) {
  if (k_p < 0 || k_m < 0 || k_p + k_m != spec.k()) {
    throw std::invalid_argument("extract_eigenpairs: k_p + k_m must equal k");
  }
  if ((spec.j() - signature(k_p, k_m).matrix()).norm() != 0.0) {
    throw std::invalid_argument("extract_eigenpairs: J must be diag(I_kp, -I_km)");
  }
  const Matrix mx = m.matrix() * x;
  const SymMatrix b = sym(x.transpose() * mx);

  PencilEigResult r;
  Matrix rot = Matrix::Zero(spec.k(), spec.k());
  if (k_p > 0) {
    const SymEig e = sym_eig(SymMatrix(b.matrix().topLeftCorner(k_p, k_p)));
    r.lambda_plus = e.values;
    rot.topLeftCorner(k_p, k_p) = e.vectors;
  }
  if (k_m > 0) {
    const SymEig e = sym_eig(SymMatrix(b.matrix().bottomRightCorner(k_m, k_m)));
    r.lambda_minus = -e.values;
    rot.bottomRightCorner(k_m, k_m) = e.vectors;
  }
  r.v = x * rot;

  Vector d(spec.k());
  d << r.lambda_plus, r.lambda_minus;
  const Matrix avd = spec.apply_a(r.v) * d.asDiagonal();
  const double denom = avd.norm();
  r.rel_err = denom > 0.0 ? (mx * rot - avd).norm() / denom : 0.0;
  return r;
}

PencilOracleResult pencil_oracle(const SymMatrix& m, const SymMatrix& a, Index k_p, Index k_m) {
  if (m.order() != a.order()) throw std::invalid_argument("pencil_oracle: M and A differ in size");
  require_spd(m.matrix(), "M");
  // A v = mu M v with M spd; the pencil eigenvalues are 1/mu
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(a.matrix(), m.matrix(), Eigen::EigenvaluesOnly);
  if (ges.info() != Eigen::Success) throw LinalgError("pencil_oracle: eigensolver failed");
  const Vector& mu = ges.eigenvalues();
  const double scale = mu.cwiseAbs().maxCoeff();
  std::vector<double> pos, neg;
  for (Index i = 0; i < mu.size(); ++i) {
    if (std::abs(mu(i)) < 1e-10 * scale) {
      throw std::invalid_argument("pencil_oracle: eigenvalue sign is ambiguous (A nearly singular)");
    }
    (mu(i) > 0 ? pos : neg).push_back(1.0 / mu(i));
  }
  if (static_cast<Index>(pos.size()) < k_p || static_cast<Index>(neg.size()) < k_m) {
    throw std::invalid_argument("pencil_oracle: pencil has " + std::to_string(pos.size()) + " positive and " +
                                std::to_string(neg.size()) + " negative eigenvalues");
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end(), std::greater<>());

  PencilOracleResult r;
  r.lambda_plus = Eigen::Map<const Vector>(pos.data(), k_p);
  r.lambda_minus = Eigen::Map<const Vector>(neg.data(), k_m);
  r.optimal_value = r.lambda_plus.sum() - r.lambda_minus.sum();
  return r;
}

SymMatrix lrevp_h(const SymMatrix& k_mat, const SymMatrix& m_mat) {
  if (k_mat.order() != m_mat.order()) throw std::invalid_argument("lrevp: K and M differ in size");
  const Index p = k_mat.order();
  Matrix h = Matrix::Zero(2 * p, 2 * p);
  h.topLeftCorner(p, p) = k_mat.matrix();
  h.bottomRightCorner(p, p) = m_mat.matrix();
  return SymMatrix(h);
}

SymMatrix lrevp_g(Index p) {
  Matrix g = Matrix::Zero(2 * p, 2 * p);
  g.topRightCorner(p, p).setIdentity();
  g.bottomLeftCorner(p, p).setIdentity();
  return SymMatrix(g);
}

Problem lrevp_problem(const SymMatrix& k_mat, const SymMatrix& m_mat, Index k) {
  const Index p = k_mat.order();
  if (k < 1 || k > p) throw std::invalid_argument("lrevp: need 1 <= k <= p");
  require_spd(k_mat.matrix(), "K");
  require_spd(m_mat.matrix(), "M");
  const SymMatrix h = lrevp_h(k_mat, m_mat);
  Vector g_eigs(2 * p);
  g_eigs << Vector::Ones(p), -Vector::Ones(p);
  Problem prob = trace_min_problem(h, ManifoldSpec(lrevp_g(p), SymMatrix::identity(k), g_eigs),
                                   MetricChoice::hessian);
  prob.name = "lrevp";
  return prob;
}

Matrix lrevp_initial_guess(Index p, Index k, std::mt19937_64& rng) {
  const Matrix v = orthonormal_columns(p, k, rng);
  Matrix x(2 * p, k);
  x << v, v;
  return x / std::sqrt(2.0);
}

Problem procrustes_problem(const Matrix& g, const Matrix& b, const SymMatrix& j, MetricChoice choice) {
  const Index n = j.order();
  if (g.cols() != n || b.cols() != n || g.rows() != b.rows()) {
    throw std::invalid_argument("procrustes: G and B must be l x n with n the order of J");
  }
  if (g.rows() < n) throw std::invalid_argument("procrustes: need l >= n");
  auto gg = std::make_shared<const Matrix>(g);
  auto bb = std::make_shared<const Matrix>(b);
  Metric metric = Metric::euclidean();
  if (choice == MetricChoice::hessian) {
    const Matrix gtg = g.transpose() * g;
    require_spd(gtg, "G^T G");
    metric = Metric::weighted(SymMatrix(gtg, 1e-8));
  }
  return Problem{ManifoldSpec(j, j),
                 std::move(metric),
                 [gg, bb](const Matrix& x) { return (*gg * x - *bb).squaredNorm(); },
                 [gg, bb](const Matrix& x) -> Matrix { return 2.0 * (gg->transpose() * (*gg * x - *bb)); },
                 "procrustes",
                 {{"metric", std::string(to_string(choice))}},
                 {},
                 {}};
}

Problem matrix_equation_problem(const SymMatrix& g, const Matrix& b, const ManifoldSpec& spec,
                                MetricChoice choice) {
  if (g.order() != spec.n() || b.rows() != spec.n() || b.cols() != spec.k()) {
    throw std::invalid_argument("matrix_equation: G must be n x n and B n x k");
  }
  Eigen::LLT<Matrix> llt(g.matrix());
  if (llt.info() != Eigen::Success) throw std::invalid_argument("G is not positive definite");
  auto gm = std::make_shared<const Matrix>(g.matrix());
  auto bb = std::make_shared<const Matrix>(b);
  Problem prob{spec,
               choice == MetricChoice::hessian ? Metric::weighted(SymMatrix(g.matrix() * g.matrix(), 1e-8))
                                               : Metric::euclidean(),
               [gm, bb](const Matrix& x) { return (*gm * x - *bb).squaredNorm(); },
               [gm, bb](const Matrix& x) -> Matrix { return 2.0 * (*gm * (*gm * x - *bb)); },
               "matexeq",
               {{"metric", std::string(to_string(choice))}},
               {},
               {}};
  Matrix candidate = llt.solve(b);
  if (feasibility(spec, candidate) <= spec.feasibility_tolerance()) {
    prob.optimal_value = 0.0;
    prob.known_minimizer = std::move(candidate);
  }
  return prob;
}

SymMatrix signature(Index k_p, Index k_m) {
  Vector d(k_p + k_m);
  d << Vector::Ones(k_p), -Vector::Ones(k_m);
  return SymMatrix::diagonal(d);
}

ALayout parse_a_layout(std::string_view name) {
  if (name == "increasing") return ALayout::increasing;
  if (name == "mirrored") return ALayout::mirrored;
  throw std::invalid_argument("unknown A layout '" + std::string(name) + "' (increasing, mirrored)");
}

std::string_view to_string(ALayout layout) { return layout == ALayout::increasing ? "increasing" : "mirrored"; }

Vector layout_diagonal(ALayout layout, Index p, Index m) {
  Vector d(p + m);
  for (Index i = 0; i < p; ++i) d(i) = static_cast<double>(i + 1);
  for (Index i = 0; i < m; ++i) {
    d(p + i) = layout == ALayout::increasing ? -static_cast<double>(m - i) : -static_cast<double>(i + 1);
  }
  return d;
}

SymMatrix layout_matrix(ALayout layout, Index p, Index m) {
  return SymMatrix::diagonal(layout_diagonal(layout, p, m));
}

InitChoice parse_init_choice(std::string_view name) {
  if (name == "smallest") return InitChoice::smallest;
  if (name == "largest") return InitChoice::largest;
  if (name == "random") return InitChoice::random;
  throw std::invalid_argument("unknown init '" + std::string(name) + "' (smallest, largest, random)");
}

std::string_view to_string(InitChoice choice) {
  switch (choice) {
    case InitChoice::smallest: return "smallest";
    case InitChoice::largest: return "largest";
    case InitChoice::random: return "random";
  }
  return "?";
}

Matrix random_rotation(Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_normal(n, n, rng));
  Matrix q = qr.householderQ();
  // fix signs so the distribution is Haar, then move into SO(n)
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i) {
    if (r(i, i) < 0) q.col(i) *= -1.0;
  }
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

Instance trace_min_instance(const TraceMinSetup& s, std::mt19937_64& rng) {
  const Index n = s.p + s.m;
  const SymMatrix m = test_matrix(s.matrix, n, s.matrix_param);
  const Vector d = layout_diagonal(s.layout, s.p, s.m);
  ManifoldSpec spec(SymMatrix::diagonal(d), signature(s.k_p, s.k_m), d);
  Problem prob = trace_min_problem(m, spec, s.metric);
  prob.params["matrix"] = std::string(to_string(s.matrix));
  prob.params["a_layout"] = std::string(to_string(s.layout));
  Matrix x0 = make_point(spec, selector_for(s.init, spec.a_inertia(), s.k_p, s.k_m, rng));
  return Instance{std::move(prob), std::move(x0), {}, m};
}

Instance procrustes_instance(Index l, Index p, Index m, MetricChoice choice, std::mt19937_64& rng) {
  const Index n = p + m;
  const Matrix g = random_normal(l, n, rng);
  Matrix v = Matrix::Zero(n, n);
  if (p > 0) v.topLeftCorner(p, p) = random_rotation(p, rng);
  if (m > 0) v.bottomRightCorner(m, m) = random_rotation(m, rng);
  Problem prob = procrustes_problem(g, g * v, signature(p, m), choice);
  return Instance{std::move(prob), Matrix::Identity(n, n), std::move(v), {}};
}

Instance matrix_equation_instance(const MatrixEquationSetup& s, std::mt19937_64& rng) {
  const Index n = s.p + s.m;
  if (s.k < 1 || s.k > s.p) throw std::invalid_argument("matexeq: need 1 <= k <= p");
  const SymMatrix g = test_matrix(s.matrix, n, s.matrix_param);
  const Matrix q = random_rotation(n, rng);
  const Vector d = layout_diagonal(ALayout::mirrored, s.p, s.m);
  const SymMatrix a(q * d.asDiagonal() * q.transpose(), 1e-8);
  ManifoldSpec spec(a, SymMatrix::identity(s.k), d);

  Matrix x_star(n, s.k);
  for (Index i = 0; i < s.k; ++i) x_star.col(i) = q.col(i) / std::sqrt(d(i));
  Problem prob = matrix_equation_problem(g, g.matrix() * x_star, spec, s.metric);
  prob.params["matrix"] = std::string(to_string(s.matrix));

  Matrix x0 = make_point(spec, d, q, selector_for(s.init, spec.a_inertia(), s.k, 0, rng));
  return Instance{std::move(prob), std::move(x0), std::move(x_star), {}};
}

}  // namespace istiefel
