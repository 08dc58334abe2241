#include "istiefel/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace istiefel {

struct ManifoldSpec::Data {
  SymMatrix a;
  SymMatrix j;
  Inertia a_inertia;
  Inertia j_inertia;
  bool a_diagonal = false;
  Vector a_diag_inverse;
  std::optional<Eigen::PartialPivLU<Matrix>> a_lu;
  double j_norm = 0.0;
};

namespace {

void check_shape(const ManifoldSpec& spec, const Matrix& x, const char* what) {
  if (x.rows() != spec.n() || x.cols() != spec.k()) {
    throw ManifoldError(std::string(what) + ": expected " + std::to_string(spec.n()) + "x" +
                        std::to_string(spec.k()) + " matrix, got " + std::to_string(x.rows()) + "x" +
                        std::to_string(x.cols()));
  }
}

}  // namespace

ManifoldSpec::ManifoldSpec(SymMatrix a, SymMatrix j) {
  Vector eigenvalues = sym_eigenvalues(a);
  init(std::move(a), std::move(j), std::move(eigenvalues));
}

ManifoldSpec::ManifoldSpec(SymMatrix a, SymMatrix j, Vector a_eigenvalues) {
  if (a_eigenvalues.size() != a.order()) throw ManifoldError("eigenvalue count does not match A");
  init(std::move(a), std::move(j), std::move(a_eigenvalues));
}

void ManifoldSpec::init(SymMatrix a, SymMatrix j, Vector a_eigenvalues) {
  const Index n = a.order();
  const Index k = j.order();
  if (k < 1 || n < k) {
    throw ManifoldError("need 1 <= k <= n, got n = " + std::to_string(n) + ", k = " + std::to_string(k));
  }
  const double inv_err = (j.matrix() * j.matrix() - Matrix::Identity(k, k)).norm();
  if (inv_err > 1e-12 * static_cast<double>(k)) {
    throw ManifoldError("J is not an involution: ||J^2 - I||_F = " + std::to_string(inv_err));
  }

  auto d = std::make_shared<Data>();
  d->a_inertia = inertia_from_eigenvalues(a_eigenvalues);
  d->j_inertia = inertia(j);
  if (d->a_inertia.n_zero != 0) {
    throw ManifoldError("A is singular (" + std::to_string(d->a_inertia.n_zero) +
                        " numerically zero eigenvalues)");
  }
  if (d->j_inertia.n_pos > d->a_inertia.n_pos) {
    throw ManifoldError("J has " + std::to_string(d->j_inertia.n_pos) + " positive eigenvalues but A only " +
                        std::to_string(d->a_inertia.n_pos) + "; the feasible set is empty");
  }
  if (d->j_inertia.n_neg > d->a_inertia.n_neg) {
    throw ManifoldError("J has " + std::to_string(d->j_inertia.n_neg) + " negative eigenvalues but A only " +
                        std::to_string(d->a_inertia.n_neg) + "; the feasible set is empty");
  }

  d->a_diagonal = a.is_diagonal();
  if (d->a_diagonal) {
    d->a_diag_inverse = a.matrix().diagonal().cwiseInverse();
  } else {
    d->a_lu.emplace(a.matrix());
  }
  d->j_norm = j.matrix().norm();
  d->a = std::move(a);
  d->j = std::move(j);
  d_ = std::move(d);
}

Index ManifoldSpec::n() const { return d_->a.order(); }
Index ManifoldSpec::k() const { return d_->j.order(); }
const Matrix& ManifoldSpec::a() const { return d_->a.matrix(); }
const Matrix& ManifoldSpec::j() const { return d_->j.matrix(); }
const SymMatrix& ManifoldSpec::a_sym() const { return d_->a; }
const SymMatrix& ManifoldSpec::j_sym() const { return d_->j; }
const Inertia& ManifoldSpec::a_inertia() const { return d_->a_inertia; }
const Inertia& ManifoldSpec::j_inertia() const { return d_->j_inertia; }
bool ManifoldSpec::a_is_diagonal() const { return d_->a_diagonal; }

Index ManifoldSpec::dimension() const { return n() * k() - k() * (k() + 1) / 2; }

Matrix ManifoldSpec::apply_a(const Matrix& y) const {
  if (d_->a_diagonal) return d_->a.matrix().diagonal().asDiagonal() * y;
  return d_->a.matrix() * y;
}

Matrix ManifoldSpec::apply_a_inverse(const Matrix& y) const {
  if (d_->a_diagonal) return d_->a_diag_inverse.asDiagonal() * y;
  return d_->a_lu->solve(y);
}

double ManifoldSpec::feasibility_tolerance() const { return 1e-8 * d_->j_norm; }

// ---------------------------------------------------------------------------

struct Metric::Weighted {
  SymMatrix m;
  Eigen::LLT<Matrix> llt;
};

Metric Metric::euclidean() { return Metric(); }

Metric Metric::weighted(const SymMatrix& m) {
  auto w = std::make_shared<Weighted>();
  w->m = m;
  w->llt.compute(m.matrix());
  if (w->llt.info() != Eigen::Success) throw ManifoldError("metric matrix is not positive definite");
  Metric out;
  out.kind_ = Kind::weighted;
  out.weighted_ = std::move(w);
  return out;
}

Metric Metric::pointwise(PointFn fn) {
  Metric out;
  out.kind_ = Kind::pointwise;
  out.pointwise_ = std::move(fn);
  return out;
}

Matrix Metric::apply(const Matrix& x, const Matrix& z) const {
  switch (kind_) {
    case Kind::euclidean: return z;
    case Kind::weighted: return weighted_->m.matrix() * z;
    case Kind::pointwise: return pointwise_(x).matrix() * z;
  }
  return z;
}

Matrix Metric::apply_inverse(const Matrix& x, const Matrix& z) const {
  switch (kind_) {
    case Kind::euclidean: return z;
    case Kind::weighted: return weighted_->llt.solve(z);
    case Kind::pointwise: {
      Eigen::LLT<Matrix> llt(pointwise_(x).matrix());
      if (llt.info() != Eigen::Success) throw ManifoldError("metric matrix is not positive definite at X");
      return llt.solve(z);
    }
  }
  return z;
}

// ---------------------------------------------------------------------------

double feasibility(const ManifoldSpec& spec, const Matrix& x) {
  check_shape(spec, x, "feasibility");
  return (x.transpose() * spec.apply_a(x) - spec.j()).norm();
}

PointSelector PointSelector::smallest(Index k_p, Index k_m) {
  PointSelector s;
  for (Index i = 0; i < k_p; ++i) s.positive.push_back(i);
  for (Index i = 0; i < k_m; ++i) s.negative.push_back(i);
  return s;
}

PointSelector PointSelector::largest(const Inertia& a_inertia, Index k_p, Index k_m) {
  PointSelector s;
  for (Index i = 0; i < k_p; ++i) s.positive.push_back(a_inertia.n_pos - 1 - i);
  for (Index i = 0; i < k_m; ++i) s.negative.push_back(a_inertia.n_neg - 1 - i);
  return s;
}

Matrix make_point(const ManifoldSpec& spec, const Vector& values, const Matrix& vectors,
                  const PointSelector& selector) {
  const Index n = spec.n();
  const Index k = spec.k();
  if (values.size() != n || vectors.rows() != n || vectors.cols() != n) {
    throw ManifoldError("make_point: eigenbasis has wrong shape");
  }
  const auto k_p = static_cast<Index>(selector.positive.size());
  const auto k_m = static_cast<Index>(selector.negative.size());
  if (k_p != spec.j_inertia().n_pos || k_m != spec.j_inertia().n_neg) {
    throw ManifoldError("make_point: selector picks " + std::to_string(k_p) + " positive and " +
                        std::to_string(k_m) + " negative directions, J needs " +
                        std::to_string(spec.j_inertia().n_pos) + " and " +
                        std::to_string(spec.j_inertia().n_neg));
  }

  // positives ascending (closest to zero first), negatives descending
  std::vector<Index> pos, neg;
  for (Index i = 0; i < n; ++i) (values(i) > 0 ? pos : neg).push_back(i);
  std::sort(pos.begin(), pos.end(), [&](Index a, Index b) { return values(a) < values(b); });
  std::sort(neg.begin(), neg.end(), [&](Index a, Index b) { return values(a) > values(b); });

  Matrix v(n, k);
  auto place = [&](const std::vector<Index>& pool, const std::vector<Index>& picks, Index offset,
                   const char* sign) {
    for (std::size_t c = 0; c < picks.size(); ++c) {
      const Index idx = picks[c];
      if (idx < 0 || idx >= static_cast<Index>(pool.size())) {
        throw ManifoldError(std::string("make_point: ") + sign + " direction index " + std::to_string(idx) +
                            " out of range (A has " + std::to_string(pool.size()) + ")");
      }
      const Index e = pool[idx];
      v.col(offset + static_cast<Index>(c)) = vectors.col(e) / std::sqrt(std::abs(values(e)));
    }
  };
  place(pos, selector.positive, 0, "positive");
  place(neg, selector.negative, k_p, "negative");

  // U with U diag(I, -I) U^T = J; a signed permutation when J is diagonal.
  const Matrix& j = spec.j();
  Matrix u = Matrix::Zero(k, k);
  if (spec.j_sym().is_diagonal()) {
    Index cp = 0, cm = k_p;
    for (Index r = 0; r < k; ++r) u(r, j(r, r) > 0 ? cp++ : cm++) = 1.0;
  } else {
    const SymEig eig = sym_eig(spec.j_sym());
    // eigenvalues ascending: the -1 block comes first
    u.leftCols(k_p) = eig.vectors.rightCols(k_p);
    u.rightCols(k_m) = eig.vectors.leftCols(k_m);
  }
  return v * u.transpose();
}

Matrix make_point(const ManifoldSpec& spec, const PointSelector& selector) {
  const SymEig eig = sym_eig(spec.a_sym());
  return make_point(spec, eig.values, eig.vectors, selector);
}

Matrix random_normal(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  }
  return m;
}

TangentVector random_tangent(const ManifoldSpec& spec, const Matrix& x, std::mt19937_64& rng) {
  check_shape(spec, x, "random_tangent");
  const Index n = spec.n();
  const Index k = spec.k();
  const Matrix w = spec.j() * skew(random_normal(k, k, rng));
  Matrix z = x * w;
  if (n > k) {
    const Matrix x_perp = orthonormal_complement(x);
    z += spec.apply_a_inverse(x_perp * random_normal(n - k, k, rng));
  }
  return {x, z};
}

Matrix random_point(const ManifoldSpec& spec, std::mt19937_64& rng, double spread) {
  const Index n = spec.n();
  const Matrix x0 = make_point(spec, PointSelector::smallest(spec.j_inertia().n_pos, spec.j_inertia().n_neg));
  const Matrix s = skew(random_normal(n, n, rng));
  Matrix sa = s * spec.a();
  const double norm = spectral_norm(sa);
  if (norm == 0.0) return x0;
  sa *= spread / norm;
  const Matrix id = Matrix::Identity(n, n);
  return (id - 0.5 * sa).partialPivLu().solve(x0 + 0.5 * sa * x0);
}

double metric_inner(const Metric& metric, const Matrix& x, const Matrix& z1, const Matrix& z2) {
  if (z1.rows() != z2.rows() || z1.cols() != z2.cols()) throw ManifoldError("metric_inner: shape mismatch");
  if (metric.kind() == Metric::Kind::euclidean) return frobenius_inner(z1, z2);
  return frobenius_inner(z1, metric.apply(x, z2));
}

double metric_norm(const Metric& metric, const Matrix& x, const Matrix& z) {
  return std::sqrt(std::max(0.0, metric_inner(metric, x, z, z)));
}

double metric_inner(const Metric& metric, const TangentVector& z1, const TangentVector& z2) {
  if (z1.base.rows() != z2.base.rows() || z1.base.cols() != z2.base.cols() ||
      (z1.base.array() != z2.base.array()).any()) {
    throw ManifoldError("metric_inner: tangent vectors have different base points");
  }
  return metric_inner(metric, z1.base, z1.value, z2.value);
}

double metric_norm(const Metric& metric, const TangentVector& z) {
  return metric_norm(metric, z.base, z.value);
}

namespace {

// M_X^{-1} A X U with U solving the normal-component Lyapunov equation.
Matrix normal_component(const ManifoldSpec& spec, const Metric& metric, const Matrix& x, const Matrix& y) {
  check_shape(spec, x, "projection base point");
  check_shape(spec, y, "projection argument");
  const Matrix ax = spec.apply_a(x);
  const Matrix minv_ax = metric.apply_inverse(x, ax);
  const SymMatrix s = sym(ax.transpose() * minv_ax);
  const Matrix xay = ax.transpose() * y;
  const SymMatrix rhs = sym(2.0 * xay);
  const SymMatrix u = solve_lyapunov(s, rhs);
  return minv_ax * u.matrix();
}

}  // namespace

TangentVector project_tangent(const ManifoldSpec& spec, const Metric& metric, const Matrix& x,
                              const Matrix& y) {
  return {x, y - normal_component(spec, metric, x, y)};
}

Matrix project_normal(const ManifoldSpec& spec, const Metric& metric, const Matrix& x, const Matrix& y) {
  return normal_component(spec, metric, x, y);
}

TangentVector riemannian_gradient(const ManifoldSpec& spec, const Metric& metric, const Matrix& x,
                                  const Matrix& egrad) {
  check_shape(spec, egrad, "riemannian_gradient");
  return project_tangent(spec, metric, x, metric.apply_inverse(x, egrad));
}

double tangency_residual(const ManifoldSpec& spec, const Matrix& x, const Matrix& z) {
  const Matrix zax = z.transpose() * spec.apply_a(x);
  return (zax + zax.transpose()).norm();
}

}  // namespace istiefel
