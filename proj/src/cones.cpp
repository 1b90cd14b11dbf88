// SPDX-License-Identifier: Apache-2.0
#include "conecert/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "conecert/linalg.hpp"

namespace conecert::cones {

namespace {

double entry_scale(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_dim(const ConeSpec& cone, Eigen::Index dim, std::string_view what) {
  if (cone.dim() != dim) {
    throw DimensionError(std::string(what) + ": cone has dimension " + std::to_string(cone.dim()) +
                         ", object has " + std::to_string(dim));
  }
}

double lorentz_margin(const Vector& x) { return x(0) - x.tail(x.size() - 1).norm(); }

double vector_margin(const ConeSpec& cone, const Vector& x) {
  return cone.is_orthant() ? x.minCoeff() : lorentz_margin(x);
}

/// Boundary rays (1, u) of a Lorentz cone. Dimension 2 has exactly two extreme
/// rays, so the list is exhaustive there.
std::vector<Vector> lorentz_boundary_rays(Eigen::Index dim, int samples,
                                          unsigned long long seed) {
  std::vector<Vector> rays;
  if (dim == 2) {
    rays.push_back(Vector::Ones(2));
    rays.push_back((Vector(2) << 1.0, -1.0).finished());
    return rays;
  }
  std::mt19937_64 rng(seed);
  rays.reserve(samples + 2 * (dim - 1));
  for (Eigen::Index i = 1; i < dim; ++i) {
    for (double sign : {1.0, -1.0}) {
      Vector r = Vector::Zero(dim);
      r(0) = 1.0;
      r(i) = sign;
      rays.push_back(r);
    }
  }
  for (int k = 0; k < samples; ++k) {
    Vector r(dim);
    r(0) = 1.0;
    r.tail(dim - 1) = random_unit_vector(dim - 1, rng);
    rays.push_back(r);
  }
  return rays;
}

}  // namespace

ConeSpec::ConeSpec(ConeKind kind, Eigen::Index dim) : kind_(kind), dim_(dim) {
  if (dim < 1) throw DimensionError("cone dimension must be at least 1");
  if (kind == ConeKind::Lorentz && dim < 2) {
    throw DimensionError("Lorentz cone requires dimension at least 2");
  }
}

Vector ConeSpec::interior_vector() const {
  if (is_orthant()) return Vector::Ones(dim_);
  Vector v = Vector::Zero(dim_);
  v(0) = 1.0;
  return v;
}

Matrix ConeSpec::positive_matrix() const {
  if (is_orthant()) return Matrix::Ones(dim_, dim_);
  Matrix e = 0.1 * Matrix::Identity(dim_, dim_);
  e(0, 0) += 1.0;
  return e;
}

std::string_view to_string(ConeKind kind) {
  return kind == ConeKind::Orthant ? "orthant" : "lorentz";
}

ConeKind parse_cone_kind(std::string_view name) {
  if (name == "orthant") return ConeKind::Orthant;
  if (name == "lorentz") return ConeKind::Lorentz;
  throw Error("unknown cone kind '" + std::string(name) + "' (expected orthant or lorentz)");
}

Vector random_unit_vector(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = normal(rng);
    norm = v.norm();
  } while (norm < 1e-12);
  return v / norm;
}

SphereMinimum minimize_on_sphere(const Matrix& s, const Vector& g, double c) {
  const Eigen::Index k = g.size();
  if (k == 0 || s.rows() != k || s.cols() != k) {
    throw DimensionError("minimize_on_sphere: S must be k x k with k = dim(g) >= 1");
  }
  const Matrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Vector& ev = es.eigenvalues();
  const Matrix& basis = es.eigenvectors();
  const Vector gt = basis.transpose() * g;
  const double s1 = ev(0);
  const double scale = std::max({1.0, std::abs(ev(0)), std::abs(ev(k - 1)), g.norm()});
  const double cluster = 1e-12 * scale;

  SphereMinimum out;
  Vector z(k);

  // Components in the lowest eigenspace decide between the easy and hard case.
  double g1 = 0.0;
  double rest = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (ev(i) - s1 <= cluster) {
      g1 += gt(i) * gt(i);
    } else {
      const double zi = gt(i) / (2.0 * (ev(i) - s1));
      rest += zi * zi;
    }
  }
  const double eps = std::numeric_limits<double>::epsilon();
  if (std::sqrt(g1) <= 1e2 * eps * scale && rest <= 1.0) {
    out.hard_case = true;
    for (Eigen::Index i = 0; i < k; ++i) {
      z(i) = (ev(i) - s1 <= cluster) ? 0.0 : -gt(i) / (2.0 * (ev(i) - s1));
    }
    z(0) = std::sqrt(std::max(0.0, 1.0 - rest));
  } else {
    // ||z(lambda)|| increases on (-inf, s1) and is <= 1 at s1 - ||g|| / 2.
    auto norm_at = [&](double lambda) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < k; ++i) {
        const double zi = gt(i) / (2.0 * (ev(i) - lambda));
        acc += zi * zi;
      }
      return std::sqrt(acc);
    };
    double lo = s1 - 0.5 * g.norm() - eps * scale;
    double hi = s1;
    for (int it = 0; it < 200 && hi - lo > eps * std::max(1.0, std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid >= hi) break;
      (norm_at(mid) < 1.0 ? lo : hi) = mid;
    }
    const double lambda = lo;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double denom = ev(i) - lambda;
      z(i) = denom > 0.0 ? -gt(i) / (2.0 * denom) : 0.0;
    }
    const double zn = z.norm();
    if (zn > 0.0) {
      z /= zn;
    } else {
      z.setZero();
      z(0) = 1.0;
    }
  }
  out.u = basis * z;
  out.value = out.u.dot(sym * out.u) + g.dot(out.u) + c;
  return out;
}

ConeMembership member(const ConeSpec& cone, const Vector& x, const Tolerances& tol) {
  require_dim(cone, x.size(), "member");
  ConeMembership m;
  m.margin = vector_margin(cone, x);
  const double slack = tol.cone_slack * (x.size() ? x.cwiseAbs().maxCoeff() : 0.0);
  m.inside = m.margin >= -slack;
  m.interior = m.margin > slack;
  return m;
}

double matrix_k_positive_margin(const ConeSpec& cone, const Matrix& x) {
  require_square(x, "matrix_k_positive");
  require_dim(cone, x.rows(), "matrix_k_positive");
  if (cone.is_orthant()) return x.minCoeff();
  const Eigen::Index k = x.rows() - 1;
  // y = X (1; u): y_0 = a + b^T u must stay positive and
  // y_0^2 - ||y_bar||^2 = (1; u)^T X^T J X (1; u) must stay positive.
  const double a = x(0, 0);
  const double bnorm = x.row(0).tail(k).norm();
  const double first = a - bnorm;
  Matrix j = Matrix::Identity(k + 1, k + 1);
  j.diagonal().tail(k).setConstant(-1.0);
  const Matrix w = x.transpose() * j * x;
  const SphereMinimum q =
      minimize_on_sphere(w.bottomRightCorner(k, k), 2.0 * w.col(0).tail(k), w(0, 0));
  const double top = a + bnorm;
  if (top <= 0.0) return first;
  return std::min(first, q.value / (2.0 * top));
}

bool matrix_k_positive(const ConeSpec& cone, const Matrix& x, const Tolerances& tol) {
  return matrix_k_positive_margin(cone, x) > tol.cone_slack * entry_scale(x);
}

ConeMembership matrix_k_nonnegative(const ConeSpec& cone, const Matrix& x,
                                    const Tolerances& tol) {
  require_square(x, "matrix_k_nonnegative");
  require_dim(cone, x.rows(), "matrix_k_nonnegative");
  const double scale = entry_scale(x);
  const double slack = tol.cone_slack * scale;
  ConeMembership out;
  if (cone.is_orthant()) {
    out.margin = x.minCoeff();
    out.inside = out.margin >= -slack;
    out.interior = out.margin > slack;
    return out;
  }

  // Exact criterion for the ice-cream cone: some mu >= 0 has
  // X^T J X - mu J positive semidefinite, and X e_0 lies in the cone.
  const Eigen::Index n = x.rows();
  Matrix j = Matrix::Identity(n, n);
  j.diagonal().tail(n - 1).setConstant(-1.0);
  const Matrix w = x.transpose() * j * x;
  auto lambda_min = [&](double mu) { return linalg::min_symmetric_eigenvalue(w - mu * j); };
  // lambda_min(W - mu J) is concave in mu and negative once mu > W_00.
  double lo = 0.0;
  double hi = std::max(0.0, w(0, 0));
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double m1 = hi - phi * (hi - lo);
  double m2 = lo + phi * (hi - lo);
  double f1 = lambda_min(m1);
  double f2 = lambda_min(m2);
  for (int it = 0; it < 120 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    if (f1 < f2) {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + phi * (hi - lo);
      f2 = lambda_min(m2);
    } else {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - phi * (hi - lo);
      f1 = lambda_min(m1);
    }
  }
  const double best = std::max({f1, f2, lambda_min(0.0)});
  const bool criterion = best >= -tol.cone_slack * std::max(scale * scale, 1e-300) &&
                         member(cone, x.col(0), tol).inside;

  // Boundary sampling guards against rank-deficient corner cases of the
  // criterion; it can only refute.
  double sampled = std::numeric_limits<double>::infinity();
  for (const Vector& ray : lorentz_boundary_rays(n, tol.sphere_samples, tol.sample_seed)) {
    sampled = std::min(sampled, lorentz_margin(x * ray));
  }
  out.sampled = n > 2;
  out.margin = sampled;
  out.inside = criterion && sampled >= -slack;
  out.interior = out.inside && matrix_k_positive_margin(cone, x) > slack;
  return out;
}

double cross_positivity_margin(const ConeSpec& cone, const Matrix& a) {
  require_square(a, "cross_positive");
  require_dim(cone, a.rows(), "cross_positive");
  const Eigen::Index n = a.rows();
  if (cone.is_orthant()) {
    if (n == 1) return 0.0;
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != j) m = std::min(m, a(i, j));
    return m;
  }
  // Orthogonal boundary pairs are x = (1, u), y = (1, -u) with ||u|| = 1, so
  // y^T A x = alpha + (b - c)^T u - u^T M u.
  const Eigen::Index k = n - 1;
  const Vector b = a.row(0).tail(k).transpose();
  const Vector c = a.col(0).tail(k);
  const Matrix m = a.bottomRightCorner(k, k);
  return minimize_on_sphere(-m, b - c, a(0, 0)).value;
}

bool cross_positive(const ConeSpec& cone, const Matrix& a, const Tolerances& tol) {
  return cross_positivity_margin(cone, a) >= -tol.cone_slack * entry_scale(a);
}

bool block_cross_positive(const ConeSpec& cone, const Matrix& a, const Matrix& b, const Matrix& c,
                          const Matrix& d, const Tolerances& tol) {
  for (const Matrix* m : {&a, &b, &c, &d}) {
    require_square(*m, "block_cross_positive");
    require_dim(cone, m->rows(), "block_cross_positive");
  }
  return cross_positive(cone, a, tol) && cross_positive(cone, d, tol) &&
         matrix_k_nonnegative(cone, b, tol).inside && matrix_k_nonnegative(cone, c, tol).inside;
}

ConeMembership block_cross_positive_direct(const ConeSpec& cone, const Matrix& l,
                                           const Tolerances& tol) {
  require_square(l, "block_cross_positive_direct");
  require_dim(cone, l.rows() / 2, "block_cross_positive_direct");
  if (l.rows() != 2 * cone.dim()) {
    throw DimensionError("block_cross_positive_direct: expected a 2n x 2n matrix");
  }
  const double slack = tol.cone_slack * entry_scale(l);
  ConeMembership out;
  if (cone.is_orthant()) {
    out.margin = cross_positivity_margin(ConeSpec::orthant(l.rows()), l);
    out.inside = out.margin >= -slack;
    out.interior = false;
    return out;
  }

  // x = (x1, x2), y = (y1, y2) in K x K with y^T x = 0 forces y1^T x1 = 0 and
  // y2^T x2 = 0. Each half is sampled as (0, any), (any, 0) or an orthogonal
  // boundary pair.
  const Eigen::Index n = cone.dim();
  std::mt19937_64 rng(tol.sample_seed);
  std::uniform_int_distribution<int> pick(0, 2);
  std::uniform_real_distribution<double> radius(0.0, 1.0);
  auto any_point = [&]() {
    Vector v(n);
    v(0) = 1.0;
    v.tail(n - 1) = radius(rng) * random_unit_vector(n - 1, rng);
    return v;
  };
  double margin = std::numeric_limits<double>::infinity();
  const int samples = 4 * tol.sphere_samples;
  for (int s = 0; s < samples; ++s) {
    Vector x = Vector::Zero(2 * n);
    Vector y = Vector::Zero(2 * n);
    for (int half = 0; half < 2; ++half) {
      const auto seg = half * n;
      switch (pick(rng)) {
        case 0:
          y.segment(seg, n) = any_point();
          break;
        case 1:
          x.segment(seg, n) = any_point();
          break;
        default: {
          const Vector u = random_unit_vector(n - 1, rng);
          x(seg) = 1.0;
          x.segment(seg + 1, n - 1) = u;
          y(seg) = 1.0;
          y.segment(seg + 1, n - 1) = -u;
        }
      }
    }
    const double nx = x.norm();
    const double ny = y.norm();
    if (nx == 0.0 || ny == 0.0) continue;
    margin = std::min(margin, y.dot(l * x) / (nx * ny));
  }
  out.margin = margin;
  out.inside = margin >= -slack;
  out.sampled = true;
  return out;
}

ConeMembership maps_into(const ConeSpec& from, const ConeSpec& to, const Matrix& m,
                         const Tolerances& tol) {
  require_valid(m, "maps_into");
  if (m.rows() != to.dim() || m.cols() != from.dim()) {
    throw DimensionError("maps_into: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", cones need " + std::to_string(to.dim()) +
                         "x" + std::to_string(from.dim()));
  }
  const double slack = tol.cone_slack * entry_scale(m);
  ConeMembership out;
  double margin = std::numeric_limits<double>::infinity();
  if (from.is_orthant()) {
    // Orthant generators are the unit vectors.
    for (Eigen::Index j = 0; j < m.cols(); ++j) margin = std::min(margin, vector_margin(to, m.col(j)));
  } else if (to.is_orthant()) {
    // Row i maps the Lorentz cone into R_+ iff it lies in the (self-)dual cone.
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      margin = std::min(margin, lorentz_margin(m.row(i).transpose()));
    }
  } else {
    for (const Vector& ray : lorentz_boundary_rays(from.dim(), tol.sphere_samples, tol.sample_seed)) {
      margin = std::min(margin, lorentz_margin(m * ray));
    }
    out.sampled = from.dim() > 2;
  }
  out.margin = margin;
  out.inside = margin >= -slack;
  out.interior = margin > slack;
  return out;
}

SystemCones SystemCones::orthants(const LtiSystem& sys) {
  return {ConeSpec::orthant(sys.inputs()), ConeSpec::orthant(sys.states()),
          ConeSpec::orthant(sys.outputs())};
}

MonotonicityReport check_monotone(const LtiSystem& sys, const SystemCones& cones,
                                  const Tolerances& tol) {
  require_dim(cones.x, sys.states(), "check_monotone state cone");
  require_dim(cones.u, sys.inputs(), "check_monotone input cone");
  require_dim(cones.z, sys.outputs(), "check_monotone output cone");
  MonotonicityReport r;
  r.a_margin = cross_positivity_margin(cones.x, sys.A());
  r.a_cross_positive = cross_positive(cones.x, sys.A(), tol);
  const ConeMembership b = maps_into(cones.u, cones.x, sys.B(), tol);
  const ConeMembership c = maps_into(cones.x, cones.z, sys.C(), tol);
  r.b_maps_Ku_to_Kx = b.inside;
  r.c_maps_Kx_to_Kz = c.inside;
  r.b_margin = b.margin;
  r.c_margin = c.margin;
  r.monotone = r.a_cross_positive && r.b_maps_Ku_to_Kx && r.c_maps_Kx_to_Kz;
  r.sampled = b.sampled || c.sampled;
  r.experimental = !cones.u.is_orthant() || !cones.x.is_orthant() || !cones.z.is_orthant();
  return r;
}

}  // namespace conecert::cones
