#ifndef WIENER_KERNELS_HPP
#define WIENER_KERNELS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wiener/error.hpp"
#include "wiener/geometry.hpp"
#include "wiener/radial.hpp"
#include "wiener/spherical.hpp"

namespace wiener {

/// Everything a kernel needs about the cone: the angular eigenpair, the
/// radial pair built from the same (n, lambda), and the reference point P0
/// on the axis at r = 1.
struct ConeContext {
  int n = 3;
  DomainSpec domain;
  SphericalEigen eigen;
  RadialBasis basis;
  Point P0;
  double kappa_martin = 1.0;
  /// True when a(r) vanishes identically (kappa = 0, no perturbation).
  bool zero_potential = true;
};

inline std::shared_ptr<const ConeContext> make_context(const DomainSpec& domain,
                                                       const PotentialSpec& potential,
                                                       double radial_tol = 1e-8,
                                                       double kappa_martin = 1.0) {
  auto ctx = std::make_shared<ConeContext>();
  ctx->n = domain.n;
  ctx->domain = domain;
  ctx->eigen = solve_eigen(domain);
  ctx->basis = solve_radial(potential, domain.n, ctx->eigen.lambda, radial_tol);
  ctx->P0 = axis_point(static_cast<std::size_t>(domain.n), 1.0);
  if (!(kappa_martin > 0.0)) throw DomainError("kappa_martin must be positive");
  ctx->kappa_martin = kappa_martin;
  ctx->zero_potential = potential.kappa == 0.0 && potential.perturbation.is_zero();
  return ctx;
}

enum class KernelMode { surrogate, halfspace_oracle };
/// blended: c_mid * product + a local image-charge part supported on 4/5 < r/t < 5/4.
/// min:     min(Newtonian, c_mid * product).
enum class SurrogateForm { blended, min };

inline std::string to_string(KernelMode m) {
  return m == KernelMode::surrogate ? "surrogate" : "halfspace_oracle";
}
inline std::string to_string(SurrogateForm f) { return f == SurrogateForm::blended ? "blended" : "min"; }

/// Cached per-point quantities used by kernel evaluation.
struct Node {
  std::vector<double> x;
  double r = 0.0;
  double colat = 0.0;
  double V = 0.0;
  double W = 0.0;
  double phi = 0.0;
  /// Regularization radius of the point's own cell.
  double h_reg = 0.0;
  /// Distance to the lateral boundary.
  double delta = 0.0;
};

/// Distance from P to the lateral boundary of the cone.
inline double boundary_distance(const ConeContext& ctx, const Point& p) {
  const double gap = ctx.domain.boundary_colatitude() - std::abs(p.colatitude());
  if (gap <= 0.0) return 0.0;
  return p.r * std::sin(std::min(gap, std::numbers::pi / 2));
}

inline bool radially_separated(double r, double t) { return r / t <= 0.8 || t / r <= 0.8; }

/// Computable stand-in for the Green a-function of the cone.
class KernelModel {
public:
  std::shared_ptr<const ConeContext> context;
  KernelMode mode = KernelMode::surrogate;
  SurrogateForm form = SurrogateForm::blended;
  /// Coefficient of the separated product V(r^t) W(r v t) phi phi.
  double c_mid = 1.0;
  /// Regularization radius used when a point carries no spacing.
  double h_reg = 1e-2;
  /// Cell-equivalent radius as a fraction of the lattice spacing: the mean of
  /// 1/|x| over a unit cube is 2.38, so a cube of side h acts like radius 0.42 h.
  double h_reg_factor = 0.42;
  /// Global multiplier on the kernel (used to test scale invariance).
  double scale = 1.0;
  /// Envelope constants for green_bounds, C1 <= c_mid <= C2.
  double C1 = 0.5;
  double C2 = 2.0;

  KernelModel() = default;
  KernelModel(std::shared_ptr<const ConeContext> ctx, KernelMode m = KernelMode::surrogate)
      : context(std::move(ctx)), mode(m) {
    validate();
  }

  void validate() const {
    if (!context) throw DomainError("KernelModel: missing cone context");
    if (mode == KernelMode::halfspace_oracle &&
        !(context->n == 3 && context->domain.shape == Shape::half_sphere &&
          context->zero_potential))
      throw UnsupportedConfiguration(
          "half-space oracle requires n = 3, a = 0 and the half-sphere domain");
    if (!(c_mid > 0.0) || !(scale > 0.0) || !(h_reg > 0.0) || !(h_reg_factor > 0.0))
      throw DomainError("KernelModel: c_mid, scale, h_reg and h_reg_factor must be positive");
  }

  const ConeContext& ctx() const { return *context; }

  /// Node for P with lattice spacing h (h <= 0 selects the global h_reg).
  Node node(const Point& p, double h = 0.0) const {
    const ConeContext& c = *context;
    Node nd;
    nd.x = to_cartesian(p);
    nd.r = p.r;
    nd.colat = p.colatitude();
    const BasisValues bv = eval_basis(c.basis, p.r);
    nd.V = bv.V;
    nd.W = bv.W;
    nd.phi = phi_of_colatitude(c.eigen, nd.colat);
    const double hr = h > 0.0 ? h_reg_factor * h : h_reg;
    nd.delta = boundary_distance(c, p);
    nd.h_reg = nd.delta > 0.0 ? std::min(hr, nd.delta) : hr;
    return nd;
  }

  /// Newtonian kernel of R^n at distance d, n >= 3.
  double newtonian(double d) const {
    const int n = context->n;
    return 1.0 / ((n - 2.0) * sphere_area(static_cast<std::size_t>(n)) * std::pow(d, n - 2.0));
  }

  /// Half-space Green function with the boundary distances of the two points:
  /// F(d) - F(d*), d*^2 = d^2 + 4 delta_a delta_b.
  double image(double d, double da, double db) const {
    const double q = 4.0 * da * db;
    if (context->n == 2) return std::log1p(q / (d * d)) / (4.0 * std::numbers::pi);
    const double dstar = std::sqrt(d * d + q);
    if (context->n == 3) return q / (4.0 * std::numbers::pi * d * dstar * (d + dstar));
    return newtonian(d) - newtonian(dstar);
  }

  /// V(min r) W(max r) phi phi.
  static double product(const Node& a, const Node& b) {
    const bool a_low = a.r <= b.r;
    return (a_low ? a.V * b.W : b.V * a.W) * a.phi * b.phi;
  }

  /// Kernel value between two nodes; same = true selects the diagonal entry.
  double entry(const Node& a, const Node& b, bool same = false) const {
    const double hr = same ? a.h_reg : 0.5 * (a.h_reg + b.h_reg);
    const double d = same ? hr : std::max(distance(a.x, b.x), hr);
    if (mode == KernelMode::halfspace_oracle) {
      const double ya = a.x.back(), yb = b.x.back();
      if (ya <= 0.0 || yb <= 0.0) return 0.0;
      const double dstar = std::sqrt(d * d + 4.0 * ya * yb);
      return scale * ya * yb / (std::numbers::pi * d * dstar * (d + dstar));
    }
    const double prod = product(a, b);
    if (prod <= 0.0) return 0.0;
    const double F = image(d, a.delta, b.delta);
    if (form == SurrogateForm::min) return scale * std::min(F, c_mid * prod);
    const double s = std::abs(std::log(a.r / b.r)) / std::log(1.25);
    const double local = s < 1.0 ? F * wendland(s) : 0.0;
    return scale * (c_mid * prod + local);
  }

  /// Compactly supported positive definite bump (Wendland C^2), 1 at 0, 0 beyond 1.
  static double wendland(double s) {
    if (s >= 1.0) return 0.0;
    const double u = 1.0 - s;
    return u * u * u * (3.0 * s + 1.0);
  }

  Eigen::MatrixXd matrix(const std::vector<Node>& nodes) const {
    const auto N = static_cast<Eigen::Index>(nodes.size());
    Eigen::MatrixXd G(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
      G(i, i) = entry(nodes[i], nodes[i], true);
      for (Eigen::Index j = i + 1; j < N; ++j) {
        const double v = entry(nodes[i], nodes[j]);
        G(i, j) = v;
        G(j, i) = v;
      }
    }
    return G;
  }
};

inline bool same_point(const Point& p, const Point& q) {
  return distance(p, q) <= 1e-12 * std::max(1.0, p.r);
}

/// Green kernel between two points of the open cone.
inline double green(const KernelModel& model, const Point& P, const Point& Q) {
  const Node a = model.node(P), b = model.node(Q);
  return model.entry(a, b, same_point(P, Q));
}

/// (C1 prod, C2 prod) for radially separated P, Q.
inline std::pair<double, double> green_bounds(const KernelModel& model, const Point& P,
                                              const Point& Q) {
  if (!radially_separated(P.r, Q.r))
    throw NotApplicable("green_bounds: points are not radially separated (ratio > 4/5)");
  const Node a = model.node(P), b = model.node(Q);
  const double prod = model.scale * KernelModel::product(a, b);
  return {model.C1 * prod, model.C2 * prod};
}

/// Martin kernel at infinity, V(r) phi(Theta).
inline double martin_infinity(const ConeContext& ctx, const Point& P) {
  return eval_basis(ctx.basis, P.r).V * phi_of_colatitude(ctx.eigen, P.colatitude());
}

/// Martin kernel at the vertex, kappa W(r) phi(Theta).
inline double martin_origin(const ConeContext& ctx, const Point& P) {
  if (!(P.r > 0.0)) throw DomainError("martin_origin: P must lie in the open cone");
  return ctx.kappa_martin * eval_basis(ctx.basis, P.r).W *
         phi_of_colatitude(ctx.eigen, P.colatitude());
}

/// Exact Green function of the Laplacian in the upper half-space of R^3.
/// Returns +infinity on the diagonal.
inline double halfspace_green_oracle(const Point& P, const Point& Q) {
  if (P.dim() != 3 || Q.dim() != 3) throw DomainError("half-space oracle needs n = 3");
  const auto x = to_cartesian(P), y = to_cartesian(Q);
  const double yp = x[2], yq = y[2];
  constexpr double eps = 1e-14;
  if (yp < -eps * std::max(1.0, P.r) || yq < -eps * std::max(1.0, Q.r))
    throw DomainError("half-space oracle: point below the boundary plane");
  const double d = distance(x, y);
  if (d == 0.0) return std::numeric_limits<double>::infinity();
  if (yp <= eps * P.r || yq <= eps * Q.r) return 0.0;
  const double dstar = std::sqrt(d * d + 4.0 * yp * yq);
  return yp * yq / (std::numbers::pi * d * dstar * (d + dstar));
}

/// Inward normal derivative at a boundary point Q of the half-space Green function.
inline double halfspace_poisson_oracle(const Point& P, const Point& Q) {
  const auto x = to_cartesian(P), y = to_cartesian(Q);
  if (x[2] <= 0.0) throw DomainError("half-space Poisson kernel: P must be interior");
  const double d = distance(x, y);
  return x[2] / (2.0 * std::numbers::pi * d * d * d);
}

/// Inward normal derivative at Q on the lateral boundary of the surrogate
/// kernel: c_mid V(min) W(max) phi(P) t^{-1} dphi/dn plus the local image
/// part 2 delta_P / (s_n d^n) under the same radial cutoff.
inline double poisson_surrogate(const KernelModel& model, const Point& P, const Point& Q) {
  const ConeContext& c = model.ctx();
  const double tb = c.domain.boundary_colatitude();
  if (std::abs(std::abs(Q.colatitude()) - tb) > 1e-9)
    throw DomainError("poisson_surrogate: Q is not on the lateral boundary");
  const double phiP = phi_of_colatitude(c.eigen, P.colatitude());
  if (!(P.r > 0.0) || phiP <= 0.0) throw DomainError("poisson_surrogate: P must be interior");
  const double r = P.r, t = Q.r;
  const double dn = boundary_normal_derivative(c.eigen);
  const BasisValues bp = eval_basis(c.basis, r), bq = eval_basis(c.basis, t);
  const double vw = r <= t ? bp.V * bq.W : bq.V * bp.W;
  double value = model.c_mid * vw * phiP * dn / t;
  const double s = std::abs(std::log(r / t)) / std::log(1.25);
  if (s < 1.0) {
    const int n = c.n;
    const double d = distance(P, Q);
    value += KernelModel::wendland(s) * 2.0 * boundary_distance(c, P) /
             (sphere_area(static_cast<std::size_t>(n)) * std::pow(d, double(n)));
  }
  return model.scale * value;
}

/// Poisson kernel of the active mode (exact in oracle mode).
inline double poisson_kernel(const KernelModel& model, const Point& P, const Point& Q) {
  if (model.mode == KernelMode::halfspace_oracle)
    return model.scale * halfspace_poisson_oracle(P, Q);
  return poisson_surrogate(model, P, Q);
}

/// Martin kernel at a lateral boundary point, normalized to 1 at P0.
inline double martin_boundary(const KernelModel& model, const Point& P, const Point& Q) {
  return poisson_kernel(model, P, Q) / poisson_kernel(model, model.ctx().P0, Q);
}

}  // namespace wiener

#endif  // WIENER_KERNELS_HPP
