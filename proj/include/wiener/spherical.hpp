#ifndef WIENER_SPHERICAL_HPP
#define WIENER_SPHERICAL_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "wiener/error.hpp"
#include "wiener/geometry.hpp"

namespace wiener {

enum class Shape { arc, cap, half_sphere };

inline std::string to_string(Shape s) {
  switch (s) {
    case Shape::arc: return "arc";
    case Shape::cap: return "cap";
    case Shape::half_sphere: return "half_sphere";
  }
  return "?";
}

/// Angular domain Omega on S^{n-1}. Every supported shape is symmetric about
/// the x_n axis and is described by the colatitude of its boundary:
///   arc(alpha), n = 2:   |theta_1| < alpha / 2
///   cap(alpha), n = 3:   theta_1 < alpha
///   half_sphere, any n:  theta_1 < pi / 2
struct DomainSpec {
  int n = 3;
  Shape shape = Shape::half_sphere;
  double alpha = std::numbers::pi / 2;

  void validate() const {
    if (n < 2) throw DomainError("DomainSpec: dimension must be >= 2");
    switch (shape) {
      case Shape::arc:
        if (n != 2) throw DomainError("DomainSpec: arc requires n = 2");
        if (!(alpha > 0.0 && alpha <= 2.0 * std::numbers::pi - 1e-6))
          throw DomainError("DomainSpec: arc angle must lie in (0, 2pi)");
        break;
      case Shape::cap:
        if (n != 3) throw DomainError("DomainSpec: cap requires n = 3");
        if (!(alpha > 0.0 && alpha < std::numbers::pi))
          throw DomainError("DomainSpec: cap colatitude must lie in (0, pi)");
        break;
      case Shape::half_sphere:
        break;
    }
  }

  /// Colatitude of the boundary of Omega.
  double boundary_colatitude() const {
    switch (shape) {
      case Shape::arc: return 0.5 * alpha;
      case Shape::cap: return alpha;
      case Shape::half_sphere: return 0.5 * std::numbers::pi;
    }
    return 0.0;
  }
};

/// Angle theta_1 of the point of arc(alpha) at angular distance psi from the
/// first edge ray; psi ranges over [0, alpha].
inline double arc_theta(double psi, double alpha) { return psi - 0.5 * alpha; }

namespace detail {

/// Gauss hypergeometric series 2F1(a, b; c; z) for 0 <= z < 1.
inline double hyp2f1(double a, double b, double c, double z) {
  double term = 1.0, sum = 1.0;
  for (std::int64_t k = 0; k < 5'000'000; ++k) {
    const double kd = static_cast<double>(k);
    term *= (a + kd) * (b + kd) / ((c + kd) * (kd + 1.0)) * z;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum) && kd > std::abs(a) + std::abs(b) + 2.0)
      return sum;
    if (term == 0.0) return sum;
  }
  throw ConvergenceError("hypergeometric series did not converge");
}

/// Legendre function P_nu(cos theta) and its derivative in theta.
inline double legendre_cos(double nu, double theta) {
  const double z = std::sin(0.5 * theta) * std::sin(0.5 * theta);
  return hyp2f1(-nu, nu + 1.0, 1.0, z);
}

inline double legendre_cos_dtheta(double nu, double theta) {
  const double z = std::sin(0.5 * theta) * std::sin(0.5 * theta);
  return -nu * (nu + 1.0) * hyp2f1(1.0 - nu, nu + 2.0, 2.0, z) * 0.5 * std::sin(theta);
}

}  // namespace detail

/// Least Dirichlet eigenpair of the Beltrami operator on Omega, with phi
/// normalized in L^2(Omega) and positive inside.
class SphericalEigen {
public:
  DomainSpec domain;
  double lambda = 0.0;
  /// Legendre degree for caps (lambda = nu (nu + 1)); 0 otherwise.
  double nu = 0.0;
  double norm = 1.0;
  double J_Omega = 0.0;
  double normalization_residual = 0.0;

  /// Profile of phi as a function of the colatitude |theta_1|.
  double profile(double colat) const {
    const double c = std::abs(colat);
    switch (domain.shape) {
      case Shape::arc:
        return norm * std::cos(std::numbers::pi * c / domain.alpha);
      case Shape::cap:
        return norm * detail::legendre_cos(nu, c);
      case Shape::half_sphere:
        return norm * std::cos(c);
    }
    return 0.0;
  }

  /// d phi / d |theta_1|.
  double profile_slope(double colat) const {
    const double c = std::abs(colat);
    switch (domain.shape) {
      case Shape::arc: {
        const double k = std::numbers::pi / domain.alpha;
        return -norm * k * std::sin(k * c);
      }
      case Shape::cap:
        return norm * detail::legendre_cos_dtheta(nu, c);
      case Shape::half_sphere:
        return -norm * std::sin(c);
    }
    return 0.0;
  }

  bool inside(double colat) const { return std::abs(colat) < domain.boundary_colatitude(); }
};

namespace detail {

inline void check_angles(const DomainSpec& d, const std::vector<double>& theta) {
  if (theta.size() != static_cast<std::size_t>(d.n - 1))
    throw DomainError("angular coordinates have wrong length for n = " + std::to_string(d.n));
  constexpr double pi = std::numbers::pi;
  constexpr double slack = 1e-12;
  if (d.n == 2) {
    if (!(theta[0] > -pi - slack && theta[0] <= pi + slack))
      throw DomainError("theta_1 out of range (-pi, pi]");
    return;
  }
  for (std::size_t j = 0; j + 1 < theta.size(); ++j)
    if (!(theta[j] >= -slack && theta[j] <= pi + slack))
      throw DomainError("theta_j out of range [0, pi]");
  const double last = theta.back();
  if (!(last >= -pi / 2 - slack && last <= 1.5 * pi + slack))
    throw DomainError("theta_{n-1} out of range [-pi/2, 3pi/2]");
}

/// L^2(Omega) integral of f(|theta_1|)^2.
template <class F>
double l2_norm_sq(const DomainSpec& d, const F& f) {
  using boost::math::quadrature::gauss_kronrod;
  const double tb = d.boundary_colatitude();
  if (d.n == 2) {
    return 2.0 * gauss_kronrod<double, 61>::integrate(
                     [&](double t) { return f(t) * f(t); }, 0.0, tb, 15, 1e-14);
  }
  const double shell = sphere_area(static_cast<std::size_t>(d.n - 1));
  const double I = gauss_kronrod<double, 61>::integrate(
      [&](double t) { return f(t) * f(t) * std::pow(std::sin(t), d.n - 2); }, 0.0, tb, 15,
      1e-14);
  return shell * I;
}

}  // namespace detail

/// Computes (lambda, phi) for a supported domain. Caps use the smallest
/// positive Legendre degree nu with P_nu(cos alpha) = 0, bracketed on (0, 30].
inline SphericalEigen solve_eigen(const DomainSpec& spec, double tol = 1e-12) {
  spec.validate();
  SphericalEigen e;
  e.domain = spec;
  switch (spec.shape) {
    case Shape::arc:
      e.lambda = std::pow(std::numbers::pi / spec.alpha, 2);
      e.norm = std::sqrt(2.0 / spec.alpha);
      break;
    case Shape::half_sphere:
      e.lambda = spec.n - 1.0;
      e.norm = std::sqrt(2.0 * spec.n / sphere_area(static_cast<std::size_t>(spec.n)));
      break;
    case Shape::cap: {
      auto f = [&](double nu) { return detail::legendre_cos(nu, spec.alpha); };
      double lo = 1e-6, flo = f(lo), hi = lo, fhi = flo;
      bool bracketed = false;
      while (hi < 30.0) {
        lo = hi;
        flo = fhi;
        hi = std::min(30.0, hi + std::min(0.05, hi));
        fhi = f(hi);
        if (flo == 0.0) {
          hi = lo;
          fhi = flo;
          bracketed = true;
          break;
        }
        if ((flo > 0.0) != (fhi > 0.0)) {
          bracketed = true;
          break;
        }
      }
      if (!bracketed)
        throw ConvergenceError("solve_eigen: no Legendre root bracketed in (0, 30]");
      double nu = lo;
      if (hi != lo) {
        std::uintmax_t iters = 200;
        auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol * std::abs(a); };
        auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
        nu = 0.5 * (a + b);
      }
      e.nu = nu;
      e.lambda = nu * (nu + 1.0);
      e.norm = 1.0;
      const double raw = detail::l2_norm_sq(spec, [&](double t) { return e.profile(t); });
      e.norm = 1.0 / std::sqrt(raw);
      break;
    }
  }
  e.normalization_residual =
      std::abs(detail::l2_norm_sq(spec, [&](double t) { return e.profile(t); }) - 1.0);

  // Maximize the profile over [0, boundary colatitude].
  const double tb = spec.boundary_colatitude();
  auto neg = [&](double t) { return -e.profile(t); };
  auto best = boost::math::tools::brent_find_minima(neg, 0.0, tb, 40);
  e.J_Omega = std::max(-best.second, e.profile(0.0));
  return e;
}

/// phi(Theta) for Theta in the closure of Omega; exactly 0 on the boundary.
inline double eval_phi(const SphericalEigen& e, const std::vector<double>& theta) {
  detail::check_angles(e.domain, theta);
  const double c = std::abs(theta[0]);
  const double tb = e.domain.boundary_colatitude();
  if (c > tb + 1e-12) throw DomainError("eval_phi: point outside the closure of Omega");
  if (c >= tb) return 0.0;
  return std::max(0.0, e.profile(c));
}

/// phi at colatitude only, clamped to 0 outside Omega. Used on hot paths.
inline double phi_of_colatitude(const SphericalEigen& e, double colat) {
  const double c = std::abs(colat);
  if (c >= e.domain.boundary_colatitude()) return 0.0;
  return std::max(0.0, e.profile(c));
}

/// Inward normal derivative of phi at a point of the boundary of Omega.
inline double boundary_normal_derivative(const SphericalEigen& e,
                                         const std::vector<double>& theta) {
  detail::check_angles(e.domain, theta);
  const double tb = e.domain.boundary_colatitude();
  if (std::abs(std::abs(theta[0]) - tb) > 1e-9)
    throw DomainError("boundary_normal_derivative: point is not on the boundary of Omega");
  return -e.profile_slope(tb);
}

/// Inward normal derivative at the boundary; shape-only, no point needed.
inline double boundary_normal_derivative(const SphericalEigen& e) {
  return -e.profile_slope(e.domain.boundary_colatitude());
}

}  // namespace wiener

#endif  // WIENER_SPHERICAL_HPP
