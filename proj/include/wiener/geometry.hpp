#ifndef WIENER_GEOMETRY_HPP
#define WIENER_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "wiener/error.hpp"

namespace wiener {

/// A point (r, Theta) in spherical coordinates of R^n.
///
/// theta holds the n-1 angles theta_1..theta_{n-1}; theta_1 is the angle from
/// the x_n axis, which is also the symmetry axis of every supported cone.
/// For n = 2 the single angle is signed, theta_1 in (-pi, pi].
struct Point {
  double r = 1.0;
  std::vector<double> theta;

  std::size_t dim() const noexcept { return theta.size() + 1; }
  double colatitude() const noexcept { return theta.empty() ? 0.0 : theta[0]; }
};

/// Cartesian coordinates (x_1, ..., x_n) of a spherical point.
///
/// x_1 = r prod sin(theta_j), x_n = r cos(theta_1) and, for 2 <= k <= n-1,
/// x_{n-k+1} = r cos(theta_k) prod_{j<k} sin(theta_j).
inline std::vector<double> to_cartesian(const Point& p) {
  const std::size_t n = p.dim();
  std::vector<double> x(n, 0.0);
  double sin_prod = 1.0;
  for (std::size_t k = 1; k <= n - 1; ++k) {
    const double th = p.theta[k - 1];
    x[n - k] = p.r * sin_prod * std::cos(th);
    sin_prod *= std::sin(th);
  }
  x[0] = p.r * sin_prod;
  return x;
}

/// Inverse of to_cartesian. Degenerate angles (on an axis) are set to 0.
inline Point from_cartesian(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) throw DomainError("from_cartesian: dimension must be >= 2");
  Point p;
  p.theta.assign(n - 1, 0.0);
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  p.r = std::sqrt(r2);
  if (n == 2) {
    p.theta[0] = std::atan2(x[0], x[1]);
    return p;
  }
  // tail[k] = |(x_1, ..., x_{n-k})|, the norm left after peeling k coordinates.
  double tail = p.r;
  for (std::size_t k = 1; k <= n - 2; ++k) {
    const double xk = x[n - k];
    p.theta[k - 1] = tail > 0.0 ? std::acos(std::clamp(xk / tail, -1.0, 1.0)) : 0.0;
    tail = std::sqrt(std::max(0.0, tail * tail - xk * xk));
  }
  // Last angle lives in [-pi/2, 3pi/2): x_2 = rho cos, x_1 = rho sin.
  double last = std::atan2(x[0], x[1]);
  if (last < -std::numbers::pi / 2) last += 2.0 * std::numbers::pi;
  p.theta[n - 2] = last;
  return p;
}

/// Point on the symmetry axis at radius r in dimension n.
inline Point axis_point(std::size_t n, double r) {
  return Point{r, std::vector<double>(n - 1, 0.0)};
}

inline double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double distance(const Point& p, const Point& q) {
  return distance(to_cartesian(p), to_cartesian(q));
}

/// Surface area of the unit sphere S^{n-1}: 2 pi^{n/2} / Gamma(n/2).
inline double sphere_area(std::size_t n) {
  const double h = 0.5 * static_cast<double>(n);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

}  // namespace wiener

#endif  // WIENER_GEOMETRY_HPP
