#ifndef WIENER_RADIAL_HPP
#define WIENER_RADIAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wiener/error.hpp"

namespace wiener {

/// Deviation p(r) = r^2 a(r) - kappa of the radial potential from its
/// inverse-square limit. Either absent, a closed-form callable, or samples
/// on a log-spaced grid (linear in log r, extended by 0 outside).
class Perturbation {
public:
  Perturbation() = default;

  static Perturbation none() { return {}; }

  static Perturbation closed_form(std::function<double(double)> f, std::string label) {
    Perturbation p;
    p.fn_ = std::make_shared<std::function<double(double)>>(std::move(f));
    p.label_ = std::move(label);
    return p;
  }

  static Perturbation samples(std::vector<double> r, std::vector<double> values) {
    if (r.size() != values.size() || r.size() < 2)
      throw DomainError("perturbation samples: need >= 2 (r, p) pairs of equal length");
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!(r[i] > 0.0) || !std::isfinite(values[i]))
        throw DomainError("perturbation samples: radii must be positive, values finite");
      if (i > 0 && !(r[i] > r[i - 1]))
        throw DomainError("perturbation samples: radii must be strictly increasing");
    }
    Perturbation p;
    p.log_r_.reserve(r.size());
    for (double x : r) p.log_r_.push_back(std::log(x));
    p.values_ = std::move(values);
    p.label_ = "samples";
    return p;
  }

  double operator()(double r) const {
    if (fn_) return (*fn_)(r);
    if (values_.empty()) return 0.0;
    const double s = std::log(r);
    if (s < log_r_.front() || s > log_r_.back()) return 0.0;
    auto it = std::upper_bound(log_r_.begin(), log_r_.end(), s);
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - log_r_.begin()),
                                          log_r_.size() - 1);
    if (i == 0) i = 1;
    const double t = (s - log_r_[i - 1]) / (log_r_[i] - log_r_[i - 1]);
    return (1.0 - t) * values_[i - 1] + t * values_[i];
  }

  bool is_zero() const noexcept { return !fn_ && values_.empty(); }
  /// log r of the samples; empty for closed forms.
  const std::vector<double>& knots() const noexcept { return log_r_; }
  const std::string& label() const noexcept { return label_; }

private:
  std::shared_ptr<std::function<double(double)>> fn_;
  std::vector<double> log_r_;
  std::vector<double> values_;
  std::string label_ = "none";
};

/// Two-column CSV (r, p); a header line and '#' comments are skipped.
inline Perturbation read_perturbation_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open perturbation file '" + path + "'");
  std::vector<double> r, p;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a = 0.0, b = 0.0;
    if (!(ss >> a >> b)) continue;  // header
    r.push_back(a);
    p.push_back(b);
  }
  return Perturbation::samples(std::move(r), std::move(p));
}

/// Radial potential a(r) = (kappa + p(r)) / r^2 on [r_min, r_max].
struct PotentialSpec {
  double kappa = 0.0;
  Perturbation perturbation;
  double r_min = 1e-3;
  double r_max = 1e4;
  std::size_t grid_points = 2048;

  double a(double r) const { return (kappa + perturbation(r)) / (r * r); }
  /// r^2 a(r).
  double scaled(double r) const { return kappa + perturbation(r); }
};

struct Exponents {
  double iota_plus = 0.0;
  double iota_minus = 0.0;
  double chi = 0.0;
};

/// Roots of iota^2 + (n-2) iota - (kappa + lambda) = 0.
inline Exponents exponents(int n, double kappa, double lambda) {
  if (!std::isfinite(kappa) || !std::isfinite(lambda))
    throw DomainError("exponents: non-finite input");
  if (n < 2) throw DomainError("exponents: dimension must be >= 2");
  if (kappa < 0.0) throw DomainError("exponents: kappa must be >= 0");
  if (!(lambda > 0.0)) throw DomainError("exponents: lambda must be > 0");
  const double b = static_cast<double>(n) - 2.0;
  const double disc = b * b + 4.0 * (kappa + lambda);
  const double chi = std::sqrt(disc);
  return {0.5 * (-b + chi), 0.5 * (-b - chi), chi};
}

struct BasisValues {
  double V = 0.0;
  double W = 0.0;
  double dV = 0.0;
  double dW = 0.0;
};

/// Normalized fundamental pair (V, W) of
///   -Q'' - (n-1)/r Q' + (lambda/r^2 + a(r)) Q = 0,   V(1) = W(1) = 1,
/// sampled on a log-spaced grid in the variable s = log r. Values are kept as
/// log V, log W together with the log-derivatives u = d log Q / d log r.
class RadialBasis {
public:
  int n = 3;
  double lambda = 0.0;
  double kappa = 0.0;
  double iota_plus = 0.0;
  double iota_minus = 0.0;
  double chi = 0.0;
  /// Wronskian r^{n-1}(V'W - VW') at r = 1.
  double chi_prime = 0.0;
  bool tail_mode = true;

  std::vector<double> s;       // log r grid
  std::vector<double> log_V, u_V;
  std::vector<double> log_W, u_W;
  std::vector<double> q;       // lambda + r^2 a(r) at the nodes

  // Power-law exponents used outside the grid.
  double tail_V_low = 0.0, tail_W_low = 0.0;
  double tail_V_high = 0.0, tail_W_high = 0.0;
  std::size_t substeps = 0;

  double r_min() const { return std::exp(s.front()); }
  double r_max() const { return std::exp(s.back()); }
  std::vector<double> grid() const {
    std::vector<double> r(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) r[i] = std::exp(s[i]);
    return r;
  }
  double V_at(std::size_t i) const { return std::exp(log_V[i]); }
  double W_at(std::size_t i) const { return std::exp(log_W[i]); }
  double dV_at(std::size_t i) const { return u_V[i] * V_at(i) / std::exp(s[i]); }
  double dW_at(std::size_t i) const { return u_W[i] * W_at(i) / std::exp(s[i]); }
};

namespace detail {

inline double riccati(double u, double qv, double b) { return qv - b * u - u * u; }

/// RK4 on (u, L) with u' = q - b u - u^2, L' = u from s0 to s1 (either direction).
/// The interval is split at any knot of q strictly inside it; q is sampled just
/// inside each piece so one-sided values are used at jumps.
template <class QFn>
std::pair<double, double> rk4_interval(double u, double L, double s0, double s1,
                                       std::size_t m, double b, const QFn& qfn,
                                       const std::vector<double>& knots = {}) {
  std::vector<double> cuts{s0};
  if (!knots.empty()) {
    const double lo = std::min(s0, s1), hi = std::max(s0, s1);
    auto a = std::upper_bound(knots.begin(), knots.end(), lo);
    auto e = std::lower_bound(knots.begin(), knots.end(), hi);
    std::vector<double> inner(a, e);
    if (s1 < s0) std::reverse(inner.begin(), inner.end());
    cuts.insert(cuts.end(), inner.begin(), inner.end());
  }
  cuts.push_back(s1);
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double a = cuts[p], e = cuts[p + 1];
    const double h = (e - a) / static_cast<double>(m);
    if (h == 0.0) continue;
    const double nudge = 1e-9 * h;
    double sv = a;
    for (std::size_t k = 0; k < m; ++k) {
      const double q0 = qfn(k == 0 ? sv + nudge : sv), qh = qfn(sv + 0.5 * h);
      const double q1 = qfn(k + 1 == m ? e - nudge : sv + h);
      const double k1 = riccati(u, q0, b);
      const double k2 = riccati(u + 0.5 * h * k1, qh, b);
      const double k3 = riccati(u + 0.5 * h * k2, qh, b);
      const double k4 = riccati(u + h * k3, q1, b);
      const double l1 = u, l2 = u + 0.5 * h * k1, l3 = u + 0.5 * h * k2, l4 = u + h * k3;
      u += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
      L += h * (l1 + 2.0 * l2 + 2.0 * l3 + l4) / 6.0;
      sv += h;
    }
  }
  return {u, L};
}

struct Sweep {
  std::vector<double> u, L;
};

template <class QFn>
Sweep sweep(const std::vector<double>& s, double u_seed, bool forward, std::size_t m,
            double b, const QFn& qfn, const std::vector<double>& knots = {}) {
  const std::size_t N = s.size();
  Sweep out{std::vector<double>(N), std::vector<double>(N)};
  if (forward) {
    out.u[0] = u_seed;
    out.L[0] = 0.0;
    for (std::size_t i = 0; i + 1 < N; ++i) {
      auto [u, L] = rk4_interval(out.u[i], out.L[i], s[i], s[i + 1], m, b, qfn, knots);
      out.u[i + 1] = u;
      out.L[i + 1] = L;
    }
  } else {
    out.u[N - 1] = u_seed;
    out.L[N - 1] = 0.0;
    for (std::size_t i = N - 1; i > 0; --i) {
      auto [u, L] = rk4_interval(out.u[i], out.L[i], s[i], s[i - 1], m, b, qfn, knots);
      out.u[i - 1] = u;
      out.L[i - 1] = L;
    }
  }
  return out;
}

inline double local_exponent(int n, double q, bool plus) {
  const double b = n - 2.0;
  const double chi = std::sqrt(b * b + 4.0 * q);
  return plus ? 0.5 * (-b + chi) : 0.5 * (-b - chi);
}

/// Value of a cubic Hermite interpolant on [0, 1] scaled to width h.
inline double hermite(double y0, double y1, double d0, double d1, double t, double h) {
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * d1;
}

inline double hermite_slope(double y0, double y1, double d0, double d1, double t, double h) {
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * h * d0 + (-6 * t2 + 6 * t) * y1 +
          (3 * t2 - 2 * t) * h * d1) /
         h;
}

}  // namespace detail

/// Checks that r^2 a(r) >= 0 on the grid and that r^{-1}|p(r)| has a finite
/// integral over [1, r_max] whose dyadic increments decay.
inline void check_potential_class(const PotentialSpec& spec) {
  if (!(spec.kappa >= 0.0) || !std::isfinite(spec.kappa))
    throw RejectedPotential("kappa must be finite and >= 0");
  if (!(spec.r_min > 0.0) || !(spec.r_max > spec.r_min) || !(spec.r_min <= 1.0) ||
      !(spec.r_max >= 1.0))
    throw DomainError("radial range must satisfy 0 < r_min <= 1 <= r_max");
  if (spec.grid_points < 16) throw DomainError("radial grid needs at least 16 points");
  const double ds = std::log(spec.r_max / spec.r_min) / double(spec.grid_points - 1);
  for (std::size_t i = 0; i < spec.grid_points; ++i) {
    const double r = spec.r_min * std::exp(ds * double(i));
    const double v = spec.scaled(r);
    if (!std::isfinite(v)) throw RejectedPotential("potential is not finite on the grid");
    if (v < 0.0) throw RejectedPotential("potential is negative at r = " + std::to_string(r));
  }
  if (spec.perturbation.is_zero()) return;

  std::vector<double> increments;
  for (double lo = 1.0; lo * 2.0 <= spec.r_max * (1.0 + 1e-12); lo *= 2.0) {
    auto f = [&](double s) { return std::abs(spec.perturbation(std::exp(s))); };
    const double I = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, std::log(lo), std::log(2.0 * lo), 8, 1e-10);
    if (!std::isfinite(I)) throw RejectedPotential("r^{-1}|p(r)| is not integrable");
    increments.push_back(I);
  }
  if (increments.size() < 2) return;
  const double peak = *std::max_element(increments.begin(), increments.end());
  const double last = increments.back();
  if (last <= 1e-10 * (1.0 + spec.kappa)) return;
  if (last > 0.5 * peak)
    throw RejectedPotential(
        "dyadic increments of the integral of r^{-1}|p(r)| do not decay (last " +
        std::to_string(last) + ", peak " + std::to_string(peak) + ")");
}

/// Integrates the radial equation for the normalized pair (V, W).
///
/// V is seeded at r_min with the regular local power r^{iota+}, W at r_max
/// with the decaying power r^{iota-}; each sweep runs in the direction where
/// its own mode dominates. Substeps per grid interval are doubled until two
/// successive sweeps agree to tol in log V and log W.
inline RadialBasis solve_radial(const PotentialSpec& spec, int n, double lambda,
                                double tol = 1e-8) {
  const Exponents ex = exponents(n, spec.kappa, lambda);
  check_potential_class(spec);
  if (!(tol > 0.0)) throw DomainError("solve_radial: tol must be positive");

  const std::size_t N = spec.grid_points;
  RadialBasis B;
  B.n = n;
  B.lambda = lambda;
  B.kappa = spec.kappa;
  B.iota_plus = ex.iota_plus;
  B.iota_minus = ex.iota_minus;
  B.chi = ex.chi;
  B.s.resize(N);
  const double s0 = std::log(spec.r_min), s1 = std::log(spec.r_max);
  for (std::size_t i = 0; i < N; ++i) B.s[i] = s0 + (s1 - s0) * double(i) / double(N - 1);
  B.s.back() = s1;
  B.q.resize(N);
  for (std::size_t i = 0; i < N; ++i) B.q[i] = lambda + spec.scaled(std::exp(B.s[i]));

  const double b = n - 2.0;
  auto qfn = [&](double sv) { return lambda + spec.scaled(std::exp(sv)); };
  const std::vector<double>& knots = spec.perturbation.knots();
  const double uV0 = detail::local_exponent(n, B.q.front(), true);
  const double uW0 = detail::local_exponent(n, B.q.back(), false);

  std::size_t m = 1;
  detail::Sweep V = detail::sweep(B.s, uV0, true, m, b, qfn, knots);
  detail::Sweep W = detail::sweep(B.s, uW0, false, m, b, qfn, knots);
  constexpr std::size_t kMaxSubsteps = 1024;
  for (;;) {
    detail::Sweep V2 = detail::sweep(B.s, uV0, true, 2 * m, b, qfn, knots);
    detail::Sweep W2 = detail::sweep(B.s, uW0, false, 2 * m, b, qfn, knots);
    double diff = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      diff = std::max(diff, std::abs((V2.L[i] - V2.L.front()) - (V.L[i] - V.L.front())));
      diff = std::max(diff, std::abs((W2.L[i] - W2.L.back()) - (W.L[i] - W.L.back())));
      diff = std::max(diff, std::abs(V2.u[i] - V.u[i]) + std::abs(W2.u[i] - W.u[i]));
    }
    V = std::move(V2);
    W = std::move(W2);
    m *= 2;
    if (!std::isfinite(diff))
      throw ConvergenceError("solve_radial: integration produced non-finite values");
    if (diff <= tol) break;
    if (m >= kMaxSubsteps)
      throw ConvergenceError("solve_radial: integration residual " + std::to_string(diff) +
                             " exceeds tol " + std::to_string(tol));
  }
  B.substeps = m;

  B.u_V = std::move(V.u);
  B.u_W = std::move(W.u);
  B.log_V = std::move(V.L);
  B.log_W = std::move(W.L);

  // Normalize at r = 1 by Hermite interpolation of log V, log W in s.
  const double ds = (s1 - s0) / double(N - 1);
  std::size_t i1 = std::min<std::size_t>(static_cast<std::size_t>((0.0 - s0) / ds), N - 2);
  const double t1 = (0.0 - B.s[i1]) / ds;
  auto at_one = [&](const std::vector<double>& L, const std::vector<double>& u) {
    return detail::hermite(L[i1], L[i1 + 1], u[i1], u[i1 + 1], t1, ds);
  };
  auto u_at_one = [&](const std::vector<double>& u) {
    const double f0 = detail::riccati(u[i1], B.q[i1], b);
    const double f1 = detail::riccati(u[i1 + 1], B.q[i1 + 1], b);
    return detail::hermite(u[i1], u[i1 + 1], f0, f1, t1, ds);
  };
  const double LV1 = at_one(B.log_V, B.u_V), LW1 = at_one(B.log_W, B.u_W);
  for (auto& v : B.log_V) v -= LV1;
  for (auto& v : B.log_W) v -= LW1;
  B.chi_prime = u_at_one(B.u_V) - u_at_one(B.u_W);

  B.tail_V_low = uV0;
  B.tail_W_low = detail::local_exponent(n, B.q.front(), false);
  B.tail_V_high = ex.iota_plus;
  B.tail_W_high = ex.iota_minus;
  return B;
}

/// V, W and their r-derivatives at r. Inside the grid: cubic Hermite in log r;
/// outside: power-law tails spliced at the grid edges.
inline BasisValues eval_basis(const RadialBasis& B, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("eval_basis: r must be positive");
  const double sv = std::log(r);
  const std::size_t N = B.s.size();
  const double s0 = B.s.front(), s1 = B.s.back();
  if (sv < s0 || sv > s1) {
    if (!B.tail_mode) throw DomainError("eval_basis: r outside the resolved grid");
    const bool low = sv < s0;
    const std::size_t e = low ? 0 : N - 1;
    const double eV = low ? B.tail_V_low : B.tail_V_high;
    const double eW = low ? B.tail_W_low : B.tail_W_high;
    const double dsv = sv - B.s[e];
    const double V = std::exp(B.log_V[e] + eV * dsv);
    const double W = std::exp(B.log_W[e] + eW * dsv);
    return {V, W, eV * V / r, eW * W / r};
  }
  const double ds = (s1 - s0) / double(N - 1);
  std::size_t i = std::min<std::size_t>(static_cast<std::size_t>((sv - s0) / ds), N - 2);
  const double t = std::clamp((sv - B.s[i]) / ds, 0.0, 1.0);
  const double b = B.n - 2.0;
  const double LV = detail::hermite(B.log_V[i], B.log_V[i + 1], B.u_V[i], B.u_V[i + 1], t, ds);
  const double LW = detail::hermite(B.log_W[i], B.log_W[i + 1], B.u_W[i], B.u_W[i + 1], t, ds);
  const double uV = detail::hermite(B.u_V[i], B.u_V[i + 1], detail::riccati(B.u_V[i], B.q[i], b),
                                    detail::riccati(B.u_V[i + 1], B.q[i + 1], b), t, ds);
  const double uW = detail::hermite(B.u_W[i], B.u_W[i + 1], detail::riccati(B.u_W[i], B.q[i], b),
                                    detail::riccati(B.u_W[i + 1], B.q[i + 1], b), t, ds);
  const double V = std::exp(LV), W = std::exp(LW);
  return {V, W, uV * V / r, uW * W / r};
}

/// max over the grid of |r^{n-1}(V'W - VW') / chi_prime - 1|.
inline double wronskian_residual(const RadialBasis& B) {
  double worst = 0.0;
  for (std::size_t i = 0; i < B.s.size(); ++i) {
    const double r = std::exp(B.s[i]);
    const double w =
        std::pow(r, B.n - 1.0) * (B.dV_at(i) * B.W_at(i) - B.V_at(i) * B.dW_at(i));
    worst = std::max(worst, std::abs(w / B.chi_prime - 1.0));
  }
  return worst;
}

}  // namespace wiener

#endif  // WIENER_RADIAL_HPP
