#ifndef WIENER_CAPACITY_HPP
#define WIENER_CAPACITY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wiener/error.hpp"
#include "wiener/geometry.hpp"
#include "wiener/kernels.hpp"
#include "wiener/sets.hpp"

namespace wiener {

/// Finite sum of weighted point masses. h holds the lattice spacing of each
/// atom (0 = use the model's global regularization radius).
struct AtomicMeasure {
  std::vector<Point> support;
  std::vector<double> weights;
  std::vector<double> h;

  std::size_t size() const noexcept { return support.size(); }
  bool empty() const noexcept { return support.empty(); }
  double total_mass() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
  double spacing(std::size_t i) const { return i < h.size() ? h[i] : 0.0; }
  void add(Point p, double w, double hi = 0.0) {
    if (!(w >= 0.0)) throw DomainError("AtomicMeasure: weights must be nonnegative");
    support.push_back(std::move(p));
    weights.push_back(w);
    h.push_back(hi);
  }
};

struct EquilibriumResult {
  int block = 0;
  AtomicMeasure measure;
  double energy = 0.0;
  double mass = 0.0;
  double residual = 0.0;
  double active_fraction = 0.0;
  std::size_t n_points = 0;
  int iterations = 0;
};

/// c_inf M(., inf) + c_origin M(., O) + G mu + (Poisson integral of nu).
struct Superfunction {
  double c_inf = 0.0;
  double c_origin = 0.0;
  AtomicMeasure mu;
  AtomicMeasure nu;

  void validate() const {
    if (!(c_inf >= 0.0) || !(c_origin >= 0.0))
      throw DomainError("Superfunction: coefficients must be nonnegative");
    for (double w : mu.weights)
      if (!(w >= 0.0)) throw DomainError("Superfunction: mu weights must be nonnegative");
    for (double w : nu.weights)
      if (!(w >= 0.0)) throw DomainError("Superfunction: nu weights must be nonnegative");
  }
};

struct SolverOptions {
  double tol = 1e-8;
  /// 0 selects max(50, 3 N).
  int max_iterations = 0;
};

struct LcpSolution {
  Eigen::VectorXd w;
  int iterations = 0;
};

namespace detail {

/// Solves G_FF x = b_F for the free set; throws ConditioningError if the
/// principal submatrix is numerically singular.
inline Eigen::VectorXd solve_free(const Eigen::MatrixXd& G, const Eigen::VectorXd& b,
                                  const std::vector<Eigen::Index>& F, int block) {
  const auto m = static_cast<Eigen::Index>(F.size());
  Eigen::MatrixXd A(m, m);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    rhs(i) = b(F[i]);
    for (Eigen::Index j = 0; j < m; ++j) A(i, j) = G(F[i], F[j]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() == Eigen::Success) return llt.solve(rhs);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  const auto D = ldlt.vectorD();
  const double dmax = D.cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || D.cwiseAbs().minCoeff() <= 1e-13 * dmax)
    throw ConditioningError(block, "kernel matrix numerically singular on the active set");
  return ldlt.solve(rhs);
}

}  // namespace detail

/// Linear complementarity solve: w >= 0, y = G w - b >= 0, w_i y_i = 0.
/// For symmetric positive definite G this is min 1/2 w'Gw - b'w over w >= 0.
///
/// Block principal pivoting warm-started from the clamped unconstrained
/// solution; falls back to single pivots (Murty's rule) when the number of
/// infeasible variables stops decreasing.
inline LcpSolution solve_lcp(const Eigen::MatrixXd& G, const Eigen::VectorXd& b,
                             const SolverOptions& opt = {}, int block = 0) {
  const Eigen::Index N = b.size();
  LcpSolution out;
  out.w = Eigen::VectorXd::Zero(N);
  if (N == 0) return out;
  const double bscale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  const double tol = opt.tol * bscale;
  const int cap = opt.max_iterations > 0 ? opt.max_iterations
                                         : std::max(50, 3 * static_cast<int>(N));

  std::vector<char> free(static_cast<std::size_t>(N), 0);
  {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(N));
    for (Eigen::Index i = 0; i < N; ++i) all[static_cast<std::size_t>(i)] = i;
    const Eigen::VectorXd w0 = detail::solve_free(G, b, all, block);
    for (Eigen::Index i = 0; i < N; ++i) free[static_cast<std::size_t>(i)] = w0(i) > 0.0;
  }

  std::size_t best = static_cast<std::size_t>(N) + 1;
  int backup = 3;
  Eigen::VectorXd w(N);
  for (int it = 1; it <= cap; ++it) {
    out.iterations = it;
    std::vector<Eigen::Index> F;
    for (Eigen::Index i = 0; i < N; ++i)
      if (free[static_cast<std::size_t>(i)]) F.push_back(i);
    w.setZero();
    if (!F.empty()) {
      const Eigen::VectorXd x = detail::solve_free(G, b, F, block);
      for (std::size_t i = 0; i < F.size(); ++i) w(F[i]) = x(static_cast<Eigen::Index>(i));
    }
    const Eigen::VectorXd y = G * w - b;
    std::vector<Eigen::Index> bad;
    for (Eigen::Index i = 0; i < N; ++i) {
      const bool f = free[static_cast<std::size_t>(i)];
      if ((f && w(i) < 0.0) || (!f && y(i) < -tol))
        bad.push_back(i);
    }
    if (bad.empty()) {
      out.w = w.cwiseMax(0.0);
      return out;
    }
    if (bad.size() < best) {
      best = bad.size();
      backup = 3;
    } else if (backup > 0) {
      --backup;
    } else {
      bad = {bad.back()};
    }
    for (Eigen::Index i : bad) free[static_cast<std::size_t>(i)] ^= 1;
  }
  throw ConvergenceError("equilibrium solve: pivoting did not converge within " +
                         std::to_string(cap) + " iterations (block " + std::to_string(block) +
                         ")");
}

/// Constrained fit of G w = target with w >= 0 on a point cloud.
inline EquilibriumResult constrained_fit(const std::vector<Point>& points,
                                         const std::vector<double>& h,
                                         const std::vector<double>& target,
                                         const KernelModel& model, const SolverOptions& opt = {},
                                         int block = 0) {
  EquilibriumResult res;
  res.block = block;
  res.n_points = points.size();
  if (points.empty()) return res;
  std::vector<Node> nodes;
  nodes.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    nodes.push_back(model.node(points[i], i < h.size() ? h[i] : 0.0));
  const Eigen::MatrixXd G = model.matrix(nodes);
  const auto N = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd b(N);
  for (Eigen::Index i = 0; i < N; ++i) b(i) = target[static_cast<std::size_t>(i)];

  const LcpSolution sol = solve_lcp(G, b, opt, block);
  res.iterations = sol.iterations;
  const Eigen::VectorXd Gw = G * sol.w;
  std::size_t active = 0;
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto si = static_cast<std::size_t>(i);
    res.measure.add(points[si], sol.w(i), si < h.size() ? h[si] : 0.0);
    if (sol.w(i) > 0.0) {
      ++active;
      if (b(i) > 0.0) res.residual = std::max(res.residual, std::abs(Gw(i) - b(i)) / b(i));
    }
  }
  res.energy = sol.w.dot(Gw);
  res.mass = sol.w.sum();
  res.active_fraction = double(active) / double(N);
  return res;
}

/// Equilibrium measure of a block with target M(., inf) on the cloud.
inline EquilibriumResult equilibrium_measure(const Block& block, const KernelModel& model,
                                             int k = 0, const SolverOptions& opt = {}) {
  std::vector<double> target;
  target.reserve(block.size());
  for (const auto& p : block.points) target.push_back(martin_infinity(model.ctx(), p));
  return constrained_fit(block.points, block.h, target, model, opt, k);
}

/// Double sum of the measure against the kernel, diagonal regularized.
inline double green_energy(const AtomicMeasure& mu, const KernelModel& model) {
  std::vector<Node> nodes;
  nodes.reserve(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) nodes.push_back(model.node(mu.support[i], mu.spacing(i)));
  double e = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    e += mu.weights[i] * mu.weights[i] * model.entry(nodes[i], nodes[i], true);
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      e += 2.0 * mu.weights[i] * mu.weights[j] * model.entry(nodes[i], nodes[j]);
  }
  return e;
}
inline double green_energy(const EquilibriumResult& r, const KernelModel& model) {
  return green_energy(r.measure, model);
}

inline double capacity_mass(const EquilibriumResult& r) { return r.measure.total_mass(); }

/// sum_i w_i G(P, Q_i); an atom at P itself uses its own regularized diagonal.
inline double green_potential(const AtomicMeasure& mu, const KernelModel& model, const Point& P) {
  if (mu.empty()) return 0.0;
  const Node a = model.node(P);
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu.weights[i] == 0.0) continue;
    const Node b = model.node(mu.support[i], mu.spacing(i));
    const bool same = same_point(P, mu.support[i]);
    s += mu.weights[i] * (same ? model.entry(b, b, true) : model.entry(a, b));
  }
  return s;
}

/// Value at P_eval of the Green potential of the constrained fit of u_target
/// on the window cloud.
inline double reduced_function(const std::vector<Point>& points, const std::vector<double>& h,
                               const std::function<double(const Point&)>& u_target,
                               const KernelModel& model, const Point& P_eval,
                               const SolverOptions& opt = {}, EquilibriumResult* fit = nullptr) {
  if (points.empty()) {
    if (fit) *fit = EquilibriumResult{};
    return 0.0;
  }
  std::vector<double> target;
  target.reserve(points.size());
  for (const auto& p : points) {
    const double u = u_target(p);
    if (!(u >= 0.0)) throw DomainError("reduced_function: target must be nonnegative");
    target.push_back(u);
  }
  EquilibriumResult r = constrained_fit(points, h, target, model, opt);
  const double v = green_potential(r.measure, model, P_eval);
  if (fit) *fit = std::move(r);
  return v;
}

inline double reduced_function(const BlockDecomposition& window,
                               const std::function<double(const Point&)>& u_target,
                               const KernelModel& model, const Point& P_eval,
                               const SolverOptions& opt = {}) {
  std::vector<Point> pts;
  std::vector<double> hs;
  for (const auto& [k, b] : window.blocks) {
    pts.insert(pts.end(), b.points.begin(), b.points.end());
    hs.insert(hs.end(), b.h.begin(), b.h.end());
  }
  return reduced_function(pts, hs, u_target, model, P_eval, opt);
}

inline double superfunction_eval(const Superfunction& v, const KernelModel& model, const Point& P) {
  const ConeContext& c = model.ctx();
  double s = 0.0;
  if (v.c_inf > 0.0) s += v.c_inf * martin_infinity(c, P);
  if (v.c_origin > 0.0) s += v.c_origin * martin_origin(c, P);
  s += green_potential(v.mu, model, P);
  for (std::size_t i = 0; i < v.nu.size(); ++i)
    if (v.nu.weights[i] > 0.0) s += v.nu.weights[i] * poisson_kernel(model, P, v.nu.support[i]);
  return s;
}

/// Right side of the capacity bound for a superfunction without Martin terms:
/// sum V(t) phi mu + sum V(t) t^{-1} dphi/dn nu.
inline double lemma7_bound(const Superfunction& v, const ConeContext& ctx) {
  if (v.c_inf != 0.0 || v.c_origin != 0.0)
    throw NotApplicable("lemma7_bound: superfunction must be a pure potential (c_inf = c_origin = 0)");
  double s = 0.0;
  for (std::size_t i = 0; i < v.mu.size(); ++i)
    s += v.mu.weights[i] * martin_infinity(ctx, v.mu.support[i]);
  const double dn = boundary_normal_derivative(ctx.eigen);
  for (std::size_t i = 0; i < v.nu.size(); ++i) {
    const double t = v.nu.support[i].r;
    s += v.nu.weights[i] * eval_basis(ctx.basis, t).V * dn / t;
  }
  return s;
}

struct DyadicTailRow {
  int k = 0;
  /// sum over atoms with t >= 2^k of W(t) times the angular weight.
  double tail = 0.0;
  /// W(2^k)/V(2^k) times the sum over atoms with t < 2^k of V(t) times the angular weight.
  double inner_ratio = 0.0;
};

namespace detail {
inline std::vector<DyadicTailRow> dyadic_tails(const AtomicMeasure& m, const ConeContext& ctx,
                                               int k_lo, int k_hi,
                                               const std::function<double(const Point&)>& ang) {
  std::vector<DyadicTailRow> rows;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double R = std::ldexp(1.0, k);
    const BasisValues bR = eval_basis(ctx.basis, R);
    DyadicTailRow row;
    row.k = k;
    double inner = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double t = m.support[i].r;
      const BasisValues bt = eval_basis(ctx.basis, t);
      const double a = m.weights[i] * ang(m.support[i]);
      if (t >= R)
        row.tail += bt.W * a;
      else
        inner += bt.V * a;
    }
    row.inner_ratio = bR.W / bR.V * inner;
    rows.push_back(row);
  }
  return rows;
}
}  // namespace detail

/// Dyadic tails of int W phi dmu and the ratio (W(R)/V(R)) int_{r<R} V phi dmu.
inline std::vector<DyadicTailRow> lemma3_diagnostics(const AtomicMeasure& mu, const ConeContext& ctx,
                                                     int k_lo, int k_hi) {
  return detail::dyadic_tails(mu, ctx, k_lo, k_hi, [&](const Point& p) {
    return phi_of_colatitude(ctx.eigen, p.colatitude());
  });
}

/// Same diagnostics for a boundary measure with weight t^{-1} dphi/dn.
inline std::vector<DyadicTailRow> lemma4_diagnostics(const AtomicMeasure& nu, const ConeContext& ctx,
                                                     int k_lo, int k_hi) {
  const double dn = boundary_normal_derivative(ctx.eigen);
  return detail::dyadic_tails(nu, ctx, k_lo, k_hi, [&](const Point& p) { return dn / p.r; });
}

inline void write_equilibrium_csv(std::ostream& os, const std::vector<EquilibriumResult>& rows) {
  os << "k,gamma,lambda_mass,residual,active_fraction,n_points\n";
  const auto prec = os.precision(17);
  for (const auto& r : rows)
    os << r.block << ',' << r.energy << ',' << r.mass << ',' << r.residual << ','
       << r.active_fraction << ',' << r.n_points << '\n';
  os.precision(prec);
}

}  // namespace wiener

#endif  // WIENER_CAPACITY_HPP
