#ifndef WIENER_CRITERIA_HPP
#define WIENER_CRITERIA_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "wiener/capacity.hpp"
#include "wiener/error.hpp"
#include "wiener/kernels.hpp"
#include "wiener/sets.hpp"

namespace wiener {

enum class Verdict { thin, not_thin, inconclusive };

/// "thin"/"not"/"inconclusive"; rarefied reports use "rarefied" for thin.
inline std::string to_string(Verdict v, bool rarefied = false) {
  switch (v) {
    case Verdict::thin: return rarefied ? "rarefied" : "thin";
    case Verdict::not_thin: return "not";
    default: return "inconclusive";
  }
}

struct Thresholds {
  double rho_thin = 0.9;
  double eps_tail = 1e-3;
  double delta_floor = 0.1;
};

struct WienerRow {
  int k = 0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::size_t n_points = 0;
  double gamma_k = 0.0;
  double lambda_k = 0.0;
  double term_minthin = 0.0;
  double term_rarefied = 0.0;
  double partial_minthin = 0.0;
  double partial_rarefied = 0.0;
  double residual = 0.0;
  double active_fraction = 0.0;
  int iterations = 0;
  bool coarsened = false;
  std::string error;
};

struct SeriesVerdict {
  Verdict verdict = Verdict::inconclusive;
  double tail_ratio = 0.0;
  /// Rows in the fitted tail window.
  int window_lo = 0;
  int window_hi = 0;
};

struct WienerReport {
  std::string set_name;
  std::vector<WienerRow> rows;
  SeriesVerdict minthin;
  SeriesVerdict rarefied;
  Thresholds thresholds;
  int K = 0;
  std::vector<std::string> notes;

  bool has_errors() const {
    return std::any_of(rows.begin(), rows.end(), [](const WienerRow& r) { return !r.error.empty(); });
  }
};

/// Three-valued verdict on a truncated nonnegative series. The tail window
/// is the upper half of the rows from the first nonzero term to the last row.
inline SeriesVerdict series_verdict(const std::vector<int>& ks, const std::vector<double>& terms,
                                    const Thresholds& th) {
  SeriesVerdict out;
  const std::size_t N = terms.size();
  if (N == 0) {
    out.verdict = Verdict::thin;
    return out;
  }
  std::size_t first = N;
  for (std::size_t i = 0; i < N; ++i)
    if (terms[i] > 0.0) {
      first = i;
      break;
    }
  if (first == N) {
    out.verdict = Verdict::thin;
    out.window_lo = out.window_hi = ks.back();
    return out;
  }
  const std::size_t count = N - first;
  const std::size_t w0 = first + count / 2;
  out.window_lo = ks[w0];
  out.window_hi = ks[N - 1];

  double sum = 0.0;
  for (double t : terms) sum += t;
  const double last = terms[N - 1];

  if (last == 0.0) {
    out.tail_ratio = 0.0;
  } else {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (std::size_t i = w0; i < N; ++i) {
      if (terms[i] <= 0.0) continue;
      const double x = ks[i], y = std::log(terms[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
    const double den = m * sxx - sx * sx;
    out.tail_ratio = (m >= 2 && den > 0.0) ? std::exp((m * sxy - sx * sy) / den) : 0.0;
  }

  if (out.tail_ratio <= th.rho_thin && last < th.eps_tail * sum) {
    out.verdict = Verdict::thin;
    return out;
  }
  std::vector<double> head;
  for (std::size_t i = first; i < N && head.size() < 3; ++i)
    if (terms[i] > 0.0) head.push_back(terms[i]);
  std::sort(head.begin(), head.end());
  const double median = head[head.size() / 2];
  bool floor_held = true;
  for (std::size_t i = w0; i < N; ++i)
    if (terms[i] < th.delta_floor * median) floor_held = false;
  out.verdict = floor_held ? Verdict::not_thin : Verdict::inconclusive;
  return out;
}

struct RunOptions {
  SolverOptions solver;
  int threads = 1;
};

/// Per-block equilibrium solves and Wiener terms; verdicts are not filled.
inline std::vector<WienerRow> wiener_rows(const BlockDecomposition& decomp, const KernelModel& model,
                                          const RunOptions& opt = {}) {
  std::vector<int> ks;
  for (const auto& [k, b] : decomp.blocks) ks.push_back(k);
  std::vector<WienerRow> rows(ks.size());
  auto work = [&](std::size_t i) {
    const int k = ks[i];
    const Block& b = decomp.blocks.at(k);
    WienerRow& row = rows[i];
    row.k = k;
    row.r_lo = std::ldexp(1.0, k);
    row.r_hi = std::ldexp(1.0, k + 1);
    row.n_points = b.size();
    row.coarsened = b.coarsened;
    try {
      const EquilibriumResult r = equilibrium_measure(b, model, k, opt.solver);
      const BasisValues bv = eval_basis(model.ctx().basis, row.r_lo);
      row.gamma_k = r.energy;
      row.lambda_k = r.mass;
      row.term_minthin = r.energy * bv.W / bv.V;
      row.term_rarefied = bv.W * r.mass;
      row.residual = r.residual;
      row.active_fraction = r.active_fraction;
      row.iterations = r.iterations;
    } catch (const Error& e) {
      row.error = e.what();
    }
  };
  const int threads = std::max(1, opt.threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < ks.size(); ++i) work(i);
  } else {
    for (std::size_t start = 0; start < ks.size(); start += static_cast<std::size_t>(threads)) {
      std::vector<std::future<void>> jobs;
      for (std::size_t i = start; i < std::min(ks.size(), start + threads); ++i)
        jobs.push_back(std::async(std::launch::async, work, i));
      for (auto& j : jobs) j.get();
    }
  }
  double pm = 0.0, pr = 0.0;
  for (auto& row : rows) {
    pm += row.term_minthin;
    pr += row.term_rarefied;
    row.partial_minthin = pm;
    row.partial_rarefied = pr;
  }
  return rows;
}

/// Verdicts as a pure function of the rows.
inline void assign_verdicts(WienerReport& rep) {
  std::vector<int> ks;
  std::vector<double> tm, tr;
  for (const auto& r : rep.rows) {
    ks.push_back(r.k);
    tm.push_back(r.term_minthin);
    tr.push_back(r.term_rarefied);
  }
  rep.K = ks.empty() ? 0 : ks.back();
  rep.minthin = series_verdict(ks, tm, rep.thresholds);
  rep.rarefied = series_verdict(ks, tr, rep.thresholds);
  if (rep.has_errors()) {
    rep.minthin.verdict = Verdict::inconclusive;
    rep.rarefied.verdict = Verdict::inconclusive;
  }
}

inline WienerReport wiener_report(const BlockDecomposition& decomp, const KernelModel& model,
                                  const Thresholds& th = {}, const RunOptions& opt = {},
                                  std::string name = {}) {
  if (decomp.k_max - decomp.k_min + 1 < 8)
    throw DomainError("Wiener series: k_range must cover at least 8 blocks");
  WienerReport rep;
  rep.set_name = std::move(name);
  rep.thresholds = th;
  rep.rows = wiener_rows(decomp, model, opt);
  rep.notes = decomp.warnings;
  if (decomp.any_coarsened()) rep.notes.push_back("some blocks were coarsened to respect the point cap");
  assign_verdicts(rep);
  return rep;
}

inline WienerReport classify_minimally_thin_infinity(const BlockDecomposition& decomp,
                                                     const KernelModel& model,
                                                     const Thresholds& th = {},
                                                     const RunOptions& opt = {}) {
  return wiener_report(decomp, model, th, opt);
}

inline WienerReport classify_rarefied_infinity(const BlockDecomposition& decomp,
                                               const KernelModel& model, const Thresholds& th = {},
                                               const RunOptions& opt = {}) {
  return wiener_report(decomp, model, th, opt);
}

inline void write_report_csv(std::ostream& os, const WienerReport& rep) {
  os << "k,r_lo,r_hi,n_points,gamma_k,lambda_k,term_minthin,term_rarefied,partial_minthin,"
        "partial_rarefied\n";
  const auto prec = os.precision(17);
  for (const auto& r : rep.rows)
    os << r.k << ',' << r.r_lo << ',' << r.r_hi << ',' << r.n_points << ',' << r.gamma_k << ','
       << r.lambda_k << ',' << r.term_minthin << ',' << r.term_rarefied << ','
       << r.partial_minthin << ',' << r.partial_rarefied << '\n';
  os.precision(prec);
}

// ---------------------------------------------------------------------------
// Boundary points

struct BoundaryOptions {
  /// Lattice spacing relative to the annulus radius.
  double resolution = 0.2;
  /// Annuli j = m..m+annuli sampled inside omega_m.
  int annuli = 3;
  SolverOptions solver;
};

struct BoundaryRow {
  int m = 0;
  double radius = 0.0;
  std::size_t n_points = 0;
  double r_m = 0.0;
  double residual = 0.0;
};

struct BoundaryReport {
  std::vector<BoundaryRow> rows;
  double decay_ratio = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

inline bool on_lateral_boundary(const ConeContext& ctx, const Point& Q) {
  return Q.r > 0.0 &&
         std::abs(std::abs(Q.colatitude()) - ctx.domain.boundary_colatitude()) <= 1e-9;
}

/// Cloud of E cap B(Q, 2^{-m}) sampled on dyadic annuli around Q.
inline void sample_neighbourhood(const SetSpec& E, const ConeContext& ctx, const Point& Q, int m,
                                 const BoundaryOptions& opt, std::vector<Point>& pts,
                                 std::vector<double>& hs) {
  std::vector<std::size_t> owner;
  for (int j = m; j <= m + opt.annuli; ++j) {
    const double hi = std::ldexp(1.0, -j);
    for (std::size_t pi = 0; pi < E.shapes.size(); ++pi) {
      sample_annulus(ctx, E.shapes[pi], Q, 0.5 * hi, hi, opt.resolution * hi, pts, hs);
      owner.resize(pts.size(), pi);
    }
  }
  Block b{pts, hs, false};
  detail::thin(b, owner);
  pts = std::move(b.points);
  hs = std::move(b.h);
}

/// r_m = reduced function at P0 of M(., Q) on E cap B(Q, 2^{-m}), m = 0..depth.
inline BoundaryReport thinness_at_boundary_point(const SetSpec& E, const Point& Q,
                                                 const KernelModel& model, int depth,
                                                 const Thresholds& th = {},
                                                 const BoundaryOptions& opt = {}) {
  const ConeContext& ctx = model.ctx();
  if (!on_lateral_boundary(ctx, Q))
    throw DomainError("thinness_at_boundary_point: Q is not on the lateral boundary");
  if (depth < 1) throw DomainError("thinness_at_boundary_point: depth must be >= 1");
  BoundaryReport rep;
  auto target = [&](const Point& P) { return martin_boundary(model, P, Q); };
  for (int m = 0; m <= depth; ++m) {
    BoundaryRow row;
    row.m = m;
    row.radius = std::ldexp(1.0, -m);
    std::vector<Point> pts;
    std::vector<double> hs;
    sample_neighbourhood(E, ctx, Q, m, opt, pts, hs);
    row.n_points = pts.size();
    EquilibriumResult fit;
    row.r_m = reduced_function(pts, hs, target, model, ctx.P0, opt.solver, &fit);
    row.residual = fit.residual;
    rep.rows.push_back(row);
  }
  std::vector<int> ms;
  std::vector<double> vals;
  for (const auto& r : rep.rows) {
    ms.push_back(r.m);
    vals.push_back(r.r_m);
  }
  // r_m itself must tend to zero; reuse the series rule on the sequence, with
  // the tail condition replaced by "last value below the floor".
  const SeriesVerdict sv = series_verdict(ms, vals, th);
  rep.decay_ratio = sv.tail_ratio;
  double first = 0.0;
  for (double v : vals)
    if (v > 0.0) {
      first = v;
      break;
    }
  if (first == 0.0 || vals.back() == 0.0)
    rep.verdict = Verdict::thin;
  else if (sv.tail_ratio <= th.rho_thin && vals.back() < th.delta_floor * first)
    rep.verdict = Verdict::thin;
  else if (sv.verdict == Verdict::not_thin)
    rep.verdict = Verdict::not_thin;
  else
    rep.verdict = Verdict::inconclusive;
  return rep;
}

// ---------------------------------------------------------------------------
// Superlevel sets and the asymptotic profile

/// Full-cone lattice of the blocks in [k_lo, k_hi] (spacing resolution 2^k).
inline BlockDecomposition cone_lattice(const ConeContext& ctx, int k_lo, int k_hi, double resolution) {
  SetSpec all;
  all.name = "cone";
  all.shapes.push_back(ShellSector{k_lo, k_hi, std::numbers::pi});
  return discretize(all, ctx, resolution, k_lo, k_hi, std::numeric_limits<std::size_t>::max());
}

/// Lattice points of the window where v(P) >= threshold(P).
inline BlockDecomposition superlevel_set(const Superfunction& v, const KernelModel& model, int k_lo,
                                         int k_hi, double resolution,
                                         const std::function<double(const Point&)>& threshold) {
  v.validate();
  BlockDecomposition lat = cone_lattice(model.ctx(), k_lo, k_hi, resolution);
  for (auto& [k, b] : lat.blocks) {
    Block kept;
    for (std::size_t i = 0; i < b.size(); ++i)
      if (superfunction_eval(v, model, b.points[i]) >= threshold(b.points[i])) {
        kept.points.push_back(b.points[i]);
        kept.h.push_back(b.h[i]);
      }
    b = std::move(kept);
  }
  lat.warnings.clear();
  return lat;
}

/// H_v = {P : v(P) >= V(r)} on the lattice of the window.
inline BlockDecomposition exceptional_set(const Superfunction& v, const KernelModel& model, int k_lo,
                                          int k_hi, double resolution) {
  const ConeContext& ctx = model.ctx();
  return superlevel_set(v, model, k_lo, k_hi, resolution,
                        [&](const Point& p) { return eval_basis(ctx.basis, p.r).V; });
}

struct ProfileRow {
  int k = 0;
  std::size_t n_points = 0;
  double sup_deviation = 0.0;
};

/// Per block, sup over lattice points outside the exceptional set of
/// |v(P)/V(r) - c_inf phi(Theta)|.
inline std::vector<ProfileRow> asymptotic_profile(const Superfunction& v, const KernelModel& model,
                                                  int k_lo, int k_hi,
                                                  const BlockDecomposition& exceptional,
                                                  double resolution) {
  const ConeContext& ctx = model.ctx();
  const BlockDecomposition lat = cone_lattice(ctx, k_lo, k_hi, resolution);
  std::set<std::vector<double>> excluded;
  for (const auto& [k, b] : exceptional.blocks)
    for (const auto& p : b.points) excluded.insert(to_cartesian(p));
  std::vector<ProfileRow> rows;
  for (const auto& [k, b] : lat.blocks) {
    ProfileRow row;
    row.k = k;
    for (const auto& p : b.points) {
      if (excluded.count(to_cartesian(p))) continue;
      ++row.n_points;
      const double dev = std::abs(superfunction_eval(v, model, p) / eval_basis(ctx.basis, p.r).V -
                                  v.c_inf * phi_of_colatitude(ctx.eigen, p.colatitude()));
      row.sup_deviation = std::max(row.sup_deviation, dev);
    }
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------

struct CrosscheckReport {
  bool rarefied_but_not_thin = false;
  bool subcone = false;
  bool disagreement = false;
  bool consistent() const { return !rarefied_but_not_thin && !(subcone && disagreement); }
};

inline CrosscheckReport theorem8_crosscheck(const WienerReport& rep, bool subcone) {
  CrosscheckReport out;
  out.subcone = subcone;
  const Verdict m = rep.minthin.verdict, r = rep.rarefied.verdict;
  out.rarefied_but_not_thin = r == Verdict::thin && m == Verdict::not_thin;
  if (subcone && m != Verdict::inconclusive && r != Verdict::inconclusive) out.disagreement = m != r;
  return out;
}

inline CrosscheckReport theorem8_crosscheck(const BlockDecomposition& decomp, const KernelModel& model,
                                            const Thresholds& th = {}, double subcone_margin = 1e-2,
                                            const RunOptions& opt = {}) {
  return theorem8_crosscheck(wiener_report(decomp, model, th, opt),
                             in_subcone(decomp, model.ctx(), subcone_margin));
}

}  // namespace wiener

#endif  // WIENER_CRITERIA_HPP
