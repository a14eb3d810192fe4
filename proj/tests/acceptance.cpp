// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wiener/wiener.hpp"

using namespace wiener;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double time_limit, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit > 0.0 && secs >= time_limit) {
    o.pass = false;
    o.detail += "; over the time limit";
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s (%s; %.2f s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::shared_ptr<const ConeContext> half3() {
  static auto ctx = make_context(DomainSpec{3, Shape::half_sphere, std::numbers::pi / 2}, PotentialSpec{});
  return ctx;
}

std::vector<SetSpec> suite() {
  return {{"empty", {}},
          {"bounded_ball", {Ball{axis_point(3, 3.0), 1.0}}},
          {"axis_beads", {AxisBeads{1.0, 0, 12}}},
          {"full_shells", {ShellSector{0, 12, std::numbers::pi}}}};
}

WienerReport classify(const SetSpec& s, const KernelModel& m, int k_lo = 0, int k_hi = 12) {
  return wiener_report(discretize(s, m.ctx(), 0.25, k_lo, k_hi), m, {}, {}, s.name);
}

std::string verdict_pair(const WienerReport& r) {
  return to_string(r.minthin.verdict) + "/" + to_string(r.rarefied.verdict, true);
}

Point random_point(std::mt19937_64& rng, double r_lo, double r_hi, double max_colat) {
  std::uniform_real_distribution<double> lr(std::log(r_lo), std::log(r_hi)), th(0.0, max_colat),
      az(0.0, 2.0 * std::numbers::pi);
  Point p;
  p.r = std::exp(lr(rng));
  p.theta = {th(rng), az(rng)};
  return p;
}

Block merged(const BlockDecomposition& d) {
  Block out;
  for (const auto& [k, b] : d.blocks) {
    out.points.insert(out.points.end(), b.points.begin(), b.points.end());
    out.h.insert(out.h.end(), b.h.begin(), b.h.end());
  }
  return out;
}

std::vector<PotentialSpec> potential_matrix() {
  std::vector<PotentialSpec> out;
  for (double kappa : {0.0, 2.0, 7.0}) {
    PotentialSpec p;
    p.kappa = kappa;
    out.push_back(p);
  }
  PotentialSpec bump;
  bump.kappa = 1.0;
  bump.perturbation = Perturbation::closed_form(
      [](double r) {
        const double z = std::log(r / 3.0);
        return 0.8 * std::exp(-z * z);
      },
      "bump");
  out.push_back(bump);
  std::vector<double> rs, ps;
  for (int i = 0; i <= 40; ++i) {
    const double x = std::pow(10.0, -1.0 + 3.0 * i / 40.0);
    rs.push_back(x);
    ps.push_back(0.5 / (1.0 + x * x));
  }
  PotentialSpec sampled;
  sampled.kappa = 0.5;
  sampled.perturbation = Perturbation::samples(rs, ps);
  out.push_back(sampled);
  return out;
}

}  // namespace

int main() {
  criterion(1, "radial solutions match r^iota for a = kappa/r^2", 5.0, [] {
    double worst = 0.0;
    for (int n : {2, 3, 4})
      for (double kappa : {0.0, 2.0, 7.0}) {
        PotentialSpec spec;
        spec.kappa = kappa;
        const RadialBasis B = solve_radial(spec, n, n - 1.0);
        for (int i = 0; i <= 400; ++i) {
          const double r = 1e-2 * std::pow(1e4, i / 400.0);
          const BasisValues v = eval_basis(B, r);
          worst = std::max(worst, std::abs(v.V / std::pow(r, B.iota_plus) - 1.0));
          worst = std::max(worst, std::abs(v.W / std::pow(r, B.iota_minus) - 1.0));
        }
      }
    return Outcome{worst <= 1e-6, "max relative error " + fmt("%.2e", worst)};
  });

  criterion(2, "zero potential on the half-sphere: exponents (1, 1-n) and eigenpair", 0.0, [] {
    bool ok = true;
    double worst = 0.0;
    for (int n : {2, 3, 4, 5}) {
      const Exponents e = exponents(n, 0.0, n - 1.0);
      ok = ok && e.iota_plus == 1.0 && e.iota_minus == 1.0 - n;
      DomainSpec d;
      d.n = n;
      d.shape = Shape::half_sphere;
      const SphericalEigen eig = solve_eigen(d);
      worst = std::max(worst, std::abs(eig.lambda - (n - 1.0)));
      const double c = std::sqrt(2.0 * n / sphere_area(static_cast<std::size_t>(n)));
      for (double t = 0.0; t < std::numbers::pi / 2; t += 0.05) {
        std::vector<double> th(static_cast<std::size_t>(n - 1), 0.7);
        th[0] = t;
        worst = std::max(worst, std::abs(eval_phi(eig, th) - c * std::cos(t)));
      }
    }
    return Outcome{ok && worst <= 1e-6,
                   std::string(ok ? "exponents exact" : "exponents differ") + ", eigen error " +
                       fmt("%.2e", worst)};
  });

  criterion(3, "Wronskian constant across the grid", 0.0, [] {
    double worst = 0.0;
    int count = 0;
    for (int n : {2, 3, 4})
      for (const PotentialSpec& p : potential_matrix()) {
        const RadialBasis B = solve_radial(p, n, n - 1.0);
        worst = std::max(worst, wronskian_residual(B));
        ++count;
      }
    return Outcome{worst <= 1e-6,
                   std::to_string(count) + " potentials, max relative variation " + fmt("%.2e", worst)};
  });

  criterion(4, "half-space Green / product form within a band of log width <= log 8", 10.0, [] {
    const OracleComparison o = oracle_compare(500, 20240601);
    return Outcome{o.within_limit(), "C1 = " + fmt("%.4f", o.C1) + ", C2 = " + fmt("%.4f", o.C2) +
                                         ", log width " + fmt("%.3f", o.log_width) + " vs limit " +
                                         fmt("%.3f", o.log_width_limit)};
  });

  criterion(5, "verdict suite in surrogate and oracle modes", 60.0, [] {
    const std::vector<std::string> expect = {"thin/rarefied", "thin/rarefied", "thin/rarefied",
                                             "not/not"};
    bool ok = true;
    std::string got;
    for (KernelMode mode : {KernelMode::surrogate, KernelMode::halfspace_oracle}) {
      KernelModel m(half3(), mode);
      got += to_string(mode) + ":";
      const auto sets = suite();
      for (std::size_t i = 0; i < sets.size(); ++i) {
        const std::string v = verdict_pair(classify(sets[i], m));
        ok = ok && v == expect[i];
        got += " " + v;
      }
      got += mode == KernelMode::surrogate ? "; " : "";
    }
    return Outcome{ok, got};
  });

  criterion(6, "verdicts invariant under kernel scaling by 1/2 and 2", 0.0, [] {
    bool ok = true;
    int compared = 0;
    for (KernelMode mode : {KernelMode::surrogate, KernelMode::halfspace_oracle}) {
      KernelModel base(half3(), mode);
      std::vector<std::string> ref;
      for (const auto& s : suite()) ref.push_back(verdict_pair(classify(s, base)));
      for (double c : {0.5, 2.0}) {
        KernelModel m(half3(), mode);
        m.scale = c;
        const auto sets = suite();
        for (std::size_t i = 0; i < sets.size(); ++i) {
          ok = ok && verdict_pair(classify(sets[i], m)) == ref[i];
          ++compared;
        }
      }
    }
    return Outcome{ok, std::to_string(compared) + " scaled runs compared"};
  });

  criterion(7, "superlevel sets {G mu >= V phi} of atomic measures are minimally thin", 0.0, [] {
    KernelModel m(half3());
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> atoms(1, 4);
    std::uniform_real_distribution<double> wt(5.0, 50.0);
    bool ok = true;
    std::string sizes;
    for (int trial = 0; trial < 5; ++trial) {
      Superfunction v;
      const int na = atoms(rng);
      for (int a = 0; a < na; ++a) {
        const Point p = random_point(rng, 1.0, 500.0, 1.3);
        v.mu.add(p, wt(rng) * p.r);
      }
      const ConeContext& ctx = m.ctx();
      const BlockDecomposition H = superlevel_set(
          v, m, 0, 12, 0.25, [&](const Point& p) { return martin_infinity(ctx, p); });
      const WienerReport rep = wiener_report(H, m);
      ok = ok && rep.minthin.verdict == Verdict::thin;
      sizes += (trial ? "," : "") + std::to_string(H.total_points());
    }
    return Outcome{ok, "5 measures, set sizes " + sizes};
  });

  criterion(8, "capacity mass bounded by the superfunction integral", 0.0, [] {
    KernelModel m(half3());
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const ConeContext& ctx = m.ctx();
    double worst = 0.0;
    std::vector<SetSpec> sets = {
        {"ball", {Ball{axis_point(3, 6.0), 1.5}}},
        {"beads", {AxisBeads{0.7, 1, 4}}},
        {"sector", {ShellSector{2, 3, 0.6}}},
        {"ball_pair", {Ball{random_point(rng, 3.0, 20.0, 0.8), 1.0}, Ball{random_point(rng, 3.0, 20.0, 0.8), 1.0}}},
        {"mixed", {ShellSector{1, 1, 0.9}, Ball{axis_point(3, 10.0), 2.0}}}};
    for (std::size_t s = 0; s < sets.size(); ++s) {
      const Block E = merged(discretize(sets[s], ctx, 0.35, 0, 5));
      std::vector<double> target;
      for (const auto& p : E.points) target.push_back(martin_infinity(ctx, p));
      const EquilibriumResult lam = constrained_fit(E.points, E.h, target, m);
      std::vector<Point> ap;
      std::vector<double> ah;
      for (std::size_t i = 0; i < E.size(); ++i)
        if (lam.measure.weights[i] > 0.0) {
          ap.push_back(E.points[i]);
          ah.push_back(E.h[i]);
        }
      Superfunction v;
      v.mu = constrained_fit(ap, ah, std::vector<double>(ap.size(), 1.0), m).measure;
      // boundary part radially separated from E on odd trials
      if (s % 2 == 1)
        for (int j = 0; j < 3; ++j) {
          Point q;
          q.r = 256.0 * (1.0 + u(rng));
          q.theta = {std::numbers::pi / 2, 2.0 * std::numbers::pi * u(rng)};
          v.nu.add(q, 1e3 * u(rng));
        }
      double vmin = std::numeric_limits<double>::infinity();
      for (const auto& p : E.points) vmin = std::min(vmin, superfunction_eval(v, m, p));
      for (double& w : v.mu.weights) w /= vmin;
      for (double& w : v.nu.weights) w /= vmin;
      const double bound = lemma7_bound(v, ctx);
      worst = std::max(worst, capacity_mass(lam) / bound);
    }
    return Outcome{worst <= 1.05, "5 superfunctions, max mass/bound " + fmt("%.4f", worst)};
  });

  criterion(9, "rarefied implies minimally thin; subcone sets agree", 0.0, [] {
    KernelModel m(half3());
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto uni = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
    int flagged = 0, subcone = 0;
    for (int s = 0; s < 20; ++s) {
      SetSpec spec;
      spec.name = "random_" + std::to_string(s);
      const int parts = uni(1, 3);
      for (int p = 0; p < parts; ++p) {
        switch (uni(0, 2)) {
          case 0: {
            const int lo = uni(0, 3);
            spec.shapes.push_back(AxisBeads{0.3 + 0.9 * u(rng), lo, uni(lo + 2, 12)});
            break;
          }
          case 1: {
            const Point c = random_point(rng, 2.0, 200.0, 1.2);
            spec.shapes.push_back(Ball{c, (0.1 + 0.2 * u(rng)) * c.r});
            break;
          }
          default: {
            const int lo = uni(0, 8);
            spec.shapes.push_back(ShellSector{lo, uni(lo, 12), 0.3 + 2.8 * u(rng)});
          }
        }
      }
      const BlockDecomposition d = discretize(spec, *half3(), 0.25, 0, 12);
      const CrosscheckReport c = theorem8_crosscheck(wiener_report(d, m), in_subcone(d, *half3(), 1e-2));
      if (!c.consistent()) ++flagged;
      if (c.subcone) ++subcone;
    }
    return Outcome{flagged == 0, "20 sets, " + std::to_string(flagged) + " flagged, " +
                                     std::to_string(subcone) + " in a subcone"};
  });

  criterion(10, "profile of a Green potential decays outside the exceptional set", 0.0, [] {
    KernelModel m(half3());
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> w(0.01, 0.1);
    Superfunction v;
    for (int a = 0; a < 4; ++a) v.mu.add(random_point(rng, 1.0, 1.5, 1.2), w(rng));
    const BlockDecomposition H = exceptional_set(v, m, 0, 8, 0.25);
    const auto rows = asymptotic_profile(v, m, 0, 8, H, 0.25);
    bool decreasing = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
      decreasing = decreasing && rows[i].sup_deviation < rows[i - 1].sup_deviation;
    double first = 0.0;
    for (const auto& r : rows)
      if (r.sup_deviation > 0.0) {
        first = r.sup_deviation;
        break;
      }
    const double last = rows.back().sup_deviation;
    return Outcome{decreasing && first > 0.0 && last <= 0.1 * first,
                   std::string(decreasing ? "rows decrease" : "rows not decreasing") + ", last/first " +
                       fmt("%.2e", first > 0.0 ? last / first : 0.0)};
  });

  criterion(11, "Wiener terms monotone under set inclusion", 0.0, [] {
    KernelModel m(half3());
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto uni = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
    auto random_primitive = [&]() -> Primitive {
      switch (uni(0, 2)) {
        case 0: {
          const int lo = uni(0, 4);
          return AxisBeads{0.3 + 0.7 * u(rng), lo, uni(lo, 11)};
        }
        case 1: {
          const Point c = random_point(rng, 2.0, 300.0, 1.2);
          return Ball{c, (0.05 + 0.15 * u(rng)) * c.r};
        }
        default: {
          const int lo = uni(0, 9);
          return ShellSector{lo, std::min(11, lo + uni(0, 2)), 0.2 + 0.6 * u(rng)};
        }
      }
    };
    double worst = 0.0;
    bool implication = true;
    for (int pair = 0; pair < 10; ++pair) {
      SetSpec A{"A", {random_primitive()}};
      SetSpec B = A;
      B.name = "B";
      const int extra = uni(1, 2);
      for (int e = 0; e < extra; ++e) B.shapes.push_back(random_primitive());
      const WienerReport ra = classify(A, m, 0, 11), rb = classify(B, m, 0, 11);
      for (std::size_t i = 0; i < ra.rows.size(); ++i) {
        const auto& a = ra.rows[i];
        const auto& b = rb.rows[i];
        if (a.term_minthin > 0.0) worst = std::max(worst, a.term_minthin / b.term_minthin);
        if (a.term_rarefied > 0.0) worst = std::max(worst, a.term_rarefied / b.term_rarefied);
      }
      if (rb.minthin.verdict == Verdict::thin && ra.minthin.verdict != Verdict::thin) implication = false;
      if (rb.rarefied.verdict == Verdict::thin && ra.rarefied.verdict != Verdict::thin) implication = false;
    }
    return Outcome{worst <= 1.0 + 1e-6 && implication,
                   "10 pairs, max term ratio A/B " + fmt("%.8f", worst) +
                       (implication ? ", thin B implies thin A" : ", thin B with non-thin A")};
  });

  criterion(12, "boundary point: cone not thin, cusp thin, distant set r_m = 0", 60.0, [] {
    KernelModel m(half3(), KernelMode::halfspace_oracle);
    const Point Q = from_cartesian({1.0, 0.0, 0.0});
    const BoundaryReport cone =
        thinness_at_boundary_point({"cone", {BoundaryCone{Q, std::numbers::pi / 4, 1.0}}}, Q, m, 7);
    const BoundaryReport cusp = thinness_at_boundary_point({"cusp", {BoundaryCusp{Q, 1.0}}}, Q, m, 7);
    const BoundaryReport away =
        thinness_at_boundary_point({"away", {Ball{axis_point(3, 3.0), 1.0}}}, Q, m, 7);
    bool cusp_decays = cusp.decay_ratio <= 0.9;
    for (std::size_t i = 1; i < cusp.rows.size(); ++i)
      cusp_decays = cusp_decays && cusp.rows[i].r_m < cusp.rows[i - 1].r_m;
    bool away_zero = true;
    for (std::size_t i = 2; i < away.rows.size(); ++i) away_zero = away_zero && away.rows[i].r_m == 0.0;
    const bool ok = cone.verdict == Verdict::not_thin && cusp.verdict == Verdict::thin && cusp_decays &&
                    away.verdict == Verdict::thin && away_zero;
    return Outcome{ok, "cone " + to_string(cone.verdict) + " (r_M " + fmt("%.3f", cone.rows.back().r_m) +
                           "), cusp " + to_string(cusp.verdict) + " (ratio " +
                           fmt("%.3f", cusp.decay_ratio) + "), distant r_M " +
                           fmt("%.1f", away.rows.back().r_m)};
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
