#ifndef WIENER_PIPELINE_HPP
#define WIENER_PIPELINE_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "wiener/capacity.hpp"
#include "wiener/config.hpp"
#include "wiener/criteria.hpp"
#include "wiener/error.hpp"
#include "wiener/kernels.hpp"
#include "wiener/sets.hpp"

namespace wiener {

inline constexpr const char* kToolName = "wiener";
inline constexpr const char* kToolVersion = "0.1.0";

inline KernelModel make_model(const RunConfig& c) {
  auto ctx = make_context(c.cone, c.potential(), c.radial_tol, c.kernel.kappa_martin);
  KernelModel m;
  m.context = std::move(ctx);
  m.mode = c.kernel.mode;
  m.form = c.kernel.form;
  m.c_mid = c.kernel.c_mid;
  m.h_reg = c.kernel.h_reg;
  m.h_reg_factor = c.kernel.h_reg_factor;
  m.scale = c.kernel.scale;
  m.validate();
  return m;
}

struct OracleComparison {
  int pairs = 0;
  std::uint64_t seed = 0;
  /// Fitted envelope: C1 <= G / (V(min) W(max) phi phi) <= C2.
  double C1 = 0.0;
  double C2 = 0.0;
  double log_width = 0.0;
  double log_width_limit = std::log(8.0);
  bool within_limit() const { return log_width <= log_width_limit; }
};

/// Exact half-space Green function against the separated product form on
/// random pairs with r/t or t/r <= 4/5 (n = 3, a = 0): directions uniform on
/// the upper hemisphere, radii log-uniform on [1e-2, 1e2].
inline OracleComparison oracle_compare(int pairs, std::uint64_t seed) {
  if (pairs < 1) throw DomainError("oracle_compare: need at least one pair");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> logr(std::log(1e-2), std::log(1e2));
  auto draw = [&]() {
    std::vector<double> u(3);
    double l = 0.0;
    do {
      for (double& x : u) x = gauss(rng);
      l = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    } while (l == 0.0 || u[2] == 0.0);
    const double r = std::exp(logr(rng));
    for (double& x : u) x = r * x / l;
    u[2] = std::abs(u[2]);
    return from_cartesian(u);
  };
  const double c_phi = std::sqrt(6.0 / (4.0 * std::numbers::pi));
  OracleComparison out;
  out.pairs = pairs;
  out.seed = seed;
  out.C1 = std::numeric_limits<double>::infinity();
  out.C2 = 0.0;
  for (int i = 0; i < pairs;) {
    const Point P = draw(), Q = draw();
    if (!radially_separated(P.r, Q.r)) continue;
    ++i;
    const double lo = std::min(P.r, Q.r), hi = std::max(P.r, Q.r);
    const double prod = lo / (hi * hi) * c_phi * std::cos(P.colatitude()) * c_phi *
                        std::cos(Q.colatitude());
    const double ratio = halfspace_green_oracle(P, Q) / prod;
    out.C1 = std::min(out.C1, ratio);
    out.C2 = std::max(out.C2, ratio);
  }
  out.log_width = std::log(out.C2 / out.C1);
  return out;
}

struct SetRun {
  std::string name;
  std::size_t n_points = 0;
  WienerReport report;
  CrosscheckReport crosscheck;
  std::string error;
  double seconds = 0.0;
};

struct RunArtifacts {
  RunConfig config;
  std::vector<SetRun> sets;
  std::optional<OracleComparison> oracle;
  std::map<std::string, double> timings;

  bool any_error() const {
    for (const auto& s : sets)
      if (!s.error.empty() || s.report.has_errors()) return true;
    return false;
  }
};

inline RunArtifacts run_pipeline(const RunConfig& cfg) {
  using clock = std::chrono::steady_clock;
  RunArtifacts art;
  art.config = cfg;
  const auto t0 = clock::now();
  const KernelModel model = make_model(cfg);
  art.timings["setup"] = std::chrono::duration<double>(clock::now() - t0).count();
  RunOptions opt;
  opt.solver = cfg.solver;
  opt.threads = cfg.threads;
  const auto& d = cfg.discretization;
  for (const auto& spec : cfg.sets) {
    const auto ts = clock::now();
    SetRun run;
    run.name = spec.name;
    try {
      const BlockDecomposition decomp =
          discretize(spec, model.ctx(), d.resolution, d.k_lo, d.k_hi, d.point_cap);
      run.n_points = decomp.total_points();
      run.report = wiener_report(decomp, model, cfg.thresholds, opt, spec.name);
      run.crosscheck =
          theorem8_crosscheck(run.report, in_subcone(decomp, model.ctx(), d.subcone_margin));
    } catch (const Error& e) {
      run.error = e.what();
    }
    run.seconds = std::chrono::duration<double>(clock::now() - ts).count();
    art.timings["set:" + spec.name] = run.seconds;
    art.sets.push_back(std::move(run));
  }
  if (cfg.oracle.enabled) {
    const auto to = clock::now();
    art.oracle = oracle_compare(cfg.oracle.pairs, cfg.seed);
    art.timings["oracle"] = std::chrono::duration<double>(clock::now() - to).count();
  }
  art.timings["total"] = std::chrono::duration<double>(clock::now() - t0).count();
  return art;
}

inline json verdict_json(const SeriesVerdict& v, bool rarefied) {
  return {{"verdict", to_string(v.verdict, rarefied)},
          {"tail_ratio", v.tail_ratio},
          {"tail_window", {v.window_lo, v.window_hi}}};
}

inline json report_json(const WienerReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json row = {{"k", r.k},
                {"r_lo", r.r_lo},
                {"r_hi", r.r_hi},
                {"n_points", r.n_points},
                {"gamma_k", r.gamma_k},
                {"lambda_k", r.lambda_k},
                {"term_minthin", r.term_minthin},
                {"term_rarefied", r.term_rarefied},
                {"partial_minthin", r.partial_minthin},
                {"partial_rarefied", r.partial_rarefied},
                {"residual", r.residual},
                {"active_fraction", r.active_fraction},
                {"coarsened", r.coarsened}};
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
  }
  return {{"rows", rows},
          {"minimally_thin", verdict_json(rep.minthin, false)},
          {"rarefied", verdict_json(rep.rarefied, true)},
          {"truncation_K", rep.K},
          {"thresholds",
           {{"rho_thin", rep.thresholds.rho_thin},
            {"eps_tail", rep.thresholds.eps_tail},
            {"delta_floor", rep.thresholds.delta_floor}}},
          {"notes", rep.notes}};
}

inline json oracle_json(const OracleComparison& o) {
  return {{"pairs", o.pairs},         {"seed", o.seed},
          {"C1", o.C1},               {"C2", o.C2},
          {"log_width", o.log_width}, {"log_width_limit", o.log_width_limit},
          {"within_limit", o.within_limit()}};
}

inline const std::vector<std::string>& modeling_notes() {
  static const std::vector<std::string> notes = {
      "lambda_k is the total mass of the discrete equilibrium measure of E_k",
      "on a finite point cloud the reduced function and its regularization coincide",
      "kernel constants C1, C2 are unknown; verdicts are invariant under rescaling of the kernel"};
  return notes;
}

/// Deterministic report body; timings are kept out of it.
inline json artifacts_json(const RunArtifacts& art) {
  json sets = json::array();
  for (const auto& s : art.sets) {
    json js = {{"name", s.name}, {"n_points", s.n_points}};
    if (!s.error.empty()) {
      js["error"] = s.error;
    } else {
      js["report"] = report_json(s.report);
      js["theorem8"] = {{"rarefied_but_not_thin", s.crosscheck.rarefied_but_not_thin},
                        {"subcone", s.crosscheck.subcone},
                        {"disagreement", s.crosscheck.disagreement},
                        {"consistent", s.crosscheck.consistent()}};
    }
    sets.push_back(js);
  }
  json j = {{"tool", kToolName},
            {"version", kToolVersion},
            {"config", config_echo(art.config)},
            {"modeling_notes", modeling_notes()},
            {"sets", sets},
            {"timings", "timings.json"}};
  if (art.oracle) j["oracle_comparison"] = oracle_json(*art.oracle);
  return j;
}

inline std::string safe_file_name(const std::string& name) {
  std::string out;
  for (char ch : name)
    out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_') ? ch : '_';
  return out.empty() ? "set" : out;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << text;
}

/// Writes report.json (format json/both), one <set>.csv per set (csv/both)
/// and timings.json.
inline void emit_report(const RunArtifacts& art, const std::string& directory,
                        const std::string& format) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (!fs::is_directory(directory)) throw Error("output directory '" + directory + "' is unusable");
  if (format == "json" || format == "both")
    write_text(fs::path(directory) / "report.json", artifacts_json(art).dump(2) + "\n");
  if (format == "csv" || format == "both")
    for (const auto& s : art.sets) {
      std::ostringstream os;
      write_report_csv(os, s.report);
      write_text(fs::path(directory) / (safe_file_name(s.name) + ".csv"), os.str());
    }
  json t(art.timings);
  write_text(fs::path(directory) / "timings.json", t.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Single-purpose reports used by the command-line subcommands.

inline json radial_json(const RunConfig& cfg, int samples = 41) {
  const auto ctx = make_context(cfg.cone, cfg.potential(), cfg.radial_tol, cfg.kernel.kappa_martin);
  const RadialBasis& B = ctx->basis;
  json rows = json::array();
  const double a = std::log(B.r_min()), b = std::log(B.r_max());
  for (int i = 0; i < samples; ++i) {
    const double r = std::exp(a + (b - a) * i / (samples - 1));
    const BasisValues v = eval_basis(B, r);
    rows.push_back({{"r", r}, {"V", v.V}, {"W", v.W}, {"dV", v.dV}, {"dW", v.dW}});
  }
  return {{"n", B.n},
          {"lambda", B.lambda},
          {"kappa", B.kappa},
          {"iota_plus", B.iota_plus},
          {"iota_minus", B.iota_minus},
          {"chi", B.chi},
          {"chi_prime", B.chi_prime},
          {"wronskian_residual", wronskian_residual(B)},
          {"tail_mode", B.tail_mode},
          {"samples", rows}};
}

inline json eigen_json(const RunConfig& cfg, int samples = 21) {
  const SphericalEigen e = solve_eigen(cfg.cone);
  json rows = json::array();
  const double tb = cfg.cone.boundary_colatitude();
  for (int i = 0; i < samples; ++i) {
    const double c = tb * i / (samples - 1);
    rows.push_back({{"colatitude", c}, {"phi", phi_of_colatitude(e, c)}});
  }
  return {{"shape", to_string(cfg.cone.shape)},
          {"n", cfg.cone.n},
          {"alpha", cfg.cone.alpha},
          {"lambda", e.lambda},
          {"nu", e.nu},
          {"J_Omega", e.J_Omega},
          {"normalization_residual", e.normalization_residual},
          {"boundary_normal_derivative", boundary_normal_derivative(e)},
          {"profile", rows}};
}

inline json boundary_json(const RunConfig& cfg) {
  if (!cfg.boundary) throw ConfigError("'boundary' section is required for this command");
  const KernelModel model = make_model(cfg);
  BoundaryOptions opt;
  opt.resolution = cfg.boundary->resolution;
  opt.annuli = cfg.boundary->annuli;
  opt.solver = cfg.solver;
  json sets = json::array();
  for (const auto& s : cfg.sets) {
    const BoundaryReport rep =
        thinness_at_boundary_point(s, cfg.boundary->Q, model, cfg.boundary->depth, cfg.thresholds, opt);
    json rows = json::array();
    for (const auto& r : rep.rows)
      rows.push_back({{"m", r.m}, {"radius", r.radius}, {"n_points", r.n_points}, {"r_m", r.r_m},
                      {"residual", r.residual}});
    sets.push_back({{"name", s.name},
                    {"rows", rows},
                    {"decay_ratio", rep.decay_ratio},
                    {"verdict", to_string(rep.verdict)}});
  }
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"config", config_echo(cfg)},
          {"Q", detail::point_json(cfg.boundary->Q)},
          {"sets", sets}};
}

inline json profile_json(const RunConfig& cfg) {
  if (!cfg.profile) throw ConfigError("'profile' section is required for this command");
  const KernelModel model = make_model(cfg);
  const ProfileConfig& p = *cfg.profile;
  const BlockDecomposition H = exceptional_set(p.v, model, p.k_lo, p.k_hi, p.resolution);
  const auto rows = asymptotic_profile(p.v, model, p.k_lo, p.k_hi, H, p.resolution);
  json jr = json::array();
  for (const auto& r : rows) {
    const auto it = H.blocks.find(r.k);
    jr.push_back({{"k", r.k},
                  {"n_points", r.n_points},
                  {"exceptional_points", it == H.blocks.end() ? 0 : it->second.size()},
                  {"sup_deviation", r.sup_deviation}});
  }
  return {{"tool", kToolName}, {"version", kToolVersion}, {"config", config_echo(cfg)}, {"rows", jr}};
}

}  // namespace wiener

#endif  // WIENER_PIPELINE_HPP
