#ifndef WIENER_CONFIG_HPP
#define WIENER_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wiener/capacity.hpp"
#include "wiener/criteria.hpp"
#include "wiener/error.hpp"
#include "wiener/kernels.hpp"
#include "wiener/radial.hpp"
#include "wiener/sets.hpp"
#include "wiener/spherical.hpp"

namespace wiener {

using json = nlohmann::json;

struct PerturbationConfig {
  /// none | log_gaussian | samples | csv
  std::string type = "none";
  double amplitude = 0.0;
  double center = 1.0;
  double width = 1.0;
  std::vector<double> r;
  std::vector<double> p;
  std::string path;
};

struct KernelConfig {
  KernelMode mode = KernelMode::surrogate;
  SurrogateForm form = SurrogateForm::blended;
  double c_mid = 1.0;
  double h_reg = 1e-2;
  double h_reg_factor = 0.42;
  double scale = 1.0;
  double kappa_martin = 1.0;
};

struct DiscretizationConfig {
  double resolution = 0.25;
  int k_lo = 0;
  int k_hi = 12;
  std::size_t point_cap = 4096;
  double subcone_margin = 1e-2;
};

struct BoundaryConfig {
  Point Q;
  int depth = 7;
  double resolution = 0.2;
  int annuli = 3;
};

struct ProfileConfig {
  Superfunction v;
  int k_lo = 0;
  int k_hi = 8;
  double resolution = 0.25;
};

struct OracleConfig {
  bool enabled = false;
  int pairs = 500;
};

struct OutputConfig {
  std::string directory;
  /// json | csv | both
  std::string format = "json";
};

struct RunConfig {
  DomainSpec cone;
  double kappa = 0.0;
  PerturbationConfig perturbation;
  double r_min = 1e-3;
  double r_max = 1e4;
  std::size_t grid_points = 2048;
  double radial_tol = 1e-8;
  KernelConfig kernel;
  DiscretizationConfig discretization;
  Thresholds thresholds;
  SolverOptions solver;
  std::vector<SetSpec> sets;
  std::optional<BoundaryConfig> boundary;
  std::optional<ProfileConfig> profile;
  OracleConfig oracle;
  OutputConfig output;
  std::uint64_t seed = 0;
  int threads = 1;

  PotentialSpec potential() const;
};

namespace detail {

inline double perturbation_log_gaussian(double r, double amp, double c, double w) {
  const double z = std::log(r / c) / w;
  return amp * std::exp(-z * z);
}

/// Collects unknown keys of every object visited.
class KeyChecker {
public:
  void check(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError("'" + path + "' must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!ok.count(it.key())) unknown_.push_back(path.empty() ? it.key() : path + "." + it.key());
  }
  void finish() const {
    if (unknown_.empty()) return;
    std::string msg = "unknown configuration keys:";
    for (const auto& k : unknown_) msg += " " + k;
    throw ConfigError(msg);
  }

private:
  std::vector<std::string> unknown_;
};

template <class T>
T get_or(const json& obj, const char* key, T dflt, const std::string& path) {
  if (!obj.contains(key)) return dflt;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("'" + path + "." + key + "' has the wrong type");
  }
}

inline Shape parse_shape(const std::string& s) {
  if (s == "arc") return Shape::arc;
  if (s == "cap") return Shape::cap;
  if (s == "half_sphere") return Shape::half_sphere;
  throw UnsupportedConfiguration("unsupported cone shape '" + s +
                                 "' (supported: arc, cap, half_sphere)");
}

inline Point parse_point(const json& j, int n, const std::string& path, KeyChecker& kc) {
  kc.check(j, path, {"r", "theta", "x"});
  if (j.contains("x")) {
    if (j.contains("r") || j.contains("theta"))
      throw ConfigError("'" + path + ".x' conflicts with '" + path + ".r'/'" + path + ".theta'");
    const auto x = j.at("x").get<std::vector<double>>();
    if (static_cast<int>(x.size()) != n)
      throw ConfigError("'" + path + ".x' must have cone.n = " + std::to_string(n) + " entries");
    return from_cartesian(x);
  }
  Point p;
  p.r = get_or<double>(j, "r", 1.0, path);
  p.theta = get_or<std::vector<double>>(j, "theta", std::vector<double>(n - 1, 0.0), path);
  if (static_cast<int>(p.theta.size()) != n - 1)
    throw ConfigError("'" + path + ".theta' must have cone.n - 1 = " + std::to_string(n - 1) +
                      " entries");
  return p;
}

inline json point_json(const Point& p) { return json{{"r", p.r}, {"theta", p.theta}}; }

inline AtomicMeasure parse_measure(const json& j, int n, const std::string& path, KeyChecker& kc) {
  AtomicMeasure m;
  if (!j.is_array()) throw ConfigError("'" + path + "' must be a list of atoms");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string ap = path + "[" + std::to_string(i) + "]";
    kc.check(j[i], ap, {"r", "theta", "x", "w"});
    json pj = j[i];
    pj.erase("w");
    KeyChecker inner;
    const Point p = parse_point(pj, n, ap, inner);
    const double w = get_or<double>(j[i], "w", 1.0, ap);
    if (!(w >= 0.0)) throw DomainError("'" + ap + ".w' must be nonnegative");
    m.add(p, w);
  }
  return m;
}

inline json measure_json(const AtomicMeasure& m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    json p = point_json(m.support[i]);
    p["w"] = m.weights[i];
    a.push_back(p);
  }
  return a;
}

inline Primitive parse_primitive(const json& j, int n, const std::string& path, KeyChecker& kc) {
  const std::string type = get_or<std::string>(j, "type", "", path);
  if (type == "ball") {
    kc.check(j, path, {"type", "center", "radius"});
    Ball b;
    if (!j.contains("center")) throw ConfigError("'" + path + ".center' is required");
    b.center = parse_point(j.at("center"), n, path + ".center", kc);
    b.radius = get_or<double>(j, "radius", 1.0, path);
    if (!(b.radius > 0.0)) throw DomainError("'" + path + ".radius' must be positive");
    return b;
  }
  if (type == "shell_sector") {
    kc.check(j, path, {"type", "k_lo", "k_hi", "alpha_sub"});
    ShellSector s;
    s.k_lo = get_or<int>(j, "k_lo", 0, path);
    s.k_hi = get_or<int>(j, "k_hi", s.k_lo, path);
    s.alpha_sub = get_or<double>(j, "alpha_sub", std::numbers::pi, path);
    if (s.k_hi < s.k_lo) throw ConfigError("'" + path + ".k_hi' is below '" + path + ".k_lo'");
    return s;
  }
  if (type == "axis_beads") {
    kc.check(j, path, {"type", "radius", "k_lo", "k_hi"});
    AxisBeads b;
    b.radius = get_or<double>(j, "radius", 1.0, path);
    b.k_lo = get_or<int>(j, "k_lo", 0, path);
    b.k_hi = get_or<int>(j, "k_hi", b.k_lo, path);
    if (!(b.radius > 0.0)) throw DomainError("'" + path + ".radius' must be positive");
    if (b.k_hi < b.k_lo) throw ConfigError("'" + path + ".k_hi' is below '" + path + ".k_lo'");
    return b;
  }
  if (type == "explicit_points") {
    kc.check(j, path, {"type", "points"});
    ExplicitPoints e;
    const json& pts = j.contains("points") ? j.at("points") : json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string pp = path + ".points[" + std::to_string(i) + "]";
      kc.check(pts[i], pp, {"r", "theta", "x", "h"});
      json pj = pts[i];
      pj.erase("h");
      KeyChecker inner;
      e.points.push_back(parse_point(pj, n, pp, inner));
      e.h.push_back(get_or<double>(pts[i], "h", 0.0, pp));
    }
    return e;
  }
  if (type == "boundary_cone") {
    kc.check(j, path, {"type", "Q", "half_angle", "reach"});
    BoundaryCone c;
    if (!j.contains("Q")) throw ConfigError("'" + path + ".Q' is required");
    c.Q = parse_point(j.at("Q"), n, path + ".Q", kc);
    c.half_angle = get_or<double>(j, "half_angle", std::numbers::pi / 4, path);
    c.reach = get_or<double>(j, "reach", 1.0, path);
    return c;
  }
  if (type == "boundary_cusp") {
    kc.check(j, path, {"type", "Q", "reach"});
    BoundaryCusp c;
    if (!j.contains("Q")) throw ConfigError("'" + path + ".Q' is required");
    c.Q = parse_point(j.at("Q"), n, path + ".Q", kc);
    c.reach = get_or<double>(j, "reach", 1.0, path);
    return c;
  }
  throw UnsupportedConfiguration("unsupported shape '" + type + "' at '" + path +
                                 ".type' (supported: ball, shell_sector, axis_beads, "
                                 "explicit_points, boundary_cone, boundary_cusp)");
}

inline json primitive_json(const Primitive& prim) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return {{"type", "ball"}, {"center", point_json(s.center)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, ShellSector>) {
          return {{"type", "shell_sector"}, {"k_lo", s.k_lo}, {"k_hi", s.k_hi}, {"alpha_sub", s.alpha_sub}};
        } else if constexpr (std::is_same_v<T, AxisBeads>) {
          return {{"type", "axis_beads"}, {"radius", s.radius}, {"k_lo", s.k_lo}, {"k_hi", s.k_hi}};
        } else if constexpr (std::is_same_v<T, ExplicitPoints>) {
          json pts = json::array();
          for (std::size_t i = 0; i < s.points.size(); ++i) {
            json p = point_json(s.points[i]);
            p["h"] = i < s.h.size() ? s.h[i] : 0.0;
            pts.push_back(p);
          }
          return {{"type", "explicit_points"}, {"points", pts}};
        } else if constexpr (std::is_same_v<T, BoundaryCone>) {
          return {{"type", "boundary_cone"}, {"Q", point_json(s.Q)}, {"half_angle", s.half_angle},
                  {"reach", s.reach}};
        } else {
          return {{"type", "boundary_cusp"}, {"Q", point_json(s.Q)}, {"reach", s.reach}};
        }
      },
      prim);
}

}  // namespace detail

inline PotentialSpec RunConfig::potential() const {
  PotentialSpec p;
  p.kappa = kappa;
  p.r_min = r_min;
  p.r_max = r_max;
  p.grid_points = grid_points;
  const PerturbationConfig& c = perturbation;
  if (c.type == "log_gaussian") {
    const double a = c.amplitude, m = c.center, w = c.width;
    p.perturbation = Perturbation::closed_form(
        [a, m, w](double r) { return detail::perturbation_log_gaussian(r, a, m, w); },
        "log_gaussian");
  } else if (c.type == "samples") {
    p.perturbation = Perturbation::samples(c.r, c.p);
  } else if (c.type == "csv") {
    p.perturbation = read_perturbation_csv(c.path);
  }
  return p;
}

/// Cross-field checks shared by the parser and command-line overrides.
inline void validate_config(const RunConfig& c) {
  c.cone.validate();
  const bool zero_potential = c.kappa == 0.0 && c.perturbation.type == "none";
  if (c.kernel.mode == KernelMode::halfspace_oracle) {
    if (c.cone.n != 3)
      throw ConfigError("'kernel.mode' = halfspace_oracle is inconsistent with 'cone.n' = " +
                        std::to_string(c.cone.n) + " (needs 3)");
    if (c.cone.shape != Shape::half_sphere)
      throw ConfigError("'kernel.mode' = halfspace_oracle is inconsistent with 'cone.shape' = " +
                        to_string(c.cone.shape) + " (needs half_sphere)");
    if (!zero_potential)
      throw ConfigError("'kernel.mode' = halfspace_oracle is inconsistent with 'potential' "
                        "(needs kappa = 0 and no perturbation)");
  }
  if (!(c.r_min > 0.0 && c.r_max > c.r_min))
    throw ConfigError("'potential.r_min' and 'potential.r_max' must satisfy 0 < r_min < r_max");
  const auto& d = c.discretization;
  if (d.k_hi < d.k_lo)
    throw ConfigError("'discretization.k_range' upper end is below its lower end");
  if (std::ldexp(1.0, d.k_lo) < c.r_min || std::ldexp(1.0, d.k_hi + 1) > c.r_max)
    throw ConfigError("'discretization.k_range' = [" + std::to_string(d.k_lo) + ", " +
                      std::to_string(d.k_hi) +
                      "] is not covered by 'potential.r_min'/'potential.r_max'");
  if (!(d.resolution > 0.0 && d.resolution < 1.0))
    throw ConfigError("'discretization.resolution' must lie in (0, 1)");
  if (c.output.format != "json" && c.output.format != "csv" && c.output.format != "both")
    throw ConfigError("'output.format' must be json, csv or both");
  if (c.threads < 1) throw ConfigError("'threads' must be >= 1");
  if (c.boundary) {
    const double tb = c.cone.boundary_colatitude();
    if (std::abs(std::abs(c.boundary->Q.colatitude()) - tb) > 1e-9)
      throw ConfigError("'boundary.Q' is not on the lateral boundary of 'cone'");
  }
  if (c.perturbation.type != "none" && c.perturbation.type != "log_gaussian" &&
      c.perturbation.type != "samples" && c.perturbation.type != "csv")
    throw ConfigError("'potential.perturbation.type' must be none, log_gaussian, samples or csv");
}

inline RunConfig parse_config_json(const json& root) {
  detail::KeyChecker kc;
  kc.check(root, "", {"cone", "potential", "kernel", "discretization", "thresholds", "solver",
                      "sets", "boundary", "profile", "oracle", "output", "seed", "threads"});
  RunConfig c;
  using detail::get_or;

  if (!root.contains("cone")) throw ConfigError("'cone' section is required");
  {
    const json& j = root.at("cone");
    kc.check(j, "cone", {"n", "shape", "alpha"});
    c.cone.n = get_or<int>(j, "n", 3, "cone");
    c.cone.shape = detail::parse_shape(get_or<std::string>(j, "shape", "half_sphere", "cone"));
    if (c.cone.shape != Shape::half_sphere && !j.contains("alpha"))
      throw ConfigError("'cone.alpha' is required for 'cone.shape' = " + to_string(c.cone.shape));
    c.cone.alpha = get_or<double>(j, "alpha", std::numbers::pi / 2, "cone");
    c.cone.validate();
  }
  const int n = c.cone.n;
  if (root.contains("potential")) {
    const json& j = root.at("potential");
    kc.check(j, "potential", {"kappa", "perturbation", "r_min", "r_max", "grid_points", "tol"});
    c.kappa = get_or<double>(j, "kappa", 0.0, "potential");
    c.r_min = get_or<double>(j, "r_min", c.r_min, "potential");
    c.r_max = get_or<double>(j, "r_max", c.r_max, "potential");
    c.grid_points = get_or<std::size_t>(j, "grid_points", c.grid_points, "potential");
    c.radial_tol = get_or<double>(j, "tol", c.radial_tol, "potential");
    if (j.contains("perturbation")) {
      const json& pj = j.at("perturbation");
      const std::string pp = "potential.perturbation";
      kc.check(pj, pp, {"type", "amplitude", "center", "width", "r", "p", "path"});
      auto& pc = c.perturbation;
      pc.type = get_or<std::string>(pj, "type", "none", pp);
      pc.amplitude = get_or<double>(pj, "amplitude", 0.0, pp);
      pc.center = get_or<double>(pj, "center", 1.0, pp);
      pc.width = get_or<double>(pj, "width", 1.0, pp);
      pc.r = get_or<std::vector<double>>(pj, "r", {}, pp);
      pc.p = get_or<std::vector<double>>(pj, "p", {}, pp);
      pc.path = get_or<std::string>(pj, "path", "", pp);
      if (pc.type == "log_gaussian" && !(pc.center > 0.0 && pc.width > 0.0))
        throw DomainError("'potential.perturbation.center' and '.width' must be positive");
    }
  }
  if (root.contains("kernel")) {
    const json& j = root.at("kernel");
    kc.check(j, "kernel", {"mode", "form", "c_mid", "h_reg", "h_reg_factor", "scale", "kappa_martin"});
    const std::string mode = get_or<std::string>(j, "mode", "surrogate", "kernel");
    if (mode == "surrogate")
      c.kernel.mode = KernelMode::surrogate;
    else if (mode == "halfspace_oracle" || mode == "oracle")
      c.kernel.mode = KernelMode::halfspace_oracle;
    else
      throw ConfigError("'kernel.mode' must be surrogate or halfspace_oracle");
    const std::string form = get_or<std::string>(j, "form", "blended", "kernel");
    if (form == "blended")
      c.kernel.form = SurrogateForm::blended;
    else if (form == "min")
      c.kernel.form = SurrogateForm::min;
    else
      throw ConfigError("'kernel.form' must be blended or min");
    c.kernel.c_mid = get_or<double>(j, "c_mid", 1.0, "kernel");
    c.kernel.h_reg = get_or<double>(j, "h_reg", 1e-2, "kernel");
    c.kernel.h_reg_factor = get_or<double>(j, "h_reg_factor", 0.42, "kernel");
    c.kernel.scale = get_or<double>(j, "scale", 1.0, "kernel");
    c.kernel.kappa_martin = get_or<double>(j, "kappa_martin", 1.0, "kernel");
    if (!(c.kernel.c_mid > 0.0 && c.kernel.h_reg > 0.0 && c.kernel.h_reg_factor > 0.0 &&
          c.kernel.scale > 0.0 && c.kernel.kappa_martin > 0.0))
      throw DomainError("'kernel' constants must be positive");
  }
  if (root.contains("discretization")) {
    const json& j = root.at("discretization");
    kc.check(j, "discretization", {"resolution", "k_range", "point_cap", "subcone_margin"});
    auto& d = c.discretization;
    d.resolution = get_or<double>(j, "resolution", d.resolution, "discretization");
    const auto kr = get_or<std::vector<int>>(j, "k_range", {d.k_lo, d.k_hi}, "discretization");
    if (kr.size() != 2) throw ConfigError("'discretization.k_range' must be [k_lo, k_hi]");
    d.k_lo = kr[0];
    d.k_hi = kr[1];
    d.point_cap = get_or<std::size_t>(j, "point_cap", d.point_cap, "discretization");
    d.subcone_margin = get_or<double>(j, "subcone_margin", d.subcone_margin, "discretization");
  }
  if (root.contains("thresholds")) {
    const json& j = root.at("thresholds");
    kc.check(j, "thresholds", {"rho_thin", "eps_tail", "delta_floor"});
    c.thresholds.rho_thin = get_or<double>(j, "rho_thin", 0.9, "thresholds");
    c.thresholds.eps_tail = get_or<double>(j, "eps_tail", 1e-3, "thresholds");
    c.thresholds.delta_floor = get_or<double>(j, "delta_floor", 0.1, "thresholds");
  }
  if (root.contains("solver")) {
    const json& j = root.at("solver");
    kc.check(j, "solver", {"tol", "max_iterations"});
    c.solver.tol = get_or<double>(j, "tol", 1e-8, "solver");
    c.solver.max_iterations = get_or<int>(j, "max_iterations", 0, "solver");
  }
  if (root.contains("sets")) {
    const json& arr = root.at("sets");
    if (!arr.is_array()) throw ConfigError("'sets' must be a list");
    std::set<std::string> names;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string sp = "sets[" + std::to_string(i) + "]";
      kc.check(arr[i], sp, {"name", "shapes"});
      SetSpec s;
      s.name = get_or<std::string>(arr[i], "name", "set" + std::to_string(i), sp);
      if (!names.insert(s.name).second) throw ConfigError("duplicate set name '" + s.name + "'");
      const json& shapes = arr[i].contains("shapes") ? arr[i].at("shapes") : json::array();
      if (!shapes.is_array()) throw ConfigError("'" + sp + ".shapes' must be a list");
      for (std::size_t k = 0; k < shapes.size(); ++k)
        s.shapes.push_back(
            detail::parse_primitive(shapes[k], n, sp + ".shapes[" + std::to_string(k) + "]", kc));
      c.sets.push_back(std::move(s));
    }
  }
  if (root.contains("boundary")) {
    const json& j = root.at("boundary");
    kc.check(j, "boundary", {"Q", "depth", "resolution", "annuli"});
    BoundaryConfig b;
    if (j.contains("Q")) {
      b.Q = detail::parse_point(j.at("Q"), n, "boundary.Q", kc);
    } else {
      b.Q.r = 1.0;
      b.Q.theta.assign(static_cast<std::size_t>(n - 1), 0.0);
      b.Q.theta[0] = c.cone.boundary_colatitude();
    }
    b.depth = get_or<int>(j, "depth", b.depth, "boundary");
    b.resolution = get_or<double>(j, "resolution", b.resolution, "boundary");
    b.annuli = get_or<int>(j, "annuli", b.annuli, "boundary");
    c.boundary = b;
  }
  if (root.contains("profile")) {
    const json& j = root.at("profile");
    kc.check(j, "profile", {"superfunction", "k_range", "resolution"});
    ProfileConfig pc;
    if (j.contains("superfunction")) {
      const json& v = j.at("superfunction");
      const std::string vp = "profile.superfunction";
      kc.check(v, vp, {"c_inf", "c_origin", "mu", "nu"});
      pc.v.c_inf = get_or<double>(v, "c_inf", 0.0, vp);
      pc.v.c_origin = get_or<double>(v, "c_origin", 0.0, vp);
      if (v.contains("mu")) pc.v.mu = detail::parse_measure(v.at("mu"), n, vp + ".mu", kc);
      if (v.contains("nu")) pc.v.nu = detail::parse_measure(v.at("nu"), n, vp + ".nu", kc);
      pc.v.validate();
    }
    const auto kr = get_or<std::vector<int>>(j, "k_range", {pc.k_lo, pc.k_hi}, "profile");
    if (kr.size() != 2) throw ConfigError("'profile.k_range' must be [k_lo, k_hi]");
    pc.k_lo = kr[0];
    pc.k_hi = kr[1];
    pc.resolution = get_or<double>(j, "resolution", pc.resolution, "profile");
    c.profile = pc;
  }
  if (root.contains("oracle")) {
    const json& j = root.at("oracle");
    kc.check(j, "oracle", {"enabled", "pairs"});
    c.oracle.enabled = get_or<bool>(j, "enabled", false, "oracle");
    c.oracle.pairs = get_or<int>(j, "pairs", 500, "oracle");
  }
  if (root.contains("output")) {
    const json& j = root.at("output");
    kc.check(j, "output", {"directory", "format"});
    c.output.directory = get_or<std::string>(j, "directory", "", "output");
    c.output.format = get_or<std::string>(j, "format", "json", "output");
  }
  c.seed = get_or<std::uint64_t>(root, "seed", 0, "");
  c.threads = get_or<int>(root, "threads", 1, "");
  kc.finish();
  validate_config(c);
  return c;
}

inline RunConfig parse_config_string(const std::string& text) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  return parse_config_json(root);
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str());
}

/// Full configuration with every default filled in.
inline json config_echo(const RunConfig& c) {
  json j;
  j["cone"] = {{"n", c.cone.n}, {"shape", to_string(c.cone.shape)}, {"alpha", c.cone.alpha}};
  json pert = {{"type", c.perturbation.type}};
  if (c.perturbation.type == "log_gaussian") {
    pert["amplitude"] = c.perturbation.amplitude;
    pert["center"] = c.perturbation.center;
    pert["width"] = c.perturbation.width;
  } else if (c.perturbation.type == "samples") {
    pert["r"] = c.perturbation.r;
    pert["p"] = c.perturbation.p;
  } else if (c.perturbation.type == "csv") {
    pert["path"] = c.perturbation.path;
  }
  j["potential"] = {{"kappa", c.kappa}, {"perturbation", pert}, {"r_min", c.r_min},
                    {"r_max", c.r_max}, {"grid_points", c.grid_points}, {"tol", c.radial_tol}};
  j["kernel"] = {{"mode", to_string(c.kernel.mode)}, {"form", to_string(c.kernel.form)},
                 {"c_mid", c.kernel.c_mid}, {"h_reg", c.kernel.h_reg},
                 {"h_reg_factor", c.kernel.h_reg_factor}, {"scale", c.kernel.scale},
                 {"kappa_martin", c.kernel.kappa_martin}};
  const auto& d = c.discretization;
  j["discretization"] = {{"resolution", d.resolution}, {"k_range", {d.k_lo, d.k_hi}},
                         {"point_cap", d.point_cap}, {"subcone_margin", d.subcone_margin}};
  j["thresholds"] = {{"rho_thin", c.thresholds.rho_thin}, {"eps_tail", c.thresholds.eps_tail},
                     {"delta_floor", c.thresholds.delta_floor}};
  j["solver"] = {{"tol", c.solver.tol}, {"max_iterations", c.solver.max_iterations}};
  json sets = json::array();
  for (const auto& s : c.sets) {
    json shapes = json::array();
    for (const auto& p : s.shapes) shapes.push_back(detail::primitive_json(p));
    sets.push_back({{"name", s.name}, {"shapes", shapes}});
  }
  j["sets"] = sets;
  if (c.boundary)
    j["boundary"] = {{"Q", detail::point_json(c.boundary->Q)}, {"depth", c.boundary->depth},
                     {"resolution", c.boundary->resolution}, {"annuli", c.boundary->annuli}};
  if (c.profile)
    j["profile"] = {{"superfunction",
                     {{"c_inf", c.profile->v.c_inf},
                      {"c_origin", c.profile->v.c_origin},
                      {"mu", detail::measure_json(c.profile->v.mu)},
                      {"nu", detail::measure_json(c.profile->v.nu)}}},
                    {"k_range", {c.profile->k_lo, c.profile->k_hi}},
                    {"resolution", c.profile->resolution}};
  j["oracle"] = {{"enabled", c.oracle.enabled}, {"pairs", c.oracle.pairs}};
  j["output"] = {{"directory", c.output.directory}, {"format", c.output.format}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j;
}

}  // namespace wiener

#endif  // WIENER_CONFIG_HPP
