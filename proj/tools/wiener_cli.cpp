// Batch front end: wiener_cli <command> --config run.json [--out DIR] ...
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wiener/wiener.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3 };

struct Flags {
  std::string config;
  std::string out;
  std::string format;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  bool oracle = false;
};

wiener::RunConfig load(const Flags& f) {
  wiener::RunConfig cfg = wiener::parse_config(f.config);
  if (f.seed_set) cfg.seed = f.seed;
  if (f.threads > 0) cfg.threads = f.threads;
  if (!f.format.empty()) cfg.output.format = f.format;
  if (f.oracle) {
    cfg.kernel.mode = wiener::KernelMode::halfspace_oracle;
    cfg.oracle.enabled = true;
  }
  wiener::validate_config(cfg);
  return cfg;
}

std::string out_dir(const Flags& f, const wiener::RunConfig& cfg) {
  if (!f.out.empty()) return f.out;
  if (!cfg.output.directory.empty()) return cfg.output.directory;
  if (const char* env = std::getenv("WIENER_OUT_DIR"); env && *env) return env;
  return "wiener_out";
}

void write_json(const std::string& dir, const std::string& name, const wiener::json& j) {
  std::filesystem::create_directories(dir);
  wiener::write_text(std::filesystem::path(dir) / name, j.dump(2) + "\n");
  std::cout << (std::filesystem::path(dir) / name).string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wiener-type criteria for thin sets in cones"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&f](CLI::App* sub, bool needs_config = true) {
    auto* c = sub->add_option("--config", f.config, "run configuration (JSON)");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "output directory (default: $WIENER_OUT_DIR or ./wiener_out)");
    sub->add_option("--format", f.format, "json | csv | both")
        ->check(CLI::IsMember({"json", "csv", "both"}));
    sub->add_option("--seed", f.seed, "random seed")->each([&f](const std::string&) { f.seed_set = true; });
    sub->add_option("--threads", f.threads, "worker threads for block solves");
    sub->add_flag("--oracle", f.oracle, "use the exact half-space kernel (n = 3, a = 0)");
  };
  auto* radial = app.add_subcommand("radial", "radial fundamental pair V, W");
  auto* eigen = app.add_subcommand("eigen", "least Dirichlet eigenpair of the cross-section");
  auto* classify = app.add_subcommand("classify", "Wiener series and verdicts at infinity");
  auto* profile = app.add_subcommand("profile", "exceptional set and asymptotic profile");
  auto* boundary = app.add_subcommand("boundary", "thinness at a lateral boundary point");
  auto* oracle = app.add_subcommand("oracle-compare", "envelope of the half-space Green function");
  for (auto* s : {radial, eigen, classify, profile, boundary}) common(s);
  common(oracle, false);
  auto* pairs = oracle->add_option("--pairs", "number of random separated pairs")->default_val(500);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    if (oracle->parsed()) {
      wiener::RunConfig cfg;
      if (!f.config.empty()) cfg = load(f);
      const int n = pairs->as<int>();
      const wiener::json j = {{"tool", wiener::kToolName},
                              {"version", wiener::kToolVersion},
                              {"oracle_comparison",
                               wiener::oracle_json(wiener::oracle_compare(n, f.seed_set ? f.seed : cfg.seed))}};
      write_json(out_dir(f, cfg), "oracle.json", j);
      return kOk;
    }
    const wiener::RunConfig cfg = load(f);
    const std::string dir = out_dir(f, cfg);
    if (radial->parsed()) {
      write_json(dir, "radial.json", wiener::radial_json(cfg));
    } else if (eigen->parsed()) {
      write_json(dir, "eigen.json", wiener::eigen_json(cfg));
    } else if (profile->parsed()) {
      write_json(dir, "profile.json", wiener::profile_json(cfg));
    } else if (boundary->parsed()) {
      write_json(dir, "boundary.json", wiener::boundary_json(cfg));
    } else {
      const wiener::RunArtifacts art = wiener::run_pipeline(cfg);
      wiener::emit_report(art, dir, cfg.output.format);
      for (const auto& s : art.sets) {
        if (!s.error.empty()) {
          std::cerr << "set '" << s.name << "': " << s.error << "\n";
          continue;
        }
        std::cout << s.name << ": " << wiener::to_string(s.report.minthin.verdict) << " / "
                  << wiener::to_string(s.report.rarefied.verdict, true) << "\n";
        for (const auto& r : s.report.rows)
          if (!r.error.empty()) std::cerr << "set '" << s.name << "' block " << r.k << ": " << r.error << "\n";
      }
      if (art.any_error()) return kNumerical;
    }
  } catch (const wiener::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const wiener::DomainError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const wiener::UnsupportedConfiguration& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const wiener::RejectedPotential& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const wiener::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}
