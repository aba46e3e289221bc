// Command-line front end: run scenarios, verify suites, list presets, manage
// the corrector cache.
//
// Exit codes: 0 ok, 2 analytic-radius breach, 3 CFL, 4 numeric fault, 5 config.
// `verify` exits 1 when any check fails.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "prandtl/config.hpp"
#include "prandtl/errors.hpp"
#include "prandtl/io.hpp"
#include "prandtl/simulation.hpp"
#include "prandtl/verify.hpp"

namespace {

constexpr int kConfigExit = 5;

int config_failure(const prandtl::Error& e) {
  std::cerr << "configuration error: " << e.what() << '\n';
  return kConfigExit;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, bool quiet) {
  prandtl::ScenarioConfig cfg;
  try {
    cfg = prandtl::parse_config(config_path);
  } catch (const prandtl::ConfigError& e) {
    return config_failure(e);
  }
  std::cout << prandtl::to_text(cfg) << std::flush;
  try {
    long seen = 0;
    auto observer = [&](const prandtl::DiagnosticsRecord& r) {
      if (quiet) return;
      if (seen++ % 100 == 0) {
        std::fprintf(stderr, "t = %10.4f  theta = %.6e  |e^Psi u|_B = %.6e\n", r.t, r.theta, r.norms[0]);
      }
    };
    const auto result = prandtl::run_simulation(cfg, observer);
    prandtl::write_run_outputs(result, out_dir);
    std::cout << "status: " << prandtl::status_name(result.status) << '\n'
              << "message: " << result.message << '\n'
              << "corrector cache hit: " << (result.corrector_cache_hit ? "yes" : "no") << '\n'
              << "outputs: " << out_dir << '\n';
    return prandtl::exit_code(result.status);
  } catch (const prandtl::ConfigError& e) {
    return config_failure(e);
  } catch (const prandtl::ConstraintError& e) {
    return config_failure(e);
  } catch (const prandtl::DivergenceError& e) {
    return config_failure(e);
  }
}

int cmd_verify(const std::string& suite, const std::string& json_path) {
  std::vector<prandtl::VerifyReport> reports;
  try {
    reports = prandtl::run_verify(suite);
  } catch (const prandtl::ConfigError& e) {
    return config_failure(e);
  }
  bool ok = true;
  for (const auto& r : reports) {
    for (const auto& c : r.checks) {
      std::printf("%s %s.%s measured=%.6e %s %.6e%s%s\n", c.passed ? "PASS" : "FAIL", r.suite.c_str(),
                  c.name.c_str(), c.measured, c.relation.c_str(), c.tolerance, c.detail.empty() ? "" : "  # ",
                  c.detail.c_str());
    }
    ok = ok && r.passed();
  }
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    out << prandtl::verify_json(reports);
  }
  return ok ? 0 : 1;
}

int cmd_presets() {
  for (const auto& p : prandtl::preset_table()) std::cout << p.name << "\t" << p.purpose << '\n';
  return 0;
}

int cmd_cache_build(const std::string& config_path, const std::string& dir) {
  try {
    auto cfg = prandtl::parse_config(config_path);
    if (!dir.empty()) cfg.cache_dir = dir;
    if (cfg.cache_dir.empty()) {
      throw prandtl::ConfigError("no cache directory: set cache_dir or pass --dir", "cache_dir");
    }
    const auto grid = prandtl::Grid::make(cfg.nx, cfg.length, cfg.ny, cfg.ymax);
    bool hit = false;
    const auto traj = prandtl::build_corrector(cfg, grid->vertical_ptr(), &hit);
    if (!traj) {
      std::cout << "no corrector needed (epsilon = 0 or f = 0)\n";
    } else {
      std::cout << (hit ? "already cached" : "built") << ": " << traj->times().size() << " snapshots in "
                << cfg.cache_dir << '\n';
    }
    return 0;
  } catch (const prandtl::Error& e) {
    return config_failure(e);
  }
}

int cmd_cache_clear(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::exists(dir)) return 0;
  int removed = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("corrector-", 0) == 0) {
      fs::remove(entry.path());
      ++removed;
    }
  }
  std::cout << "removed " << removed << " cached corrector file(s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analytic-radius Prandtl boundary-layer solver"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  bool quiet = false;
  auto* run = app.add_subcommand("run", "run a scenario");
  run->add_option("config", config_path, "scenario file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--quiet", quiet, "no progress lines");

  std::string suite, json_path;
  auto* verify = app.add_subcommand("verify", "run an oracle suite (treves, lp, corrector, heat, g0, all)");
  verify->add_option("suite", suite)->required();
  verify->add_option("--json", json_path, "also write the report as JSON");

  auto* presets = app.add_subcommand("presets", "preset library");
  auto* presets_list = presets->add_subcommand("list", "list presets");
  std::string show_name;
  auto* presets_show = presets->add_subcommand("show", "print the resolved configuration of a preset");
  presets_show->add_option("name", show_name)->required();
  presets->require_subcommand(1);

  auto* cache = app.add_subcommand("corrector-cache", "precompute or clear cached corrector trajectories");
  std::string cache_config, cache_dir;
  auto* cache_build = cache->add_subcommand("build", "solve and store the corrector for a scenario");
  cache_build->add_option("config", cache_config)->required();
  cache_build->add_option("--dir", cache_dir, "cache directory (overrides cache_dir)");
  auto* cache_clear = cache->add_subcommand("clear", "remove cached trajectories");
  std::string clear_dir = "corrector-cache";
  cache_clear->add_option("--dir", clear_dir, "cache directory");
  cache->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  if (*run) return cmd_run(config_path, out_dir, quiet);
  if (*verify) return cmd_verify(suite, json_path);
  if (*presets_list) return cmd_presets();
  if (*presets_show) {
    try {
      std::cout << prandtl::to_text(prandtl::preset_config(show_name));
      return 0;
    } catch (const prandtl::ConfigError& e) {
      return config_failure(e);
    }
  }
  if (*cache_build) return cmd_cache_build(cache_config, cache_dir);
  if (*cache_clear) return cmd_cache_clear(clear_dir);
  return kConfigExit;
}
