// vdcbench: simulate, zwidth, verify, describe.
//
// Exit codes: 0 ok, 1 verification failure, 2 config error, 3 numeric blow-up.

#include "vdc/config.hpp"
#include "vdc/errors.hpp"
#include "vdc/experiments.hpp"
#include "vdc/simulation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace vdc;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kConfigError = 2;
constexpr int kBlowUp = 3;

struct Common {
  std::string config;
  std::string preset;
  std::vector<std::string> overrides;
  std::string out;
  long long seed = -1;
};

void add_common(CLI::App* cmd, Common& c, const std::string& default_preset) {
  c.preset = default_preset;
  cmd->add_option("-c,--config", c.config, "scenario config file (JSON)");
  cmd->add_option("-p,--preset", c.preset, "starting preset when the config names none")->capture_default_str();
  cmd->add_option("-o,--override", c.overrides, "key=value, repeatable (e.g. wall.k_e=1500)");
  cmd->add_option("--out", c.out, "output directory (default: $VDCBENCH_OUT or ./out)");
  cmd->add_option("--seed", c.seed, "overrides the config seed");
}

Config build_config(const Common& c) {
  Config cfg;
  std::string base_dir;
  if (!c.config.empty()) {
    cfg = load_config(c.config, c.preset);
    base_dir = fs::path(c.config).parent_path().string();
  } else {
    cfg = default_config(c.preset);
  }
  for (const std::string& o : c.overrides) apply_override(cfg, o);
  if (c.seed >= 0) cfg.scenario.seed = static_cast<std::uint64_t>(c.seed);
  finalize(cfg, base_dir);
  return cfg;
}

fs::path output_dir(const Common& c) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv("VDCBENCH_OUT"); env && *env) return env;
  return "out";
}

// Writes through a temporary name so an interrupted run leaves no partial file.
void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    body(os);
  }
  fs::rename(tmp, path);
}

void print_summary(const Scenario& s, const RunSummary& r) {
  std::cout << std::fixed << std::setprecision(4);
  std::cout << "run            " << s.name << "\n"
            << "status         " << (r.completed ? "completed" : "failed: " + r.failure) << "\n"
            << "rms e_p z      " << 1e3 * r.rms_ep_z << " mm\n"
            << "rms e_p xy     " << 1e3 * r.rms_ep_xy << " mm\n"
            << "max e_p xy     " << 1e3 * r.max_ep_xy << " mm\n"
            << "rms e_o        " << r.rms_eo_deg << " deg\n"
            << "rms tau        " << r.rms_tau << " N m\n"
            << "max f_c        " << r.max_contact_force << " N\n"
            << std::scientific << std::setprecision(3)
            << "min E_c        " << r.min_energy << " J\n"
            << "passive        " << (r.passive ? "yes" : "no") << "\n";
}

int run_simulate(const Common& c) {
  const Config cfg = build_config(c);
  const fs::path dir = output_dir(c);
  const RunLog log = run_scenario(cfg.scenario);
  fs::create_directories(dir);
  const int dof = cfg.scenario.model->dof();
  write_file(dir / (cfg.scenario.name + ".csv"), [&](std::ostream& os) { write_csv(os, log, dof); });
  write_file(dir / (cfg.scenario.name + ".json"), [&](std::ostream& os) {
    os << summary_json(cfg.scenario, log) << "\n";
  });
  print_summary(cfg.scenario, log.summary);
  return log.summary.blew_up ? kBlowUp : kOk;
}

int run_zwidth(const Common& c, int workers, const std::string& checkpoint, bool fresh) {
  const Config cfg = build_config(c);
  const fs::path dir = output_dir(c);
  fs::create_directories(dir);
  SweepOptions opt;
  opt.workers = workers;
  opt.checkpoint = checkpoint.empty() ? (dir / "zwidth.checkpoint").string() : checkpoint;
  if (fresh) fs::remove(opt.checkpoint);
  opt.progress = [](const std::string& m) { std::cerr << m << std::endl; };
  bool complete = false;
  const ZWidthResult r = zwidth_sweep(cfg.zwidth, opt, &complete);
  write_file(dir / "zwidth_mass.csv", [&](std::ostream& os) { write_curve_csv(os, r.mass); });
  write_file(dir / "zwidth_damping.csv", [&](std::ostream& os) { write_curve_csv(os, r.damping); });
  write_file(dir / "zwidth.json", [&](std::ostream& os) { os << zwidth_json(cfg.zwidth, r) << "\n"; });
  std::cout << "mass curve monotone:    " << (r.mass.monotone() ? "yes" : "no") << "\n"
            << "damping curve monotone: " << (r.damping.monotone() ? "yes" : "no") << "\n";
  return complete ? kOk : kVerifyFailed;
}

int run_verify(bool verbose, const std::string& inject, int samples) {
  VerifyOptions opt;
  opt.samples = samples;
  if (inject == "regressor") {
    // Halves the h_x column.
    opt.regressor_mutation = [](const Mat6x10& w) {
      Mat6x10 m = w;
      m.col(1) *= 0.5;
      return m;
    };
  } else if (!inject.empty()) {
    throw ConfigError("--inject", "unknown fault '" + inject + "' (known: regressor)");
  }
  const auto results = verify_suite(opt);
  print_report(std::cout, results, verbose);
  for (const auto& r : results) {
    if (!r.passed()) return kVerifyFailed;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification bench for adaptive impedance control of a 7-DoF arm"};
  app.require_subcommand(1);

  Common sim_opts, zw_opts;
  auto* sim = app.add_subcommand("simulate", "run one scenario; writes <name>.csv and <name>.json");
  add_common(sim, sim_opts, "default");

  auto* zw = app.add_subcommand("zwidth", "Z-width sweep over the damping and varying-mass grids");
  add_common(zw, zw_opts, "zwidth");
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string checkpoint;
  bool fresh = false;
  zw->add_option("-j,--workers", workers, "worker threads")->capture_default_str();
  zw->add_option("--checkpoint", checkpoint, "checkpoint file (default: <out>/zwidth.checkpoint)");
  zw->add_flag("--fresh", fresh, "ignore an existing checkpoint");

  auto* ver = app.add_subcommand("verify", "run the invariant suite");
  bool verbose = false;
  std::string inject;
  int samples = 200;
  ver->add_flag("-v,--verbose", verbose, "list every property with its tolerance");
  ver->add_option("--inject", inject, "inject a known fault (regressor) to exercise the suite");
  ver->add_option("--samples", samples, "random cases per property")->capture_default_str();

  auto* desc = app.add_subcommand("describe", "print the config schema with defaults");
  std::string robot_out;
  desc->add_option("--robot", robot_out, "also write the built-in arm as a robot file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*sim) return run_simulate(sim_opts);
    if (*zw) return run_zwidth(zw_opts, workers, checkpoint, fresh);
    if (*ver) return run_verify(verbose, inject, samples);
    if (*desc) {
      std::cout << describe_schema().dump(2) << "\n";
      if (!robot_out.empty()) {
        write_file(robot_out, [](std::ostream& os) { os << robot_to_json(RobotModel::default_arm()).dump(2) << "\n"; });
      }
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalFault& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kBlowUp;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
