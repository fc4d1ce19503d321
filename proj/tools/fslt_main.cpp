#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "fslt/fslt.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kNumerical = 3 };

int report_error(int code, const std::string& kind, const std::string& message,
                 const std::vector<std::string>& details = {}) {
  nlohmann::json rec{{"error", kind}, {"exit_code", code}, {"message", message}};
  if (!details.empty()) rec["details"] = details;
  std::cerr << rec.dump() << '\n';
  return code;
}

struct CommonArgs {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool force = false;
  int verbosity = 0;
  std::optional<std::string> model;
  std::optional<int> n;
  bool during_pump = false;
};

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("-c,--config", a.config, "YAML experiment configuration (empty = defaults)");
  sub->add_option("-o,--out", a.out, "output directory");
  sub->add_option("--seed", a.seed, "override disorder.seed");
  sub->add_option("-j,--threads", a.threads, "worker threads (0 = all cores)");
  sub->add_flag("-f,--force", a.force, "overwrite existing outputs");
  sub->add_flag("-v,--verbose", a.verbosity, "verbose progress on stderr");
  sub->add_option("--model", a.model, "chain model override (fsl or ssh)");
  sub->add_option("--n", a.n, "excitation number override");
}

fslt::ExperimentConfig resolve_config(const CommonArgs& a, fslt::Scenario scenario) {
  fslt::ExperimentConfig c = a.config.empty() ? fslt::parse_config("") : fslt::load_config(a.config);
  c.scenario = scenario;
  std::vector<std::string> errors;
  if (a.seed) c.disorder.seed = *a.seed;
  if (a.model) {
    if (*a.model == "fsl")
      c.model = fslt::ChainKind::fsl;
    else if (*a.model == "ssh")
      c.model = fslt::ChainKind::ssh;
    else
      errors.push_back("--model: '" + *a.model + "' is not one of {fsl, ssh}");
  }
  if (a.n) c.n = *a.n;
  if (a.during_pump) c.winding.during_pump = true;
  for (auto& e : fslt::validate(c)) errors.push_back(std::move(e));
  if (!errors.empty()) throw fslt::ConfigError(std::move(errors));
  return c;
}

int run(const CommonArgs& a, fslt::Scenario scenario) {
  const fslt::ExperimentConfig c = resolve_config(a, scenario);
  if (a.verbosity > 0)
    std::cerr << "fslt: " << fslt::to_string(scenario) << " (config " << fslt::config_hash(c) << ") -> " << a.out
              << '\n';
  const fslt::RunReport rep = fslt::run_scenario(c, {a.out, a.force, a.threads});
  nlohmann::json out{{"scenario", fslt::to_string(scenario)}, {"out", a.out}, {"files", rep.files},
                     {"summary", rep.summary}};
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int selftest(int verbosity) {
  const auto results = fslt::run_selftest();
  bool all = true;
  std::printf("%-52s %-6s %-12s %s\n", "check", "result", "measured", "tolerance");
  for (const auto& r : results) {
    all = all && r.passed;
    if (!r.error.empty()) {
      std::printf("%-52s %-6s %s\n", r.name.c_str(), "ERROR", r.error.c_str());
      continue;
    }
    std::printf("%-52s %-6s %-12.3e %.1e\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.measured, r.tolerance);
  }
  if (verbosity > 0) std::fprintf(stderr, "fslt: %zu checks\n", results.size());
  return all ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fock-state-lattice topological transducer simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", fslt::kVersion);

  CommonArgs args;
  struct Entry {
    const char* name;
    const char* help;
    fslt::Scenario scenario;
  };
  const Entry entries[] = {
      {"spectrum", "instantaneous chain spectrum along the pump schedule", fslt::Scenario::spectrum},
      {"pump", "topological pumping run (trajectory and summary)", fslt::Scenario::pump},
      {"winding", "MCD winding number vs coupling ratio, or during the pump", fslt::Scenario::winding},
      {"scan", "critical transfer time scan and scaling fit", fslt::Scenario::scan},
      {"disorder", "final optical photon number vs coupling disorder", fslt::Scenario::disorder},
      {"wigner", "Wigner functions of input, output and ideal target", fslt::Scenario::wigner},
  };
  std::vector<std::pair<CLI::App*, fslt::Scenario>> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, args);
    if (e.scenario == fslt::Scenario::winding)
      sub->add_flag("--during-pump", args.during_pump, "probe the winding number along a disordered pump");
    subs.emplace_back(sub, e.scenario);
  }
  CLI::App* st = app.add_subcommand("selftest", "run the invariant checks and print a pass/fail table");
  st->add_flag("-v,--verbose", args.verbosity, "verbose");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(kUsage, "usage", e.what());
  }

  try {
    if (st->parsed()) return selftest(args.verbosity);
    for (const auto& [sub, scenario] : subs)
      if (sub->parsed()) return run(args, scenario);
    return report_error(kUsage, "usage", "no subcommand");
  } catch (const fslt::ConfigError& e) {
    return report_error(kConfig, "config", "invalid configuration", e.errors());
  } catch (const fslt::OutputCollision& e) {
    return report_error(kUsage, "output_collision", e.what());
  } catch (const fslt::InvalidArgument& e) {
    return report_error(kConfig, "invalid_argument", e.what());
  } catch (const fslt::NumericalError& e) {
    return report_error(kNumerical, "numerical", e.what());
  } catch (const std::exception& e) {
    return report_error(kNumerical, "runtime", e.what());
  }
}
