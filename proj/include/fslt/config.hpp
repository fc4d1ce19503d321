#pragma once

// Experiment configuration. Files use laboratory units (X/2π in MHz or kHz,
// times in μs); the accessors convert to the engine's rad/μs exactly once.

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fslt/experiments.hpp"

namespace fslt {

enum class Scenario : std::uint8_t { pump, spectrum, winding, scan, disorder, wigner };
enum class InputKind : std::uint8_t { fock, coherent, squeezed };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::pump: return "pump";
    case Scenario::spectrum: return "spectrum";
    case Scenario::winding: return "winding";
    case Scenario::scan: return "scan";
    case Scenario::disorder: return "disorder";
    case Scenario::wigner: return "wigner";
  }
  return "?";
}

inline const char* to_string(InputKind k) {
  switch (k) {
    case InputKind::fock: return "fock";
    case InputKind::coherent: return "coherent";
    case InputKind::squeezed: return "squeezed";
  }
  return "?";
}

struct ExperimentConfig {
  Scenario scenario = Scenario::pump;
  ChainKind model = ChainKind::fsl;
  int n = 5;
  InputKind input = InputKind::fock;
  double alpha_re = 1.0;
  double alpha_im = 0.0;
  double squeeze_r = 0.7;
  double squeeze_theta = 0.0;
  int n_max = 0;  // 0 = automatic

  double g_over_2pi_mhz = 0.282;
  double T_us = 8.2;
  bool open_system = true;
  double gamma0_over_2pi_khz = 3.6;
  double kappa_m_over_2pi_khz = 2.0;
  double kappa_o_over_2pi_khz = 3.4;
  int grid_points = 501;
  double rtol = 1e-9;
  double atol = 1e-12;

  struct DisorderSection {
    double eta_m = 0.0;
    double eta_o = 0.0;
    int samples = 1001;
    std::uint64_t seed = 1;
    bool operator==(const DisorderSection&) const = default;
  } disorder;

  struct ScanSection {
    std::vector<int> excitations{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    double gt_min = 1.0;
    double gt_max = 40.0;
    double gt_step = 0.25;
    double threshold = 0.99;
    bool full_curve = false;
    int fit_order = 0;  // 0 = 1 for fsl, 2 for ssh
    bool operator==(const ScanSection&) const = default;
  } scan;

  struct WindingSection {
    std::vector<int> excitations{2, 3, 4, 5, 6, 7, 8};
    double ratio_min = 0.1;
    double ratio_max = 10.0;
    int ratio_count = 15;
    double tau_g = 200.0;
    int initial_even_site = 0;  // 0 = middle site 2⌈N/2⌉, -1 = average over all even sites
    int points = 4001;
    bool during_pump = false;
    std::vector<double> probe_fractions{0.0, 0.25, 0.5, 0.75, 1.0};
    int samples = 101;
    bool operator==(const WindingSection&) const = default;
  } winding;

  struct SurfaceSection {
    std::vector<double> eta_m{0.0, 0.05, 0.1, 0.15, 0.2};
    std::vector<double> eta_o{0.0, 0.05, 0.1, 0.15, 0.2};
    bool operator==(const SurfaceSection&) const = default;
  } surface;

  int spectrum_times = 51;
  int wigner_points = 121;

  bool operator==(const ExperimentConfig&) const = default;

  // Engine units.
  double g() const { return two_pi * g_over_2pi_mhz; }
  DecayRates rates() const {
    if (!open_system) return {};
    return {two_pi * gamma0_over_2pi_khz * 1e-3, two_pi * kappa_m_over_2pi_khz * 1e-3,
            two_pi * kappa_o_over_2pi_khz * 1e-3};
  }
  Tolerances tolerances() const { return {rtol, atol}; }
  InputStateSpec input_spec() const {
    switch (input) {
      case InputKind::coherent: return CoherentInput{{alpha_re, alpha_im}};
      case InputKind::squeezed: return SqueezedVacuumInput{squeeze_r, squeeze_theta};
      case InputKind::fock: break;
    }
    return FockInput{n};
  }
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& e) {
    std::string s;
    for (const auto& x : e) s += (s.empty() ? "" : "; ") + x;
    return s;
  }
  std::vector<std::string> errors_;
};

namespace detail {

class ConfigReader {
 public:
  std::vector<std::string> errors;

  void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
    if (!node.IsMap()) return;
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.contains(key)) errors.push_back(path + key + ": unknown field");
    }
  }

  template <class T>
  void read(const YAML::Node& node, const std::string& path, const std::string& key, T& out) {
    const YAML::Node v = node[key];
    if (!v || v.IsNull()) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      errors.push_back(path + key + ": cannot parse '" + describe(v) + "'");
    }
  }

  template <class E>
  void read_enum(const YAML::Node& node, const std::string& path, const std::string& key, E& out,
                 const std::map<std::string, E>& names) {
    std::string s;
    const bool present = node[key] && !node[key].IsNull();
    read(node, path, key, s);
    if (!present) return;
    const auto it = names.find(s);
    if (it == names.end()) {
      std::string options;
      for (const auto& [name, _] : names) options += (options.empty() ? "" : ", ") + name;
      errors.push_back(path + key + ": '" + s + "' is not one of {" + options + "}");
    } else {
      out = it->second;
    }
  }

  void expect(bool ok, const std::string& field, const std::string& message) {
    if (!ok) errors.push_back(field + ": " + message);
  }

 private:
  static std::string describe(const YAML::Node& v) {
    if (v.IsScalar()) return v.Scalar();
    YAML::Emitter e;
    e << YAML::Flow << v;
    return e.c_str();
  }
};

inline YAML::Node section(const YAML::Node& root, const char* key, ConfigReader& r) {
  const YAML::Node s = root[key];
  if (s && !s.IsNull() && !s.IsMap()) {
    r.errors.push_back(std::string(key) + ": expected a mapping");
    return YAML::Node(YAML::NodeType::Map);
  }
  return s ? s : YAML::Node(YAML::NodeType::Map);
}

}  // namespace detail

// Field-level validation; every problem is collected.
inline std::vector<std::string> validate(const ExperimentConfig& c) {
  detail::ConfigReader r;
  r.expect(c.n >= 1 && c.n <= 12, "n", "must lie in [1, 12]");
  r.expect(c.n_max >= 0 && c.n_max <= 40, "n_max", "must lie in [0, 40]");
  r.expect(c.squeeze_r >= 0.0 && c.squeeze_r <= 2.0, "squeeze_r", "must lie in [0, 2]");
  r.expect(std::isfinite(c.alpha_re) && std::isfinite(c.alpha_im) && std::hypot(c.alpha_re, c.alpha_im) <= 4.0,
           "alpha", "|alpha| must be finite and <= 4");
  r.expect(std::isfinite(c.squeeze_theta), "squeeze_theta", "must be finite");
  r.expect(c.g_over_2pi_mhz > 0.0 && std::isfinite(c.g_over_2pi_mhz), "g_over_2pi_mhz", "must be positive");
  r.expect(c.T_us > 0.0 && std::isfinite(c.T_us), "T_us", "must be positive");
  r.expect(c.gamma0_over_2pi_khz >= 0.0, "gamma0_over_2pi_khz", "must be >= 0");
  r.expect(c.kappa_m_over_2pi_khz >= 0.0, "kappa_m_over_2pi_khz", "must be >= 0");
  r.expect(c.kappa_o_over_2pi_khz >= 0.0, "kappa_o_over_2pi_khz", "must be >= 0");
  r.expect(c.grid_points >= 2, "grid_points", "must be >= 2");
  r.expect(c.rtol > 0.0 && c.rtol < 1e-3, "rtol", "must lie in (0, 1e-3)");
  r.expect(c.atol > 0.0 && c.atol < 1e-3, "atol", "must lie in (0, 1e-3)");
  r.expect(c.disorder.eta_m >= 0.0 && c.disorder.eta_m <= 0.5, "disorder.eta_m", "must lie in [0, 0.5]");
  r.expect(c.disorder.eta_o >= 0.0 && c.disorder.eta_o <= 0.5, "disorder.eta_o", "must lie in [0, 0.5]");
  r.expect(c.disorder.samples >= 1, "disorder.samples", "must be >= 1");
  r.expect(!c.scan.excitations.empty(), "scan.excitations", "must not be empty");
  for (int e : c.scan.excitations) r.expect(e >= 1 && e <= 12, "scan.excitations", "entries must lie in [1, 12]");
  r.expect(c.scan.gt_min > 0.0 && c.scan.gt_max > c.scan.gt_min, "scan.gt_max", "need 0 < gt_min < gt_max");
  r.expect(c.scan.gt_step > 0.0, "scan.gt_step", "must be positive");
  r.expect(c.scan.threshold > 0.0 && c.scan.threshold <= 1.0, "scan.threshold", "must lie in (0, 1]");
  r.expect(c.scan.fit_order >= 0 && c.scan.fit_order <= 2, "scan.fit_order", "must be 0, 1 or 2");
  r.expect(!c.winding.excitations.empty(), "winding.excitations", "must not be empty");
  for (int e : c.winding.excitations) r.expect(e >= 1 && e <= 12, "winding.excitations", "entries must lie in [1, 12]");
  r.expect(c.winding.ratio_min > 0.0 && c.winding.ratio_max >= c.winding.ratio_min, "winding.ratio_max",
           "need 0 < ratio_min <= ratio_max");
  r.expect(c.winding.ratio_count >= 1, "winding.ratio_count", "must be >= 1");
  r.expect(c.winding.tau_g >= 50.0, "winding.tau_g", "must be >= 50");
  r.expect(c.winding.points >= 2000, "winding.points", "must be >= 2000");
  r.expect(c.winding.initial_even_site == -1 || (c.winding.initial_even_site >= 0 && c.winding.initial_even_site % 2 == 0),
           "winding.initial_even_site", "must be 0, -1 or an even site index");
  for (int e : c.winding.excitations)
    r.expect(c.winding.initial_even_site <= 2 * e, "winding.initial_even_site", "exceeds 2N for N = " + std::to_string(e));
  for (double f : c.winding.probe_fractions)
    r.expect(f >= 0.0 && f <= 1.0, "winding.probe_fractions", "entries must lie in [0, 1]");
  r.expect(c.winding.samples >= 1, "winding.samples", "must be >= 1");
  for (double e : c.surface.eta_m) r.expect(e >= 0.0 && e <= 0.2, "surface.eta_m", "entries must lie in [0, 0.2]");
  for (double e : c.surface.eta_o) r.expect(e >= 0.0 && e <= 0.2, "surface.eta_o", "entries must lie in [0, 0.2]");
  r.expect(!c.surface.eta_m.empty() && !c.surface.eta_o.empty(), "surface", "grids must not be empty");
  r.expect(c.spectrum_times >= 2, "spectrum_times", "must be >= 2");
  r.expect(c.wigner_points >= 11, "wigner_points", "must be >= 11");
  return std::move(r.errors);
}

// Parses and normalizes; throws ConfigError listing every invalid field.
inline ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError({std::string("yaml: ") + e.what()});
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ConfigError({"config: top level must be a mapping"});

  ExperimentConfig c;
  detail::ConfigReader r;
  r.check_keys(root, "",
               {"scenario", "model", "n", "input", "alpha", "squeeze_r", "squeeze_theta", "n_max", "g_over_2pi_mhz",
                "T_us", "open_system", "gamma0_over_2pi_khz", "kappa_m_over_2pi_khz", "kappa_o_over_2pi_khz",
                "grid_points", "rtol", "atol", "disorder", "scan", "winding", "surface", "spectrum_times",
                "wigner_points"});
  r.read_enum(root, "", "scenario", c.scenario,
              {{"pump", Scenario::pump},
               {"spectrum", Scenario::spectrum},
               {"winding", Scenario::winding},
               {"scan", Scenario::scan},
               {"disorder", Scenario::disorder},
               {"wigner", Scenario::wigner}});
  r.read_enum(root, "", "model", c.model, {{"fsl", ChainKind::fsl}, {"ssh", ChainKind::ssh}});
  r.read(root, "", "n", c.n);
  r.read_enum(root, "", "input", c.input,
              {{"fock", InputKind::fock}, {"coherent", InputKind::coherent}, {"squeezed", InputKind::squeezed}});
  if (const YAML::Node a = root["alpha"]; a && !a.IsNull()) {
    if (a.IsSequence() && a.size() == 2) {
      try {
        c.alpha_re = a[0].as<double>();
        c.alpha_im = a[1].as<double>();
      } catch (const YAML::Exception&) {
        r.errors.push_back("alpha: expected [re, im] numbers");
      }
    } else if (a.IsScalar()) {
      r.read(root, "", "alpha", c.alpha_re);
      c.alpha_im = 0.0;
    } else {
      r.errors.push_back("alpha: expected a number or [re, im]");
    }
  }
  r.read(root, "", "squeeze_r", c.squeeze_r);
  r.read(root, "", "squeeze_theta", c.squeeze_theta);
  r.read(root, "", "n_max", c.n_max);
  r.read(root, "", "g_over_2pi_mhz", c.g_over_2pi_mhz);
  r.read(root, "", "T_us", c.T_us);
  r.read(root, "", "open_system", c.open_system);
  r.read(root, "", "gamma0_over_2pi_khz", c.gamma0_over_2pi_khz);
  r.read(root, "", "kappa_m_over_2pi_khz", c.kappa_m_over_2pi_khz);
  r.read(root, "", "kappa_o_over_2pi_khz", c.kappa_o_over_2pi_khz);
  r.read(root, "", "grid_points", c.grid_points);
  r.read(root, "", "rtol", c.rtol);
  r.read(root, "", "atol", c.atol);
  r.read(root, "", "spectrum_times", c.spectrum_times);
  r.read(root, "", "wigner_points", c.wigner_points);

  const YAML::Node d = detail::section(root, "disorder", r);
  r.check_keys(d, "disorder.", {"eta_m", "eta_o", "samples", "seed"});
  r.read(d, "disorder.", "eta_m", c.disorder.eta_m);
  r.read(d, "disorder.", "eta_o", c.disorder.eta_o);
  r.read(d, "disorder.", "samples", c.disorder.samples);
  r.read(d, "disorder.", "seed", c.disorder.seed);

  const YAML::Node s = detail::section(root, "scan", r);
  r.check_keys(s, "scan.", {"excitations", "gt_min", "gt_max", "gt_step", "threshold", "full_curve", "fit_order"});
  r.read(s, "scan.", "excitations", c.scan.excitations);
  r.read(s, "scan.", "gt_min", c.scan.gt_min);
  r.read(s, "scan.", "gt_max", c.scan.gt_max);
  r.read(s, "scan.", "gt_step", c.scan.gt_step);
  r.read(s, "scan.", "threshold", c.scan.threshold);
  r.read(s, "scan.", "full_curve", c.scan.full_curve);
  r.read(s, "scan.", "fit_order", c.scan.fit_order);

  const YAML::Node w = detail::section(root, "winding", r);
  r.check_keys(w, "winding.",
               {"excitations", "ratio_min", "ratio_max", "ratio_count", "tau_g", "initial_even_site", "points",
                "during_pump", "probe_fractions", "samples"});
  r.read(w, "winding.", "excitations", c.winding.excitations);
  r.read(w, "winding.", "ratio_min", c.winding.ratio_min);
  r.read(w, "winding.", "ratio_max", c.winding.ratio_max);
  r.read(w, "winding.", "ratio_count", c.winding.ratio_count);
  r.read(w, "winding.", "tau_g", c.winding.tau_g);
  r.read(w, "winding.", "initial_even_site", c.winding.initial_even_site);
  r.read(w, "winding.", "points", c.winding.points);
  r.read(w, "winding.", "during_pump", c.winding.during_pump);
  r.read(w, "winding.", "probe_fractions", c.winding.probe_fractions);
  r.read(w, "winding.", "samples", c.winding.samples);

  const YAML::Node sf = detail::section(root, "surface", r);
  r.check_keys(sf, "surface.", {"eta_m", "eta_o"});
  r.read(sf, "surface.", "eta_m", c.surface.eta_m);
  r.read(sf, "surface.", "eta_o", c.surface.eta_o);

  auto errors = std::move(r.errors);
  for (auto& e : validate(c)) errors.push_back(std::move(e));
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"config: cannot read '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// Shortest decimal that round-trips.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

// Normalized YAML echo; parse_config(echo_config(c)) == c.
inline std::string echo_config(const ExperimentConfig& c) {
  std::ostringstream o;
  const auto f = format_double;
  const auto list = [](const auto& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      if constexpr (std::is_floating_point_v<std::decay_t<decltype(v[i])>>)
        s += format_double(v[i]);
      else
        s += std::to_string(v[i]);
    }
    return s + "]";
  };
  o << "scenario: " << to_string(c.scenario) << '\n'
    << "model: " << to_string(c.model) << '\n'
    << "n: " << c.n << '\n'
    << "input: " << to_string(c.input) << '\n'
    << "alpha: [" << f(c.alpha_re) << ", " << f(c.alpha_im) << "]\n"
    << "squeeze_r: " << f(c.squeeze_r) << '\n'
    << "squeeze_theta: " << f(c.squeeze_theta) << '\n'
    << "n_max: " << c.n_max << '\n'
    << "g_over_2pi_mhz: " << f(c.g_over_2pi_mhz) << '\n'
    << "T_us: " << f(c.T_us) << '\n'
    << "open_system: " << (c.open_system ? "true" : "false") << '\n'
    << "gamma0_over_2pi_khz: " << f(c.gamma0_over_2pi_khz) << '\n'
    << "kappa_m_over_2pi_khz: " << f(c.kappa_m_over_2pi_khz) << '\n'
    << "kappa_o_over_2pi_khz: " << f(c.kappa_o_over_2pi_khz) << '\n'
    << "grid_points: " << c.grid_points << '\n'
    << "rtol: " << f(c.rtol) << '\n'
    << "atol: " << f(c.atol) << '\n'
    << "spectrum_times: " << c.spectrum_times << '\n'
    << "wigner_points: " << c.wigner_points << '\n'
    << "disorder:\n"
    << "  eta_m: " << f(c.disorder.eta_m) << '\n'
    << "  eta_o: " << f(c.disorder.eta_o) << '\n'
    << "  samples: " << c.disorder.samples << '\n'
    << "  seed: " << c.disorder.seed << '\n'
    << "scan:\n"
    << "  excitations: " << list(c.scan.excitations) << '\n'
    << "  gt_min: " << f(c.scan.gt_min) << '\n'
    << "  gt_max: " << f(c.scan.gt_max) << '\n'
    << "  gt_step: " << f(c.scan.gt_step) << '\n'
    << "  threshold: " << f(c.scan.threshold) << '\n'
    << "  full_curve: " << (c.scan.full_curve ? "true" : "false") << '\n'
    << "  fit_order: " << c.scan.fit_order << '\n'
    << "winding:\n"
    << "  excitations: " << list(c.winding.excitations) << '\n'
    << "  ratio_min: " << f(c.winding.ratio_min) << '\n'
    << "  ratio_max: " << f(c.winding.ratio_max) << '\n'
    << "  ratio_count: " << c.winding.ratio_count << '\n'
    << "  tau_g: " << f(c.winding.tau_g) << '\n'
    << "  initial_even_site: " << c.winding.initial_even_site << '\n'
    << "  points: " << c.winding.points << '\n'
    << "  during_pump: " << (c.winding.during_pump ? "true" : "false") << '\n'
    << "  probe_fractions: " << list(c.winding.probe_fractions) << '\n'
    << "  samples: " << c.winding.samples << '\n'
    << "surface:\n"
    << "  eta_m: " << list(c.surface.eta_m) << '\n'
    << "  eta_o: " << list(c.surface.eta_o) << '\n';
  return o.str();
}

// FNV-1a over the normalized echo.
inline std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : echo_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fslt
