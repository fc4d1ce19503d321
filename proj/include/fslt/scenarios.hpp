#pragma once

// Config-driven scenario runners: each builds its datasets from the
// experiment functions and writes the config echo, CSV files and manifest.

#include <Eigen/Core>

#include <string>
#include <vector>

#include "fslt/config.hpp"
#include "fslt/experiments.hpp"
#include "fslt/io.hpp"

namespace fslt {

struct RunOptions {
  std::filesystem::path out_dir = "out";
  bool force = false;
  unsigned threads = 0;
};

struct RunReport {
  std::vector<std::string> files;
  nlohmann::json summary;
};

namespace detail {

inline CsvTable tagged_table(std::vector<std::string> header, const std::string& hash) {
  CsvTable t(std::move(header));
  t.comment("config_hash", hash);
  return t;
}

inline PumpingSetup pumping_setup(const ExperimentConfig& c) {
  PumpingSetup s;
  s.input = c.input_spec();
  s.g = c.g();
  s.duration = c.T_us;
  s.rates = c.rates();
  s.open_system = c.open_system;
  s.disorder = {};
  s.grid_points = static_cast<std::size_t>(c.grid_points);
  s.tolerances = c.tolerances();
  if (c.n_max > 0) s.n_max = c.n_max;
  return s;
}

inline CsvTable trajectory_table(const Trajectory& traj, const std::string& hash) {
  std::vector<std::string> header{"t"};
  header.insert(header.end(), traj.columns.begin(), traj.columns.end());
  CsvTable t = tagged_table(header, hash);
  t.comment("units", "t in us, G_m and G_o in rad/us, E_k in rad/us");
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::vector<double> row{traj.times[k]};
    row.insert(row.end(), traj.rows[k].begin(), traj.rows[k].end());
    t.add_row(row);
  }
  return t;
}

inline nlohmann::json pumping_summary_json(const PumpingSummary& s) {
  return {{"final_N_o", s.final_n_o},
          {"final_fidelity", s.final_fidelity},
          {"max_trace_error", s.max_trace_error},
          {"min_eigenvalue", std::isnan(s.min_eigenvalue) ? nlohmann::json(nullptr) : nlohmann::json(s.min_eigenvalue)},
          {"basis", descriptor_json(s.basis)},
          {"steps_accepted", s.stats.accepted},
          {"steps_rejected", s.stats.rejected}};
}

inline CsvTable wigner_table(const WignerResult& w, const std::string& label, const std::string& hash) {
  CsvTable t = tagged_table({"x", "p", "W"}, hash);
  t.comment("state", label);
  t.comment("convention", "x=(a+a^dag)/sqrt2, p=(a-a^dag)/(i sqrt2), W=(1/pi)Tr[rho D(alpha) Parity D(alpha)^dag], "
                          "alpha=(x+ip)/sqrt2, integral W dx dp = 1");
  t.comment("grid", "x in [" + format_double(w.grid.x_min) + ", " + format_double(w.grid.x_max) + "] with " +
                        std::to_string(w.grid.nx) + " points; p in [" + format_double(w.grid.p_min) + ", " +
                        format_double(w.grid.p_max) + "] with " + std::to_string(w.grid.np) + " points");
  t.comment("integral", format_double(w.integral));
  for (std::size_t j = 0; j < w.grid.np; ++j)
    for (std::size_t i = 0; i < w.grid.nx; ++i)
      t.add_row({w.grid.x(i), w.grid.p(j), w.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))});
  return t;
}

inline RunReport run_pump(const ExperimentConfig& c, OutputSet& out, const std::string& hash) {
  const PumpingResult r = run_pumping(pumping_setup(c));
  out.add("trajectory.csv", trajectory_table(r.trajectory, hash));
  RunReport rep;
  rep.summary = pumping_summary_json(r.summary);
  out.add("summary.json", rep.summary);
  return rep;
}

inline RunReport run_spectrum(const ExperimentConfig& c, OutputSet& out, const std::string& hash) {
  const ChainModel model{c.model, c.n};
  const CouplingSchedule schedule(c.g(), c.T_us);
  const auto rows = spectrum_along_schedule(model, schedule, static_cast<std::size_t>(c.spectrum_times));
  std::vector<std::string> header{"t", "G_m", "G_o"};
  for (int k = 1; k <= 2 * c.n + 1; ++k) header.push_back("E_" + std::to_string(k));
  CsvTable t = tagged_table(header, hash);
  t.comment("units", "t in us, couplings and energies in rad/us");
  double max_dev = 0.0;
  std::vector<double> expected;
  for (int j = c.n; j >= 1; --j) expected.push_back(-std::sqrt(static_cast<double>(j)) * c.g());
  expected.push_back(0.0);
  for (int j = 1; j <= c.n; ++j) expected.push_back(std::sqrt(static_cast<double>(j)) * c.g());
  for (const auto& r : rows) {
    std::vector<double> row{r.t, r.couplings.g_m, r.couplings.g_o};
    row.insert(row.end(), r.energies.begin(), r.energies.end());
    t.add_row(row);
    for (std::size_t k = 0; k < expected.size(); ++k) max_dev = std::max(max_dev, std::abs(r.energies[k] - expected[k]));
  }
  out.add("spectrum.csv", t);
  RunReport rep;
  rep.summary = {{"model", to_string(c.model)}, {"N", c.n}, {"times", rows.size()}};
  if (c.model == ChainKind::fsl) rep.summary["max_deviation_from_sqrt_j_g"] = max_dev;
  out.add("summary.json", rep.summary);
  return rep;
}

inline McdOptions mcd_options(const ExperimentConfig& c) {
  McdOptions m;
  m.points = static_cast<std::size_t>(c.winding.points);
  m.initial_even_site = c.winding.initial_even_site;
  m.tolerances = c.tolerances();
  return m;
}

inline RunReport run_winding(const ExperimentConfig& c, OutputSet& out, const std::string& hash, unsigned threads) {
  RunReport rep;
  if (c.winding.during_pump) {
    const DisorderSpec dis{c.disorder.eta_m, c.disorder.eta_o, static_cast<std::size_t>(c.winding.samples),
                           c.disorder.seed};
    const auto rows = winding_during_pump(c.winding.excitations, dis, c.g(), c.T_us, c.winding.probe_fractions,
                                          mcd_options(c), c.winding.tau_g, threads);
    CsvTable t = tagged_table({"N", "t", "t_over_T", "W_mean", "W_stderr", "W_analytic", "samples", "seed"}, hash);
    t.comment("disorder", "eta_m=" + format_double(dis.eta_m) + ", eta_o=" + format_double(dis.eta_o));
    double worst = 0.0;
    for (const auto& r : rows) {
      t.add_row({static_cast<double>(r.excitation), r.t, r.t_over_T, r.mean, r.stderr_, r.analytic,
                 static_cast<double>(r.samples), static_cast<double>(dis.seed)});
      worst = std::max(worst, std::abs(r.mean - r.analytic));
    }
    out.add("winding_pump.csv", t);
    rep.summary = {{"probes", rows.size()}, {"max_abs_deviation", worst}};
  } else {
    const auto ratios = log_spaced(c.winding.ratio_min, c.winding.ratio_max, static_cast<std::size_t>(c.winding.ratio_count));
    const auto rows = winding_vs_ratio(c.model, c.winding.excitations, ratios, c.g(), c.winding.tau_g, mcd_options(c),
                                       c.disorder.seed, threads);
    CsvTable t = tagged_table({"ratio", "N", "W_mcd", "W_analytic", "tau", "seed"}, hash);
    t.comment("model", to_string(c.model));
    t.comment("initial_even_site", c.winding.initial_even_site == 0    ? "middle (2*ceil(N/2))"
                                   : c.winding.initial_even_site == -1 ? "all even sites"
                                                                       : std::to_string(c.winding.initial_even_site));
    double worst = 0.0;
    std::size_t unconverged = 0;
    for (const auto& r : rows) {
      t.add_row({r.ratio, static_cast<double>(r.excitation), r.w_mcd, r.w_analytic, r.tau, static_cast<double>(r.seed)});
      worst = std::max(worst, std::abs(r.w_mcd - r.w_analytic));
      if (!r.converged) ++unconverged;
    }
    out.add("winding.csv", t);
    rep.summary = {{"model", to_string(c.model)},
                   {"points", rows.size()},
                   {"max_abs_deviation", worst},
                   {"unconverged_points", unconverged}};
  }
  out.add("summary.json", rep.summary);
  return rep;
}

inline RunReport run_scan(const ExperimentConfig& c, OutputSet& out, const std::string& hash, unsigned threads) {
  ScanSettings s;
  s.g = c.g();
  s.gt_min = c.scan.gt_min;
  s.gt_max = c.scan.gt_max;
  s.gt_step = c.scan.gt_step;
  s.threshold = c.scan.threshold;
  s.full_curve = c.scan.full_curve;
  s.tolerances = c.tolerances();
  const ScanResult res = scan_critical_time(c.model, c.scan.excitations, s, threads);

  CsvTable ct = tagged_table({"N", "gT_m", "T_m", "fidelity", "censored"}, hash);
  ct.comment("model", to_string(c.model));
  for (const auto& p : res.critical)
    ct.add_row({static_cast<double>(p.excitation), p.gt, p.duration, p.fidelity, p.censored ? 1.0 : 0.0});
  out.add("critical_times.csv", ct);

  CsvTable curve = tagged_table({"N", "gT", "T", "fidelity", "N_o", "N_o_over_N"}, hash);
  for (const auto& p : res.curve)
    curve.add_row({static_cast<double>(p.excitation), p.gt, p.duration, p.fidelity, p.n_o, p.n_o / p.excitation});
  out.add("scan_curve.csv", curve);

  RunReport rep;
  const int order = c.scan.fit_order > 0 ? c.scan.fit_order : (c.model == ChainKind::fsl ? 1 : 2);
  const auto pts = fit_points(res.critical);
  nlohmann::json fit = {{"order", order}, {"points", pts.size()}};
  if (pts.size() >= static_cast<std::size_t>(order + 2)) {
    const FitResult f = fit_scaling(pts, order);
    fit["coefficients_highest_first"] = f.coefficients;
    fit["residual_norm"] = f.residual_norm;
  } else {
    fit["coefficients_highest_first"] = nullptr;
    fit["note"] = "too few uncensored points for a fit";
  }
  rep.summary = {{"model", to_string(c.model)}, {"fit", fit}};
  std::size_t censored = 0;
  for (const auto& p : res.critical) censored += p.censored ? 1 : 0;
  rep.summary["censored"] = censored;
  out.add("fit.json", fit);
  out.add("summary.json", rep.summary);
  return rep;
}

inline TransducerSetup transducer_setup(const ExperimentConfig& c) {
  TransducerSetup s;
  s.excitation = c.n;
  s.g = c.g();
  s.duration = c.T_us;
  s.rates = c.rates();
  s.tolerances = c.tolerances();
  return s;
}

inline RunReport run_disorder(const ExperimentConfig& c, OutputSet& out, const std::string& hash, unsigned threads) {
  const TransducerSetup setup = transducer_setup(c);
  const double reference = final_optical_photons(setup, {});
  const auto rows = disorder_surface(c.surface.eta_m, c.surface.eta_o, static_cast<std::size_t>(c.disorder.samples),
                                     c.disorder.seed, setup, threads);
  CsvTable t = tagged_table({"eta_m", "eta_o", "N_o_mean", "N_o_stderr", "relative_change", "samples", "seed"}, hash);
  t.comment("undisordered_N_o", format_double(reference));
  double worst = 0.0;
  for (const auto& r : rows) {
    const double rel = r.mean / reference - 1.0;
    t.add_row({r.eta_m, r.eta_o, r.mean, r.stderr_, rel, static_cast<double>(r.samples),
               static_cast<double>(c.disorder.seed)});
    worst = std::max(worst, std::abs(rel));
  }
  out.add("surface.csv", t);
  RunReport rep;
  rep.summary = {{"undisordered_N_o", reference}, {"max_relative_change", worst}, {"cells", rows.size()}};
  out.add("summary.json", rep.summary);
  return rep;
}

inline RunReport run_wigner(const ExperimentConfig& c, OutputSet& out, const std::string& hash) {
  PumpingSetup s = pumping_setup(c);
  s.snapshot_indices = {0};
  const PumpingResult r = run_pumping(s);
  const QuantumState& initial = r.trajectory.snapshots.front().second;
  const QuantumState& final_state = *r.trajectory.final_state;
  require(initial.basis().kind == BasisDescriptor::Kind::product,
          "wigner: needs a product-basis run (open system or non-Fock input)");
  const ProductBasis basis = ProductBasis::from_descriptor(initial.basis());
  const QuantumState target = ideal_target(s.input, basis);
  const WignerGrid grid = default_wigner_grid(std::max(basis.n_max_mw(), basis.n_max_opt()),
                                              static_cast<std::size_t>(c.wigner_points));
  const WignerResult w0 = wigner(partial_trace(initial, Slot::mw), grid);
  const WignerResult w1 = wigner(partial_trace(final_state, Slot::opt), grid);
  const WignerResult wt = wigner(partial_trace(target, Slot::opt), grid);
  out.add("wigner_initial_mw.csv", wigner_table(w0, "initial microwave mode", hash));
  out.add("wigner_final_opt.csv", wigner_table(w1, "final optical mode", hash));
  out.add("wigner_target_opt.csv", wigner_table(wt, "ideal optical target", hash));
  out.add("trajectory.csv", trajectory_table(r.trajectory, hash));
  RunReport rep;
  rep.summary = pumping_summary_json(r.summary);
  rep.summary["wigner_integrals"] = {{"initial_mw", w0.integral}, {"final_opt", w1.integral}, {"target_opt", wt.integral}};
  rep.summary["grid_covers_norm"] = w0.covers_norm && w1.covers_norm && wt.covers_norm;
  out.add("summary.json", rep.summary);
  return rep;
}

}  // namespace detail

inline nlohmann::json build_manifest(const ExperimentConfig& c, const std::string& hash, const RunOptions& opt,
                                     const std::string& started, const std::vector<std::string>& files,
                                     const nlohmann::json& summary) {
  return {{"tool", "fslt"},
          {"version", kVersion},
          {"scenario", to_string(c.scenario)},
          {"config_hash", hash},
          {"seed", c.disorder.seed},
          {"threads", resolve_threads(opt.threads)},
          {"started_utc", started},
          {"finished_utc", utc_timestamp()},
          {"files", files},
          {"versions",
           {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"compiler", __VERSION__},
            {"cxx", __cplusplus}}},
          {"units", "engine: rad/us and us; config: X/2pi in MHz or kHz, times in us"},
          {"summary", summary}};
}

// Runs the configured scenario and writes config.yaml, data files and
// manifest.json into opt.out_dir.
inline RunReport run_scenario(const ExperimentConfig& c, const RunOptions& opt) {
  const std::string started = utc_timestamp();
  const std::string hash = config_hash(c);
  OutputSet out(opt.out_dir, opt.force);
  out.add("config.yaml", echo_config(c));
  // Fail on collisions before spending time on the computation.
  OutputSet probe(opt.out_dir, opt.force);
  for (const char* name : {"config.yaml", "manifest.json", "summary.json"}) probe.add(name, std::string());
  probe.check_collisions();

  RunReport rep;
  switch (c.scenario) {
    case Scenario::pump: rep = detail::run_pump(c, out, hash); break;
    case Scenario::spectrum: rep = detail::run_spectrum(c, out, hash); break;
    case Scenario::winding: rep = detail::run_winding(c, out, hash, opt.threads); break;
    case Scenario::scan: rep = detail::run_scan(c, out, hash, opt.threads); break;
    case Scenario::disorder: rep = detail::run_disorder(c, out, hash, opt.threads); break;
    case Scenario::wigner: rep = detail::run_wigner(c, out, hash); break;
  }
  std::vector<std::string> files = out.names();
  files.push_back("manifest.json");
  out.add("manifest.json", build_manifest(c, hash, opt, started, files, rep.summary));
  out.write();
  rep.files = files;
  return rep;
}

}  // namespace fslt
