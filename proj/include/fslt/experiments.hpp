#pragma once

// Scenario building blocks: pumping runs, critical-time scans and fits,
// winding-number curves, winding under disorder, and disorder surfaces.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fslt/dynamics.hpp"
#include "fslt/hamiltonians.hpp"
#include "fslt/hilbert.hpp"
#include "fslt/parallel.hpp"
#include "fslt/states.hpp"
#include "fslt/topology.hpp"

namespace fslt {

// ---------------------------------------------------------------- pumping

struct PumpingSetup {
  InputStateSpec input = FockInput{5};
  double g = two_pi * 0.282;  // rad/μs
  double duration = 8.2;      // μs
  DecayRates rates{};
  bool open_system = true;
  Disorder disorder{};
  std::size_t grid_points = 501;
  Tolerances tolerances{};
  std::optional<int> n_max;            // product-basis truncation override
  bool force_product_basis = false;    // closed Fock runs default to the chain
  std::vector<std::size_t> snapshot_indices;
};

struct PumpingSummary {
  double final_n_o = 0.0;
  double final_fidelity = 0.0;
  double max_trace_error = 0.0;
  double min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  BasisDescriptor basis;
  IntegrationStats stats;
};

struct PumpingResult {
  Trajectory trajectory;
  PumpingSummary summary;
};

namespace detail {

// Per-time cache of the instantaneous chain eigensystem, shared by the
// spectrum and adiabatic-population observables of one run.
struct InstantaneousChain {
  ChainModel model;
  CouplingSchedule schedule;
  double t = std::numeric_limits<double>::quiet_NaN();
  Eigensystem es;

  const Eigensystem& at(double time) {
    if (time != t) {
      es = eigensystem(chain_hamiltonian(model, couplings(time)));
      t = time;
    }
    return es;
  }
  Couplings couplings(double time) const {
    return schedule.at(std::clamp(time, 0.0, schedule.duration()));
  }
};

// Chain-block density (or vector) of a state living on a chain or product basis.
inline DenseMatrix chain_block(const QuantumState& s, const FockChain& chain) {
  if (s.basis() == chain.descriptor()) return s.density();
  const auto idx = chain_to_product_embedding(chain, ProductBasis::from_descriptor(s.basis()));
  const Eigen::Index d = static_cast<Eigen::Index>(idx.size());
  DenseMatrix block(d, d);
  if (s.is_pure()) {
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = s.vector()(idx[static_cast<std::size_t>(i)]);
    return v * v.adjoint();
  }
  const DenseMatrix& rho = s.density_ref();
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) block(i, j) = rho(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  return block;
}

}  // namespace detail

inline PumpingResult run_pumping(const PumpingSetup& setup) {
  const CouplingSchedule schedule(setup.g, setup.duration, setup.disorder);
  const std::vector<double> grid = uniform_grid(0.0, setup.duration, setup.grid_points);
  const auto* fock = std::get_if<FockInput>(&setup.input);
  const bool use_chain = fock && !setup.open_system && !setup.force_product_basis;
  if (fock) require(fock->n >= 1, "run_pumping: Fock input needs N >= 1");

  std::vector<Observable> obs;
  obs.push_back({"G_m", [schedule](double t, const QuantumState&) { return schedule.mw_coefficient(t); }});
  obs.push_back({"G_o", [schedule](double t, const QuantumState&) { return schedule.opt_coefficient(t); }});

  std::optional<ProductBasis> basis;
  QuantumState initial = QuantumState::pure(mode_descriptor(0), Vector::Ones(1));
  std::optional<QuantumState> target;
  if (use_chain) {
    const FockChain chain(fock->n);
    Vector psi = Vector::Zero(chain.size());
    psi(0) = 1.0;
    initial = QuantumState::pure(chain.descriptor(), std::move(psi));
    Vector tgt = Vector::Zero(chain.size());
    tgt(chain.size() - 1) = 1.0;
    target = QuantumState::pure(chain.descriptor(), std::move(tgt));
    obs.push_back({"N_o", [chain](double, const QuantumState& s) {
                     const auto p = site_populations(s, chain);
                     double n = 0.0;
                     for (std::size_t i = 0; i < p.size(); ++i) n += chain.sites()[i].n_o * p[i];
                     return n;
                   }});
    obs.push_back({"N_m", [chain](double, const QuantumState& s) {
                     const auto p = site_populations(s, chain);
                     double n = 0.0;
                     for (std::size_t i = 0; i < p.size(); ++i) n += chain.sites()[i].n_m * p[i];
                     return n;
                   }});
  } else {
    basis = setup.n_max ? ProductBasis(*setup.n_max, *setup.n_max, *setup.n_max) : transduction_basis(setup.input);
    initial = prepare_initial(setup.input, *basis);
    target = ideal_target(setup.input, *basis);
    obs.push_back(expectation_observable("N_o", slot_number_operator(*basis, Slot::opt)));
    obs.push_back(expectation_observable("N_m", slot_number_operator(*basis, Slot::mw)));
    obs.push_back(expectation_observable("P_R", slot_number_operator(*basis, Slot::atom)));
  }
  obs.push_back({"fidelity", [tgt = *target](double, const QuantumState& s) { return fidelity(s, tgt); }});
  obs.push_back({"trace", [](double, const QuantumState& s) { return s.trace(); }});

  if (fock) {
    const FockChain chain(fock->n);
    const ChainModel model{ChainKind::fsl, fock->n};
    auto inst = std::make_shared<detail::InstantaneousChain>(detail::InstantaneousChain{model, schedule});
    obs.push_back({"P_d", [chain](double, const QuantumState& s) {
                     const auto p = site_populations(s, chain);
                     return chiral_displacement(p);
                   }});
    obs.push_back({"W_analytic", [inst](double t, const QuantumState&) { return analytic_winding(inst->couplings(t)); }});
    obs.push_back({"P_c_analytic", [inst, n = fock->n](double t, const QuantumState&) {
                     return distribution_center(n, analytic_winding(inst->couplings(t)));
                   }});
    obs.push_back({"N_o_zero_mode", [inst, chain](double t, const QuantumState&) {
                     const Eigen::VectorXd p = zero_mode(inst->model, inst->couplings(t)).populations();
                     double n = 0.0;
                     for (Eigen::Index i = 0; i < p.size(); ++i) n += chain.sites()[static_cast<std::size_t>(i)].n_o * p(i);
                     return n;
                   }});
    for (int k = 0; k < chain.size(); ++k)
      obs.push_back({"pop_" + std::to_string(k + 1), [chain, k](double, const QuantumState& s) {
                       return site_populations(s, chain)[static_cast<std::size_t>(k)];
                     }});
    for (int k = 0; k < chain.size(); ++k)
      obs.push_back({"E_" + std::to_string(k + 1), [inst, k](double t, const QuantumState&) { return inst->at(t).values(k); }});
    for (int k = 0; k < chain.size(); ++k)
      obs.push_back({"adiabatic_" + std::to_string(k + 1), [inst, chain, k](double t, const QuantumState& s) {
                       const auto& es = inst->at(t);
                       const Vector v = es.vectors.col(k);
                       return v.dot(detail::chain_block(s, chain) * v).real();
                     }});
  }

  EvolveOptions opt{setup.tolerances, setup.snapshot_indices, 0};
  PumpingResult res;
  if (use_chain) {
    const DrivenHamiltonian h = scheduled_chain_hamiltonian({ChainKind::fsl, fock->n}, schedule);
    res.trajectory = evolve_schrodinger(h, initial, grid, obs, opt);
  } else {
    const DrivenHamiltonian h = scheduled_jc_hamiltonian(*basis, schedule);
    if (setup.open_system)
      res.trajectory = evolve_lindblad(h, initial, setup.rates, grid, obs, opt);
    else
      res.trajectory = evolve_schrodinger(h, initial, grid, obs, opt);
  }
  res.summary.final_n_o = res.trajectory.final_value("N_o");
  res.summary.final_fidelity = res.trajectory.final_value("fidelity");
  res.summary.max_trace_error = res.trajectory.max_trace_error;
  res.summary.min_eigenvalue = res.trajectory.min_eigenvalue;
  res.summary.basis = initial.basis();
  res.summary.stats = res.trajectory.stats;
  return res;
}

// Spectrum of the chain along the schedule: rows (t, G_m, G_o, E_1..E_{2N+1}).
struct SpectrumRow {
  double t;
  Couplings couplings;
  std::vector<double> energies;
};

inline std::vector<SpectrumRow> spectrum_along_schedule(const ChainModel& model, const CouplingSchedule& schedule,
                                                        std::size_t times) {
  std::vector<SpectrumRow> out;
  for (double t : uniform_grid(0.0, schedule.duration(), times)) {
    const Couplings c = schedule.at(t);
    out.push_back({t, c, spectrum(chain_hamiltonian(model, c))});
  }
  return out;
}

// ------------------------------------------------------- critical times

struct TransferOutcome {
  double fidelity = 0.0;  // final population of the far edge site 2N+1
  double n_o = 0.0;       // final mean optical photon number
};

// Closed-system pump of |N_m, G, 0_o⟩ along the chain for duration T.
inline TransferOutcome closed_transfer(const ChainModel& model, double g, double duration, const Tolerances& tol = {}) {
  const FockChain chain(model.excitation);
  const DrivenHamiltonian h = scheduled_chain_hamiltonian(model, CouplingSchedule(g, duration));
  Vector psi = Vector::Zero(chain.size());
  psi(0) = 1.0;
  const std::vector<double> grid{0.0, duration};
  const Trajectory traj = evolve_schrodinger(h, QuantumState::pure(chain.descriptor(), std::move(psi)), grid, {}, {tol, {}, 0});
  const Eigen::VectorXd p = traj.final_state->populations();
  TransferOutcome out;
  out.fidelity = p(chain.size() - 1);
  for (int i = 0; i < chain.size(); ++i) out.n_o += chain.sites()[static_cast<std::size_t>(i)].n_o * p(i);
  return out;
}

struct ScanSettings {
  double g = two_pi * 0.282;
  double gt_min = 1.0;
  double gt_max = 40.0;
  double gt_step = 0.25;
  double threshold = 0.99;
  double refine_tolerance_us = 1e-3;
  bool full_curve = false;  // keep scanning past the critical point
  Tolerances tolerances{};
};

struct CriticalTime {
  int excitation = 0;
  double gt = std::numeric_limits<double>::quiet_NaN();
  double duration = std::numeric_limits<double>::quiet_NaN();  // μs
  double fidelity = 0.0;
  bool censored = true;  // no peak ≥ threshold inside the range
};

struct ScanPoint {
  int excitation;
  double gt;
  double duration;
  double fidelity;
  double n_o;
};

struct ScanResult {
  std::vector<CriticalTime> critical;
  std::vector<ScanPoint> curve;
};

namespace detail {

// Maximizes f on [a, b] by golden-section search to width `tol`.
template <class F>
std::pair<double, double> golden_maximize(F&& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace detail

// First local peak of the final transfer fidelity, in increasing T, whose
// refined height reaches the threshold. Coarse local maxima are refined by
// golden-section search on their bracketing interval.
inline std::pair<CriticalTime, std::vector<ScanPoint>> scan_one(const ChainModel& model, const ScanSettings& s) {
  require(s.gt_step > 0.0 && s.gt_max > s.gt_min && s.gt_min > 0.0, "scan_critical_time: invalid gT range");
  CriticalTime ct;
  ct.excitation = model.excitation;
  std::vector<ScanPoint> curve;
  const auto fid = [&](double gt) { return closed_transfer(model, s.g, gt / s.g, s.tolerances).fidelity; };
  const std::size_t count = static_cast<std::size_t>(std::floor((s.gt_max - s.gt_min) / s.gt_step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) {
    const double gt = s.gt_min + s.gt_step * static_cast<double>(i);
    const TransferOutcome o = closed_transfer(model, s.g, gt / s.g, s.tolerances);
    curve.push_back({model.excitation, gt, gt / s.g, o.fidelity, o.n_o});
    const std::size_t m = curve.size();
    if (ct.censored && m >= 3 && curve[m - 2].fidelity >= curve[m - 3].fidelity &&
        curve[m - 2].fidelity >= curve[m - 1].fidelity) {
      const auto [peak, value] =
          detail::golden_maximize(fid, curve[m - 3].gt, curve[m - 1].gt, s.refine_tolerance_us * s.g);
      if (value >= s.threshold) {
        ct.gt = peak;
        ct.duration = peak / s.g;
        ct.fidelity = value;
        ct.censored = false;
        if (!s.full_curve) break;
      }
    }
  }
  return {ct, curve};
}

inline ScanResult scan_critical_time(ChainKind kind, const std::vector<int>& excitations, const ScanSettings& s,
                                     unsigned threads = 0) {
  std::vector<std::pair<CriticalTime, std::vector<ScanPoint>>> parts(excitations.size());
  parallel_for(excitations.size(), threads,
               [&](std::size_t i) { parts[i] = scan_one({kind, excitations[i]}, s); });
  ScanResult out;
  for (auto& [ct, curve] : parts) {
    out.critical.push_back(ct);
    out.curve.insert(out.curve.end(), curve.begin(), curve.end());
  }
  return out;
}

struct FitResult {
  std::vector<double> coefficients;  // highest power first
  double residual_norm = 0.0;
  std::size_t points = 0;

  double operator()(double x) const {
    double y = 0.0;
    for (double c : coefficients) y = y * x + c;
    return y;
  }
};

// Ordinary least-squares polynomial fit of the given order.
inline FitResult fit_scaling(const std::vector<std::pair<double, double>>& points, int order) {
  require(order == 1 || order == 2, "fit_scaling: order must be 1 or 2");
  require(points.size() >= static_cast<std::size_t>(order + 2),
          "fit_scaling: need at least " + std::to_string(order + 2) + " points");
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(n, order + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = points[static_cast<std::size_t>(i)].first;
    for (int p = 0; p <= order; ++p) a(i, p) = std::pow(x, order - p);
    y(i) = points[static_cast<std::size_t>(i)].second;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-12);
  require(qr.rank() == order + 1, "fit_scaling: design matrix is rank deficient");
  const Eigen::VectorXd coef = qr.solve(y);
  FitResult fit;
  fit.coefficients.assign(coef.data(), coef.data() + coef.size());
  fit.residual_norm = (a * coef - y).norm();
  fit.points = points.size();
  return fit;
}

inline std::vector<std::pair<double, double>> fit_points(const std::vector<CriticalTime>& cts) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& c : cts)
    if (!c.censored) pts.emplace_back(c.excitation, c.gt);
  return pts;
}

// ------------------------------------------------------- winding numbers

// Couplings with ratio G_m/G_o = r at fixed magnitude g.
inline Couplings couplings_from_ratio(double ratio, double g) {
  require(ratio > 0.0 && std::isfinite(ratio), "couplings_from_ratio: ratio must be positive");
  const double norm = std::hypot(ratio, 1.0);
  return {g * ratio / norm, g / norm};
}

// cos²(atan(G_m/G_o)) for the FSL, a 1 → 0 step for SSH.
inline double reference_winding(ChainKind kind, const Couplings& c) {
  if (kind == ChainKind::fsl) return analytic_winding(c);
  if (c.g_m < c.g_o) return 1.0;
  if (c.g_m > c.g_o) return 0.0;
  return 0.5;
}

struct WindingRow {
  double ratio;
  int excitation;
  double w_mcd;
  double w_analytic;
  double tau;
  std::uint64_t seed;
  bool converged;
};

inline std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  require(lo > 0.0 && hi >= lo && count >= 1, "log_spaced: invalid range");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)));
  }
  return out;
}

inline std::vector<WindingRow> winding_vs_ratio(ChainKind kind, const std::vector<int>& excitations,
                                                const std::vector<double>& ratios, double g, double tau_g,
                                                McdOptions mcd, std::uint64_t seed, unsigned threads = 0) {
  mcd.tau = tau_g / g;
  std::vector<WindingRow> rows(excitations.size() * ratios.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    const int n = excitations[i / ratios.size()];
    const double r = ratios[i % ratios.size()];
    const Couplings c = couplings_from_ratio(r, g);
    const WindingEstimate w = measure_winding_mcd({kind, n}, c, mcd);
    rows[i] = {r, n, w.value, reference_winding(kind, c), w.tau, seed, w.converged};
  });
  return rows;
}

struct WindingProbeRow {
  int excitation;
  double t;
  double t_over_T;
  double mean;
  double stderr_;
  double analytic;  // undisordered schedule
  std::size_t samples;
};

struct EnsembleStats {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Mean and standard error, summed in index order.
inline EnsembleStats ensemble_stats(const std::vector<double>& v) {
  EnsembleStats s;
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return s;
}

struct DisorderSpec {
  double eta_m = 0.0;
  double eta_o = 0.0;
  std::size_t samples = 101;
  std::uint64_t seed = 1;
};

// Freezes the couplings of each disordered schedule at the probe times and
// measures the MCD winding there; one quenched draw per sample.
inline std::vector<WindingProbeRow> winding_during_pump(const std::vector<int>& excitations, const DisorderSpec& dis,
                                                        double g, double duration,
                                                        const std::vector<double>& probe_fractions, McdOptions mcd,
                                                        double tau_g = 200.0, unsigned threads = 0) {
  require(dis.samples >= 1, "winding_during_pump: need at least one sample");
  mcd.tau = tau_g / g;
  const CouplingSchedule clean(g, duration);
  const std::size_t per_n = probe_fractions.size() * dis.samples;
  std::vector<double> values(excitations.size() * per_n);
  parallel_for(values.size(), threads, [&](std::size_t i) {
    const int n = excitations[i / per_n];
    const std::size_t rem = i % per_n;
    const double frac = probe_fractions[rem / dis.samples];
    const std::size_t sample = rem % dis.samples;
    const CouplingSchedule s(g, duration, sample_disorder(dis.eta_m, dis.eta_o, dis.seed, sample));
    values[i] = measure_winding_mcd({ChainKind::fsl, n}, s.at(frac * duration), mcd).value;
  });
  std::vector<WindingProbeRow> rows;
  for (std::size_t ni = 0; ni < excitations.size(); ++ni)
    for (std::size_t k = 0; k < probe_fractions.size(); ++k) {
      const auto first = values.begin() + static_cast<std::ptrdiff_t>(ni * per_n + k * dis.samples);
      const EnsembleStats st = ensemble_stats(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(dis.samples)));
      const double t = probe_fractions[k] * duration;
      rows.push_back({excitations[ni], t, probe_fractions[k], st.mean, st.stderr_, analytic_winding(clean.at(t)),
                      dis.samples});
    }
  return rows;
}

// ------------------------------------------------------ disorder surface

struct TransducerSetup {
  int excitation = 5;
  double g = two_pi * 0.282;
  double duration = 8.2;
  DecayRates rates{};
  Tolerances tolerances{};
};

// Final ⟨a†a⟩ of one open-system Fock pump with a fixed disorder draw.
inline double final_optical_photons(const TransducerSetup& s, const Disorder& d) {
  const ProductBasis basis(s.excitation, s.excitation, s.excitation);
  const CouplingSchedule schedule(s.g, s.duration, d);
  const DrivenHamiltonian h = scheduled_jc_hamiltonian(basis, schedule);
  const QuantumState rho0 = prepare_initial(FockInput{s.excitation}, basis);
  const std::vector<double> grid{0.0, s.duration};
  const Trajectory traj = evolve_lindblad(h, rho0, s.rates, grid, {});
  return expectation(slot_number_operator(basis, Slot::opt), *traj.final_state);
}

struct SurfaceRow {
  double eta_m;
  double eta_o;
  double mean;
  double stderr_;
  std::size_t samples;
};

inline std::vector<SurfaceRow> disorder_surface(const std::vector<double>& eta_m_grid,
                                                const std::vector<double>& eta_o_grid, std::size_t samples,
                                                std::uint64_t seed, const TransducerSetup& setup,
                                                unsigned threads = 0) {
  require(samples >= 1, "disorder_surface: need at least one sample");
  for (double e : eta_m_grid) require(e >= 0.0 && e <= 0.2, "disorder_surface: eta_m grid must lie in [0, 0.2]");
  for (double e : eta_o_grid) require(e >= 0.0 && e <= 0.2, "disorder_surface: eta_o grid must lie in [0, 0.2]");
  const std::size_t cells = eta_m_grid.size() * eta_o_grid.size();
  std::vector<double> values(cells * samples);
  parallel_for(values.size(), threads, [&](std::size_t i) {
    const std::size_t cell = i / samples;
    const std::size_t sample = i % samples;
    const double em = eta_m_grid[cell / eta_o_grid.size()];
    const double eo = eta_o_grid[cell % eta_o_grid.size()];
    values[i] = final_optical_photons(setup, sample_disorder(em, eo, seed, sample));
  });
  std::vector<SurfaceRow> rows;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const auto first = values.begin() + static_cast<std::ptrdiff_t>(cell * samples);
    const EnsembleStats st = ensemble_stats(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(samples)));
    rows.push_back({eta_m_grid[cell / eta_o_grid.size()], eta_o_grid[cell % eta_o_grid.size()], st.mean, st.stderr_,
                    samples});
  }
  return rows;
}

}  // namespace fslt
