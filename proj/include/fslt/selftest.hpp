#pragma once

// Fast invariant checks behind `fslt selftest`.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fslt/experiments.hpp"

namespace fslt {

struct SelfTestResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string error;  // exception text, if the check threw
};

namespace detail {

inline double max_abs(const DenseMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double check_spectrum_constancy() {
  const double g = two_pi * 0.282;
  const CouplingSchedule s(g, 8.2);
  double worst = 0.0;
  for (int n : {1, 5, 12})
    for (const auto& row : spectrum_along_schedule({ChainKind::fsl, n}, s, 51)) {
      std::vector<double> expected;
      for (int j = n; j >= 1; --j) expected.push_back(-std::sqrt(double(j)) * g);
      expected.push_back(0.0);
      for (int j = 1; j <= n; ++j) expected.push_back(std::sqrt(double(j)) * g);
      for (std::size_t k = 0; k < expected.size(); ++k) worst = std::max(worst, std::abs(row.energies[k] - expected[k]));
    }
  return worst / g;
}

inline double check_chiral() {
  double worst = 0.0;
  for (auto kind : {ChainKind::fsl, ChainKind::ssh})
    for (int n = 1; n <= 12; ++n) {
      const DenseMatrix gc = chiral_operator(n).dense();
      const DenseMatrix h = chain_hamiltonian({kind, n}, {0.37 * n, 1.3}).dense();
      worst = std::max(worst, max_abs(gc * h * gc + h));
    }
  return worst;
}

inline double check_zero_mode() {
  double worst = 0.0;
  for (int n = 1; n <= 10; ++n)
    for (double r : log_spaced(1e-2, 1e2, 20)) {
      const Couplings c = couplings_from_ratio(r, 1.0);
      const QuantumState z = zero_mode(n, c);
      worst = std::max(worst, (chain_hamiltonian({ChainKind::fsl, n}, c).dense() * z.vector()).norm());
    }
  return worst;
}

inline double check_distribution_center() {
  double worst = 0.0;
  for (int n = 1; n <= 10; ++n)
    for (double r : log_spaced(1e-2, 1e2, 20)) {
      const Couplings c = couplings_from_ratio(r, 1.0);
      worst = std::max(worst, std::abs(population_center(zero_mode(n, c)) - distribution_center(n, analytic_winding(c))));
    }
  return worst;
}

inline double check_mcd() {
  double worst = 0.0;
  for (int n : {2, 5})
    for (double r : {0.5, 1.0, 2.0}) {
      const Couplings c = couplings_from_ratio(r, 1.0);
      worst = std::max(worst, std::abs(measure_winding_mcd({ChainKind::fsl, n}, c).value - analytic_winding(c)));
    }
  return worst;
}

inline double check_ssh_plateaus() {
  const double w1 = measure_winding_mcd({ChainKind::ssh, 5}, couplings_from_ratio(0.2, 1.0)).value;
  const double w0 = measure_winding_mcd({ChainKind::ssh, 5}, couplings_from_ratio(5.0, 1.0)).value;
  return std::max(std::abs(1.0 - w1), std::abs(w0));
}

inline double check_closed_vs_open() {
  PumpingSetup s;
  s.input = FockInput{3};
  s.duration = 6.0;
  s.grid_points = 51;
  s.open_system = false;
  const Trajectory chain = run_pumping(s).trajectory;
  s.open_system = true;
  s.rates = {};
  const Trajectory open = run_pumping(s).trajectory;
  double worst = 0.0;
  for (const char* col : {"N_o", "N_m", "fidelity", "P_d", "pop_4"}) {
    const auto a = chain.column(col), b = open.column(col);
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  }
  return worst;
}

inline double check_trace() {
  PumpingSetup s;
  s.input = FockInput{3};
  s.grid_points = 51;
  s.rates = {two_pi * 0.0036, two_pi * 0.002, two_pi * 0.0034};
  return run_pumping(s).summary.max_trace_error;
}

inline double check_step_halving() {
  const ChainModel m{ChainKind::fsl, 3};
  const DrivenHamiltonian h = scheduled_chain_hamiltonian(m, CouplingSchedule(two_pi * 0.282, 6.0));
  const std::vector<double> grid = uniform_grid(0.0, 6.0, 61);
  Vector psi = Vector::Zero(7);
  psi(0) = 1.0;
  const QuantumState s0 = QuantumState::pure(h.basis(), psi);
  const std::vector<Observable> obs{{"P_last", [](double, const QuantumState& s) { return s.populations()(6); }}};
  Tolerances coarse;
  coarse.max_step = 0.02;
  Tolerances fine = coarse;
  fine.max_step = 0.01;
  const auto a = evolve_schrodinger(h, s0, grid, obs, {coarse, {}, 0}).column("P_last");
  const auto b = evolve_schrodinger(h, s0, grid, obs, {fine, {}, 0}).column("P_last");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

inline QuantumState single_mode(const Vector& amplitudes) {
  return QuantumState::pure(mode_descriptor(static_cast<int>(amplitudes.size()) - 1), amplitudes / amplitudes.norm());
}

inline double check_wigner_points() {
  const WignerGrid one{0.0, 1.0, 2, 0.0, 1.0, 2};
  Vector vac = Vector::Zero(8);
  vac(0) = 1.0;
  Vector fock1 = Vector::Zero(8);
  fock1(1) = 1.0;
  const double pi = std::numbers::pi;
  double worst = std::abs(wigner(single_mode(vac), one).values(0, 0) - 1.0 / pi);
  worst = std::max(worst, std::abs(wigner(single_mode(fock1), one).values(0, 0) + 1.0 / pi));
  const WignerGrid at{std::sqrt(2.0), std::sqrt(2.0) + 1.0, 2, 0.0, 1.0, 2};
  worst = std::max(worst, std::abs(wigner(single_mode(coherent_amplitudes(1.0, 20)), at).values(0, 0) - 1.0 / pi));
  return worst;
}

inline double check_wigner_norm() {
  double worst = 0.0;
  for (const InputStateSpec& spec : {InputStateSpec{CoherentInput{1.0}}, InputStateSpec{SqueezedVacuumInput{0.7, 0.0}}}) {
    const int n = default_truncation(spec);
    const QuantumState s = single_mode(mode_amplitudes(spec, n));
    worst = std::max(worst, std::abs(wigner(s, default_wigner_grid(n, 121)).integral - 1.0));
  }
  return worst;
}

inline double check_block_structure() {
  const ProductBasis full(4, 4);
  const DenseMatrix h = dual_mode_jc_hamiltonian(full, {0.7, 1.1}).dense();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = 0; j < h.cols(); ++j)
      if (full.label(i).excitation() != full.label(j).excitation()) worst = std::max(worst, std::abs(h(i, j)));
  return worst;
}

inline double check_disorder_determinism() {
  const Disorder a = sample_disorder(0.1, 0.1, 42, 7);
  const Disorder b = sample_disorder(0.1, 0.1, 42, 7);
  return std::abs(a.eps_m - b.eps_m) + std::abs(a.eps_o - b.eps_o);
}

}  // namespace detail

inline std::vector<SelfTestResult> run_selftest() {
  struct Check {
    const char* name;
    double tolerance;
    std::function<double()> fn;
  };
  const std::vector<Check> checks{
      {"fsl spectrum constant along schedule (rel. to g)", 1e-9, detail::check_spectrum_constancy},
      {"chiral anticommutation", 1e-15, detail::check_chiral},
      {"zero mode annihilated by H", 1e-9, detail::check_zero_mode},
      {"zero-mode center equals 2N(1-W)+1", 1e-6, detail::check_distribution_center},
      {"jc hamiltonian block diagonal", 0.0, detail::check_block_structure},
      {"fsl mcd winding vs closed form", 0.05, detail::check_mcd},
      {"ssh mcd plateaus", 0.05, detail::check_ssh_plateaus},
      {"closed vs open at zero decay", 1e-6, detail::check_closed_vs_open},
      {"lindblad trace preservation", 1e-6, detail::check_trace},
      {"step halving convergence", 1e-6, detail::check_step_halving},
      {"wigner point values", 1e-10, detail::check_wigner_points},
      {"wigner normalization", 1e-3, detail::check_wigner_norm},
      {"disorder draws reproducible", 0.0, detail::check_disorder_determinism},
  };
  std::vector<SelfTestResult> out;
  for (const auto& c : checks) {
    SelfTestResult r{c.name, false, 0.0, c.tolerance, {}};
    try {
      r.measured = c.fn();
      r.passed = r.measured <= c.tolerance;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace fslt
