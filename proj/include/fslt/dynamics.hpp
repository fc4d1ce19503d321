#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fslt/hamiltonians.hpp"
#include "fslt/hilbert.hpp"
#include "fslt/integrator.hpp"

namespace fslt {

// Decay rates in rad/μs.
struct DecayRates {
  double gamma0 = 0.0;   // superatom |R⟩ → |G⟩
  double kappa_m = 0.0;  // MW photon loss
  double kappa_o = 0.0;  // optical photon loss

  bool any() const { return gamma0 > 0.0 || kappa_m > 0.0 || kappa_o > 0.0; }
};

struct Observable {
  std::string name;
  std::function<double(double t, const QuantumState&)> eval;
};

struct EvolveOptions {
  Tolerances tolerances;
  // Grid indices whose full state is kept in the trajectory.
  std::vector<std::size_t> snapshot_indices;
  // Lindblad only: check min eigenvalue every `positivity_stride` grid
  // points (0 = choose from the dimension). The final point is always checked.
  std::size_t positivity_stride = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // rows[k][c] at times[k]
  std::vector<std::pair<std::size_t, QuantumState>> snapshots;
  std::optional<QuantumState> final_state;
  IntegrationStats stats;
  double max_trace_error = 0.0;  // |‖ψ‖² − 1| or |tr ρ − 1| over the grid
  double min_eigenvalue = std::numeric_limits<double>::quiet_NaN();

  std::size_t column_index(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (columns[c] == name) return c;
    throw InvalidArgument("Trajectory: no column named '" + name + "'");
  }
  std::vector<double> column(const std::string& name) const {
    const std::size_t c = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
  double final_value(const std::string& name) const { return rows.back()[column_index(name)]; }
};

inline double expectation(const Operator& op, const QuantumState& state) {
  require(op.basis == state.basis(), "expectation: operator and state live on different bases");
  require(op.is_hermitian(1e-10), "expectation: operator is not Hermitian");
  cplx value;
  if (state.is_pure()) {
    const Vector& psi = state.vector();
    value = psi.dot(op.matrix * psi);
  } else {
    const DenseMatrix& rho = state.density_ref();
    value = 0.0;
    for (int k = 0; k < op.matrix.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(op.matrix, k); it; ++it) value += it.value() * rho(it.col(), it.row());
  }
  require(std::abs(value.imag()) < 1e-10 * std::max(1.0, std::abs(value.real())),
          "expectation: imaginary residue " + std::to_string(value.imag()) + " exceeds 1e-10");
  return value.real();
}

// Occupation of each chain site; accepts chain-basis or product-basis states.
inline std::vector<double> site_populations(const QuantumState& state, const FockChain& chain) {
  const Eigen::VectorXd pops = state.populations();
  std::vector<double> out(static_cast<std::size_t>(chain.size()));
  if (state.basis() == chain.descriptor()) {
    for (int i = 0; i < chain.size(); ++i) out[static_cast<std::size_t>(i)] = pops(i);
    return out;
  }
  require(state.basis().kind == BasisDescriptor::Kind::product,
          "site_populations: state basis is neither this chain nor a product basis");
  const auto idx = chain_to_product_embedding(chain, ProductBasis::from_descriptor(state.basis()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = pops(idx[i]);
  return out;
}

inline Observable expectation_observable(std::string name, Operator op) {
  return {std::move(name), [op = std::move(op)](double, const QuantumState& s) { return expectation(op, s); }};
}

namespace detail {

inline Trajectory make_trajectory(std::span<const double> grid, const std::vector<Observable>& observables) {
  Trajectory traj;
  traj.times.assign(grid.begin(), grid.end());
  for (const auto& o : observables) traj.columns.push_back(o.name);
  traj.rows.reserve(grid.size());
  return traj;
}

inline bool wants_snapshot(const EvolveOptions& opt, std::size_t k) {
  for (std::size_t i : opt.snapshot_indices)
    if (i == k) return true;
  return false;
}

inline void record(Trajectory& traj, const std::vector<Observable>& observables, const EvolveOptions& opt,
                   std::size_t k, double t, const QuantumState& state) {
  std::vector<double> row;
  row.reserve(observables.size());
  for (const auto& o : observables) row.push_back(o.eval(t, state));
  traj.rows.push_back(std::move(row));
  if (wants_snapshot(opt, k)) traj.snapshots.emplace_back(k, state);
  traj.max_trace_error = std::max(traj.max_trace_error, std::abs(state.trace() - 1.0));
}

}  // namespace detail

// dψ/dt = −i H(t) ψ.
inline Trajectory evolve_schrodinger(const DrivenHamiltonian& hamiltonian, const QuantumState& initial,
                                     std::span<const double> grid, const std::vector<Observable>& observables,
                                     const EvolveOptions& options = {}) {
  require(initial.is_pure(), "evolve_schrodinger: initial state must be pure");
  require(initial.basis() == hamiltonian.basis(), "evolve_schrodinger: state and Hamiltonian bases differ");
  Trajectory traj = detail::make_trajectory(grid, observables);
  SparseMatrix h = hamiltonian.pattern();
  const auto rhs = [&](double t, const Vector& y, Vector& dydt) {
    hamiltonian.assemble(t, h);
    dydt.noalias() = h * y;
    dydt *= cplx(0.0, -1.0);
  };
  const BasisDescriptor& basis = initial.basis();
  const auto observe = [&](std::size_t k, double t, const Vector& y) {
    QuantumState s = QuantumState::evolved(basis, y);
    detail::record(traj, observables, options, k, t, s);
    if (k + 1 == grid.size()) traj.final_state = std::move(s);
  };
  traj.stats = integrate_dopri5(rhs, Vector(initial.vector()), grid, options.tolerances, observe);
  return traj;
}

// Standard jump set √Γ₀|G⟩⟨R|, √κ_m b, √κ_o a; zero rates are omitted.
inline std::vector<SparseMatrix> standard_jump_operators(const ProductBasis& basis, const DecayRates& rates) {
  require(rates.gamma0 >= 0.0 && rates.kappa_m >= 0.0 && rates.kappa_o >= 0.0, "DecayRates: rates must be >= 0");
  std::vector<SparseMatrix> jumps;
  if (rates.gamma0 > 0.0)
    jumps.push_back(std::sqrt(rates.gamma0) * embed(atom_lowering_operator(), Slot::atom, basis).matrix);
  if (rates.kappa_m > 0.0) jumps.push_back(std::sqrt(rates.kappa_m) * mw_annihilation(basis).matrix);
  if (rates.kappa_o > 0.0) jumps.push_back(std::sqrt(rates.kappa_o) * opt_annihilation(basis).matrix);
  return jumps;
}

// dρ/dt = −i[H(t), ρ] + Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ}).
inline Trajectory evolve_lindblad(const DrivenHamiltonian& hamiltonian, const QuantumState& initial,
                                  const std::vector<SparseMatrix>& jumps, std::span<const double> grid,
                                  const std::vector<Observable>& observables, const EvolveOptions& options = {}) {
  require(initial.basis() == hamiltonian.basis(), "evolve_lindblad: state and Hamiltonian bases differ");
  const BasisDescriptor& basis = initial.basis();
  const Eigen::Index dim = basis.dim;

  SparseMatrix decay(dim, dim);  // Σ L†L
  std::vector<SparseMatrix> jumps_adj;
  for (const auto& l : jumps) {
    require(l.rows() == dim && l.cols() == dim, "evolve_lindblad: jump operator size mismatch");
    decay += SparseMatrix(l.adjoint() * l);
    jumps_adj.emplace_back(l.adjoint());
  }
  decay *= cplx(0.5, 0.0);

  Trajectory traj = detail::make_trajectory(grid, observables);
  SparseMatrix h = hamiltonian.pattern();
  DenseMatrix x(dim, dim), tmp(dim, dim);
  const auto rhs = [&](double t, const DenseMatrix& rho, DenseMatrix& drho) {
    hamiltonian.assemble(t, h);
    // X = −i H_eff ρ with H_eff = H − (i/2) Σ L†L; then dρ = X + X† + Σ LρL†.
    x.noalias() = h * rho;
    x *= cplx(0.0, -1.0);
    x.noalias() -= decay * rho;
    drho = x;
    drho += x.adjoint();
    for (std::size_t k = 0; k < jumps.size(); ++k) {
      tmp.noalias() = jumps[k] * rho;
      drho.noalias() += tmp * jumps_adj[k];
    }
  };
  const auto symmetrize = [&](DenseMatrix& rho, DenseMatrix& drho) {
    tmp = rho.adjoint();
    rho = 0.5 * (rho + tmp);
    tmp = drho.adjoint();
    drho = 0.5 * (drho + tmp);
  };

  const std::size_t stride =
      options.positivity_stride > 0 ? options.positivity_stride
                                    : (dim <= 128 ? 1 : std::max<std::size_t>(1, grid.size() / 25));
  double min_eig = std::numeric_limits<double>::infinity();
  const auto observe = [&](std::size_t k, double t, const DenseMatrix& rho) {
    if (k % stride == 0 || k + 1 == grid.size()) {
      const double e = Eigen::SelfAdjointEigenSolver<DenseMatrix>(rho, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
      min_eig = std::min(min_eig, e);
      if (e < -1e-4)
        throw NumericalError("evolve_lindblad: density matrix lost positivity (min eigenvalue " + std::to_string(e) +
                                 ") at t = " + std::to_string(t),
                             t);
    }
    QuantumState s = QuantumState::evolved(basis, rho);
    detail::record(traj, observables, options, k, t, s);
    if (k + 1 == grid.size()) traj.final_state = std::move(s);
  };
  traj.stats = integrate_dopri5(rhs, initial.density(), grid, options.tolerances, observe, symmetrize);
  traj.min_eigenvalue = min_eig;
  return traj;
}

inline Trajectory evolve_lindblad(const DrivenHamiltonian& hamiltonian, const QuantumState& initial,
                                  const DecayRates& rates, std::span<const double> grid,
                                  const std::vector<Observable>& observables, const EvolveOptions& options = {}) {
  const ProductBasis basis = ProductBasis::from_descriptor(initial.basis());
  return evolve_lindblad(hamiltonian, initial, standard_jump_operators(basis, rates), grid, observables, options);
}

}  // namespace fslt
