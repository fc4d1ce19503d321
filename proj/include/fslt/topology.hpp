#pragma once

// Chiral symmetry, zero mode, spectra and winding numbers of the chain
// models. Winding numbers are measured dynamically by the mean chiral
// displacement (MCD) and compared with the closed form G_o²/(G_m²+G_o²).

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "fslt/dynamics.hpp"
#include "fslt/hamiltonians.hpp"
#include "fslt/hilbert.hpp"

namespace fslt {

// diag(+1, −1, +1, …, −1, +1): odd sites +1, even sites −1.
inline Operator chiral_operator(int n) {
  require(n >= 1, "chiral_operator: N must be >= 1");
  const int dim = 2 * n + 1;
  SparseMatrix m(dim, dim);
  m.reserve(Eigen::VectorXi::Constant(dim, 1));
  for (int i = 0; i < dim; ++i) m.insert(i, i) = (i % 2 == 0) ? 1.0 : -1.0;
  m.makeCompressed();
  return {FockChain(n).descriptor(), m};
}

// Zero-energy eigenvector of the chain, supported on odd sites only.
// FSL: amplitude on site 2j+1 ∝ √C(N,j) G_o^{N−j} (−G_m)^j, evaluated with
// cos/sin of the coupling angle so the sum is already normalized. SSH:
// ratio recursion a_j = −(u/v) a_{j−1}, run from the dominant end.
inline QuantumState zero_mode(const ChainModel& model, const Couplings& c) {
  require(model.excitation >= 1, "zero_mode: N must be >= 1");
  require(c.g_m != 0.0 || c.g_o != 0.0, "zero_mode: couplings must not both vanish");
  const int n = model.excitation;
  Vector psi = Vector::Zero(2 * n + 1);
  if (model.kind == ChainKind::fsl) {
    const double r = c.magnitude();
    const double co = c.g_o / r;
    const double si = c.g_m / r;
    for (int j = 0; j <= n; ++j) {
      const double log_binom = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
      const double amp = std::exp(0.5 * log_binom) * std::pow(co, n - j) * std::pow(-si, j);
      psi(2 * j) = amp;
    }
  } else {
    if (std::abs(c.g_m) <= std::abs(c.g_o)) {
      psi(0) = 1.0;
      for (int j = 1; j <= n; ++j) psi(2 * j) = -(c.g_m / c.g_o) * psi(2 * j - 2);
    } else {
      psi(2 * n) = 1.0;
      for (int j = n; j >= 1; --j) psi(2 * j - 2) = -(c.g_o / c.g_m) * psi(2 * j);
    }
  }
  psi /= psi.norm();
  return QuantumState::pure(FockChain(n).descriptor(), std::move(psi));
}

inline QuantumState zero_mode(int n, const Couplings& c) { return zero_mode({ChainKind::fsl, n}, c); }

struct Eigensystem {
  Eigen::VectorXd values;  // ascending
  DenseMatrix vectors;     // columns
};

inline Eigensystem eigensystem(const Operator& h) {
  require(h.is_hermitian(1e-10), "spectrum: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h.dense());
  return {es.eigenvalues(), es.eigenvectors()};
}

inline std::vector<double> spectrum(const Operator& h) {
  const Eigen::VectorXd v = eigensystem(h).values;
  return {v.data(), v.data() + v.size()};
}

// P_d = Σ_{j=1}^N j (P_{2j−1} − P_{2j}); the end site 2N+1 is not counted.
inline double chiral_displacement(std::span<const double> populations) {
  const std::size_t len = populations.size();
  require(len >= 3 && len % 2 == 1, "chiral_displacement: expected 2N+1 populations, got " + std::to_string(len));
  double pd = 0.0;
  for (std::size_t i = 0; i + 1 < len; ++i) {
    const double cell = static_cast<double>(i / 2 + 1);
    pd += (i % 2 == 0 ? cell : -cell) * populations[i];
  }
  return pd;
}

// Same sum with the end site counted as an odd site of cell N+1.
inline double chiral_displacement_with_end(std::span<const double> populations) {
  const std::size_t len = populations.size();
  require(len >= 3 && len % 2 == 1, "chiral_displacement: expected 2N+1 populations, got " + std::to_string(len));
  return chiral_displacement(populations) + static_cast<double>(len / 2 + 1) * populations[len - 1];
}

inline double analytic_winding(const Couplings& c) {
  require(c.g_m != 0.0 || c.g_o != 0.0, "analytic_winding: couplings must not both vanish");
  const double gm2 = c.g_m * c.g_m;
  const double go2 = c.g_o * c.g_o;
  return go2 / (gm2 + go2);
}

inline double distribution_center(int n, double winding) {
  require(n >= 1, "distribution_center: N must be >= 1");
  require(winding >= 0.0 && winding <= 1.0, "distribution_center: W must lie in [0, 1], got " + std::to_string(winding));
  return 2.0 * n * (1.0 - winding) + 1.0;
}

// Population-weighted mean site index (1-based) of a chain state.
inline double population_center(const QuantumState& state) {
  const Eigen::VectorXd p = state.populations();
  double num = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) num += static_cast<double>(i + 1) * p(i);
  return num / p.sum();
}

struct McdOptions {
  double tau = 0.0;                // 0 → 200 / √(G_m² + G_o²)
  std::size_t points = 4001;       // trapezoid nodes over [0, τ]
  int initial_even_site = 0;       // 0 → middle site 2⌈N/2⌉, −1 → average over every even site
  bool count_end_site = true;      // include site 2N+1 as cell N+1 in P_d
  Tolerances tolerances{};
  double convergence_tolerance = 0.02;
};

struct WindingEstimate {
  double value = 0.0;
  double tau = 0.0;
  int initial_even_site = 0;  // site used, or −1 when averaged over all even sites
  ChainKind kind = ChainKind::fsl;
  int excitation = 0;
  double last_quarter = 0.0;  // same estimator over [3τ/4, τ]
  bool converged = true;      // |last_quarter − value| ≤ convergence_tolerance
};

namespace detail {

inline double trapezoid(std::span<const double> t, std::span<const double> y, std::size_t from = 0) {
  double s = 0.0;
  for (std::size_t i = from + 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

}  // namespace detail

// W = (2/τ) ∫₀^τ P_d(t) dt after starting on an even site, with constant
// couplings. The default starts on the middle even site and counts the end
// site in P_d.
inline WindingEstimate measure_winding_mcd(const ChainModel& model, const Couplings& c, const McdOptions& opt = {}) {
  require(c.g_m != 0.0 || c.g_o != 0.0, "measure_winding_mcd: couplings must not both vanish");
  const int n = model.excitation;
  const double tau = opt.tau > 0.0 ? opt.tau : 200.0 / c.magnitude();
  require(opt.points >= 2000, "measure_winding_mcd: at least 2000 quadrature points are required");
  std::vector<int> sites;
  if (opt.initial_even_site == -1) {
    for (int s = 2; s <= 2 * n; s += 2) sites.push_back(s);
  } else if (opt.initial_even_site == 0) {
    sites.push_back(2 * ((n + 1) / 2));
  } else {
    require(opt.initial_even_site % 2 == 0 && opt.initial_even_site >= 2 && opt.initial_even_site <= 2 * n,
            "measure_winding_mcd: initial site must be an even index in [2, 2N]");
    sites.push_back(opt.initial_even_site);
  }

  const DrivenHamiltonian h = DrivenHamiltonian::constant(chain_hamiltonian(model, c));
  const std::vector<double> grid = uniform_grid(0.0, tau, opt.points);
  const bool with_end = opt.count_end_site;
  const std::vector<Observable> obs{{"P_d", [with_end](double, const QuantumState& s) {
                                       const Eigen::VectorXd p = s.populations();
                                       const std::span<const double> v(p.data(), static_cast<std::size_t>(p.size()));
                                       return with_end ? chiral_displacement_with_end(v) : chiral_displacement(v);
                                     }}};
  std::vector<double> mean_pd(grid.size(), 0.0);
  for (int site : sites) {
    Vector psi0 = Vector::Zero(2 * n + 1);
    psi0(site - 1) = 1.0;
    const Trajectory traj =
        evolve_schrodinger(h, QuantumState::pure(h.basis(), std::move(psi0)), grid, obs, {opt.tolerances, {}, 0});
    for (std::size_t k = 0; k < grid.size(); ++k) mean_pd[k] += traj.rows[k][0] / static_cast<double>(sites.size());
  }

  WindingEstimate est;
  est.tau = tau;
  est.initial_even_site = sites.size() == 1 ? sites.front() : -1;
  est.kind = model.kind;
  est.excitation = n;
  est.value = 2.0 * detail::trapezoid(grid, mean_pd) / tau;
  const std::size_t q = (3 * (grid.size() - 1)) / 4;
  est.last_quarter = 2.0 * detail::trapezoid(grid, mean_pd, q) / (grid.back() - grid[q]);
  est.converged = std::abs(est.last_quarter - est.value) <= opt.convergence_tolerance;
  return est;
}

}  // namespace fslt
