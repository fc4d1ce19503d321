#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fslt/hilbert.hpp"

namespace fslt {

// Collective couplings in rad/μs.
struct Couplings {
  double g_m = 0.0;
  double g_o = 0.0;

  double magnitude() const { return std::hypot(g_m, g_o); }
};

// Static (quenched) relative disorder on the two couplings.
struct Disorder {
  double eps_m = 0.0;
  double eps_o = 0.0;
};

// G_m(t) = g sin(πt/2T)(1+ε_m), G_o(t) = g cos(πt/2T)(1+ε_o) on [0, T].
class CouplingSchedule {
 public:
  CouplingSchedule(double g, double duration, Disorder disorder = {})
      : g_(g), duration_(duration), disorder_(disorder) {
    require(g > 0.0 && std::isfinite(g), "CouplingSchedule: g must be positive");
    require(duration > 0.0 && std::isfinite(duration), "CouplingSchedule: duration must be positive");
  }

  double g() const { return g_; }
  double duration() const { return duration_; }
  const Disorder& disorder() const { return disorder_; }

  double mw_coefficient(double t) const { return g_ * std::sin(phase(t)) * (1.0 + disorder_.eps_m); }
  double opt_coefficient(double t) const { return g_ * std::cos(phase(t)) * (1.0 + disorder_.eps_o); }

  Couplings at(double t) const {
    require(t >= 0.0 && t <= duration_, "schedule_at: t = " + std::to_string(t) + " outside [0, T]");
    return {mw_coefficient(t), opt_coefficient(t)};
  }

 private:
  double phase(double t) const { return std::numbers::pi * t / (2.0 * duration_); }

  double g_;
  double duration_;
  Disorder disorder_;
};

inline Couplings schedule_at(const CouplingSchedule& s, double t) { return s.at(t); }

enum class ChainKind : std::uint8_t { fsl, ssh };

inline const char* to_string(ChainKind k) { return k == ChainKind::fsl ? "fsl" : "ssh"; }

struct ChainModel {
  ChainKind kind = ChainKind::fsl;
  int excitation = 1;
};

// Intra-cell hopping u_j (sites 2j-1, 2j), j = 1..N.
inline double intra_hopping(const ChainModel& m, const Couplings& c, int j) {
  return m.kind == ChainKind::fsl ? c.g_m * std::sqrt(static_cast<double>(m.excitation - j + 1)) : c.g_m;
}
// Inter-cell hopping v_j (sites 2j, 2j+1).
inline double inter_hopping(const ChainModel& m, const Couplings& c, int j) {
  return m.kind == ChainKind::fsl ? c.g_o * std::sqrt(static_cast<double>(j)) : c.g_o;
}

inline Operator chain_hamiltonian(const ChainModel& model, const Couplings& c) {
  require(model.excitation >= 1, "chain_hamiltonian: N must be >= 1");
  require(std::isfinite(c.g_m) && std::isfinite(c.g_o), "chain_hamiltonian: couplings must be finite");
  const int dim = 2 * model.excitation + 1;
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(4 * model.excitation));
  for (int j = 1; j <= model.excitation; ++j) {
    const double u = intra_hopping(model, c, j);
    const double v = inter_hopping(model, c, j);
    // 0-based: site 2j-1 -> 2j-2
    t.emplace_back(2 * j - 2, 2 * j - 1, u);
    t.emplace_back(2 * j - 1, 2 * j - 2, u);
    t.emplace_back(2 * j - 1, 2 * j, v);
    t.emplace_back(2 * j, 2 * j - 1, v);
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  m.prune([](Eigen::Index, Eigen::Index, const cplx& v) { return v != cplx(0.0); });
  return {FockChain(model.excitation).descriptor(), m};
}

// G_m |R⟩⟨G| b + G_o |R⟩⟨G| a + H.c.
inline Operator dual_mode_jc_hamiltonian(const ProductBasis& basis, const Couplings& c) {
  require(basis.n_max_mw() >= 1 && basis.n_max_opt() >= 1 && basis.atom_dim() == 2,
          "dual_mode_jc_hamiltonian: truncations must be >= 1 with a two-level atom");
  const Operator raise = {atom_descriptor(), SparseMatrix(atom_lowering_operator().matrix.adjoint())};
  const SparseMatrix sigma_plus = embed(raise, Slot::atom, basis).matrix;
  const SparseMatrix b = mw_annihilation(basis).matrix;
  const SparseMatrix a = opt_annihilation(basis).matrix;
  SparseMatrix h = c.g_m * (sigma_plus * b) + c.g_o * (sigma_plus * a);
  SparseMatrix full = h + SparseMatrix(h.adjoint());
  full.prune([](Eigen::Index, Eigen::Index, const cplx& v) { return v != cplx(0.0); });
  return {basis.descriptor(), full};
}

// H(t) = Σ_k f_k(t) H_k with fixed sparse terms. All terms are merged onto
// one sparsity pattern so assembling H(t) only rescales stored values.
class DrivenHamiltonian {
 public:
  using Coefficient = std::function<double(double)>;

  DrivenHamiltonian(BasisDescriptor basis, std::vector<std::pair<SparseMatrix, Coefficient>> terms)
      : basis_(basis) {
    require(!terms.empty(), "DrivenHamiltonian: needs at least one term");
    SparseMatrix pattern(basis.dim, basis.dim);
    for (const auto& [m, f] : terms) {
      require(m.rows() == basis.dim && m.cols() == basis.dim, "DrivenHamiltonian: term size mismatch");
      SparseMatrix ones = m;
      for (int k = 0; k < ones.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(ones, k); it; ++it) it.valueRef() = 1.0;
      pattern += ones;
    }
    pattern.makeCompressed();
    pattern_ = pattern;
    for (auto& [m, f] : terms) {
      // Align the term's values with the merged pattern.
      SparseMatrix aligned = pattern;
      for (int k = 0; k < aligned.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(aligned, k); it; ++it) it.valueRef() = m.coeff(it.row(), it.col());
      values_.emplace_back(Eigen::Map<const Vector>(aligned.valuePtr(), aligned.nonZeros()));
      coefficients_.push_back(std::move(f));
    }
  }

  static DrivenHamiltonian constant(const Operator& h) {
    return DrivenHamiltonian(h.basis, {{h.matrix, [](double) { return 1.0; }}});
  }

  const BasisDescriptor& basis() const { return basis_; }

  // Writes H(t) into `out`, which must hold a copy of pattern().
  void assemble(double t, SparseMatrix& out) const {
    Eigen::Map<Vector> v(out.valuePtr(), out.nonZeros());
    v.setZero();
    for (std::size_t k = 0; k < values_.size(); ++k) v += coefficients_[k](t) * values_[k];
  }

  const SparseMatrix& pattern() const { return pattern_; }

  SparseMatrix at(double t) const {
    SparseMatrix out = pattern_;
    assemble(t, out);
    return out;
  }

  Operator operator_at(double t) const { return {basis_, at(t)}; }

 private:
  BasisDescriptor basis_;
  std::vector<Vector> values_;
  std::vector<Coefficient> coefficients_;
  SparseMatrix pattern_;
};

inline DrivenHamiltonian scheduled_chain_hamiltonian(const ChainModel& model, const CouplingSchedule& s) {
  const Operator hm = chain_hamiltonian(model, {1.0, 0.0});
  const Operator ho = chain_hamiltonian(model, {0.0, 1.0});
  return DrivenHamiltonian(hm.basis, {{hm.matrix, [s](double t) { return s.mw_coefficient(t); }},
                                      {ho.matrix, [s](double t) { return s.opt_coefficient(t); }}});
}

inline DrivenHamiltonian scheduled_jc_hamiltonian(const ProductBasis& basis, const CouplingSchedule& s) {
  const Operator hm = dual_mode_jc_hamiltonian(basis, {1.0, 0.0});
  const Operator ho = dual_mode_jc_hamiltonian(basis, {0.0, 1.0});
  return DrivenHamiltonian(hm.basis, {{hm.matrix, [s](double t) { return s.mw_coefficient(t); }},
                                      {ho.matrix, [s](double t) { return s.opt_coefficient(t); }}});
}

// Uniform double in [0, 1) from the top 53 bits; stable across standard
// library implementations, unlike std::uniform_real_distribution.
inline double uniform_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// One quenched draw ε ∈ [-η, η] per mode. `stream` selects an independent
// sequence (the sample index) so ensembles are reproducible regardless of
// execution order.
inline Disorder sample_disorder(double eta_m, double eta_o, std::uint64_t seed, std::uint64_t stream = 0) {
  require(eta_m >= 0.0 && eta_m <= 0.5 && eta_o >= 0.0 && eta_o <= 0.5,
          "sample_disorder: disorder strengths must lie in [0, 0.5]");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);
  const double um = uniform_unit(rng);
  const double uo = uniform_unit(rng);
  return {eta_m * (2.0 * um - 1.0), eta_o * (2.0 * uo - 1.0)};
}

}  // namespace fslt
