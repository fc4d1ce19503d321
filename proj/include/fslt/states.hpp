#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "fslt/hilbert.hpp"

namespace fslt {

struct FockInput {
  int n = 1;
};
struct CoherentInput {
  cplx alpha{1.0, 0.0};
};
struct SqueezedVacuumInput {
  double r = 0.0;
  double theta = 0.0;
};

using InputStateSpec = std::variant<FockInput, CoherentInput, SqueezedVacuumInput>;

inline constexpr double kTailTolerance = 1e-6;

// Fock amplitudes c_0..c_nmax of a single-mode state.
inline Vector coherent_amplitudes(cplx alpha, int n_max) {
  Vector c(n_max + 1);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= n_max; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return c;
}

// exp[½(ξ* a² − ξ a†²)]|0⟩ with ξ = r e^{iθ}:
// c_{2k} = (−e^{iθ} tanh r)^k √((2k)!) / (2^k k! √cosh r), odd components zero.
inline Vector squeezed_vacuum_amplitudes(double r, double theta, int n_max) {
  Vector c = Vector::Zero(n_max + 1);
  const cplx ratio = -std::polar(std::tanh(r), theta);
  c(0) = 1.0 / std::sqrt(std::cosh(r));
  for (int n = 2; n <= n_max; n += 2) {
    // c_{2k}/c_{2k−2} = ratio · √((2k)(2k−1)) / (2k)
    const double k2 = static_cast<double>(n);
    c(n) = c(n - 2) * ratio * std::sqrt(k2 * (k2 - 1.0)) / k2;
  }
  return c;
}

inline Vector mode_amplitudes(const InputStateSpec& spec, int n_max) {
  return std::visit(
      [&](const auto& s) -> Vector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FockInput>) {
          require(s.n <= n_max, "mode_amplitudes: Fock number exceeds truncation");
          Vector c = Vector::Zero(n_max + 1);
          c(s.n) = 1.0;
          return c;
        } else if constexpr (std::is_same_v<T, CoherentInput>) {
          return coherent_amplitudes(s.alpha, n_max);
        } else {
          return squeezed_vacuum_amplitudes(s.r, s.theta, n_max);
        }
      },
      spec);
}

inline double retained_probability(const InputStateSpec& spec, int n_max) {
  return mode_amplitudes(spec, n_max).squaredNorm();
}

// Default Fock truncation: ⌈|α|²+6|α|+6⌉ for coherent inputs, ⌈6 sinh²r + 10⌉
// rounded up to even for squeezed vacuum, then widened until the discarded
// tail is below 10⁻⁶.
inline int default_truncation(const InputStateSpec& spec) {
  return std::visit(
      [&](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FockInput>) {
          require(s.n >= 0, "FockInput: photon number must be >= 0");
          return std::max(1, s.n);
        } else if constexpr (std::is_same_v<T, CoherentInput>) {
          const double a = std::abs(s.alpha);
          int n = std::max(1, static_cast<int>(std::ceil(a * a + 6.0 * a + 6.0)));
          while (1.0 - retained_probability(spec, n) >= kTailTolerance) ++n;
          return n;
        } else {
          require(s.r >= 0.0, "SqueezedVacuumInput: r must be >= 0");
          const double sh = std::sinh(s.r);
          int n = static_cast<int>(std::ceil(6.0 * sh * sh + 10.0));
          if (n % 2 != 0) ++n;
          while (1.0 - retained_probability(spec, n) >= kTailTolerance) n += 2;
          return n;
        }
      },
      spec);
}

// Product basis suited to transducing `spec`: equal truncations, capped at
// the truncation in total excitation (the dynamics never raises it).
inline ProductBasis transduction_basis(const InputStateSpec& spec, std::optional<int> n_max = std::nullopt) {
  const int n = n_max ? *n_max : default_truncation(spec);
  return ProductBasis(n, n, n);
}

inline Vector product_vector(const ProductBasis& basis, const Vector& mw, AtomLevel atom, const Vector& opt) {
  Vector psi = Vector::Zero(basis.dimension());
  for (Eigen::Index i = 0; i < basis.dimension(); ++i) {
    const SiteLabel& s = basis.label(i);
    if (s.atom != atom || s.n_m >= mw.size() || s.n_o >= opt.size()) continue;
    psi(i) = mw(s.n_m) * opt(s.n_o);
  }
  return psi;
}

namespace detail {

inline Vector checked_amplitudes(const InputStateSpec& spec, const ProductBasis& basis) {
  const int n_max = std::min(basis.n_max_mw(), basis.n_max_opt());
  if (const auto* f = std::get_if<FockInput>(&spec))
    require(f->n <= n_max, "prepare_initial: truncation " + std::to_string(n_max) + " below Fock number " +
                               std::to_string(f->n));
  Vector c = mode_amplitudes(spec, n_max);
  const double kept = c.squaredNorm();
  require(1.0 - kept < kTailTolerance,
          "prepare_initial: truncation " + std::to_string(n_max) + " retains only " + std::to_string(kept) +
              " of the input norm");
  if (basis.max_excitation())
    require(*basis.max_excitation() >= n_max, "prepare_initial: excitation cap below the mode truncation");
  return c / c.norm();
}

}  // namespace detail

// (MW input) ⊗ |G⟩ ⊗ |0_o⟩, renormalized after truncation.
inline QuantumState prepare_initial(const InputStateSpec& spec, const ProductBasis& basis) {
  const Vector c = detail::checked_amplitudes(spec, basis);
  Vector vac = Vector::Zero(1);
  vac(0) = 1.0;
  Vector psi = product_vector(basis, c, AtomLevel::G, vac);
  psi /= psi.norm();
  return QuantumState::pure(basis.descriptor(), std::move(psi));
}

// |0_m, G⟩ ⊗ Σ_n (−1)ⁿ c_n |n_o⟩: the zero mode maps |n_m,G,0_o⟩ to
// (−1)ⁿ|0_m,G,n_o⟩, so a coherent input arrives displaced by −α and a
// squeezed vacuum (even support) arrives unchanged.
inline QuantumState ideal_target(const InputStateSpec& spec, const ProductBasis& basis) {
  Vector c = detail::checked_amplitudes(spec, basis);
  for (Eigen::Index n = 1; n < c.size(); n += 2) c(n) = -c(n);
  Vector vac = Vector::Zero(1);
  vac(0) = 1.0;
  Vector psi = product_vector(basis, vac, AtomLevel::G, c);
  psi /= psi.norm();
  return QuantumState::pure(basis.descriptor(), std::move(psi));
}

// ⟨target|ρ|target⟩
inline double fidelity(const QuantumState& state, const QuantumState& target) {
  require(state.basis() == target.basis(), "fidelity: state and target live on different bases");
  require(target.is_pure(), "fidelity: target must be pure");
  const Vector& t = target.vector();
  cplx f;
  if (state.is_pure()) {
    f = std::norm(t.dot(state.vector()));
  } else {
    f = t.dot(state.density_ref() * t);
  }
  require(std::abs(f.imag()) < 1e-10, "fidelity: imaginary residue " + std::to_string(f.imag()));
  return std::clamp(f.real(), 0.0, 1.0);
}

struct WignerGrid {
  double x_min = -5.0, x_max = 5.0;
  std::size_t nx = 101;
  double p_min = -5.0, p_max = 5.0;
  std::size_t np = 101;

  double x(std::size_t i) const { return x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(nx - 1); }
  double p(std::size_t j) const { return p_min + (p_max - p_min) * static_cast<double>(j) / static_cast<double>(np - 1); }
};

// Symmetric grid over ±(√(2 n_max) + 3) in both quadratures.
inline WignerGrid default_wigner_grid(int n_max, std::size_t points = 121) {
  const double e = std::sqrt(2.0 * n_max) + 3.0;
  return {-e, e, points, -e, e, points};
}

struct WignerResult {
  WignerGrid grid;
  Eigen::MatrixXd values;  // values(j, i) = W(x_i, p_j)
  double integral = 0.0;   // trapezoid estimate of ∫∫ W dx dp
  bool covers_norm = true; // integral ≥ 0.999
};

// ⟨m| D(α) Π D(α)† |n⟩ for m ≥ n:
// (−1)ⁿ √(n!/m!) (2α)^{m−n} e^{−2|α|²} L_n^{(m−n)}(4|α|²); the lower
// triangle is the conjugate.
inline DenseMatrix displaced_parity(cplx alpha, int n_max) {
  const int d = n_max + 1;
  DenseMatrix out(d, d);
  const double a2 = std::norm(alpha);
  const double x = 4.0 * a2;
  const double damp = std::exp(-2.0 * a2);
  for (int n = 0; n < d; ++n) {
    for (int m = n; m < d; ++m) {
      const int k = m - n;
      const double log_ratio = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0));
      const cplx pw = k == 0 ? cplx(1.0) : std::pow(2.0 * alpha, k);
      const double lag = std::assoc_laguerre(static_cast<unsigned>(n), static_cast<unsigned>(k), x);
      const cplx v = (n % 2 == 0 ? 1.0 : -1.0) * std::exp(log_ratio) * pw * damp * lag;
      out(m, n) = v;
      out(n, m) = std::conj(v);
    }
  }
  return out;
}

// W(x, p) = (1/π) Tr[ρ D(α) Π D(α)†], α = (x + i p)/√2, x = (a + a†)/√2.
inline WignerResult wigner(const QuantumState& mode_state, const WignerGrid& grid) {
  require(mode_state.basis().kind == BasisDescriptor::Kind::mode, "wigner: expects a single-mode state");
  require(grid.nx >= 2 && grid.np >= 2 && grid.x_max > grid.x_min && grid.p_max > grid.p_min,
          "wigner: degenerate grid");
  const DenseMatrix rho = mode_state.density();
  const int n_max = static_cast<int>(rho.rows()) - 1;
  WignerResult res;
  res.grid = grid;
  res.values.resize(static_cast<Eigen::Index>(grid.np), static_cast<Eigen::Index>(grid.nx));
  for (std::size_t j = 0; j < grid.np; ++j)
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const cplx alpha = cplx(grid.x(i), grid.p(j)) / std::sqrt(2.0);
      const DenseMatrix dp = displaced_parity(alpha, n_max);
      // Tr[ρ M] = Σ ρ_{nm} M_{mn}
      const cplx tr = (rho.transpose().cwiseProduct(dp)).sum();
      res.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = tr.real() / std::numbers::pi;
    }
  const double dx = (grid.x_max - grid.x_min) / static_cast<double>(grid.nx - 1);
  const double dpp = (grid.p_max - grid.p_min) / static_cast<double>(grid.np - 1);
  double s = 0.0;
  for (Eigen::Index j = 0; j < res.values.rows(); ++j)
    for (Eigen::Index i = 0; i < res.values.cols(); ++i) {
      const double wx = (i == 0 || i + 1 == res.values.cols()) ? 0.5 : 1.0;
      const double wp = (j == 0 || j + 1 == res.values.rows()) ? 0.5 : 1.0;
      s += wx * wp * res.values(j, i);
    }
  res.integral = s * dx * dpp;
  res.covers_norm = res.integral >= 0.999;
  return res;
}

}  // namespace fslt
