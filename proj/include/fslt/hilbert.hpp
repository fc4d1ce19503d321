#pragma once

// Hilbert-space plumbing: Fock-state chains, truncated MW ⊗ atom ⊗ optical
// product bases, elementary operators, tensor embedding and partial traces.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fslt/types.hpp"

namespace fslt {

enum class AtomLevel : std::uint8_t { G = 0, R = 1 };

enum class Slot : std::uint8_t { mw, atom, opt };

inline const char* to_string(AtomLevel a) { return a == AtomLevel::G ? "G" : "R"; }

inline const char* to_string(Slot s) {
  switch (s) {
    case Slot::mw: return "mw";
    case Slot::atom: return "atom";
    case Slot::opt: return "opt";
  }
  return "?";
}

// Joint state |n_m, atom, n_o⟩.
struct SiteLabel {
  int n_m = 0;
  AtomLevel atom = AtomLevel::G;
  int n_o = 0;

  int excitation() const { return n_m + n_o + (atom == AtomLevel::R ? 1 : 0); }
  int component(Slot s) const {
    switch (s) {
      case Slot::mw: return n_m;
      case Slot::atom: return static_cast<int>(atom);
      case Slot::opt: return n_o;
    }
    return 0;
  }
  SiteLabel with(Slot s, int value) const {
    SiteLabel out = *this;
    switch (s) {
      case Slot::mw: out.n_m = value; break;
      case Slot::atom: out.atom = static_cast<AtomLevel>(value); break;
      case Slot::opt: out.n_o = value; break;
    }
    return out;
  }
  auto operator<=>(const SiteLabel&) const = default;
};

inline std::string to_string(const SiteLabel& s) {
  return "(" + std::to_string(s.n_m) + "," + to_string(s.atom) + "," + std::to_string(s.n_o) + ")";
}

// Value-type identity of the space an operator or state lives on.
struct BasisDescriptor {
  enum class Kind : std::uint8_t { chain, product, mode, atom };
  Kind kind = Kind::mode;
  int excitation = 0;       // chain only
  int n_max_mw = 0;         // product only
  int atom_dim = 2;         // product only; 1 once the atom has been traced out
  int n_max_opt = 0;        // product; also the truncation of a single mode
  int max_excitation = -1;  // product only; -1 = no cap
  Eigen::Index dim = 0;

  bool operator==(const BasisDescriptor&) const = default;
};

inline const char* to_string(BasisDescriptor::Kind k) {
  switch (k) {
    case BasisDescriptor::Kind::chain: return "fock_chain";
    case BasisDescriptor::Kind::product: return "product";
    case BasisDescriptor::Kind::mode: return "single_mode";
    case BasisDescriptor::Kind::atom: return "atom";
  }
  return "?";
}

inline BasisDescriptor mode_descriptor(int n_max) {
  BasisDescriptor d;
  d.kind = BasisDescriptor::Kind::mode;
  d.n_max_opt = n_max;
  d.dim = n_max + 1;
  return d;
}

inline BasisDescriptor atom_descriptor() {
  BasisDescriptor d;
  d.kind = BasisDescriptor::Kind::atom;
  d.dim = 2;
  return d;
}

inline void to_json(nlohmann::json& j, const BasisDescriptor& d) {
  j = nlohmann::json{{"kind", to_string(d.kind)}, {"dim", d.dim}};
  switch (d.kind) {
    case BasisDescriptor::Kind::chain:
      j["excitation_number"] = d.excitation;
      j["site_order"] = "|2j-1>=(N-j+1,G,j-1), |2j>=(N-j,R,j-1), j=1..N; |2N+1>=(0,G,N)";
      break;
    case BasisDescriptor::Kind::product:
      j["n_max_mw"] = d.n_max_mw;
      j["atom_dim"] = d.atom_dim;
      j["n_max_opt"] = d.n_max_opt;
      if (d.max_excitation >= 0) j["max_excitation"] = d.max_excitation;
      j["order"] = "mw slowest, atom middle (G=0,R=1), opt fastest";
      break;
    case BasisDescriptor::Kind::mode:
      j["n_max"] = d.n_max_opt;
      break;
    case BasisDescriptor::Kind::atom:
      j["levels"] = {"G", "R"};
      break;
  }
}

// Excitation-N block of the dual-mode JC model: 2N+1 sites, 1-based indices
// in the accessors below.
class FockChain {
 public:
  explicit FockChain(int excitation_number) : n_(excitation_number) {
    require(n_ >= 1, "FockChain: excitation number must be >= 1, got " + std::to_string(n_));
    sites_.reserve(static_cast<std::size_t>(2 * n_ + 1));
    for (int j = 1; j <= n_; ++j) {
      sites_.push_back({n_ - j + 1, AtomLevel::G, j - 1});
      sites_.push_back({n_ - j, AtomLevel::R, j - 1});
    }
    sites_.push_back({0, AtomLevel::G, n_});
  }

  int excitation_number() const { return n_; }
  int size() const { return 2 * n_ + 1; }
  const SiteLabel& site(int index) const {
    require(index >= 1 && index <= size(), "FockChain: site index out of range");
    return sites_[static_cast<std::size_t>(index - 1)];
  }
  const std::vector<SiteLabel>& sites() const { return sites_; }

  BasisDescriptor descriptor() const {
    BasisDescriptor d;
    d.kind = BasisDescriptor::Kind::chain;
    d.excitation = n_;
    d.dim = size();
    return d;
  }

 private:
  int n_;
  std::vector<SiteLabel> sites_;
};

inline FockChain build_chain_basis(int n) { return FockChain(n); }

// Truncated MW ⊗ {G,R} ⊗ optical space. Enumeration: MW slowest, atom
// middle, optical fastest. An optional excitation cap drops every product
// state whose total excitation exceeds it; the JC Hamiltonian and all
// lowering jump operators leave the capped subspace invariant.
class ProductBasis {
 public:
  ProductBasis(int n_max_mw, int n_max_opt, std::optional<int> max_excitation = std::nullopt)
      : ProductBasis(n_max_mw, 2, n_max_opt, max_excitation) {}

  static ProductBasis from_descriptor(const BasisDescriptor& d) {
    require(d.kind == BasisDescriptor::Kind::product, "ProductBasis: descriptor is not a product basis");
    return ProductBasis(d.n_max_mw, d.atom_dim, d.n_max_opt,
                        d.max_excitation >= 0 ? std::optional<int>(d.max_excitation) : std::nullopt);
  }

  // Same space with one slot collapsed to a single level (the result space
  // of tracing that slot out).
  ProductBasis collapsed(Slot s) const {
    return ProductBasis(s == Slot::mw ? 0 : n_max_mw_, s == Slot::atom ? 1 : atom_dim_,
                        s == Slot::opt ? 0 : n_max_opt_, std::nullopt);
  }

  int n_max_mw() const { return n_max_mw_; }
  int n_max_opt() const { return n_max_opt_; }
  int atom_dim() const { return atom_dim_; }
  std::optional<int> max_excitation() const { return cap_; }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(labels_.size()); }
  int slot_dimension(Slot s) const {
    switch (s) {
      case Slot::mw: return n_max_mw_ + 1;
      case Slot::atom: return atom_dim_;
      case Slot::opt: return n_max_opt_ + 1;
    }
    return 0;
  }

  const SiteLabel& label(Eigen::Index i) const { return labels_.at(static_cast<std::size_t>(i)); }
  const std::vector<SiteLabel>& labels() const { return labels_; }

  std::optional<Eigen::Index> index_of(const SiteLabel& s) const {
    if (s.n_m < 0 || s.n_m > n_max_mw_ || s.n_o < 0 || s.n_o > n_max_opt_) return std::nullopt;
    const int a = static_cast<int>(s.atom);
    if (a >= atom_dim_) return std::nullopt;
    const auto box = static_cast<std::size_t>((s.n_m * atom_dim_ + a) * (n_max_opt_ + 1) + s.n_o);
    const Eigen::Index pos = lookup_[box];
    if (pos < 0) return std::nullopt;
    return pos;
  }

  BasisDescriptor descriptor() const {
    BasisDescriptor d;
    d.kind = BasisDescriptor::Kind::product;
    d.n_max_mw = n_max_mw_;
    d.atom_dim = atom_dim_;
    d.n_max_opt = n_max_opt_;
    d.max_excitation = cap_ ? *cap_ : -1;
    d.dim = dimension();
    return d;
  }

 private:
  ProductBasis(int n_max_mw, int atom_dim, int n_max_opt, std::optional<int> cap)
      : n_max_mw_(n_max_mw), atom_dim_(atom_dim), n_max_opt_(n_max_opt), cap_(cap) {
    require(n_max_mw >= 0 && n_max_opt >= 0, "ProductBasis: truncations must be >= 0");
    require(atom_dim == 1 || atom_dim == 2, "ProductBasis: atom dimension must be 1 or 2");
    require(!cap || *cap >= 0, "ProductBasis: excitation cap must be >= 0");
    lookup_.assign(static_cast<std::size_t>((n_max_mw + 1) * atom_dim * (n_max_opt + 1)), -1);
    std::size_t box = 0;
    for (int m = 0; m <= n_max_mw; ++m)
      for (int a = 0; a < atom_dim; ++a)
        for (int o = 0; o <= n_max_opt; ++o, ++box) {
          SiteLabel s{m, static_cast<AtomLevel>(a), o};
          if (cap && s.excitation() > *cap) continue;
          lookup_[box] = static_cast<Eigen::Index>(labels_.size());
          labels_.push_back(s);
        }
  }

  int n_max_mw_;
  int atom_dim_;
  int n_max_opt_;
  std::optional<int> cap_;
  std::vector<SiteLabel> labels_;
  std::vector<Eigen::Index> lookup_;
};

struct Operator {
  BasisDescriptor basis;
  SparseMatrix matrix;

  Eigen::Index dimension() const { return matrix.rows(); }

  double hermiticity_error() const {
    const SparseMatrix diff = matrix - SparseMatrix(matrix.adjoint());
    double worst = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    return worst;
  }
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_error() < tol; }

  DenseMatrix dense() const { return DenseMatrix(matrix); }
};

inline Operator identity_operator(const BasisDescriptor& b) {
  SparseMatrix m(b.dim, b.dim);
  m.setIdentity();
  return {b, m};
}

inline Operator annihilation_operator(int dim) {
  require(dim >= 2, "annihilation_operator: dimension must be >= 2, got " + std::to_string(dim));
  std::vector<Triplet> t;
  for (int n = 1; n < dim; ++n) t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
  SparseMatrix m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return {mode_descriptor(dim - 1), m};
}

// |G⟩⟨R|
inline Operator atom_lowering_operator() {
  SparseMatrix m(2, 2);
  m.insert(0, 1) = 1.0;
  m.makeCompressed();
  return {atom_descriptor(), m};
}

inline Operator atom_projector(AtomLevel level) {
  SparseMatrix m(2, 2);
  const int i = static_cast<int>(level);
  m.insert(i, i) = 1.0;
  m.makeCompressed();
  return {atom_descriptor(), m};
}

// Single-slot operator lifted to the product space (identity elsewhere).
// Matrix elements that would leave a capped or truncated space are dropped.
inline Operator embed(const Operator& op, Slot slot, const ProductBasis& basis) {
  const int slot_dim = basis.slot_dimension(slot);
  require(op.dimension() == slot_dim, "embed: operator dimension " + std::to_string(op.dimension()) +
                                          " does not match slot '" + to_string(slot) + "' dimension " +
                                          std::to_string(slot_dim));
  const SparseMatrix cols = SparseMatrix(op.matrix.transpose());  // row k of cols = column k of op
  std::vector<Triplet> t;
  for (Eigen::Index j = 0; j < basis.dimension(); ++j) {
    const SiteLabel& in = basis.label(j);
    for (SparseMatrix::InnerIterator it(cols, in.component(slot)); it; ++it) {
      const auto out = basis.index_of(in.with(slot, static_cast<int>(it.col())));
      if (out) t.emplace_back(*out, j, it.value());
    }
  }
  SparseMatrix m(basis.dimension(), basis.dimension());
  m.setFromTriplets(t.begin(), t.end());
  return {basis.descriptor(), m};
}

inline Operator mw_annihilation(const ProductBasis& b) {
  return embed(annihilation_operator(b.n_max_mw() + 1), Slot::mw, b);
}
inline Operator opt_annihilation(const ProductBasis& b) {
  return embed(annihilation_operator(b.n_max_opt() + 1), Slot::opt, b);
}

// Diagonal operator with the total excitation number b†b + |R⟩⟨R| + a†a.
inline Operator excitation_number_operator(const ProductBasis& b) {
  SparseMatrix m(b.dimension(), b.dimension());
  m.reserve(Eigen::VectorXi::Constant(b.dimension(), 1));
  for (Eigen::Index i = 0; i < b.dimension(); ++i) m.insert(i, i) = static_cast<double>(b.label(i).excitation());
  m.makeCompressed();
  return {b.descriptor(), m};
}

inline Operator slot_number_operator(const ProductBasis& b, Slot s) {
  SparseMatrix m(b.dimension(), b.dimension());
  m.reserve(Eigen::VectorXi::Constant(b.dimension(), 1));
  for (Eigen::Index i = 0; i < b.dimension(); ++i) m.insert(i, i) = static_cast<double>(b.label(i).component(s));
  m.makeCompressed();
  return {b.descriptor(), m};
}

// Pure state vector or density matrix tagged with its basis. The checked
// factories enforce normalization and positivity; evolved() skips the checks
// for states produced by an integrator, whose trace drifts within tolerance.
class QuantumState {
 public:
  static QuantumState pure(const BasisDescriptor& basis, Vector psi) {
    require(psi.size() == basis.dim, "QuantumState: vector length does not match basis");
    const double norm = psi.norm();
    require(std::abs(norm - 1.0) < 1e-10, "QuantumState: pure state not normalized (norm " + std::to_string(norm) + ")");
    return QuantumState(basis, std::move(psi));
  }

  static QuantumState mixed(const BasisDescriptor& basis, DenseMatrix rho) {
    require(rho.rows() == basis.dim && rho.cols() == basis.dim, "QuantumState: matrix size does not match basis");
    require((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-10, "QuantumState: density matrix not Hermitian");
    const cplx tr = rho.trace();
    require(std::abs(tr - 1.0) < 1e-10, "QuantumState: density matrix trace " + std::to_string(tr.real()) + " != 1");
    const double min_eig = Eigen::SelfAdjointEigenSolver<DenseMatrix>(rho, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    require(min_eig >= -1e-8, "QuantumState: density matrix has negative eigenvalue " + std::to_string(min_eig));
    return QuantumState(basis, std::move(rho));
  }

  static QuantumState evolved(const BasisDescriptor& basis, Vector psi) { return QuantumState(basis, std::move(psi)); }
  static QuantumState evolved(const BasisDescriptor& basis, DenseMatrix rho) {
    return QuantumState(basis, std::move(rho));
  }

  const BasisDescriptor& basis() const { return basis_; }
  bool is_pure() const { return std::holds_alternative<Vector>(payload_); }
  const Vector& vector() const {
    require(is_pure(), "QuantumState: not a pure state");
    return std::get<Vector>(payload_);
  }
  DenseMatrix density() const {
    if (is_pure()) {
      const Vector& v = std::get<Vector>(payload_);
      return v * v.adjoint();
    }
    return std::get<DenseMatrix>(payload_);
  }
  const DenseMatrix& density_ref() const {
    require(!is_pure(), "QuantumState: not a density matrix");
    return std::get<DenseMatrix>(payload_);
  }
  // Diagonal of the density operator.
  Eigen::VectorXd populations() const {
    if (is_pure()) return std::get<Vector>(payload_).cwiseAbs2();
    return std::get<DenseMatrix>(payload_).diagonal().real();
  }
  double trace() const {
    if (is_pure()) return std::get<Vector>(payload_).squaredNorm();
    return std::get<DenseMatrix>(payload_).trace().real();
  }

 private:
  QuantumState(const BasisDescriptor& b, Vector v) : basis_(b), payload_(std::move(v)) {}
  QuantumState(const BasisDescriptor& b, DenseMatrix m) : basis_(b), payload_(std::move(m)) {}

  BasisDescriptor basis_;
  std::variant<Vector, DenseMatrix> payload_;
};

// Reduced state after tracing out one slot; the result lives on the same
// product basis with that slot collapsed to one level.
inline QuantumState trace_out(const QuantumState& state, Slot slot) {
  const ProductBasis basis = ProductBasis::from_descriptor(state.basis());
  const ProductBasis reduced = basis.collapsed(slot);
  const DenseMatrix rho = state.density();
  // Group full-space indices by their label with `slot` zeroed.
  std::map<SiteLabel, std::vector<Eigen::Index>> groups;
  for (Eigen::Index i = 0; i < basis.dimension(); ++i) groups[basis.label(i).with(slot, 0)].push_back(i);
  std::vector<std::pair<Eigen::Index, const std::vector<Eigen::Index>*>> keyed;
  for (const auto& [label, members] : groups) {
    const auto r = reduced.index_of(label);
    keyed.emplace_back(*r, &members);
  }
  // Pairs (i, k) share the traced component.
  DenseMatrix out = DenseMatrix::Zero(reduced.dimension(), reduced.dimension());
  for (const auto& [ri, mi] : keyed)
    for (const auto& [rk, mk] : keyed)
      for (Eigen::Index i : *mi)
        for (Eigen::Index k : *mk)
          if (basis.label(i).component(slot) == basis.label(k).component(slot)) out(ri, rk) += rho(i, k);
  return QuantumState::evolved(reduced.descriptor(), std::move(out));
}

// Reduced density matrix of one slot (single-mode or atom basis).
inline QuantumState partial_trace(const QuantumState& state, Slot keep) {
  require(state.basis().kind == BasisDescriptor::Kind::product, "partial_trace: state must live on a product basis");
  QuantumState s = state;
  for (Slot other : {Slot::mw, Slot::atom, Slot::opt})
    if (other != keep) s = trace_out(s, other);
  const ProductBasis b = ProductBasis::from_descriptor(s.basis());
  const BasisDescriptor target = keep == Slot::atom ? atom_descriptor()
                                                    : mode_descriptor(b.slot_dimension(keep) - 1);
  // Collapsed basis order coincides with the kept slot's Fock order.
  DenseMatrix rho = s.density();
  if (keep == Slot::atom && b.atom_dim() == 1) {
    rho.conservativeResize(2, 2);
    rho.row(1).setZero();
    rho.col(1).setZero();
  }
  return QuantumState::evolved(target, std::move(rho));
}

// Full-space index of every chain site, in chain order.
inline std::vector<Eigen::Index> chain_to_product_embedding(const FockChain& chain, const ProductBasis& basis) {
  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(chain.size()));
  for (const SiteLabel& s : chain.sites()) {
    const auto idx = basis.index_of(s);
    require(idx.has_value(), "chain_to_product_embedding: site " + to_string(s) + " exceeds the basis truncation");
    out.push_back(*idx);
  }
  return out;
}

}  // namespace fslt
