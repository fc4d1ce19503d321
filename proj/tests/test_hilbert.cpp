#include <gtest/gtest.h>

#include <deque>
#include <random>
#include <set>

#include "fslt/hilbert.hpp"

using namespace fslt;

namespace {

// Chain order by breadth-first search from |N,G,0⟩ over the transitions of
// G_m|R⟩⟨G|b + G_o|R⟩⟨G|a + H.c., enumerating labels by brute force.
std::vector<SiteLabel> bfs_chain(int n) {
  std::set<SiteLabel> all;
  for (int m = 0; m <= n; ++m)
    for (int a = 0; a <= 1; ++a)
      for (int o = 0; o <= n; ++o) {
        SiteLabel s{m, static_cast<AtomLevel>(a), o};
        if (s.excitation() == n) all.insert(s);
      }
  auto neighbours = [&](const SiteLabel& s) {
    std::vector<SiteLabel> out;
    if (s.atom == AtomLevel::G) {
      if (s.n_m > 0) out.push_back({s.n_m - 1, AtomLevel::R, s.n_o});
      if (s.n_o > 0) out.push_back({s.n_m, AtomLevel::R, s.n_o - 1});
    } else {
      out.push_back({s.n_m + 1, AtomLevel::G, s.n_o});
      out.push_back({s.n_m, AtomLevel::G, s.n_o + 1});
    }
    return out;
  };
  std::vector<SiteLabel> order;
  std::set<SiteLabel> seen;
  std::deque<SiteLabel> queue{{n, AtomLevel::G, 0}};
  seen.insert(queue.front());
  while (!queue.empty()) {
    const SiteLabel s = queue.front();
    queue.pop_front();
    order.push_back(s);
    for (const auto& t : neighbours(s))
      if (all.contains(t) && !seen.contains(t)) {
        seen.insert(t);
        queue.push_back(t);
      }
  }
  EXPECT_EQ(order.size(), all.size());
  return order;
}

QuantumState random_pure(const ProductBasis& b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Vector v(b.dimension());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(nd(rng), nd(rng));
  v.normalize();
  return QuantumState::pure(b.descriptor(), v);
}

Vector basis_vector(const ProductBasis& b, SiteLabel s) {
  Vector v = Vector::Zero(b.dimension());
  v(*b.index_of(s)) = 1.0;
  return v;
}

}  // namespace

TEST(FockChain, SingleExcitationSites) {
  const FockChain c = build_chain_basis(1);
  ASSERT_EQ(c.size(), 3);
  EXPECT_EQ(c.site(1), (SiteLabel{1, AtomLevel::G, 0}));
  EXPECT_EQ(c.site(2), (SiteLabel{0, AtomLevel::R, 0}));
  EXPECT_EQ(c.site(3), (SiteLabel{0, AtomLevel::G, 1}));
}

TEST(FockChain, EdgeSitesForFivePhotons) {
  const FockChain c(5);
  EXPECT_EQ(c.size(), 11);
  EXPECT_EQ(c.site(1), (SiteLabel{5, AtomLevel::G, 0}));
  EXPECT_EQ(c.site(11), (SiteLabel{0, AtomLevel::G, 5}));
}

TEST(FockChain, MatchesBreadthFirstEnumeration) {
  EXPECT_EQ(FockChain(2).site(4), (SiteLabel{0, AtomLevel::R, 1}));
  for (int n = 1; n <= 12; ++n) EXPECT_EQ(FockChain(n).sites(), bfs_chain(n)) << "N = " << n;
}

TEST(FockChain, ConstantExcitationAndSublatticeCounts) {
  for (int n = 1; n <= 12; ++n) {
    const FockChain c(n);
    int odd = 0, even = 0;
    for (int i = 1; i <= c.size(); ++i) {
      EXPECT_EQ(c.site(i).excitation(), n);
      if (i % 2 == 1) {
        EXPECT_EQ(c.site(i).atom, AtomLevel::G);
        ++odd;
      } else {
        EXPECT_EQ(c.site(i).atom, AtomLevel::R);
        ++even;
      }
    }
    EXPECT_EQ(odd, n + 1);
    EXPECT_EQ(even, n);
  }
}

TEST(FockChain, RejectsZeroExcitation) { EXPECT_THROW(build_chain_basis(0), InvalidArgument); }

TEST(Annihilation, SmallMatrices) {
  const DenseMatrix a2 = annihilation_operator(2).dense();
  EXPECT_EQ(a2(0, 1), cplx(1.0));
  EXPECT_EQ(a2(0, 0), cplx(0.0));
  EXPECT_EQ(a2(1, 0), cplx(0.0));
  EXPECT_EQ(a2(1, 1), cplx(0.0));
  EXPECT_DOUBLE_EQ(annihilation_operator(3).dense()(1, 2).real(), std::sqrt(2.0));
  EXPECT_THROW(annihilation_operator(1), InvalidArgument);
}

TEST(Annihilation, NumberOperatorIdentity) {
  const int dim = 9;
  const DenseMatrix a = annihilation_operator(dim).dense();
  const DenseMatrix n = a.adjoint() * a;
  for (int k = 0; k < dim; ++k) {
    Vector e = Vector::Zero(dim);
    e(k) = 1.0;
    EXPECT_LT((n * e - double(k) * e).norm(), 1e-14);
  }
}

TEST(ProductBasis, DimensionAndOrder) {
  const ProductBasis b(2, 3);
  EXPECT_EQ(b.dimension(), 3 * 2 * 4);
  Eigen::Index i = 0;
  for (int m = 0; m <= 2; ++m)
    for (int a = 0; a <= 1; ++a)
      for (int o = 0; o <= 3; ++o, ++i) {
        EXPECT_EQ(b.label(i), (SiteLabel{m, static_cast<AtomLevel>(a), o}));
        EXPECT_EQ(b.index_of(b.label(i)), i);
      }
}

TEST(ProductBasis, ExcitationCap) {
  const ProductBasis b(4, 4, 4);
  for (const auto& s : b.labels()) EXPECT_LE(s.excitation(), 4);
  EXPECT_FALSE(b.index_of({3, AtomLevel::R, 1}).has_value());
  EXPECT_FALSE(b.index_of({5, AtomLevel::G, 0}).has_value());
  // Count of (m, a, o) with m + a + o ≤ 4 by brute force.
  int count = 0;
  for (int m = 0; m <= 4; ++m)
    for (int a = 0; a <= 1; ++a)
      for (int o = 0; o <= 4; ++o) count += (m + a + o <= 4);
  EXPECT_EQ(b.dimension(), count);
}

TEST(Embed, IdentityAndMatrixElement) {
  const ProductBasis b(3, 2);
  const Operator id = embed(identity_operator(mode_descriptor(3)), Slot::mw, b);
  EXPECT_LT((id.dense() - DenseMatrix::Identity(b.dimension(), b.dimension())).cwiseAbs().maxCoeff(), 1e-15);
  const DenseMatrix bm = mw_annihilation(b).dense();
  const cplx elem = basis_vector(b, {1, AtomLevel::G, 0}).dot(bm * basis_vector(b, {2, AtomLevel::G, 0}));
  EXPECT_NEAR(elem.real(), std::sqrt(2.0), 1e-15);
}

TEST(Embed, DisjointSlotsCommute) {
  const ProductBasis b(4, 3);
  const DenseMatrix a = opt_annihilation(b).dense();
  const DenseMatrix bm = mw_annihilation(b).dense();
  EXPECT_LT((a * bm - bm * a).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Embed, RejectsDimensionMismatch) {
  const ProductBasis b(3, 2);
  EXPECT_THROW(embed(annihilation_operator(3), Slot::mw, b), InvalidArgument);
}

TEST(Embed, AgreesWithKroneckerProduct) {
  const ProductBasis b(2, 3);
  const DenseMatrix a = annihilation_operator(4).dense();
  const DenseMatrix bm = annihilation_operator(3).dense();
  const DenseMatrix i2 = DenseMatrix::Identity(2, 2), i3 = DenseMatrix::Identity(3, 3), i4 = DenseMatrix::Identity(4, 4);
  auto kron = [](const DenseMatrix& x, const DenseMatrix& y) {
    DenseMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j) out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
  };
  EXPECT_LT((opt_annihilation(b).dense() - kron(kron(i3, i2), a)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((mw_annihilation(b).dense() - kron(kron(bm, i2), i4)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(QuantumStateFactories, RejectInvalidPayloads) {
  const BasisDescriptor d = mode_descriptor(1);
  EXPECT_THROW(QuantumState::pure(d, Vector::Ones(2)), InvalidArgument);
  DenseMatrix nonherm(2, 2);
  nonherm << 0.5, 0.1, 0.0, 0.5;
  EXPECT_THROW(QuantumState::mixed(d, nonherm), InvalidArgument);
  DenseMatrix neg(2, 2);
  neg << 1.2, 0.0, 0.0, -0.2;
  EXPECT_THROW(QuantumState::mixed(d, neg), InvalidArgument);
  DenseMatrix ok = DenseMatrix::Identity(2, 2) / 2.0;
  EXPECT_NO_THROW(QuantumState::mixed(d, ok));
}

TEST(PartialTrace, ProductState) {
  const ProductBasis b(2, 2);
  Vector m(3), at(2), o(3);
  m << 0.6, cplx(0.0, 0.8), 0.0;
  at << 1.0, 0.0;
  o << cplx(0.0, 1.0) / std::sqrt(3.0), 1.0 / std::sqrt(3.0), -1.0 / std::sqrt(3.0);
  Vector psi(b.dimension());
  for (Eigen::Index i = 0; i < b.dimension(); ++i) {
    const SiteLabel& s = b.label(i);
    psi(i) = m(s.n_m) * at(static_cast<int>(s.atom)) * o(s.n_o);
  }
  const QuantumState st = QuantumState::pure(b.descriptor(), psi);
  const DenseMatrix ro = partial_trace(st, Slot::opt).density();
  EXPECT_LT((ro - o * o.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
  const DenseMatrix rm = partial_trace(st, Slot::mw).density();
  EXPECT_LT((rm - m * m.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(partial_trace(st, Slot::opt).basis(), mode_descriptor(2));
}

TEST(PartialTrace, BellLikeState) {
  const ProductBasis b(1, 1);
  const Vector psi = (basis_vector(b, {1, AtomLevel::G, 0}) + basis_vector(b, {0, AtomLevel::G, 1})) / std::sqrt(2.0);
  const DenseMatrix ro = partial_trace(QuantumState::pure(b.descriptor(), psi), Slot::opt).density();
  DenseMatrix expected = DenseMatrix::Identity(2, 2) * 0.5;
  EXPECT_LT((ro - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PartialTrace, RandomStatesGiveValidReductions) {
  const ProductBasis b(3, 2);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const QuantumState s = random_pure(b, seed);
    for (Slot keep : {Slot::mw, Slot::atom, Slot::opt}) {
      const DenseMatrix r = partial_trace(s, keep).density();
      EXPECT_NEAR(r.trace().real(), 1.0, 1e-10);
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<DenseMatrix>(r).eigenvalues();
      EXPECT_GE(ev.minCoeff(), -1e-12);
      EXPECT_LE(ev.maxCoeff(), 1.0 + 1e-12);
    }
  }
}

TEST(PartialTrace, OrderOfDiscardedSlotsIrrelevant) {
  const ProductBasis b(3, 3);
  const QuantumState s = random_pure(b, 99);
  const DenseMatrix r1 = trace_out(trace_out(s, Slot::mw), Slot::atom).density();
  const DenseMatrix r2 = trace_out(trace_out(s, Slot::atom), Slot::mw).density();
  EXPECT_LT((r1 - r2).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PartialTrace, CappedBasisMatchesFullBox) {
  // A state supported inside the cap reduces identically on both bases.
  const ProductBasis capped(3, 3, 3), full(3, 3);
  const QuantumState sc = random_pure(capped, 5);
  Vector vf = Vector::Zero(full.dimension());
  for (Eigen::Index i = 0; i < capped.dimension(); ++i) vf(*full.index_of(capped.label(i))) = sc.vector()(i);
  const QuantumState sf = QuantumState::pure(full.descriptor(), vf);
  for (Slot keep : {Slot::mw, Slot::atom, Slot::opt})
    EXPECT_LT((partial_trace(sc, keep).density() - partial_trace(sf, keep).density()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ChainEmbedding, IndicesAndRoundTrip) {
  const auto idx1 = chain_to_product_embedding(FockChain(1), ProductBasis(1, 1));
  EXPECT_EQ(std::set<Eigen::Index>(idx1.begin(), idx1.end()).size(), 3u);

  const FockChain c(5);
  const ProductBasis b(5, 5);
  const auto idx = chain_to_product_embedding(c, b);
  EXPECT_EQ(b.label(idx[0]).n_m, 5);
  for (int i = 1; i <= c.size(); ++i) EXPECT_EQ(b.label(idx[static_cast<std::size_t>(i - 1)]), c.site(i));
  EXPECT_EQ(std::set<Eigen::Index>(idx.begin(), idx.end()).size(), idx.size());
}

TEST(ChainEmbedding, RejectsInsufficientTruncation) {
  EXPECT_THROW(chain_to_product_embedding(FockChain(4), ProductBasis(3, 4)), InvalidArgument);
  EXPECT_THROW(chain_to_product_embedding(FockChain(4), ProductBasis(4, 4, 3)), InvalidArgument);
}

TEST(BasisDescriptor, SerializesSchema) {
  const nlohmann::json j = ProductBasis(2, 3, 3).descriptor();
  EXPECT_EQ(j["kind"], "product");
  EXPECT_EQ(j["n_max_mw"], 2);
  EXPECT_EQ(j["n_max_opt"], 3);
  EXPECT_EQ(j["max_excitation"], 3);
  const nlohmann::json c = FockChain(4).descriptor();
  EXPECT_EQ(c["kind"], "fock_chain");
  EXPECT_EQ(c["dim"], 9);
}
