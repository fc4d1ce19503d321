#include <gtest/gtest.h>

#include "fslt/topology.hpp"

using namespace fslt;

namespace {

const double kG = two_pi * 0.282;

std::vector<double> superdiagonal(const Operator& h) {
  const DenseMatrix d = h.dense();
  std::vector<double> out;
  for (Eigen::Index i = 0; i + 1 < d.rows(); ++i) out.push_back(d(i, i + 1).real());
  return out;
}

// Restriction of a product-space operator to the chain sites.
DenseMatrix restrict_to_chain(const Operator& h, const FockChain& c, const ProductBasis& b) {
  const auto idx = chain_to_product_embedding(c, b);
  const DenseMatrix d = h.dense();
  DenseMatrix out(c.size(), c.size());
  for (int i = 0; i < c.size(); ++i)
    for (int j = 0; j < c.size(); ++j) out(i, j) = d(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  return out;
}

}  // namespace

TEST(ChainHamiltonian, SingleCell) {
  const auto off = superdiagonal(chain_hamiltonian({ChainKind::fsl, 1}, {0.3, 0.7}));
  EXPECT_EQ(off, (std::vector<double>{0.3, 0.7}));
}

TEST(ChainHamiltonian, FslHoppingRule) {
  const double gm = 0.9, go = 1.7;
  const auto off = superdiagonal(chain_hamiltonian({ChainKind::fsl, 5}, {gm, go}));
  EXPECT_DOUBLE_EQ(off[0], gm * std::sqrt(5.0));
  for (int j = 1; j <= 5; ++j) {
    EXPECT_DOUBLE_EQ(off[static_cast<std::size_t>(2 * j - 2)], gm * std::sqrt(5.0 - j + 1));
    EXPECT_DOUBLE_EQ(off[static_cast<std::size_t>(2 * j - 1)], go * std::sqrt(double(j)));
  }
}

TEST(ChainHamiltonian, SshUniformRule) {
  const auto off = superdiagonal(chain_hamiltonian({ChainKind::ssh, 3}, {0.4, 1.1}));
  EXPECT_EQ(off, (std::vector<double>{0.4, 1.1, 0.4, 1.1, 0.4, 1.1}));
}

TEST(ChainHamiltonian, HermitianAndTridiagonal) {
  for (auto kind : {ChainKind::fsl, ChainKind::ssh})
    for (int n = 1; n <= 12; ++n) {
      const Operator h = chain_hamiltonian({kind, n}, {0.31 * n, 1.2});
      EXPECT_LT(h.hermiticity_error(), 1e-12);
      const DenseMatrix d = h.dense();
      for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = 0; j < d.cols(); ++j)
          if (std::abs(i - j) != 1) EXPECT_EQ(d(i, j), cplx(0.0));
    }
}

TEST(JcHamiltonian, CommutesWithExcitationNumber) {
  const ProductBasis b(6, 5);
  const Operator h = dual_mode_jc_hamiltonian(b, {0.8, 1.3});
  EXPECT_LT(h.hermiticity_error(), 1e-12);
  const DenseMatrix n = excitation_number_operator(b).dense();
  const DenseMatrix hd = h.dense();
  EXPECT_LT((hd * n - n * hd).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(JcHamiltonian, BlocksEqualFslChains) {
  const ProductBasis b(8, 8);
  const Couplings c{0.6, 1.4};
  const Operator h = dual_mode_jc_hamiltonian(b, c);
  for (int n = 1; n <= 8; ++n) {
    const FockChain chain(n);
    const DenseMatrix block = restrict_to_chain(h, chain, b);
    EXPECT_LT((block - chain_hamiltonian({ChainKind::fsl, n}, c).dense()).cwiseAbs().maxCoeff(), 1e-12) << "N = " << n;
  }
}

TEST(JcHamiltonian, VacuumRowVanishes) {
  const ProductBasis b(3, 3);
  const DenseMatrix h = dual_mode_jc_hamiltonian(b, {1.0, 2.0}).dense();
  const Eigen::Index vac = *b.index_of({0, AtomLevel::G, 0});
  EXPECT_EQ(h.row(vac).cwiseAbs().maxCoeff(), 0.0);
}

TEST(JcHamiltonian, CappedBasisIsInvariantSubspace) {
  const ProductBasis full(5, 5), capped(5, 5, 5);
  const DenseMatrix hf = dual_mode_jc_hamiltonian(full, {0.7, 0.9}).dense();
  const DenseMatrix hc = dual_mode_jc_hamiltonian(capped, {0.7, 0.9}).dense();
  for (Eigen::Index i = 0; i < capped.dimension(); ++i)
    for (Eigen::Index j = 0; j < capped.dimension(); ++j)
      EXPECT_EQ(hc(i, j), hf(*full.index_of(capped.label(i)), *full.index_of(capped.label(j))));
}

TEST(Schedule, EndpointsAndMidpoint) {
  const CouplingSchedule s(kG, 8.2);
  EXPECT_NEAR(s.at(0.0).g_m, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.at(0.0).g_o, kG);
  EXPECT_DOUBLE_EQ(s.at(8.2).g_m, kG);
  EXPECT_NEAR(s.at(8.2).g_o, 0.0, 1e-15);
  EXPECT_NEAR(s.at(4.1).g_m, kG / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.at(4.1).g_o, kG / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(kG, 1.7718582566, 1e-9);
}

TEST(Schedule, ConstantMagnitudeWithoutDisorder) {
  const CouplingSchedule s(kG, 8.2);
  for (double t : uniform_grid(0.0, 8.2, 1001)) EXPECT_NEAR(s.at(t).magnitude(), kG, 1e-12 * kG);
}

TEST(Schedule, DisorderMultipliesEachMode) {
  const CouplingSchedule clean(kG, 5.0);
  const CouplingSchedule s(kG, 5.0, {0.05, -0.08});
  for (double t : {0.0, 1.3, 2.5, 5.0}) {
    EXPECT_DOUBLE_EQ(s.at(t).g_m, clean.at(t).g_m * 1.05);
    EXPECT_DOUBLE_EQ(s.at(t).g_o, clean.at(t).g_o * 0.92);
  }
}

TEST(Schedule, RejectsOutOfRangeTimes) {
  const CouplingSchedule s(kG, 8.2);
  EXPECT_THROW(s.at(-1e-9), InvalidArgument);
  EXPECT_THROW(s.at(8.2 + 1e-9), InvalidArgument);
  EXPECT_THROW(CouplingSchedule(kG, -1.0), InvalidArgument);
}

TEST(Disorder, ZeroStrengthGivesZero) {
  const Disorder d = sample_disorder(0.0, 0.0, 17);
  EXPECT_EQ(d.eps_m, 0.0);
  EXPECT_EQ(d.eps_o, 0.0);
}

TEST(Disorder, DrawsInsideRangeAndReproducible) {
  double lo = 1.0, hi = -1.0;
  for (std::uint64_t k = 0; k < 2000; ++k) {
    const Disorder d = sample_disorder(0.1, 0.1, 2024, k);
    for (double e : {d.eps_m, d.eps_o}) {
      EXPECT_GE(e, -0.1);
      EXPECT_LE(e, 0.1);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    const Disorder again = sample_disorder(0.1, 0.1, 2024, k);
    EXPECT_EQ(d.eps_m, again.eps_m);
    EXPECT_EQ(d.eps_o, again.eps_o);
  }
  EXPECT_LT(lo, -0.09);
  EXPECT_GT(hi, 0.09);
  EXPECT_NE(sample_disorder(0.1, 0.1, 2024, 0).eps_m, sample_disorder(0.1, 0.1, 2024, 1).eps_m);
  EXPECT_NE(sample_disorder(0.1, 0.1, 1, 0).eps_m, sample_disorder(0.1, 0.1, 2, 0).eps_m);
}

TEST(Disorder, RejectsStrengthAboveHalf) { EXPECT_THROW(sample_disorder(0.6, 0.0, 1), InvalidArgument); }

TEST(DrivenHamiltonian, AssemblesScheduledChain) {
  const ChainModel m{ChainKind::fsl, 4};
  const CouplingSchedule s(kG, 3.0, {0.02, -0.03});
  const DrivenHamiltonian h = scheduled_chain_hamiltonian(m, s);
  for (double t : {0.0, 0.7, 1.5, 3.0}) {
    const DenseMatrix expected = chain_hamiltonian(m, s.at(t)).dense();
    EXPECT_LT((DenseMatrix(h.at(t)) - expected).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(DrivenHamiltonian, AssemblesScheduledJc) {
  const ProductBasis b(3, 3, 3);
  const CouplingSchedule s(kG, 3.0);
  const DrivenHamiltonian h = scheduled_jc_hamiltonian(b, s);
  for (double t : {0.0, 1.1, 3.0})
    EXPECT_LT((DenseMatrix(h.at(t)) - dual_mode_jc_hamiltonian(b, s.at(t)).dense()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ChiralSymmetry, AnticommutesEntrywise) {
  for (auto kind : {ChainKind::fsl, ChainKind::ssh})
    for (int n = 1; n <= 12; ++n)
      for (const Couplings c : {Couplings{0.0, 1.0}, Couplings{1.0, 0.0}, Couplings{0.37, 2.9}, Couplings{5.0, 0.2}}) {
        const DenseMatrix gc = chiral_operator(n).dense();
        const DenseMatrix h = chain_hamiltonian({kind, n}, c).dense();
        EXPECT_EQ((gc * h * gc + h).cwiseAbs().maxCoeff(), 0.0);
      }
}

TEST(Spectrum, FslConstantAlongSchedule) {
  for (int n : {1, 3, 5, 8, 12}) {
    const CouplingSchedule s(kG, 8.2);
    for (double t : uniform_grid(0.0, 8.2, 41)) {
      const auto ev = spectrum(chain_hamiltonian({ChainKind::fsl, n}, s.at(t)));
      std::vector<double> expected;
      for (int j = n; j >= 1; --j) expected.push_back(-std::sqrt(double(j)) * kG);
      expected.push_back(0.0);
      for (int j = 1; j <= n; ++j) expected.push_back(std::sqrt(double(j)) * kG);
      for (std::size_t k = 0; k < ev.size(); ++k) EXPECT_NEAR(ev[k], expected[k], 1e-9 * kG);
    }
  }
}

TEST(Spectrum, SshGapChangesAlongSchedule) {
  const CouplingSchedule s(kG, 8.2);
  for (int n = 2; n <= 8; ++n) {
    auto gap = [&](double t) {
      const auto ev = spectrum(chain_hamiltonian({ChainKind::ssh, n}, s.at(t)));
      return ev[static_cast<std::size_t>(n) + 1];  // smallest positive eigenvalue
    };
    EXPECT_GT(std::abs(gap(4.1) - gap(0.0)), 1e-6 * kG) << "N = " << n;
  }
}

TEST(Spectrum, ZeroEigenvalueAlwaysPresent) {
  for (auto kind : {ChainKind::fsl, ChainKind::ssh})
    for (int n = 1; n <= 12; ++n) {
      const auto ev = spectrum(chain_hamiltonian({kind, n}, {0.3 * kG, 0.8 * kG}));
      EXPECT_NEAR(ev[static_cast<std::size_t>(n)], 0.0, 1e-9 * kG);
    }
}
