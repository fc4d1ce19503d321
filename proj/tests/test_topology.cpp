#include <gtest/gtest.h>

#include "fslt/experiments.hpp"

using namespace fslt;

namespace {

// Null vector of the chain by SVD, sign-fixed to a positive first component.
Vector null_vector(const Operator& h) {
  Eigen::JacobiSVD<DenseMatrix> svd(h.dense(), Eigen::ComputeFullV);
  Vector v = svd.matrixV().col(svd.matrixV().cols() - 1);
  const Eigen::Index k = [&] {
    Eigen::Index best = 0;
    v.cwiseAbs().maxCoeff(&best);
    return best;
  }();
  v *= std::abs(v(k)) / v(k);
  return v;
}

std::vector<double> single_site(int len, int site) {
  std::vector<double> p(static_cast<std::size_t>(len), 0.0);
  p[static_cast<std::size_t>(site - 1)] = 1.0;
  return p;
}

}  // namespace

TEST(ChiralOperator, DiagonalSigns) {
  const DenseMatrix g1 = chiral_operator(1).dense();
  EXPECT_EQ(g1.diagonal().real(), Eigen::Vector3d(1.0, -1.0, 1.0));
  for (int n = 1; n <= 12; ++n) {
    const DenseMatrix g = chiral_operator(n).dense();
    EXPECT_EQ((g * g - DenseMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(g(2 * n, 2 * n), cplx(1.0));
  }
}

TEST(ZeroMode, SingleCellEqualCouplings) {
  const Vector z = zero_mode(1, {1.0, 1.0}).vector();
  EXPECT_NEAR(z(0).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(std::abs(z(1)), 0.0, 1e-15);
  EXPECT_NEAR(z(2).real(), -1.0 / std::sqrt(2.0), 1e-15);
}

TEST(ZeroMode, MicrowaveEdgeWhenMicrowaveCouplingOff) {
  for (int n = 1; n <= 10; ++n) {
    const Vector z = zero_mode(n, {0.0, 1.3}).vector();
    EXPECT_NEAR(std::abs(z(0)), 1.0, 1e-15);
    EXPECT_NEAR(z.tail(z.size() - 1).norm(), 0.0, 1e-15);
  }
}

TEST(ZeroMode, BinomialAmplitudesAtRatioTwo) {
  Eigen::VectorXd expected(4);
  expected << 1.0, -2.0 * std::sqrt(3.0), 4.0 * std::sqrt(3.0), -8.0;
  expected.normalize();
  const Vector z = zero_mode(3, {2.0, 1.0}).vector();
  for (int j = 0; j <= 3; ++j) EXPECT_NEAR(z(2 * j).real(), expected(j), 1e-14);
  const Vector nv = null_vector(chain_hamiltonian({ChainKind::fsl, 3}, {2.0, 1.0}));
  EXPECT_NEAR(std::abs(nv.dot(z)), 1.0, 1e-12);
}

TEST(ZeroMode, MatchesDenseNullSpaceAndSupport) {
  for (auto kind : {ChainKind::fsl, ChainKind::ssh})
    for (int n = 1; n <= 10; ++n)
      for (double r : log_spaced(1e-2, 1e2, 20)) {
        const Couplings c = couplings_from_ratio(r, 1.7);
        const Operator h = chain_hamiltonian({kind, n}, c);
        const QuantumState z = zero_mode({kind, n}, c);
        EXPECT_LT((h.dense() * z.vector()).norm(), 1e-9 * 1.7);
        for (int i = 1; i < 2 * n + 1; i += 2) EXPECT_EQ(z.vector()(i), cplx(0.0));
        if (kind == ChainKind::fsl && r > 0.05 && r < 20.0) {
          // SVD null vector is only well separated away from the extremes.
          EXPECT_NEAR(std::abs(null_vector(h).dot(z.vector())), 1.0, 1e-8);
        }
      }
}

TEST(ZeroMode, RejectsVanishingCouplings) { EXPECT_THROW(zero_mode(3, {0.0, 0.0}), InvalidArgument); }

TEST(DistributionCenter, ZeroModeCenterMatchesClosedForm) {
  for (int n = 1; n <= 10; ++n)
    for (double r : log_spaced(1e-2, 1e2, 20)) {
      const Couplings c = couplings_from_ratio(r, 1.0);
      // Oracle: weighted mean site of the binomial distribution over odd sites.
      const double w = 1.0 / (1.0 + r * r);
      double center = 0.0;
      for (int j = 0; j <= n; ++j) {
        const double log_b = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
        center += (2 * j + 1) * std::exp(log_b + (n - j) * std::log(w) + j * std::log1p(-w));
      }
      EXPECT_NEAR(population_center(zero_mode(n, c)), center, 1e-9);
      EXPECT_NEAR(population_center(zero_mode(n, c)), distribution_center(n, analytic_winding(c)), 1e-6);
    }
}

TEST(DistributionCenter, Examples) {
  EXPECT_DOUBLE_EQ(distribution_center(4, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(distribution_center(4, 0.0), 9.0);
  EXPECT_DOUBLE_EQ(distribution_center(5, 0.5), 6.0);
  EXPECT_THROW(distribution_center(5, 1.2), InvalidArgument);
  EXPECT_THROW(distribution_center(5, -0.1), InvalidArgument);
}

TEST(AnalyticWinding, Examples) {
  EXPECT_DOUBLE_EQ(analytic_winding({0.0, 2.0}), 1.0);
  EXPECT_DOUBLE_EQ(analytic_winding({1.5, 1.5}), 0.5);
  EXPECT_DOUBLE_EQ(analytic_winding({2.0, 0.0}), 0.0);
  EXPECT_NEAR(analytic_winding({2.0, 1.0}), std::pow(std::cos(std::atan(2.0)), 2), 1e-15);
  EXPECT_THROW(analytic_winding({0.0, 0.0}), InvalidArgument);
}

TEST(Spectrum, Examples) {
  const auto e2 = spectrum(chain_hamiltonian({ChainKind::fsl, 2}, couplings_from_ratio(0.7, 1.0)));
  const std::vector<double> x2{-std::sqrt(2.0), -1.0, 0.0, 1.0, std::sqrt(2.0)};
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(e2[k], x2[k], 1e-12);
  const auto e1 = spectrum(chain_hamiltonian({ChainKind::fsl, 1}, {3.0, 4.0}));
  EXPECT_NEAR(e1[0], -5.0, 1e-12);
  EXPECT_NEAR(e1[1], 0.0, 1e-12);
  EXPECT_NEAR(e1[2], 5.0, 1e-12);
  // Uniform 5-site chain with unit hopping: 2cos(kπ/6).
  const auto es = spectrum(chain_hamiltonian({ChainKind::ssh, 2}, {1.0, 1.0}));
  for (int k = 1; k <= 5; ++k) EXPECT_NEAR(es[static_cast<std::size_t>(5 - k)], 2.0 * std::cos(k * std::numbers::pi / 6), 1e-12);
}

TEST(Spectrum, SymmetricAboutZero) {
  for (auto kind : {ChainKind::fsl, ChainKind::ssh})
    for (int n = 1; n <= 12; ++n) {
      const auto e = spectrum(chain_hamiltonian({kind, n}, {0.41, 1.9}));
      for (std::size_t k = 0; k < e.size(); ++k) EXPECT_NEAR(e[k], -e[e.size() - 1 - k], 1e-12);
    }
}

TEST(ChiralDisplacement, Examples) {
  EXPECT_DOUBLE_EQ(chiral_displacement(single_site(11, 1)), 1.0);
  EXPECT_DOUBLE_EQ(chiral_displacement(single_site(11, 2)), -1.0);
  EXPECT_DOUBLE_EQ(chiral_displacement(single_site(11, 11)), 0.0);
  EXPECT_DOUBLE_EQ(chiral_displacement(single_site(11, 7)), 4.0);
  EXPECT_DOUBLE_EQ(chiral_displacement_with_end(single_site(11, 11)), 6.0);
  EXPECT_DOUBLE_EQ(chiral_displacement_with_end(single_site(11, 4)), -2.0);
  EXPECT_THROW(chiral_displacement(std::vector<double>(10, 0.1)), InvalidArgument);
}

TEST(ChiralDisplacement, BoundedByCellCount) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> p(9);
    double s = 0.0;
    for (auto& x : p) s += (x = uniform_unit(rng));
    for (auto& x : p) x /= s;
    EXPECT_LE(std::abs(chiral_displacement(p)), 4.0);
  }
}

TEST(Mcd, SshDeepTopologicalLimit) {
  const WindingEstimate w = measure_winding_mcd({ChainKind::ssh, 5}, couplings_from_ratio(0.01, 1.0));
  EXPECT_NEAR(w.value, 1.0, 0.05);
}

TEST(Mcd, FslEqualCouplingsGiveHalf) {
  for (int n = 1; n <= 8; ++n) EXPECT_NEAR(measure_winding_mcd({ChainKind::fsl, n}, {1.0, 1.0}).value, 0.5, 0.05);
}

TEST(Mcd, FslRatioTwo) {
  const WindingEstimate w = measure_winding_mcd({ChainKind::fsl, 5}, couplings_from_ratio(2.0, 1.0));
  EXPECT_NEAR(w.value, 0.2, 0.05);
  EXPECT_GE(w.value, -0.1);
  EXPECT_LE(w.value, 1.1);
  EXPECT_NEAR(w.tau, 200.0, 1e-12);
}

TEST(Mcd, SshPlateausForLongChains) {
  for (double r : {0.1, 0.3, 0.5}) EXPECT_NEAR(measure_winding_mcd({ChainKind::ssh, 10}, couplings_from_ratio(r, 1.0)).value, 1.0, 0.05);
  for (double r : {2.0, 3.0, 10.0}) EXPECT_NEAR(measure_winding_mcd({ChainKind::ssh, 10}, couplings_from_ratio(r, 1.0)).value, 0.0, 0.05);
}

TEST(Mcd, SingleSiteOptionIsRecorded) {
  McdOptions o;
  o.initial_even_site = 4;
  const WindingEstimate w = measure_winding_mcd({ChainKind::fsl, 4}, {1.0, 1.0}, o);
  EXPECT_EQ(w.initial_even_site, 4);
  EXPECT_GE(w.value, -0.1);
  EXPECT_LE(w.value, 1.1);
}

TEST(Mcd, DefaultStartsOnMiddleEvenSite) {
  EXPECT_EQ(measure_winding_mcd({ChainKind::fsl, 5}, {1.0, 1.0}).initial_even_site, 6);
  EXPECT_EQ(measure_winding_mcd({ChainKind::fsl, 4}, {1.0, 1.0}).initial_even_site, 4);
  EXPECT_EQ(measure_winding_mcd({ChainKind::fsl, 1}, {1.0, 1.0}).initial_even_site, 2);
}

TEST(Mcd, SiteAverageAgreesWithClosedForm) {
  McdOptions o;
  o.initial_even_site = -1;
  const Couplings c = couplings_from_ratio(0.5, 1.0);
  const WindingEstimate w = measure_winding_mcd({ChainKind::fsl, 5}, c, o);
  EXPECT_EQ(w.initial_even_site, -1);
  EXPECT_NEAR(w.value, analytic_winding(c), 0.05);
}

TEST(Mcd, EndSiteExclusionBiasesEstimate) {
  // Without the end site, weight reaching site 2N+1 drops out of P_d.
  McdOptions o;
  o.count_end_site = false;
  const Couplings c = couplings_from_ratio(1.0, 1.0);
  EXPECT_GT(std::abs(measure_winding_mcd({ChainKind::fsl, 5}, c, o).value - analytic_winding(c)), 0.05);
}

TEST(Mcd, RejectsInvalidOptions) {
  McdOptions odd;
  odd.initial_even_site = 3;
  EXPECT_THROW(measure_winding_mcd({ChainKind::fsl, 3}, {1.0, 1.0}, odd), InvalidArgument);
  McdOptions coarse;
  coarse.points = 100;
  EXPECT_THROW(measure_winding_mcd({ChainKind::fsl, 3}, {1.0, 1.0}, coarse), InvalidArgument);
  EXPECT_THROW(measure_winding_mcd({ChainKind::fsl, 3}, {0.0, 0.0}), InvalidArgument);
}

TEST(Mcd, ShortAveragingFlaggedAsUnconverged) {
  McdOptions o;
  o.tau = 2.0;
  o.initial_even_site = 2;
  EXPECT_FALSE(measure_winding_mcd({ChainKind::fsl, 6}, {1.0, 1.0}, o).converged);
}
