#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <random>

#include "shannop/shannop.hpp"

using namespace shannop;

namespace {

const FrequencyBand& band_with(const Partition& p, const BandId& id) {
  const auto it = std::find_if(p.bands.begin(), p.bands.end(), [&](const auto& b) { return b.id == id; });
  if (it == p.bands.end()) throw std::runtime_error("band not found: " + id.str());
  return *it;
}

std::size_t band_index(const Partition& p, const BandId& id) {
  return static_cast<std::size_t>(&band_with(p, id) - p.bands.data());
}

}  // namespace

TEST(RateFormulas, ImplicitLaplacianLimits) {
  EXPECT_NEAR(rate_implicit_laplacian(1e12, 1.0, 2.0), 0.6, 1e-9);
  EXPECT_NEAR(rate_implicit_laplacian(1e12, 4.0, 6.0), 5.0 / 13.0, 1e-9);
  EXPECT_EQ(rate_implicit_laplacian(0.0, 1.0, 2.0), 0.0);
}

TEST(RateFormulas, ImplicitLaplacianMonotone) {
  double prev = 0.0;
  for (double alpha : {1e-3, 1e-2, 0.1, 1.0, 10.0, 1e3}) {
    const double r = rate_implicit_laplacian(alpha, 2.0, 4.0);
    EXPECT_GT(r, prev);
    prev = r;
  }
  prev = 0.0;
  for (double ratio : {1.1, 1.3, 1.5, 2.0, 3.0}) {
    const double r = rate_implicit_laplacian(5.0, 1.0, ratio);
    EXPECT_GT(r, prev);
    prev = r;
  }
}

TEST(RateFormulas, Kantorovich) {
  EXPECT_DOUBLE_EQ(rate_kantorovich(1.0, 2.0), 9.0 / 16.0);
  EXPECT_NEAR(rate_kantorovich(1.0, 1.5), 25.0 / 144.0, 1e-16);
  EXPECT_EQ(rate_kantorovich(3.0, 3.0), 0.0);
  for (double a : {0.5, 2.0, 7.0}) EXPECT_NEAR(rate_kantorovich(a, 1.7 * a), rate_kantorovich(1.0, 1.7), 1e-15);
}

TEST(ScalarOptimal, ImplicitLaplacianBandValue) {
  const GridSpec g({16, 16});
  const auto p = build_tensorial_partition(g);
  const auto pc = scalar_optimal(SymbolExpr::implicit_laplacian(1e12), p, false);
  // 2D band j=(0,0): a^2 = 2, b^2 = 8, so w = 1 + alpha (a^2 + b^2)/2
  const double w = std::get<RMatrix>(pc.entries[band_index(*p, BandId{{0, 0}, {}, {}})])(0, 0);
  EXPECT_NEAR(w / 1e12, 5.0, 1e-11);
  const auto lap = implicit_laplacian_precond(1.0, p, 1, false);
  EXPECT_DOUBLE_EQ(std::get<RMatrix>(lap.entries[band_index(*p, BandId{{0, 0}, {}, {}})])(0, 0), 6.0);
}

TEST(ScalarOptimal, ConstantSymbol) {
  const auto p = build_tensorial_partition(GridSpec({32, 32}));
  const auto pc = scalar_optimal(SymbolExpr::constant(RMatrix::Constant(1, 1, 2.5)), p);
  for (const auto& e : pc.entries) EXPECT_DOUBLE_EQ(std::get<RMatrix>(e)(0, 0), 2.5);
}

TEST(ScalarOptimal, NegLaplacianOnFourToEight) {
  const GridSpec g({16});
  const auto p = build_tensorial_partition(g);
  const std::size_t b = band_index(*p, BandId{{2}, {}, {}});
  const SymbolExpr s = SymbolExpr::neg_laplacian();
  const auto harmonic = scalar_optimal(s, p, true, ScalarRule::harmonic);
  const double wh = std::get<RMatrix>(harmonic.entries[b])(0, 0);
  EXPECT_NEAR(1.0 / wh, 0.5 * (1.0 / 16.0 + 1.0 / 49.0), 1e-16);
  // the harmonic constant contracts 1 - p/w only to (M - m)/(2m)
  EXPECT_NEAR(sampled_contraction(s, harmonic, b), (49.0 - 16.0) / 32.0, 1e-15);
  EXPECT_NEAR(harmonic.bounds[b].rho, (49.0 - 16.0) / 32.0, 1e-15);

  const auto minimax = scalar_optimal(s, p);
  EXPECT_DOUBLE_EQ(std::get<RMatrix>(minimax.entries[b])(0, 0), 32.5);
  EXPECT_NEAR(sampled_contraction(s, minimax, b), 33.0 / 65.0, 1e-15);
}

TEST(ScalarOptimal, RejectsSignChangeAndComplex) {
  const auto p = build_tensorial_partition(GridSpec({16, 16}));
  const SymbolExpr indefinite = SymbolExpr::constant(RMatrix::Constant(1, 1, 10.0)) - SymbolExpr::neg_laplacian();
  EXPECT_THROW(scalar_optimal(indefinite, p), NotInvertibleOnBandError);
  EXPECT_THROW(scalar_optimal(SymbolExpr::xi(0), p), NotInvertibleOnBandError);
  EXPECT_THROW(scalar_optimal(SymbolExpr::leray(2), p), StructuralError);
}

TEST(ScalarOptimal, NoConstantBeatsIt) {
  const GridSpec g({64, 64});
  const auto p = build_mra_partition(g);
  const SymbolExpr s = SymbolExpr::implicit_laplacian(0.3);
  const auto pc = scalar_optimal(s, p);
  for (std::size_t b = 0; b < p->bands.size(); ++b) {
    const double best = sampled_contraction(s, pc, b);
    EXPECT_NEAR(best, pc.bounds[b].rho, 1e-12);
    const double w = std::get<RMatrix>(pc.entries[b])(0, 0);
    const auto ks = band_wavevectors(p->bands[b], g);
    for (double f : {0.99, 1.01}) {
      const double r = contraction_over(s, [&](const Wavevector&) { return CMatrix::Constant(1, 1, w * f); }, ks);
      EXPECT_GE(r, best);
    }
  }
}

TEST(SampledContraction, IdentityIsZero) {
  const auto p = build_tensorial_partition(GridSpec({16, 16}));
  const auto pc = implicit_laplacian_precond(0.0, p);
  for (std::size_t b = 0; b < p->bands.size(); ++b)
    EXPECT_EQ(sampled_contraction(SymbolExpr::identity(1), pc, b), 0.0);
}

TEST(SampledContraction, ImplicitLaplacianLimit) {
  const GridSpec g({256});
  const auto p = build_tensorial_partition(g);
  const auto cont = implicit_laplacian_precond(1e12, p, 1, false);
  const auto exact = implicit_laplacian_precond(1e12, p, 1, true);
  const SymbolExpr s = SymbolExpr::implicit_laplacian(1e12);
  for (std::size_t b = 0; b < p->bands.size(); ++b) {
    const double rc = sampled_contraction(s, cont, b);
    const double re = sampled_contraction(s, exact, b);
    EXPECT_LE(rc, 0.6 + 1e-9);
    if (p->bands[b].modes.size() > 2) EXPECT_LT(re, rc);
  }
}

TEST(LerayOperators, RowAnnihilationAndGradientForm) {
  const GridSpec g({32, 32, 32});
  const auto p = build_partition(g, Scheme::tensorial, 1);
  for (std::size_t b = 0; b < p->bands.size(); b += 7) {
    const auto ops = leray_band_operators(p->bands[b], 3);
    for (std::size_t i = 0; i < p->bands[b].modes.size(); i += 5) {
      const Wavevector k = g.wavevector(p->bands[b].modes[i]);
      const CMatrix mw = ops.mw(k);
      const CMatrix lw = ops.lw(k);
      Eigen::RowVectorXcd xi(3);
      for (int a = 0; a < 3; ++a) xi(a) = k.k[a];
      EXPECT_LE((xi * mw).norm(), 1e-12 * xi.norm());
      // every column of Lw is a multiple of xi
      for (int c = 0; c < 3; ++c) {
        const Eigen::VectorXcd col = lw.col(c);
        const cplx coef = xi.conjugate().dot(col.transpose()) / xi.squaredNorm();
        EXPECT_LE((col - coef * xi.transpose()).norm(), 1e-12 * (1.0 + col.norm()));
      }
      CMatrix m2;
      CMatrix l2;
      ops.evaluate(k, m2, l2);
      EXPECT_LE((m2 - mw).norm(), 1e-12);
      EXPECT_LE((l2 - lw).norm(), 1e-12);
    }
  }
}

TEST(LerayOperators, EigenvalueAtOneTwo) {
  const GridSpec g({16, 16});
  const auto p = build_tensorial_partition(g);
  const auto ops = leray_band_operators(band_with(*p, BandId{{0, 0}, {}, {}}), 2);
  EXPECT_EQ(ops.omega, (std::vector<double>{1.0, 1.0}));
  const Wavevector k({1.0, 2.0});
  EXPECT_DOUBLE_EQ(leray_eigenvalue(ops.omega, k), -9.0 / 16.0);
  const auto ev = Eigen::ComplexEigenSolver<CMatrix>(leray_iteration_matrix(ops, k), false).eigenvalues();
  const double big = std::max(std::abs(ev(0)), std::abs(ev(1)));
  const double small = std::min(std::abs(ev(0)), std::abs(ev(1)));
  EXPECT_NEAR(big, 9.0 / 16.0, 1e-14);
  EXPECT_LE(small, 1e-14);
}

TEST(LerayOperators, EigenstructureSampled) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1.0, 2.0);
  const std::vector<double> omega{2.0, 4.0, 1.0};
  LerayBandOperators ops;
  ops.omega = omega;
  for (int s = 0; s < 200; ++s) {
    const Wavevector k({omega[0] * u(rng), -omega[1] * u(rng), omega[2] * u(rng)});
    const auto ev = Eigen::ComplexEigenSolver<CMatrix>(leray_iteration_matrix(ops, k), false).eigenvalues();
    const double lambda = leray_eigenvalue(omega, k);
    int close = 0;
    for (int i = 0; i < 3; ++i) {
      if (std::abs(ev(i) - lambda) <= 1e-10) ++close;
      else EXPECT_LE(std::abs(ev(i)), 1e-10);
    }
    EXPECT_GE(close, 1);
  }
}

TEST(LerayOperators, BandSupRadiusIsNineSixteenths) {
  const GridSpec g({4, 4});
  const auto p = build_tensorial_partition(g);
  // |k_i| = 1 only: xi = omega, lambda = 0
  const auto pc = leray_precond(p);
  EXPECT_NEAR(sampled_contraction(pc, 0, ContractionMeasure::spectral_radius), 0.0, 1e-14);
  EXPECT_EQ(pc.bounds[0].rho, 0.0);
  const auto cont = leray_precond(p, false);
  EXPECT_DOUBLE_EQ(cont.bounds[0].rho, 9.0 / 16.0);

  const GridSpec g8({8, 8});
  const auto p8 = build_tensorial_partition(g8);
  const auto pc8 = leray_precond(p8);
  // band j=(0,1): xi = (1, 2 or 3), omega = (1, 2); corner sup is at (1, 3)
  const std::size_t b = band_index(*p8, BandId{{0, 1}, {}, {}});
  const double expected = std::abs(leray_eigenvalue(pc8.bands[b].omega, Wavevector({1.0, 3.0})));
  EXPECT_NEAR(sampled_contraction(pc8, b, ContractionMeasure::spectral_radius), expected, 1e-12);
  EXPECT_LE(expected, 9.0 / 16.0);
}

TEST(LerayOperators, PacketBoundIsTwentyFiveOver144) {
  const auto p = build_partition(GridSpec({64, 64}), Scheme::tensorial, 1);
  const auto pc = leray_precond(p, false);
  for (const auto& bound : pc.bounds) EXPECT_LE(bound.rho, 25.0 / 144.0 + 1e-15);
}

TEST(LerayOperators, NeedsTensorial) {
  const GridSpec g({16, 16});
  EXPECT_THROW(leray_precond(build_mra_partition(g)), UnsupportedSchemeError);
  EXPECT_THROW(leray_precond(build_tensorial_partition(GridSpec({16}))), UnsupportedSchemeError);
}

TEST(RateTable, CsvHeaderAndRows) {
  std::vector<RateRow> rows{{"j=0:1", 1.0, 2.0, 0.5625, 0.5, "kantorovich"}};
  EXPECT_EQ(rate_table_csv(rows), "band_id,a,b,rho_theoretical,rho_sampled,formula\nj=0:1,1,2,0.5625,0.5,kantorovich\n");
}
