#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "shannop/shannop.hpp"

using namespace shannop;

namespace {

std::set<int> axis_values(const FrequencyBand& b, const GridSpec& g) {
  std::set<int> out;
  for (std::size_t flat : b.modes) out.insert(g.mode(flat)[0]);
  return out;
}

void expect_exact_cover(const Partition& p) {
  std::vector<int> hits(p.grid.total(), 0);
  for (const auto& b : p.bands)
    for (std::size_t f : b.modes) ++hits[f];
  for (std::size_t f : p.dc_band.modes) ++hits[f];
  for (std::size_t f = 0; f < hits.size(); ++f) ASSERT_EQ(hits[f], 1) << "mode " << f;
  EXPECT_EQ(p.mode_count(), p.grid.total());
}

void expect_sign_symmetric(const Partition& p) {
  for (const auto& b : p.bands) {
    const std::set<std::size_t> modes(b.modes.begin(), b.modes.end());
    for (std::size_t f : b.modes) EXPECT_TRUE(modes.count(p.grid.mirror(f))) << b.id.str();
  }
}

const FrequencyBand& band_with(const Partition& p, const BandId& id) {
  const auto it = std::find_if(p.bands.begin(), p.bands.end(), [&](const auto& b) { return b.id == id; });
  if (it == p.bands.end()) throw std::runtime_error("band not found: " + id.str());
  return *it;
}

double rel(const SpectralField& a, const SpectralField& b) {
  double num = 0.0;
  for (std::size_t i = 0; i < a.modes.size(); ++i) num += std::norm(a.modes[i] - b.modes[i]);
  return std::sqrt(num) / l2_norm(b);
}

}  // namespace

TEST(TensorialPartition, EightPoints) {
  const GridSpec g({8});
  const auto p = build_tensorial_partition(g);
  ASSERT_EQ(p->bands.size(), 2u);
  EXPECT_EQ(axis_values(p->bands[0], g), (std::set<int>{-1, 1}));
  EXPECT_EQ(axis_values(p->bands[1], g), (std::set<int>{-3, -2, 2, 3}));
  EXPECT_EQ(axis_values(p->dc_band, g), (std::set<int>{-4, 0}));
  EXPECT_EQ(p->bands[1].box[0].lo, 2.0);
  EXPECT_EQ(p->bands[1].box[0].hi, 4.0);
}

TEST(TensorialPartition, FourByFour) {
  const GridSpec g({4, 4});
  const auto p = build_tensorial_partition(g);
  ASSERT_EQ(p->bands.size(), 1u);
  EXPECT_EQ(p->bands[0].modes.size(), 4u);
  for (std::size_t f : p->bands[0].modes) {
    EXPECT_EQ(std::abs(g.mode(f)[0]), 1);
    EXPECT_EQ(std::abs(g.mode(f)[1]), 1);
  }
  EXPECT_EQ(p->dc_band.modes.size(), 12u);
}

TEST(TensorialPartition, AnisotropicCover) {
  const auto p = build_tensorial_partition(GridSpec({32, 8, 4}));
  EXPECT_EQ(p->bands.size(), 4u * 2u * 1u);
  expect_exact_cover(*p);
  expect_sign_symmetric(*p);
}

TEST(MraPartition, FourByFourHasThreeTypes) {
  const auto p = build_mra_partition(GridSpec({4, 4}));
  ASSERT_EQ(p->bands.size(), 3u);
  std::set<std::vector<int>> types;
  for (const auto& b : p->bands) {
    EXPECT_EQ(b.id.scale, std::vector<int>{0});
    types.insert(b.id.type);
  }
  EXPECT_EQ(types, (std::set<std::vector<int>>{{1, 0}, {0, 1}, {1, 1}}));
  expect_exact_cover(*p);
}

TEST(MraPartition, BoxOneOneAtScaleOne) {
  const GridSpec g({8, 8});
  const auto p = build_mra_partition(g);
  const auto& b = band_with(*p, BandId{{1}, {1, 1}, {}});
  for (std::size_t f : b.modes)
    for (int i = 0; i < 2; ++i) {
      const int m = std::abs(g.mode(f)[i]);
      EXPECT_TRUE(m == 2 || m == 3);
    }
  EXPECT_EQ(b.modes.size(), 16u);
}

TEST(MraPartition, RejectsAnisotropicGrid) {
  EXPECT_THROW(build_mra_partition(GridSpec({16, 8})), UnsupportedSchemeError);
}

TEST(Partitions, ExactCoverEverywhere) {
  for (const auto& sizes : std::vector<std::vector<std::size_t>>{{64}, {32, 32}, {16, 16, 16}}) {
    const GridSpec g(sizes);
    for (Scheme s : {Scheme::tensorial, Scheme::mra})
      for (int depth : {0, 1, 2}) {
        const auto p = build_partition(g, s, depth);
        expect_exact_cover(*p);
        expect_sign_symmetric(*p);
      }
  }
}

TEST(PacketRefinement, HalvesIntervals) {
  const GridSpec g({16});
  const auto base = build_tensorial_partition(g);
  const auto d1 = refine_packet(base, 1);
  const auto d2 = refine_packet(base, 2);
  std::vector<std::pair<double, double>> boxes1;
  std::vector<std::pair<double, double>> boxes2;
  for (const auto& b : d1->bands)
    if (b.id.scale[0] == 2) boxes1.emplace_back(b.box[0].lo, b.box[0].hi);
  for (const auto& b : d2->bands)
    if (b.id.scale[0] == 2) boxes2.emplace_back(b.box[0].lo, b.box[0].hi);
  EXPECT_EQ(boxes1, (std::vector<std::pair<double, double>>{{4, 6}, {6, 8}}));
  EXPECT_EQ(boxes2, (std::vector<std::pair<double, double>>{{4, 5}, {5, 6}, {6, 7}, {7, 8}}));
}

TEST(PacketRefinement, DepthZeroIsIdentity) {
  const auto base = build_tensorial_partition(GridSpec({32, 32}));
  EXPECT_EQ(refine_packet(base, 0)->dump(), base->dump());
}

TEST(PacketRefinement, NestingMatchesDirectDepth) {
  const GridSpec g({64, 32});
  const auto base = build_tensorial_partition(g);
  EXPECT_EQ(refine_packet(refine_packet(base, 1), 1)->dump(), refine_packet(base, 2)->dump());
}

TEST(PacketRefinement, DropsEmptyBands) {
  const auto p = refine_packet(build_tensorial_partition(GridSpec({8})), 2);
  EXPECT_GT(p->dropped_bands, 0u);
  for (const auto& b : p->bands) EXPECT_FALSE(b.modes.empty());
  expect_exact_cover(*p);
}

TEST(PacketRefinement, RatioShrinks) {
  const GridSpec g({128});
  const auto base = build_tensorial_partition(g);
  const auto d1 = refine_packet(base, 1);
  for (const auto& b : d1->bands) {
    const double r = b.box[0].hi / b.box[0].lo;
    EXPECT_TRUE(r == 1.5 || std::abs(r - 4.0 / 3.0) < 1e-15) << b.id.str();
    const auto e = band_extrema(b, g, false);
    EXPECT_LE(e.b / e.a, 2.0);
  }
}

TEST(PartitionDump, Format) {
  const auto p = build_tensorial_partition(GridSpec({8}));
  EXPECT_EQ(p->dump(), "band j=0 box [1,2) modes 2\nband j=1 box [2,4) modes 4\ndc modes 2\n");
}

TEST(AnalyzeSynthesize, ZeroFieldAndIdentity) {
  const GridSpec g({32, 32});
  const auto p = build_partition(g, Scheme::mra, 1);
  const BandedField zero = analyze(SpectralField(g, 1), p);
  for (std::size_t b = 0; b < zero.bands.size(); ++b) EXPECT_EQ(zero.energy(b), 0.0);
  const SpectralField s = forward_transform(random_field(g, 2, 1));
  EXPECT_EQ(synthesize(analyze(s, p)).modes, s.modes);
}

TEST(AnalyzeSynthesize, SingleModeLandsInOneBand) {
  const GridSpec g({8, 8});
  const auto p = build_tensorial_partition(g);
  SpectralField s(g, 1);
  s.at(0, g.index({3, 1, 0})) = 1.0;
  const BandedField b = analyze(s, p);
  for (std::size_t i = 0; i < p->bands.size(); ++i)
    EXPECT_EQ(b.energy(i), (p->bands[i].id.scale == std::vector<int>{1, 0}) ? 1.0 : 0.0) << p->bands[i].id.str();
}

TEST(AnalyzeSynthesize, EnergyAdditive) {
  const GridSpec g({64, 64});
  const auto p = build_partition(g, Scheme::tensorial, 1);
  for (int seed = 0; seed < 10; ++seed) {
    const SpectralField s = forward_transform(random_field(g, 1, 100 + seed));
    const BandedField b = analyze(s, p);
    double sum = b.dc_energy();
    for (std::size_t i = 0; i < b.bands.size(); ++i) sum += b.energy(i);
    EXPECT_NEAR(sum / std::pow(l2_norm(s), 2), 1.0, 1e-12);
  }
}

TEST(AnalyzeSynthesize, OverlapDetected) {
  const GridSpec g({16});
  auto bad = std::make_shared<Partition>(*build_tensorial_partition(g));
  bad->bands[1].modes.push_back(bad->bands[0].modes.front());
  BandedField b = analyze(SpectralField(g, 1), bad);
  EXPECT_THROW(synthesize(b), StructuralError);
}

TEST(AnalyzeSynthesize, FamilyTagFactor) {
  const GridSpec g({16, 16});
  const auto p = build_tensorial_partition(g);
  const SpectralField s = forward_transform(random_field(g, 1, 2));
  BandedField b = analyze(s, p);
  b.family = {1, 0};
  const SpectralField out = synthesize(b);
  for (const auto& band : p->bands)
    for (std::size_t f : band.modes) {
      const double k = g.mode(f)[0];
      const cplx expected = s.at(0, f) * (4.0 * std::pow(2.0, band.id.scale[0]) / cplx(0.0, k));
      EXPECT_LE(std::abs(out.at(0, f) - expected), 1e-13 * std::abs(expected));
    }
}

TEST(BandExtrema, ContinuousAndExact) {
  const GridSpec g2({16, 16});
  const auto p2 = build_tensorial_partition(g2);
  const auto e = band_extrema(band_with(*p2, BandId{{0, 0}, {}, {}}), g2, false);
  EXPECT_DOUBLE_EQ(e.a * e.a, 2.0);
  EXPECT_DOUBLE_EQ(e.b * e.b, 8.0);

  const GridSpec g1({16});
  const auto p1 = build_tensorial_partition(g1);
  const auto& b48 = band_with(*p1, BandId{{2}, {}, {}});
  EXPECT_EQ(band_extrema(b48, g1, true).a, 4.0);
  EXPECT_EQ(band_extrema(b48, g1, true).b, 7.0);
  EXPECT_EQ(band_extrema(b48, g1, false).b, 8.0);
  for (const auto& b : p2->bands) {
    const auto c = band_extrema(b, g2, false);
    EXPECT_DOUBLE_EQ(c.b, 2.0 * c.a);
  }
  FrequencyBand empty;
  EXPECT_THROW(band_extrema(empty, g1, true), StructuralError);
}

TEST(Lemarie, DerivativeMatchesSpectralDerivative) {
  const GridSpec g({64, 64});
  const auto p = build_tensorial_partition(g);
  const SpectralField s = forward_transform(random_field(g, 1, 3));
  for (int axis = 0; axis < 2; ++axis) {
    const SpectralField lhs = synthesize(apply_lemarie_derivative(analyze(s, p), axis));
    EXPECT_LE(rel(lhs, apply_modewise(s, SymbolExpr::xi(axis))), 1e-12);
  }
}

TEST(Lemarie, SecondDerivativeAndThreeD) {
  const GridSpec g({16, 8, 32});
  const auto p = build_tensorial_partition(g);
  const SpectralField s = forward_transform(random_field(g, 1, 4));
  const BandedField d = apply_lemarie_derivative(apply_lemarie_derivative(analyze(s, p), 2), 0);
  EXPECT_EQ(d.family, (FamilyTag{-1, 0, -1}));
  EXPECT_LE(rel(synthesize(d), apply_modewise(s, SymbolExpr::xi(0) * SymbolExpr::xi(2))), 1e-12);
}

TEST(Lemarie, IntegralInvertsDerivative) {
  const GridSpec g({64, 64});
  const auto p = build_tensorial_partition(g);
  SpectralField s = forward_transform(random_field(g, 1, 5));
  // modes with k_0 = 0 or Nyquist are lost by d/dx_0
  for (std::size_t f = 0; f < g.total(); ++f)
    if (g.wavevector(f).odd(0) == 0.0) s.at(0, f) = 0.0;
  const BandedField back = apply_lemarie_integral(apply_lemarie_derivative(analyze(s, p), 0), 0);
  EXPECT_EQ(back.family, (FamilyTag{0, 0}));
  EXPECT_LE(rel(synthesize(back), s), 1e-12);
}

TEST(Lemarie, ConstantAlongAxisGivesZero) {
  const GridSpec g({32, 32});
  const auto p = build_tensorial_partition(g);
  RealField f(g, 1);
  for (std::size_t i = 0; i < g.total(); ++i) f.at(0, i) = std::sin(3.0 * g.coordinate(i, 1));
  const SpectralField d = synthesize(apply_lemarie_derivative(analyze(forward_transform(f), p), 0));
  EXPECT_LE(l2_norm(d), 1e-13);
}

TEST(Lemarie, RequiresTensorial) {
  const GridSpec g({16, 16});
  const BandedField b = analyze(SpectralField(g, 1), build_mra_partition(g));
  EXPECT_THROW(apply_lemarie_derivative(b, 0), UnsupportedSchemeError);
  const BandedField t = analyze(SpectralField(g, 1), build_tensorial_partition(g));
  EXPECT_THROW(apply_lemarie_derivative(t, 2), StructuralError);
}
