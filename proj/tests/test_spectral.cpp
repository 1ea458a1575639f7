#include <gtest/gtest.h>

#include <cmath>

#include "shannop/shannop.hpp"

using namespace shannop;

namespace {

double max_abs_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

double max_abs(const RealField& a) {
  double m = 0.0;
  for (double v : a.values) m = std::max(m, std::abs(v));
  return m;
}

SpectralField unit_mode(const GridSpec& g, std::array<int, kMaxDim> k, cplx value = 1.0) {
  SpectralField s(g, 1);
  s.at(0, g.index(k)) = value;
  return s;
}

}  // namespace

TEST(GridSpec, RejectsBadSizes) {
  EXPECT_THROW(GridSpec({2}), StructuralError);
  EXPECT_THROW(GridSpec({12}), StructuralError);
  EXPECT_THROW(GridSpec({8, 8, 8, 8}), StructuralError);
  EXPECT_THROW(GridSpec(std::vector<std::size_t>{}), StructuralError);
  const GridSpec g({16, 8});
  EXPECT_EQ(g.total(), 128u);
  EXPECT_EQ(g.levels(0), 4);
  EXPECT_FALSE(g.isotropic());
}

TEST(GridSpec, ModeIndexRoundTrip) {
  const GridSpec g({8, 4, 16});
  for (std::size_t flat = 0; flat < g.total(); ++flat) {
    const auto k = g.mode(flat);
    EXPECT_GE(k[0], -4);
    EXPECT_LT(k[0], 4);
    EXPECT_EQ(g.index(k), flat);
    const auto m = g.mode(g.mirror(flat));
    for (int i = 0; i < 3; ++i) {
      const int n = static_cast<int>(g.size(i));
      EXPECT_EQ(((k[i] + m[i]) % n + n) % n, 0);
    }
  }
}

TEST(ForwardTransform, ZeroFieldHasZeroModes) {
  const GridSpec g({16, 16});
  const SpectralField s = forward_transform(RealField(g, 2));
  for (const cplx& z : s.modes) EXPECT_EQ(z, cplx(0.0));
}

TEST(ForwardTransform, CosineHasTwoModes) {
  const GridSpec g({32});
  RealField f(g, 1);
  for (std::size_t i = 0; i < g.total(); ++i) f.at(0, i) = std::cos(3.0 * g.coordinate(i, 0));
  const SpectralField s = forward_transform(f);
  for (std::size_t i = 0; i < g.total(); ++i) {
    const int k = g.mode(i)[0];
    if (std::abs(k) == 3) {
      // unitary: sum cos^2 = N/2 split over two modes
      EXPECT_NEAR(std::abs(s.at(0, i)), std::sqrt(32.0) / 2.0, 1e-12);
    } else {
      EXPECT_NEAR(std::abs(s.at(0, i)), 0.0, 1e-12);
    }
  }
}

TEST(ForwardTransform, Parseval) {
  const GridSpec g({64, 64});
  const RealField f = random_field(g, 1, 3);
  EXPECT_NEAR(l2_norm(forward_transform(f)) / l2_norm(f), 1.0, 1e-12);
}

TEST(ForwardTransform, HermitianSymmetry) {
  const RealField f = random_field(GridSpec({16, 8, 4}), 2, 4);
  const SpectralField s = forward_transform(f);
  EXPECT_LE(hermitian_defect(s), 1e-12 * l2_norm(s));
}

TEST(InverseTransform, RoundTripRandom128) {
  const RealField f = random_field(GridSpec({128}), 1, 5);
  EXPECT_LE(max_abs_diff(inverse_transform(forward_transform(f)), f), 1e-12 * max_abs(f));
}

TEST(InverseTransform, RoundTripAllSizes) {
  for (const auto& sizes : std::vector<std::vector<std::size_t>>{{4}, {256}, {4, 32}, {64, 64}, {8, 16, 4}, {16, 16, 16}}) {
    const RealField f = random_field(GridSpec(sizes), 2, 6);
    RealField diff = inverse_transform(forward_transform(f));
    for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= f.values[i];
    EXPECT_LE(l2_norm(diff), 1e-12 * l2_norm(f)) << GridSpec(sizes).str();
  }
}

TEST(InverseTransform, SingleModeGivesCosine) {
  const GridSpec g({16});
  SpectralField s(g, 1);
  s.at(0, g.index({1, 0, 0})) = 0.5;
  s.at(0, g.index({-1, 0, 0})) = 0.5;
  const RealField f = inverse_transform(s);
  for (std::size_t i = 0; i < g.total(); ++i)
    EXPECT_NEAR(f.at(0, i), std::cos(g.coordinate(i, 0)) / 4.0, 1e-15);
}

TEST(InverseTransform, SpectrumRoundTrip) {
  const GridSpec g({32, 32});
  const SpectralField s = forward_transform(random_field(g, 1, 8));
  const SpectralField back = forward_transform(inverse_transform(s));
  double err = 0.0;
  for (std::size_t i = 0; i < s.modes.size(); ++i) err = std::max(err, std::abs(back.modes[i] - s.modes[i]));
  EXPECT_LE(err, 1e-12 * l2_norm(s));
}

TEST(InverseTransform, RejectsNonHermitian) {
  const GridSpec g({16, 16});
  EXPECT_THROW(inverse_transform(unit_mode(g, {1, 2, 0})), RealityError);
}

TEST(SobolevNorm, ZeroOrderIsL2) {
  const SpectralField s = forward_transform(random_field(GridSpec({32, 32}), 1, 9));
  EXPECT_DOUBLE_EQ(sobolev_norm(s, 0.0), l2_norm(s));
}

TEST(SobolevNorm, SingleModeWeights) {
  const GridSpec g({8, 8});
  EXPECT_NEAR(sobolev_norm(unit_mode(g, {1, 0, 0}), 1.0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(sobolev_norm(unit_mode(g, {2, 0, 0}), -1.0), 1.0 / std::sqrt(5.0), 1e-15);
}

TEST(ApplyModewise, IdentityLeavesSpectrum) {
  const SpectralField s = forward_transform(random_field(GridSpec({16, 16}), 2, 10));
  const SpectralField out = apply_modewise(s, SymbolExpr::identity(2));
  EXPECT_EQ(out.modes, s.modes);
}

TEST(ApplyModewise, ImplicitLaplacianScalesMode) {
  const GridSpec g({8, 8});
  const SpectralField out = apply_modewise(unit_mode(g, {1, 1, 0}, {2.0, -1.0}), SymbolExpr::implicit_laplacian(1.0));
  EXPECT_NEAR(std::abs(out.at(0, g.index({1, 1, 0})) - cplx(6.0, -3.0)), 0.0, 1e-15);
}

TEST(ApplyModewise, LaplacianThenPseudoInverse) {
  const GridSpec g({32, 32});
  SpectralField v = forward_transform(random_field(g, 1, 11));
  v.at(0, 0) = 0.0;  // mean-free
  const SymbolExpr lap = -1.0 * SymbolExpr::neg_laplacian();
  const SpectralField back = exact_solve(lap, apply_modewise(v, lap));
  double err = 0.0;
  for (std::size_t i = 0; i < v.modes.size(); ++i) err += std::norm(back.modes[i] - v.modes[i]);
  EXPECT_LE(std::sqrt(err), 1e-10 * l2_norm(v));
}

TEST(ApplyModewise, Linear) {
  const GridSpec g({16, 16});
  const SpectralField f = forward_transform(random_field(g, 2, 12));
  const SpectralField h = forward_transform(random_field(g, 2, 13));
  SpectralField comb(g, 2);
  for (std::size_t i = 0; i < comb.modes.size(); ++i) comb.modes[i] = 2.5 * f.modes[i] - 0.75 * h.modes[i];
  const SymbolExpr m = SymbolExpr::leray(2) + SymbolExpr::xi(0, 2) * SymbolExpr::delta(0, 1, 2);
  const SpectralField lhs = apply_modewise(comb, m);
  const SpectralField af = apply_modewise(f, m);
  const SpectralField ah = apply_modewise(h, m);
  for (std::size_t i = 0; i < lhs.modes.size(); ++i)
    EXPECT_LE(std::abs(lhs.modes[i] - (2.5 * af.modes[i] - 0.75 * ah.modes[i])), 1e-12 * (1.0 + std::abs(lhs.modes[i])));
}

TEST(ApplyModewise, RealSymbolsPreserveReality) {
  const GridSpec g({16, 16});
  const SpectralField s = forward_transform(random_field(g, 2, 14));
  for (const SymbolExpr& m :
       {SymbolExpr::leray(2), SymbolExpr::xi(1, 2), SymbolExpr::xi_inv(0, 2) * SymbolExpr::delta(0, 1, 2),
        SymbolExpr::gradient(2) * SymbolExpr::divergence(2)}) {
    EXPECT_NO_THROW(inverse_transform(apply_modewise(s, m))) << m.str();
    EXPECT_LE(hermitian_defect(apply_modewise(s, m)), 1e-10 * l2_norm(s)) << m.str();
  }
}

TEST(ApplyModewise, ArityMismatch) {
  const SpectralField s(GridSpec({8}), 1);
  EXPECT_THROW(apply_modewise(s, SymbolExpr::identity(2)), StructuralError);
}

TEST(ApplyModewise, SkipAndZeroPolicies) {
  const GridSpec g({8});
  SpectralField s(g, 1);
  s.at(0, 0) = 3.0;
  EXPECT_EQ(count_singular_modes(SymbolExpr::xi_inv(0), g), 2u);  // k = 0 and the Nyquist mode
  EXPECT_EQ(apply_modewise(s, SymbolExpr::xi_inv(0), SingularModePolicy::skip).at(0, 0), cplx(3.0));
  EXPECT_EQ(apply_modewise(s, SymbolExpr::xi_inv(0), SingularModePolicy::zero).at(0, 0), cplx(0.0));
  EXPECT_THROW(apply_modewise(s, SymbolExpr::xi_inv(0), SingularModePolicy::error), SingularModeError);
}
