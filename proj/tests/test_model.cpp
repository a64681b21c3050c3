#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "casimir/model.hpp"

using namespace casimir;

TEST(Contrast, PerfectConductorIsMinusOne) { EXPECT_EQ(contrast_fc(1.0, PerfectConductor{}), -1.0); }

TEST(Contrast, IdenticalMediaGiveZero) { EXPECT_EQ(contrast_fc(1.0, ConstantMedium{1.0}), 0.0); }

TEST(Contrast, Sapphire) { EXPECT_NEAR(contrast_fc(1.0, ConstantMedium{3.12}), -2.12 / 4.12, 1e-15); }

TEST(Contrast, RejectsBadMedia) {
  EXPECT_THROW(contrast_fc(0.0, ConstantMedium{2.0}), InvalidMediumError);
  EXPECT_THROW(contrast_fc(1.0, ConstantMedium{-2.0}), InvalidMediumError);
  EXPECT_THROW(contrast_fc(1.0, DrudeMedium{1.0}), InvalidMediumError);
}

TEST(Contrast, AntisymmetricUnderSwap) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> eps(0.05, 50.0);
  for (int i = 0; i < 200; ++i) {
    const double a = eps(rng), b = eps(rng);
    const double f = contrast_fc(a, ConstantMedium{b});
    EXPECT_NEAR(f, -contrast_fc(b, ConstantMedium{a}), 1e-15);
    EXPECT_GE(f, -1.0);
    EXPECT_LT(f, 1.0);
  }
}

TEST(SpectralVariable, DipolarSphereResonance) { EXPECT_NEAR(spectral_u(-2.0, 1.0), 1.0 / 3.0, 1e-15); }

TEST(SpectralVariable, DegenerateMediaRejected) { EXPECT_THROW(spectral_u(1.0, 1.0), DivergentSpectralVariableError); }

TEST(SpectralVariable, DrudeRoundTrip) {
  const DrudeMedium drude{2.5};
  for (double n : {0.01, 1.0 / 3.0, 0.5, 0.77, 0.99}) {
    const double omega = drude.omega_p * std::sqrt(n);
    EXPECT_NEAR(spectral_u(drude, omega, 1.0), n, 1e-14);
  }
}

TEST(SpectralVariable, DrudeMonotoneInFrequency) {
  const DrudeMedium drude{1.0};
  double prev = spectral_u(drude, 0.01, 1.0);
  for (double w = 0.02; w < 3.0; w += 0.01) {
    const double u = spectral_u(drude, w, 1.0);
    EXPECT_GT(u, prev);
    prev = u;
  }
}

TEST(Geometry, ProlateAndOblateCentres) {
  auto p = gap_geometry(Spheroid::prolate(2.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(p.d, 3.0);
  EXPECT_DOUBLE_EQ(p.r_perp, 2.0);
  EXPECT_DOUBLE_EQ(p.r_par, 1.0);
  auto o = gap_geometry(Spheroid::oblate(2.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(o.d, 2.0);
  EXPECT_DOUBLE_EQ(o.r_perp, 1.0);
  EXPECT_DOUBLE_EQ(o.r_par, 2.0);
}

TEST(Geometry, ContactRejected) {
  EXPECT_THROW(gap_geometry(Spheroid::sphere(1.0), 0.0), ContactError);
  EXPECT_THROW(gap_geometry(Spheroid::sphere(1.0), -0.5), ContactError);
}

TEST(Geometry, GapRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int i = 0; i < 100; ++i) {
    const double rmin = u(rng), gap = u(rng);
    const auto s = Spheroid::with_aspect(i % 2 ? Family::prolate : Family::oblate, 1.0 + u(rng), rmin);
    const auto g = gap_geometry(s, gap);
    EXPECT_NEAR(g.d - g.r_perp, gap, 1e-14 * g.d);
  }
}

TEST(Spheroid, InvariantsEnforced) {
  EXPECT_THROW(Spheroid(1.0, 2.0, Family::prolate), InvalidGeometryError);
  EXPECT_THROW(Spheroid(1.0, 0.0, Family::prolate), InvalidGeometryError);
  EXPECT_THROW(Spheroid(1.0, 1.0, Family::prolate), InvalidGeometryError);
  EXPECT_THROW(Spheroid(2.0, 1.0, Family::sphere), InvalidGeometryError);
  EXPECT_NO_THROW(Spheroid::sphere(1.0));
}

TEST(Spheroid, Volume) {
  EXPECT_NEAR(Spheroid::prolate(2.0, 1.0).volume(), 4.0 * std::numbers::pi / 3.0 * 2.0, 1e-14);
  EXPECT_NEAR(Spheroid::oblate(2.0, 1.0).volume(), 4.0 * std::numbers::pi / 3.0 * 4.0, 1e-14);
}

TEST(Spheroid, ApexRadius) {
  EXPECT_DOUBLE_EQ(Spheroid::prolate(2.0, 1.0).apex_radius(), 0.5);
  EXPECT_DOUBLE_EQ(Spheroid::oblate(2.0, 1.0).apex_radius(), 4.0);
  EXPECT_DOUBLE_EQ(Spheroid::sphere(1.5).apex_radius(), 1.5);
}

TEST(SpheroidalCoordinate, ProlateTwoToOne) {
  EXPECT_NEAR(spheroid_xi0(Spheroid::prolate(2.0, 1.0)), 2.0 / std::sqrt(3.0), 1e-14);
}

TEST(SpheroidalCoordinate, NearSphereDiverges) {
  EXPECT_GT(spheroid_xi0(Spheroid::prolate(1.0 + 1e-8, 1.0)), 1e3);
}

TEST(SpheroidalCoordinate, Oblate) {
  const auto s = Spheroid::oblate(2.0, 1.0);
  EXPECT_NEAR(spheroid_xi0(s), 1.0 / std::sqrt(3.0), 1e-14);
}

TEST(SpheroidalCoordinate, SphereRejected) { EXPECT_THROW(spheroid_xi0(Spheroid::sphere(1.0)), DomainError); }

TEST(SystemConfig, Validation) {
  SystemConfig c{PlacedParticle(Spheroid::sphere(1.0), 1.0)};
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.effective_m_max(), c.l_max);
  c.ambient_epsilon = 0.0;
  EXPECT_THROW(c.validate(), InvalidMediumError);
  c.ambient_epsilon = 1.0;
  c.l_max = 0;
  EXPECT_THROW(c.validate(), DomainError);
  c.l_max = 4;
  c.m_max = 5;
  EXPECT_THROW(c.validate(), DomainError);
  c.substrate_medium = DrudeMedium{1.0};
  c.m_max = 2;
  EXPECT_THROW(c.validate(), InvalidMediumError);
}
