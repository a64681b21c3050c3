#include <cmath>

#include <gtest/gtest.h>

#include "casimir/oracles.hpp"
#include "casimir/spectral.hpp"
#include "reference/reference_values.hpp"

using namespace casimir;
using namespace casimir::oracles;

TEST(ImageDipole, Values) {
  const auto none = image_dipole_modes(1.0, 4.0, 0.0);
  EXPECT_DOUBLE_EQ(none.n_perp, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(none.n_par, 1.0 / 3.0);
  EXPECT_NEAR(image_dipole_modes(1.0, 5.0, -1.0).n_perp, 0.332666666666666667, 1e-15);
  for (double fc : {-1.0, -0.3, 0.4}) {
    const auto m = image_dipole_modes(1.0, 2.5, fc);
    EXPECT_NEAR(m.n_perp - 1.0 / 3.0, 2.0 * (m.n_par - 1.0 / 3.0), 1e-15);
  }
  EXPECT_THROW(image_dipole_modes(1.0, 1.0, -1.0), DomainError);
}

TEST(DepolarizationIntegral, Sphere) {
  const auto s = Spheroid::sphere(2.0);
  EXPECT_NEAR(depolarization_integral(s, Axis::symmetry), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(depolarization_integral(s, Axis::transverse), 1.0 / 3.0, 1e-12);
}

TEST(DepolarizationIntegral, ClosedFormsAndSumRule) {
  const struct {
    double aspect;
    double prolate;
    double oblate;
  } table[] = {{1.1, casimir_ref::kProlateLz_1_1, casimir_ref::kOblateLz_1_1},
               {1.4, casimir_ref::kProlateLz_1_4, casimir_ref::kOblateLz_1_4},
               {2.0, casimir_ref::kProlateLz_2, casimir_ref::kOblateLz_2},
               {5.0, casimir_ref::kProlateLz_5, casimir_ref::kOblateLz_5}};
  for (const auto& row : table) {
    const auto p = Spheroid::prolate(row.aspect, 1.0), o = Spheroid::oblate(row.aspect, 1.0);
    EXPECT_NEAR(depolarization_integral(p, Axis::symmetry), row.prolate, 1e-10);
    EXPECT_NEAR(depolarization_integral(o, Axis::symmetry), row.oblate, 1e-10);
    for (const auto& s : {p, o})
      EXPECT_NEAR(depolarization_integral(s, Axis::symmetry) + 2.0 * depolarization_integral(s, Axis::transverse), 1.0, 1e-10);
  }
}

TEST(BemMesh, AreaAndNormals) {
  for (const auto& s : {Spheroid::sphere(1.0), Spheroid::prolate(2.0, 1.0), Spheroid::oblate(3.0, 1.0)}) {
    const auto mesh = make_bem_mesh(s, 32);
    EXPECT_NEAR(mesh.area() / spheroid_area(s), 1.0, 5e-3);
    for (int k = 0; k < mesh.rings(); ++k) EXPECT_NEAR(std::hypot(mesh.n_rho[k], mesh.n_z[k]), 1.0, 1e-12);
  }
  EXPECT_THROW(make_bem_mesh(Spheroid::sphere(1.0), 2), DomainError);
}

TEST(Bem, IsolatedSphere) {
  const PlacedParticle p(Spheroid::sphere(1.0), 1.0);
  const auto u = quasistatic_bem(p, 0.0, 0, make_bem_mesh(p.spheroid(), 32), 3);
  EXPECT_NEAR(u[0], 1.0 / 3.0, 0.005 / 3.0);
  EXPECT_NEAR(u[1], 2.0 / 5.0, 0.005 * 0.4);
  EXPECT_NEAR(u[2], 3.0 / 7.0, 0.005 * 3.0 / 7.0);
}

TEST(Bem, IsolatedProlateLowestModes) {
  const PlacedParticle p(Spheroid::prolate(2.0, 1.0), 1.0);
  SystemConfig c{p};
  c.substrate_medium = ConstantMedium{1.0};
  c.l_max = 12;
  for (int m : {0, 1}) {
    const auto core = isolated_block(c, m).eigenvalues;
    const auto u = quasistatic_bem(p, 0.0, m, make_bem_mesh(p.spheroid(), 32), 3);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(u[k] / core[k], 1.0, 0.005) << m << " " << k;
  }
  const auto dip = quasistatic_bem(p, 0.0, 0, make_bem_mesh(p.spheroid(), 32), 1);
  EXPECT_NEAR(dip[0] / isolated_depolarization(p.spheroid(), 1, 0), 1.0, 0.005);
}

TEST(Bem, SphereAboveConductorMatchesSpectralCore) {
  const PlacedParticle p(Spheroid::sphere(1.0), 5.0);
  SystemConfig c{p};
  c.l_max = 20;
  const auto core = spectral_block(c, 0);
  const auto u = quasistatic_bem(p, -1.0, 0, make_bem_mesh(p.spheroid(), 32), 1);
  EXPECT_NEAR(u[0] / core.eigenvalues[0], 1.0, 0.01);
}

TEST(Bem, RefinementIsCauchy) {
  const PlacedParticle p(Spheroid::sphere(1.0), 1.0);
  const auto r = bem_refinement(p, -1.0, 1, 3, {16, 32, 64}, 1e-3);
  for (int k = 0; k < 3; ++k) {
    const double d1 = std::abs(r.eigenvalues[1][k] - r.eigenvalues[0][k]);
    const double d2 = std::abs(r.eigenvalues[2][k] - r.eigenvalues[1][k]);
    EXPECT_LE(d2, d1 + 1e-9);
  }
  EXPECT_THROW(bem_refinement(p, -1.0, 1, 3, {6, 8}, 1e-9), ResolutionError);
}
