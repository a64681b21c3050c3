#pragma once

// Non-retarded plate–plate zero-point energy from the coupled surface-plasmon
// branch ω(k, z) = ω_p sqrt((1 + f_c e^{−2kz})/2), and the proximity force
// approximation for curved surfaces.
//
// Energies are returned in units of ħω_p: V(z) per unit area has units of
// 1/length², forces 1/length, PFA energies are dimensionless (Ξ-like).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "casimir/energy.hpp"
#include "casimir/error.hpp"
#include "casimir/model.hpp"

namespace casimir {

struct PlatePair {
  DrudeMedium metal{1.0};
  Medium substrate = PerfectConductor{};
  double ambient_epsilon = 1.0;
  double gap = 1.0;

  double fc() const { return contrast_fc(ambient_epsilon, substrate); }
};

struct CurvedSurfacePFA {
  double R1 = std::numeric_limits<double>::infinity();
  double R2 = 1.0;
  double gap = 1.0;
};

/// Gap-to-radius ratio beyond which PFA results are flagged.
inline constexpr double kPfaValidityRatio = 0.2;

inline double plate_mode_omega(double k, const PlatePair& pair) {
  if (!(k >= 0.0)) throw DomainError("wavenumber must be non-negative");
  if (!(pair.gap > 0.0)) throw DomainError("plate gap must be positive");
  const double arg = 1.0 + pair.fc() * std::exp(-2.0 * k * pair.gap);
  return pair.metal.omega_p * std::sqrt(0.5 * arg);
}

/// I(f_c) = ∫₀^∞ u (sqrt(1 + f_c e^{−2u}) − 1) du.
inline double plate_energy_integral(double fc) {
  if (!(fc >= -1.0 && fc < 1.0)) throw DomainError("contrast factor must lie in [-1, 1)");
  if (fc == 0.0) return 0.0;
  auto f = [fc](double u) {
    const double x = fc * std::exp(-2.0 * u);
    return u * x / (std::sqrt(1.0 + x) + 1.0);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0;
  const double value = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13, &err);
  if (!std::isfinite(value) || err > 1e-8 * std::abs(value)) throw OracleError("plate energy quadrature did not converge");
  return value;
}

/// V(z)/(ħω_p) = I(f_c) / (4√2 π z²).
inline double plate_energy_per_area(const PlatePair& pair) {
  if (!(pair.gap > 0.0)) throw DomainError("plate gap must be positive");
  return plate_energy_integral(pair.fc()) / (4.0 * std::numbers::sqrt2 * std::numbers::pi * pair.gap * pair.gap);
}

struct PfaForce {
  double force;
  double effective_radius;
  /// Set when gap/R exceeds the validity ratio.
  bool outside_validity;
};

/// F = 2π R1R2/(R1+R2) V(z); R1 = ∞ gives 2πR2 V(z) exactly.
inline PfaForce pfa_force(const CurvedSurfacePFA& curved, const PlatePair& pair) {
  if (!(curved.R1 > 0.0) || !(curved.R2 > 0.0)) throw InvalidGeometryError("radii of curvature must be positive");
  if (std::isinf(curved.R1) && std::isinf(curved.R2)) throw InvalidGeometryError("at least one surface must be curved");
  PlatePair p = pair;
  p.gap = curved.gap;
  double R;
  if (std::isinf(curved.R1)) R = curved.R2;
  else if (std::isinf(curved.R2)) R = curved.R1;
  else R = curved.R1 * curved.R2 / (curved.R1 + curved.R2);
  const double v = plate_energy_per_area(p);
  const bool flagged = curved.gap / std::min(curved.R1, curved.R2) > kPfaValidityRatio;
  return {2.0 * std::numbers::pi * R * v, R, flagged};
}

/// E/(ħω_p) = 2πR ∫_z^∞ V dz' = R·I(f_c) / (2√2 z), the energy counterpart of F = 2πR V.
inline double pfa_energy(double R, double gap, double fc) {
  if (!(R > 0.0)) throw InvalidGeometryError("radius of curvature must be positive");
  if (!(gap > 0.0)) throw DomainError("gap must be positive");
  return R * plate_energy_integral(fc) / (2.0 * std::numbers::sqrt2 * gap);
}

inline double pfa_energy(const SystemConfig& config) {
  return pfa_energy(config.particle.spheroid().apex_radius(), config.particle.gap(), config.fc());
}

struct PfaComparisonRow {
  double z_over_rmin;
  double xi_exact;
  double xi_pfa;
  double ratio;
  std::optional<double> beta_exact;
  std::optional<double> beta_pfa;
  int l_max_used;
  bool converged;
  bool outside_validity;
  std::string error;
};

/// Exact Ξ(z) from the convergence ladder against the apex-curvature PFA
/// energy, with local exponents of both.
inline std::vector<PfaComparisonRow> pfa_vs_spectral_report(const SystemConfig& config, const std::vector<double>& z_over_rmin,
                                                            const LadderOptions& ladder = {}, int threads = 1) {
  const Spheroid& s = config.particle.spheroid();
  const double fc = config.fc();
  std::vector<SystemConfig> configs;
  configs.reserve(z_over_rmin.size());
  for (double zt : z_over_rmin) {
    SystemConfig c = config;
    c.particle = PlacedParticle(s, zt * s.r_minor());
    configs.push_back(c);
  }
  const auto exact = evaluate_points(configs, ladder, threads);
  std::vector<EnergySample> pfa = exact;
  for (std::size_t i = 0; i < pfa.size(); ++i) {
    pfa[i].error.clear();
    pfa[i].xi = pfa_energy(s.apex_radius(), configs[i].particle.gap(), fc);
  }
  const auto beta_exact = local_exponents(exact);
  const auto beta_pfa = local_exponents(pfa);
  std::vector<PfaComparisonRow> rows;
  rows.reserve(exact.size());
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double ratio = exact[i].ok() && pfa[i].xi != 0.0 ? exact[i].xi / pfa[i].xi : std::numeric_limits<double>::quiet_NaN();
    rows.push_back({exact[i].z_over_rmin, exact[i].xi, pfa[i].xi, ratio, beta_exact[i], beta_pfa[i], exact[i].l_max_used,
                    exact[i].converged, configs[i].particle.gap() / s.apex_radius() > kPfaValidityRatio, exact[i].error});
  }
  return rows;
}

}  // namespace casimir
