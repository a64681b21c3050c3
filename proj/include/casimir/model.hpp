#pragma once

// Geometry of a spheroid above a flat substrate and the dielectric media of
// the three regions (particle, substrate, ambient).

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <string>
#include <variant>

#include "casimir/error.hpp"

namespace casimir {

enum class Family { prolate, oblate, sphere };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::prolate: return "prolate";
    case Family::oblate: return "oblate";
    case Family::sphere: return "sphere";
  }
  return "?";
}

/// Spheroid of revolution whose symmetry axis is normal to the substrate.
///
/// A prolate spheroid is an ellipse rotated about its major axis, so the axis
/// normal to the substrate has half-length r_major. An oblate spheroid is
/// rotated about its minor axis; its normal half-axis is r_minor.
class Spheroid {
 public:
  Spheroid(double r_major, double r_minor, Family family) : r_major_(r_major), r_minor_(r_minor), family_(family) {
    if (!(r_minor > 0.0) || !std::isfinite(r_major) || r_major < r_minor) {
      throw InvalidGeometryError("spheroid requires r_major >= r_minor > 0");
    }
    if ((family == Family::sphere) != (r_major == r_minor)) {
      throw InvalidGeometryError("family must be sphere exactly when r_major == r_minor");
    }
  }

  static Spheroid sphere(double radius) { return {radius, radius, Family::sphere}; }
  static Spheroid prolate(double r_major, double r_minor) { return {r_major, r_minor, Family::prolate}; }
  static Spheroid oblate(double r_major, double r_minor) { return {r_major, r_minor, Family::oblate}; }

  /// Builds the spheroid with the given aspect r_major/r_minor; aspect 1 yields a sphere.
  static Spheroid with_aspect(Family family, double aspect, double r_minor) {
    if (aspect == 1.0 || family == Family::sphere) {
      if (aspect != 1.0) throw InvalidGeometryError("a sphere has aspect ratio 1");
      return sphere(r_minor);
    }
    return {aspect * r_minor, r_minor, family};
  }

  double r_major() const noexcept { return r_major_; }
  double r_minor() const noexcept { return r_minor_; }
  Family family() const noexcept { return family_; }
  double aspect() const noexcept { return r_major_ / r_minor_; }

  /// Half-axis along the substrate normal.
  double r_perp() const noexcept { return family_ == Family::oblate ? r_minor_ : r_major_; }
  /// Half-axis parallel to the substrate.
  double r_par() const noexcept { return family_ == Family::oblate ? r_major_ : r_minor_; }

  double eccentricity() const noexcept {
    const double ratio = r_minor_ / r_major_;
    return std::sqrt((1.0 - ratio) * (1.0 + ratio));
  }

  /// Focal half-distance (prolate) or focal-ring radius (oblate).
  double focal_length() const noexcept { return eccentricity() * r_major_; }

  double volume() const noexcept {
    return 4.0 * std::numbers::pi / 3.0 * r_par() * r_par() * r_perp();
  }

  /// Radius of curvature at the point closest to the substrate.
  double apex_radius() const noexcept { return r_par() * r_par() / r_perp(); }

 private:
  double r_major_;
  double r_minor_;
  Family family_;
};

/// Radial spheroidal coordinate of the particle surface: ξ0 = 1/e for prolate,
/// ζ0 = r_minor / (e·r_major) for oblate.
inline double spheroid_xi0(const Spheroid& s) {
  switch (s.family()) {
    case Family::prolate: return 1.0 / s.eccentricity();
    case Family::oblate: return s.r_minor() / s.focal_length();
    case Family::sphere: break;
  }
  throw DomainError("spheroidal coordinate degenerates for a sphere; use the spherical branch");
}

class PlacedParticle {
 public:
  PlacedParticle(Spheroid spheroid, double gap) : spheroid_(spheroid), gap_(gap) {
    if (!(gap > 0.0)) throw ContactError("gap must be positive: particle touches or penetrates the substrate");
  }

  const Spheroid& spheroid() const noexcept { return spheroid_; }
  double gap() const noexcept { return gap_; }
  /// Height of the particle centre above the substrate plane.
  double center_height() const noexcept { return gap_ + spheroid_.r_perp(); }

 private:
  Spheroid spheroid_;
  double gap_;
};

struct GapGeometry {
  double d;
  double z;
  double r_perp;
  double r_par;
};

inline GapGeometry gap_geometry(const PlacedParticle& p) {
  const Spheroid& s = p.spheroid();
  return {p.center_height(), p.gap(), s.r_perp(), s.r_par()};
}

inline GapGeometry gap_geometry(const Spheroid& s, double gap) { return gap_geometry(PlacedParticle(s, gap)); }

// Media ---------------------------------------------------------------------

struct ConstantMedium {
  double epsilon;
};

/// Plasma model ε(ω) = 1 − ω_p²/ω².
struct DrudeMedium {
  double omega_p;
  std::complex<double> epsilon(double omega) const { return 1.0 - (omega_p * omega_p) / (omega * omega); }
};

/// ε → ∞; only meaningful as a substrate.
struct PerfectConductor {};

using Medium = std::variant<ConstantMedium, DrudeMedium, PerfectConductor>;

inline void validate_medium(const Medium& m) {
  if (const auto* c = std::get_if<ConstantMedium>(&m)) {
    if (!(c->epsilon > 0.0) || !std::isfinite(c->epsilon)) throw InvalidMediumError("constant permittivity must be positive");
  } else if (const auto* d = std::get_if<DrudeMedium>(&m)) {
    if (!(d->omega_p > 0.0)) throw InvalidMediumError("plasma frequency must be positive");
  }
}

inline std::string describe(const Medium& m) {
  if (const auto* c = std::get_if<ConstantMedium>(&m)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "constant(eps=%.10g)", c->epsilon);
    return buf;
  }
  if (const auto* d = std::get_if<DrudeMedium>(&m)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "drude(omega_p=%.10g)", d->omega_p);
    return buf;
  }
  return "perfect_conductor";
}

/// Contrast factor f_c = (ε_amb − ε_sub)/(ε_amb + ε_sub); −1 for a perfect conductor.
inline double contrast_fc(double ambient_epsilon, const Medium& substrate) {
  if (!(ambient_epsilon > 0.0) || !std::isfinite(ambient_epsilon)) {
    throw InvalidMediumError("ambient permittivity must be positive");
  }
  if (std::holds_alternative<PerfectConductor>(substrate)) return -1.0;
  const auto* c = std::get_if<ConstantMedium>(&substrate);
  if (c == nullptr) throw InvalidMediumError("substrate must be a constant dielectric or a perfect conductor");
  validate_medium(substrate);
  return (ambient_epsilon - c->epsilon) / (ambient_epsilon + c->epsilon);
}

/// Spectral variable u = [1 − ε_part/ε_amb]^{-1}.
inline std::complex<double> spectral_u(std::complex<double> particle_epsilon, double ambient_epsilon) {
  if (!(ambient_epsilon > 0.0)) throw InvalidMediumError("ambient permittivity must be positive");
  const std::complex<double> denom = 1.0 - particle_epsilon / ambient_epsilon;
  if (denom == 0.0) throw DivergentSpectralVariableError("particle and ambient permittivities coincide");
  return 1.0 / denom;
}

inline double spectral_u(double particle_epsilon, double ambient_epsilon) {
  return spectral_u(std::complex<double>(particle_epsilon, 0.0), ambient_epsilon).real();
}

/// u(ω) for a Drude particle; equals ω²/ω_p² in vacuum.
inline double spectral_u(const DrudeMedium& particle, double omega, double ambient_epsilon) {
  return spectral_u(particle.epsilon(omega), ambient_epsilon).real();
}

struct SystemConfig {
  PlacedParticle particle;
  DrudeMedium particle_medium{1.0};
  Medium substrate_medium{PerfectConductor{}};
  double ambient_epsilon = 1.0;
  int l_max = 10;
  /// Highest azimuthal number; negative selects l_max.
  int m_max = -1;

  int effective_m_max() const noexcept { return m_max < 0 ? l_max : m_max; }
  double fc() const { return contrast_fc(ambient_epsilon, substrate_medium); }

  void validate() const {
    validate_medium(Medium{particle_medium});
    validate_medium(substrate_medium);
    if (std::holds_alternative<PerfectConductor>(substrate_medium) == false &&
        std::holds_alternative<ConstantMedium>(substrate_medium) == false) {
      throw InvalidMediumError("substrate must be a constant dielectric or a perfect conductor");
    }
    if (!(ambient_epsilon > 0.0)) throw InvalidMediumError("ambient permittivity must be positive");
    if (l_max < 1) throw DomainError("l_max must be at least 1");
    if (effective_m_max() > l_max) throw DomainError("m_max must not exceed l_max");
  }
};

inline SystemConfig with_truncation(SystemConfig c, int l_max) {
  c.l_max = l_max;
  if (c.m_max > l_max) c.m_max = l_max;
  return c;
}

}  // namespace casimir
