#pragma once

// Reference implementations used to validate the spectral core:
//   * leading-order image-dipole mode shifts of a sphere,
//   * ellipsoid depolarization factors by direct quadrature,
//   * an axisymmetric quasi-static boundary-integral (BEM) eigenvalue solver
//     with the substrate represented by an f_c-weighted mirror kernel.
// None of these share code with the coupling-matrix builders.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "casimir/error.hpp"
#include "casimir/model.hpp"
#include "casimir/parallel.hpp"
#include "casimir/specfun.hpp"

namespace casimir::oracles {

struct ImageDipoleModes {
  double n_perp;
  double n_par;
};

/// n_perp = (1 + 2 f_c κ)/3, n_par = (1 + f_c κ)/3 with κ = (a/2d)³.
inline ImageDipoleModes image_dipole_modes(double a, double d, double fc) {
  if (!(a > 0.0) || !(d > a)) throw DomainError("image-dipole modes require d > a > 0");
  const double kappa = std::pow(a / (2.0 * d), 3);
  return {(1.0 + 2.0 * fc * kappa) / 3.0, (1.0 + fc * kappa) / 3.0};
}

enum class Axis { symmetry, transverse };

/// L_axis = (abc/2) ∫₀^∞ ds / ((s + a_axis²) sqrt((s+a²)(s+b²)(s+c²))).
inline double depolarization_integral(const Spheroid& s, Axis axis) {
  const double a_sym = s.r_perp();
  const double a_tr = s.r_par();
  const double target = axis == Axis::symmetry ? a_sym : a_tr;
  const double sym2 = a_sym * a_sym, tr2 = a_tr * a_tr, t2 = target * target;
  const double scale = std::max(sym2, tr2);
  auto f = [&](double x) {
    const double v = x * scale;
    return scale / ((v + t2) * std::sqrt(v + sym2) * (v + tr2));
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0, l1 = 0.0;
  const double value = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13, &err, &l1);
  if (!std::isfinite(value) || err > 1e-10 * std::abs(value)) throw OracleError("depolarization quadrature did not converge");
  return 0.5 * a_sym * tr2 * value;
}

/// Axisymmetric surface discretization: Gauss–Legendre nodes in the polar
/// angle θ of the meridian (ρ, z) = (r_par sin θ, r_perp cos θ), z measured
/// from the particle centre. Weights exclude the 2π azimuthal factor.
struct BemMesh {
  std::vector<double> rho;
  std::vector<double> z;
  std::vector<double> n_rho;
  std::vector<double> n_z;
  std::vector<double> weight;

  int rings() const { return static_cast<int>(rho.size()); }
  double area() const {
    double a = 0.0;
    for (double w : weight) a += w;
    return 2.0 * std::numbers::pi * a;
  }
};

/// Surface area of a spheroid of revolution.
inline double spheroid_area(const Spheroid& s) {
  const double pi = std::numbers::pi;
  const double a = s.r_par(), c = s.r_perp();
  if (s.family() == Family::sphere) return 4.0 * pi * a * a;
  const double e = s.eccentricity();
  if (s.family() == Family::prolate) return 2.0 * pi * a * a * (1.0 + c / (a * e) * std::asin(e));
  return 2.0 * pi * a * a * (1.0 + (1.0 - e * e) / e * std::atanh(e));
}

inline BemMesh make_bem_mesh(const Spheroid& s, int rings) {
  if (rings < 4) throw DomainError("BEM mesh needs at least four rings");
  const auto rule = specfun::gauss_legendre(rings);
  const double r_t = s.r_par(), r_ax = s.r_perp();
  BemMesh mesh;
  for (int k = 0; k < rings; ++k) {
    const double th = 0.5 * std::numbers::pi * (rule.nodes[k] + 1.0);
    const double w = 0.5 * std::numbers::pi * rule.weights[k];
    const double st = std::sin(th), ct = std::cos(th);
    const double tr = r_t * ct, tz = -r_ax * st;
    const double speed = std::hypot(tr, tz);
    mesh.rho.push_back(r_t * st);
    mesh.z.push_back(r_ax * ct);
    mesh.n_rho.push_back(r_ax * st / speed);
    mesh.n_z.push_back(r_t * ct / speed);
    mesh.weight.push_back(r_t * st * speed * w);
  }
  const double exact = spheroid_area(s);
  if (std::abs(mesh.area() - exact) > 5e-3 * exact) throw ResolutionError("BEM mesh area deviates from the spheroid area by more than 0.5%");
  return mesh;
}

namespace detail {

/// ∫₀^{2π} (r_field − r_src(φ))·n_src(φ) / (4π|r_field − r_src(φ)|³) · cos(mφ) dφ
/// for a field point at azimuth 0 and a source ring.
template <class Weight>
double ring_double_layer(double rho_f, double z_f, double rho_s, double z_s, double nr_s, double nz_s, Weight weight) {
  auto f = [&](double phi) {
    const double c = std::cos(phi);
    const double dz = z_f - z_s;
    const double r2 = rho_f * rho_f + rho_s * rho_s - 2.0 * rho_f * rho_s * c + dz * dz;
    if (r2 == 0.0) return 0.0;
    const double num = nr_s * (rho_f * c - rho_s) + dz * nz_s;
    return num / (4.0 * std::numbers::pi * r2 * std::sqrt(r2)) * weight(phi);
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  return 2.0 * integrator.integrate(f, 0.0, std::numbers::pi, 1e-11);
}

}  // namespace detail

/// Lowest n_modes quasi-static surface-mode eigenvalues, in the spectral
/// variable u, for azimuthal number m. For m = 0 the neutral-charge
/// constraint removes the trivial u = 0 mode.
inline std::vector<double> quasistatic_bem(const PlacedParticle& particle, double fc, int m, const BemMesh& mesh, int n_modes,
                                           int threads = 1) {
  if (m < 0) throw DomainError("azimuthal number must be non-negative");
  if (n_modes < 1) throw DomainError("n_modes must be positive");
  const int n = mesh.rings();
  const double d = particle.center_height();
  auto cos_m = [m](double phi) { return std::cos(m * phi); };
  auto one = [](double) { return 1.0; };
  auto cos_m_minus_one = [m](double phi) { return std::cos(m * phi) - 1.0; };

  const auto rows = parallel_map(n, threads, [&](int i) {
    std::vector<double> row(static_cast<std::size_t>(n), 0.0);
    double diag = 0.5;
    for (int j = 0; j < n; ++j) {
      const double wj = mesh.weight[j];
      if (j != i) {
        const double km = detail::ring_double_layer(mesh.rho[i], mesh.z[i], mesh.rho[j], mesh.z[j], mesh.n_rho[j], mesh.n_z[j], cos_m);
        const double k0 = m == 0 ? km
                                 : detail::ring_double_layer(mesh.rho[i], mesh.z[i], mesh.rho[j], mesh.z[j], mesh.n_rho[j],
                                                             mesh.n_z[j], one);
        row[j] -= wj * km;
        diag += wj * k0;
      } else if (m != 0) {
        diag -= wj * detail::ring_double_layer(mesh.rho[i], mesh.z[i], mesh.rho[j], mesh.z[j], mesh.n_rho[j], mesh.n_z[j],
                                               cos_m_minus_one);
      }
      if (fc != 0.0) {
        const double z_mirror = -2.0 * d - mesh.z[i];
        row[j] -= fc * wj *
                  detail::ring_double_layer(mesh.rho[i], z_mirror, mesh.rho[j], mesh.z[j], mesh.n_rho[j], mesh.n_z[j], cos_m);
      }
    }
    row[i] += diag;
    return row;
  });

  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rows[i][j];
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, false);
  if (solver.info() != Eigen::Success) throw OracleError("BEM eigensolver failed");
  std::vector<double> u;
  u.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) u.push_back(0.5 - solver.eigenvalues()[k].real());
  std::sort(u.begin(), u.end());
  if (m == 0) {
    const auto trivial = std::min_element(u.begin(), u.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    u.erase(trivial);
  }
  if (static_cast<int>(u.size()) < n_modes) throw ResolutionError("BEM mesh has fewer rings than requested modes");
  u.resize(static_cast<std::size_t>(n_modes));
  return u;
}

struct BemRefinement {
  std::vector<int> rings;
  std::vector<std::vector<double>> eigenvalues;  // per refinement level
  double last_drift = 0.0;                       // max relative change between the two finest levels
};

/// Solves on each ring count in turn; throws ResolutionError when the two
/// finest levels differ by more than target (relative, per mode).
inline BemRefinement bem_refinement(const PlacedParticle& particle, double fc, int m, int n_modes, std::vector<int> rings,
                                    double target, int threads = 1) {
  if (rings.size() < 2) throw DomainError("refinement needs at least two ring counts");
  std::sort(rings.begin(), rings.end());
  BemRefinement out;
  out.rings = rings;
  for (int r : rings) out.eigenvalues.push_back(quasistatic_bem(particle, fc, m, make_bem_mesh(particle.spheroid(), r), n_modes, threads));
  const auto& fine = out.eigenvalues.back();
  const auto& coarse = out.eigenvalues[out.eigenvalues.size() - 2];
  for (int k = 0; k < n_modes; ++k) out.last_drift = std::max(out.last_drift, std::abs(fine[k] - coarse[k]) / std::abs(fine[k]));
  if (out.last_drift > target) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "BEM eigenvalues drift by %.3g between the finest meshes (target %.3g)", out.last_drift, target);
    throw ResolutionError(buf);
  }
  return out;
}

}  // namespace casimir::oracles
