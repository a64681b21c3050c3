#pragma once

// Per-azimuthal-sector coupling matrix H = diag(n(∞)) + f_c·D(z) of a
// spheroid above a substrate, its eigensystem (proper-mode depolarization
// factors and spectral strengths), mode frequencies and the effective
// polarizability in spectral form.
//
// Basis: the particle's exterior harmonics of degree l = max(1, m)..l_max in
// its own coordinate system (spherical for a sphere, spheroidal otherwise).
// The substrate acts through the image of each exterior harmonic, mirrored in
// the substrate plane and weighted by f_c. D is assembled by projecting the
// mirrored harmonic onto the particle's interior harmonics on its surface and
// symmetrizing with the diagonal scaling sqrt(λ_P/Λ²), where λ_P = P'/P and
// Λ = P'/P − Q'/Q at the surface.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "casimir/error.hpp"
#include "casimir/model.hpp"
#include "casimir/parallel.hpp"
#include "casimir/specfun.hpp"

namespace casimir {

inline int block_l_min(int m) { return std::max(1, m); }

namespace detail {

inline void check_block(int m, int l_max) {
  if (m < 0) throw DomainError("azimuthal number must be non-negative");
  if (l_max < block_l_min(m)) throw DomainError("l_max too small to represent the azimuthal number");
  if (l_max > specfun::kMaxDegree) throw DomainError("l_max exceeds the supported maximum degree");
}

inline specfun::RadialKind radial_kind(Family f) {
  return f == Family::prolate ? specfun::RadialKind::prolate : specfun::RadialKind::oblate;
}

}  // namespace detail

/// Depolarization factors n_{lm}(∞) of the isolated particle for l = max(1,m)..l_max.
inline std::vector<double> isolated_depolarization_column(const Spheroid& s, int m, int l_max) {
  detail::check_block(m, l_max);
  const int l0 = block_l_min(m);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(l_max - l0 + 1));
  if (s.family() == Family::sphere) {
    for (int l = l0; l <= l_max; ++l) out.push_back(static_cast<double>(l) / (2.0 * l + 1.0));
    return out;
  }
  const auto col = specfun::radial_column(detail::radial_kind(s.family()), m, l_max, spheroid_xi0(s));
  for (int l = l0; l <= l_max; ++l) {
    const std::size_t i = col.index(l);
    const double lp = col.log_deriv_p[i];
    out.push_back(lp / (lp - col.log_deriv_q[i]));
  }
  return out;
}

/// n_{lm}(∞) = −P'Q / (PQ' − P'Q) at the particle surface; l/(2l+1) for a sphere.
inline double isolated_depolarization(const Spheroid& s, int l, int m) {
  if (l < 1 || m < 0 || m > l) throw DomainError("isolated_depolarization requires 1 <= l and 0 <= m <= l");
  return isolated_depolarization_column(s, m, l).back();
}

struct CouplingOptions {
  /// Gauss–Legendre nodes on the particle surface; 0 picks 2·l_max + 80.
  int quadrature_nodes = 0;
};

/// Closed-form coupling for a sphere of radius a centred at height d:
/// D_ls = (−1)^{l+s} sqrt(ls/((2l+1)(2s+1))) (l+s)!/sqrt((l+m)!(l−m)!(s+m)!(s−m)!) (a/2d)^{l+s+1}.
inline Eigen::MatrixXd sphere_coupling_matrix(double a, double d, int m, int l_max) {
  detail::check_block(m, l_max);
  const int l0 = block_l_min(m);
  const int n = l_max - l0 + 1;
  const double log_ratio = std::log(a / (2.0 * d));
  Eigen::MatrixXd D(n, n);
  using specfun::log_factorial;
  for (int i = 0; i < n; ++i) {
    const int l = l0 + i;
    for (int j = 0; j <= i; ++j) {
      const int s = l0 + j;
      const double log_mag = log_factorial(l + s) -
                             0.5 * (log_factorial(l + m) + log_factorial(l - m) + log_factorial(s + m) + log_factorial(s - m)) +
                             (l + s + 1) * log_ratio;
      const double sign = ((l + s) % 2 == 0) ? 1.0 : -1.0;
      const double v = sign * std::sqrt(static_cast<double>(l) * s / ((2.0 * l + 1.0) * (2.0 * s + 1.0))) * std::exp(log_mag);
      D(i, j) = v;
      D(j, i) = v;
    }
  }
  return D;
}

namespace detail {

/// Coordinates (radial, angular) of the point at cylindrical (rho, z) relative to the particle centre.
struct SpheroidalPoint {
  double radial;
  double eta;
};

class SurfaceFrame {
 public:
  explicit SurfaceFrame(const Spheroid& s) : family_(s.family()) {
    if (family_ == Family::sphere) {
      radius_ = s.r_major();
      x0_ = radius_;
    } else {
      focal_ = s.focal_length();
      x0_ = spheroid_xi0(s);
    }
  }

  Family family() const noexcept { return family_; }
  double x0() const noexcept { return x0_; }

  /// Surface point at angular coordinate eta, as (rho, z).
  std::pair<double, double> surface_point(double eta) const {
    const double sin2 = (1.0 - eta) * (1.0 + eta);
    switch (family_) {
      case Family::sphere: return {radius_ * std::sqrt(sin2), radius_ * eta};
      case Family::prolate: return {focal_ * std::sqrt((x0_ - 1.0) * (x0_ + 1.0) * sin2), focal_ * x0_ * eta};
      case Family::oblate: return {focal_ * std::sqrt((x0_ * x0_ + 1.0) * sin2), focal_ * x0_ * eta};
    }
    return {0.0, 0.0};
  }

  SpheroidalPoint locate(double rho, double z) const {
    switch (family_) {
      case Family::sphere: {
        const double r = std::hypot(rho, z);
        return {r, std::clamp(z / r, -1.0, 1.0)};
      }
      case Family::prolate: {
        const double r1 = std::hypot(rho, z - focal_);
        const double r2 = std::hypot(rho, z + focal_);
        const double xi = (r1 + r2) / (2.0 * focal_);
        return {xi, std::clamp(z / (focal_ * xi), -1.0, 1.0)};
      }
      case Family::oblate: {
        const double d1 = std::hypot(rho + focal_, z);
        const double d2 = std::hypot(rho - focal_, z);
        const double c = (d1 + d2) / (2.0 * focal_);
        const double zeta = std::sqrt((c - 1.0) * (c + 1.0));
        return {zeta, std::clamp(z / (focal_ * zeta), -1.0, 1.0)};
      }
    }
    return {0.0, 0.0};
  }

  /// Log-derivatives at the surface and ln|Q| at an arbitrary radial coordinate,
  /// for degrees m..l_max.
  void radial(int m, int l_max, double x, std::vector<double>* log_deriv_p, std::vector<double>* log_deriv_q,
              std::vector<double>* log_abs_q) const {
    const int n = l_max - m + 1;
    if (family_ == Family::sphere) {
      if (log_deriv_p) log_deriv_p->resize(n);
      if (log_deriv_q) log_deriv_q->resize(n);
      if (log_abs_q) log_abs_q->resize(n);
      for (int l = m; l <= l_max; ++l) {
        if (log_deriv_p) (*log_deriv_p)[l - m] = l / x;
        if (log_deriv_q) (*log_deriv_q)[l - m] = -(l + 1.0) / x;
        if (log_abs_q) (*log_abs_q)[l - m] = -(l + 1.0) * std::log(x);
      }
      return;
    }
    auto col = specfun::radial_column(radial_kind(family_), m, l_max, x);
    if (log_deriv_p) *log_deriv_p = std::move(col.log_deriv_p);
    if (log_deriv_q) *log_deriv_q = std::move(col.log_deriv_q);
    if (log_abs_q) *log_abs_q = std::move(col.log_abs_q);
  }

 private:
  Family family_;
  double radius_ = 0.0;
  double focal_ = 0.0;
  double x0_ = 0.0;
};

}  // namespace detail

/// Substrate coupling by surface projection of the mirrored exterior harmonics.
/// Valid for every family, including the sphere (where it reproduces the closed form).
inline Eigen::MatrixXd coupling_matrix_D_projected(const PlacedParticle& particle, int m, int l_max,
                                                   CouplingOptions options = {}) {
  detail::check_block(m, l_max);
  const detail::SurfaceFrame frame(particle.spheroid());
  const double d = particle.center_height();
  const int nq = options.quadrature_nodes > 0 ? options.quadrature_nodes : 2 * l_max + 80;
  const auto rule = specfun::gauss_legendre(nq);
  const int n_all = l_max - m + 1;

  std::vector<double> lp0, lq0, lnq0;
  frame.radial(m, l_max, frame.x0(), &lp0, &lq0, &lnq0);

  // projection[l][s] = ∫ P̄_l(η) · [Q_s(x*)/Q_s(x0)] P̄_s(η*) dη
  Eigen::MatrixXd projection = Eigen::MatrixXd::Zero(n_all, n_all);
  std::vector<double> ang(n_all), ang_image(n_all), lnq_image;
  Eigen::VectorXd image_values(n_all);
  for (int k = 0; k < nq; ++k) {
    const double eta = rule.nodes[k];
    const auto [rho, z] = frame.surface_point(eta);
    const auto image = frame.locate(rho, -2.0 * d - z);
    frame.radial(m, l_max, image.radial, nullptr, nullptr, &lnq_image);
    specfun::normalized_angular(m, l_max, eta, ang.data());
    specfun::normalized_angular(m, l_max, image.eta, ang_image.data());
    for (int s = 0; s < n_all; ++s) image_values[s] = std::exp(lnq_image[s] - lnq0[s]) * ang_image[s];
    for (int l = 0; l < n_all; ++l) {
      const double wl = rule.weights[k] * ang[l];
      if (wl == 0.0) continue;
      projection.row(l) += wl * image_values.transpose();
    }
  }

  const int l0 = block_l_min(m);
  const int off = l0 - m;
  const int n = l_max - l0 + 1;
  Eigen::MatrixXd D(n, n);
  std::vector<double> lambda(n), alpha(n);
  for (int i = 0; i < n; ++i) {
    lambda[i] = lp0[i + off] - lq0[i + off];
    alpha[i] = lp0[i + off] / (lambda[i] * lambda[i]);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      D(i, j) = std::sqrt(alpha[i] * alpha[j]) * lambda[i] * projection(i + off, j + off);
    }
  }
  return 0.5 * (D + D.transpose());
}

/// Substrate-induced multipolar coupling matrix (f_c not included).
inline Eigen::MatrixXd coupling_matrix_D(const PlacedParticle& particle, int m, int l_max, CouplingOptions options = {}) {
  detail::check_block(m, l_max);
  if (particle.spheroid().family() == Family::sphere) {
    return sphere_coupling_matrix(particle.spheroid().r_major(), particle.center_height(), m, l_max);
  }
  return coupling_matrix_D_projected(particle, m, l_max, options);
}

/// H^m = diag(n(∞)) + f_c·D^m(z). Independent of the particle's dielectric function.
inline Eigen::MatrixXd build_H(const SystemConfig& config, int m, CouplingOptions options = {}) {
  config.validate();
  const auto n_inf = isolated_depolarization_column(config.particle.spheroid(), m, config.l_max);
  const double fc = config.fc();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_inf.size()), static_cast<Eigen::Index>(n_inf.size()));
  if (fc != 0.0) H = fc * coupling_matrix_D(config.particle, m, config.l_max, options);
  for (std::size_t i = 0; i < n_inf.size(); ++i) H(i, i) += n_inf[i];
  return H;
}

struct Eigensystem {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns are modes
  Eigen::MatrixXd strengths;     // strengths(row basis index, mode) = U²
};

inline Eigensystem eigendecompose(const Eigen::MatrixXd& H) {
  if (H.rows() != H.cols()) throw ContractViolationError("eigendecompose requires a square matrix");
  const double scale = H.cwiseAbs().maxCoeff();
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1e-300)) {
    throw ContractViolationError("eigendecompose requires a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
  if (solver.info() != Eigen::Success) throw ContractViolationError("symmetric eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors(), solver.eigenvectors().cwiseAbs2()};
}

/// One azimuthal sector: H, ascending eigenvalues n_s, eigenvectors U, strengths C = U².
struct SpectralBlock {
  int m = 0;
  int l_min = 1;
  int l_max = 1;
  Eigen::MatrixXd H;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  Eigen::MatrixXd strengths;

  int dimension() const { return static_cast<int>(eigenvalues.size()); }
  int multiplicity() const { return m == 0 ? 1 : 2; }
};

inline SpectralBlock make_block(int m, int l_max, Eigen::MatrixXd H) {
  auto eig = eigendecompose(H);
  return {m, block_l_min(m), l_max, std::move(H), std::move(eig.eigenvalues), std::move(eig.eigenvectors), std::move(eig.strengths)};
}

inline SpectralBlock spectral_block(const SystemConfig& config, int m, CouplingOptions options = {}) {
  return make_block(m, config.l_max, build_H(config, m, options));
}

/// The same sector for the particle isolated from the substrate (z → ∞).
inline SpectralBlock isolated_block(const SystemConfig& config, int m) {
  const auto n_inf = isolated_depolarization_column(config.particle.spheroid(), m, config.l_max);
  Eigen::MatrixXd H = Eigen::VectorXd::Map(n_inf.data(), static_cast<Eigen::Index>(n_inf.size())).asDiagonal();
  return make_block(m, config.l_max, std::move(H));
}

/// Paired spectra at z and z → ∞ over m = 0..m_max; m > 0 sectors stand for ±m.
struct ModeSpectrum {
  std::vector<SpectralBlock> blocks;
  std::vector<SpectralBlock> isolated_blocks;

  static int multiplicity(int m) { return m == 0 ? 1 : 2; }
};

inline ModeSpectrum mode_spectrum(const SystemConfig& config, int threads = 1, CouplingOptions options = {}) {
  config.validate();
  const int m_max = config.effective_m_max();
  ModeSpectrum out;
  out.blocks = parallel_map(m_max + 1, threads, [&](int m) { return spectral_block(config, m, options); });
  out.isolated_blocks.reserve(static_cast<std::size_t>(m_max + 1));
  for (int m = 0; m <= m_max; ++m) out.isolated_blocks.push_back(isolated_block(config, m));
  return out;
}

/// Throws UnphysicalModeError unless every eigenvalue lies in (0, 1).
inline void require_physical(const SpectralBlock& block) {
  for (int s = 0; s < block.dimension(); ++s) {
    const double n = block.eigenvalues[s];
    if (!(n > 0.0 && n < 1.0)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "unphysical eigenvalue n=%.6g in sector m=%d (mode %d): truncation insufficient for this gap",
                    n, block.m, s);
      throw UnphysicalModeError(buf, block.m, s, n);
    }
  }
}

/// ω_s = ω_p·sqrt(n_s), ascending.
inline std::vector<double> mode_frequencies(const SpectralBlock& block, double omega_p) {
  require_physical(block);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(block.dimension()));
  for (int s = 0; s < block.dimension(); ++s) out.push_back(omega_p * std::sqrt(block.eigenvalues[s]));
  return out;
}

/// α_eff^{lm} = −(v/4π) Σ_s C^{lm}_s / (u − n_s) for a given spectral variable u.
inline std::complex<double> effective_polarizability(const SystemConfig& config, std::complex<double> u, int l, int m,
                                                     CouplingOptions options = {}) {
  if (m < 0 || l < block_l_min(m) || l > config.l_max) throw DomainError("(l, m) outside the truncated basis");
  const auto block = spectral_block(config, m, options);
  const int row = l - block.l_min;
  const double scale = std::max(1.0, block.eigenvalues.cwiseAbs().maxCoeff());
  std::complex<double> sum = 0.0;
  for (int s = 0; s < block.dimension(); ++s) {
    const std::complex<double> gap = u - block.eigenvalues[s];
    if (std::abs(gap) <= 1e-14 * scale) {
      throw PoleError("spectral variable sits on a proper mode (pole of the polarizability)", s);
    }
    sum += block.strengths(row, s) / gap;
  }
  return -config.particle.spheroid().volume() / (4.0 * std::numbers::pi) * sum;
}

/// α_eff^{lm}(ω) for the configured Drude particle.
inline std::complex<double> effective_polarizability(const SystemConfig& config, double omega, int l, int m,
                                                     CouplingOptions options = {}) {
  const auto u = spectral_u(config.particle_medium.epsilon(omega), config.ambient_epsilon);
  return effective_polarizability(config, u, l, m, options);
}

}  // namespace casimir
