#pragma once

// Associated Legendre functions on the radial axes of prolate (x > 1) and
// oblate (ζ > 0) spheroidal coordinates, normalized angular functions, and
// Gauss–Legendre nodes.
//
// Conventions (Hobson, no Condon–Shortley phase):
//   P_l^m(x) = (x²−1)^{m/2} dᵐP_l/dxᵐ,  Q_l^m(x) = (x²−1)^{m/2} dᵐQ_l/dxᵐ,  x > 1
//   P Q' − P' Q = (−1)^m (l+m)!/(l−m)! / (1 − x²)
// Oblate radial functions are the real continuations ξ → iζ:
//   p_l^m(ζ) = i^{−l} P_l^m(iζ) > 0,  q_l^m(ζ) > 0 decaying,
//   p q' − p' q = −(l+m)!/(l−m)! / (1 + ζ²)
//
// Internally everything is carried as ratios and logarithms so that degrees
// of a few hundred never overflow.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "casimir/error.hpp"

namespace casimir::specfun {

/// Largest degree accepted by the radial and angular routines.
inline constexpr int kMaxDegree = 400;

/// ln(n!).
inline double log_factorial(int n) {
  if (n < 0) throw DomainError("log_factorial of a negative integer");
  if (n < 2) return 0.0;
  if (n <= 20) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return std::log(f);
  }
  return std::lgamma(static_cast<double>(n) + 1.0);
}

/// ln((2m−1)!!), with (−1)!! = 1.
inline double log_double_factorial_odd(int m) {
  return log_factorial(2 * m) - m * std::numbers::ln2 - log_factorial(m);
}

enum class RadialKind { prolate, oblate };

/// Radial functions of one azimuthal order m for degrees l = m..l_max at a
/// single argument. Entries are indexed by l − m.
struct RadialColumn {
  RadialKind kind;
  int m;
  int l_max;
  double x;
  std::vector<double> log_deriv_p;  // P'/P
  std::vector<double> log_deriv_q;  // Q'/Q
  std::vector<double> log_p;        // ln P (P > 0)
  std::vector<double> log_abs_q;    // ln |Q|
  /// Sign of every Q in the column: (−1)^m prolate, +1 oblate.
  double q_sign;

  std::size_t index(int l) const { return static_cast<std::size_t>(l - m); }
};

namespace detail {

inline void check_orders(int l_max, int m) {
  if (m < 0 || l_max < m) throw DomainError("Legendre orders require 0 <= m <= l");
  if (l_max > kMaxDegree) throw DomainError("Legendre degree exceeds the supported maximum");
}

/// Steps of backward recurrence needed for the minimal-solution ratio to settle.
inline int continued_fraction_depth(RadialKind kind, double x) {
  const double s = kind == RadialKind::prolate ? std::sqrt((x - 1.0) * (x + 1.0)) : std::sqrt(x * x + 1.0);
  const double dominant = kind == RadialKind::prolate ? x + s : s + x;
  const double log_rho = -2.0 * std::log(dominant);  // minimal/dominant growth per degree
  const double steps = 45.0 / -log_rho + 30.0;
  if (!(steps < 4.0e6)) throw DomainError("radial argument too close to the branch point for stable evaluation");
  return static_cast<int>(steps);
}

}  // namespace detail

inline RadialColumn radial_column(RadialKind kind, int m, int l_max, double x) {
  detail::check_orders(l_max, m);
  const bool prolate = kind == RadialKind::prolate;
  if (prolate && !(x > 1.0)) throw DomainError("prolate radial argument must exceed 1");
  if (!prolate && !(x > 0.0)) throw DomainError("oblate radial argument must be positive");
  if (!std::isfinite(x)) throw DomainError("radial argument must be finite");

  const int n = l_max - m + 1;
  // r[l-m] = p_{l+1}/p_l, t[l-m] = q_{l+1}/q_l for l = m..l_max
  std::vector<double> r(n), t(n);
  r[0] = (2 * m + 1) * x;
  for (int l = m + 1; l <= l_max; ++l) {
    const double prev = r[l - m - 1];
    r[l - m] = prolate ? ((2 * l + 1) * x - (l + m) / prev) / (l - m + 1)
                       : ((2 * l + 1) * x + (l + m) / prev) / (l - m + 1);
  }
  // Backward recurrence of the minimal solution's ratio, started deep in the tail.
  const int top = l_max + 1 + detail::continued_fraction_depth(kind, x);
  double tl = 0.0;
  for (int l = top; l > m; --l) {
    tl = prolate ? (l + m) / ((2 * l + 1) * x - (l - m + 1) * tl) : (l + m) / ((2 * l + 1) * x + (l - m + 1) * tl);
    if (l - 1 <= l_max) t[l - 1 - m] = tl;
  }

  RadialColumn col{kind, m, l_max, x, {}, {}, {}, {}, prolate && (m % 2 == 1) ? -1.0 : 1.0};
  col.log_deriv_p.resize(n);
  col.log_deriv_q.resize(n);
  col.log_p.resize(n);
  col.log_abs_q.resize(n);

  const double metric = prolate ? (x - 1.0) * (x + 1.0) : x * x + 1.0;
  for (int l = m; l <= l_max; ++l) {
    const int i = l - m;
    col.log_deriv_p[i] = (-(l + 1) * x + (l - m + 1) * r[i]) / metric;
    col.log_deriv_q[i] = prolate ? (-(l + 1) * x + (l - m + 1) * t[i]) / metric
                                 : (-(l + 1) * x - (l - m + 1) * t[i]) / metric;
  }
  col.log_p[0] = log_double_factorial_odd(m) + 0.5 * m * std::log(metric);
  // Wronskian normalization at l = m.
  const double casoratian = prolate ? r[0] - t[0] : r[0] + t[0];
  col.log_abs_q[0] = log_factorial(2 * m) - col.log_p[0] - std::log(casoratian);
  for (int i = 1; i < n; ++i) {
    col.log_p[i] = col.log_p[i - 1] + std::log(r[i - 1]);
    col.log_abs_q[i] = col.log_abs_q[i - 1] + std::log(t[i - 1]);
  }
  return col;
}

/// Values of P, Q and their derivatives at one (l, m, x).
struct LegendrePair {
  int l;
  int m;
  double x;
  double P;
  double dP;
  double Q;
  double dQ;
};

namespace detail {

inline LegendrePair exponentiate(const RadialColumn& col, int l) {
  const std::size_t i = col.index(l);
  if (col.log_p[i] > 700.0 || col.log_abs_q[i] < -700.0 || col.log_abs_q[i] > 700.0) {
    throw OverflowError("Legendre function not representable in double precision; reduce the degree");
  }
  const double p = std::exp(col.log_p[i]);
  const double q = col.q_sign * std::exp(col.log_abs_q[i]);
  return {l, col.m, col.x, p, p * col.log_deriv_p[i], q, q * col.log_deriv_q[i]};
}

}  // namespace detail

/// P_l^m(x), Q_l^m(x) and x-derivatives for x > 1.
inline LegendrePair legendre_pq(int l, int m, double x) {
  if (!(x > 1.0)) throw DomainError("legendre_pq requires x > 1");
  return detail::exponentiate(radial_column(RadialKind::prolate, m, l, x), l);
}

/// Oblate radial functions p_l^m(ζ), q_l^m(ζ) and ζ-derivatives.
inline LegendrePair oblate_radial(int l, int m, double zeta) {
  if (!(zeta > 0.0)) throw DomainError("oblate_radial requires zeta > 0");
  return detail::exponentiate(radial_column(RadialKind::oblate, m, l, zeta), l);
}

/// Orthonormal Ferrers functions P̄_l^m(η), l = m..l_max, on η ∈ [−1, 1]:
/// ∫ P̄_l^m P̄_k^m dη = δ_lk. No Condon–Shortley phase.
inline void normalized_angular(int m, int l_max, double eta, double* out) {
  const double one_minus = (1.0 - eta) * (1.0 + eta);
  double pmm = 0.0;
  if (m == 0) {
    pmm = std::sqrt(0.5);
  } else if (one_minus > 0.0) {
    const double log_c = 0.5 * std::log((2.0 * m + 1.0) / 2.0) - 0.5 * log_factorial(2 * m) + log_double_factorial_odd(m);
    pmm = std::exp(log_c + 0.5 * m * std::log(one_minus));
  }
  out[0] = pmm;
  if (l_max == m) return;
  out[1] = std::sqrt(2.0 * m + 3.0) * eta * pmm;
  for (int l = m + 1; l < l_max; ++l) {
    const double c = std::sqrt((2.0 * l + 3.0) / ((l + 1.0 - m) * (l + 1.0 + m)));
    const double back = std::sqrt((static_cast<double>(l - m) * (l + m)) / (2.0 * l - 1.0));
    out[l + 1 - m] = c * (std::sqrt(2.0 * l + 1.0) * eta * out[l - m] - back * out[l - 1 - m]);
  }
}

inline std::vector<double> normalized_angular(int m, int l_max, double eta) {
  detail::check_orders(l_max, m);
  std::vector<double> out(static_cast<std::size_t>(l_max - m + 1));
  normalized_angular(m, l_max, eta, out.data());
  return out;
}

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule on [−1, 1], nodes ascending.
inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss rule needs at least one node");
  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace casimir::specfun
