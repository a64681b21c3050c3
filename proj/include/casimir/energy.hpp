#pragma once

// Zero-point interaction energy of the coupled surface plasmons,
// Ξ = U/ħω_p = ½ Σ_m mult(m) Σ_s [√n_s(z) − √n_s(∞)],
// truncation control by a convergence ladder over l_max, the local power-law
// exponent β = −d ln|Ξ| / d ln(1 + z/r_min), and parameter sweeps.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "casimir/error.hpp"
#include "casimir/model.hpp"
#include "casimir/parallel.hpp"
#include "casimir/spectral.hpp"

namespace casimir {

struct EnergySample {
  double z = 0.0;
  double z_over_rmin = 0.0;
  double xi = 0.0;
  int l_max_used = 0;
  bool converged = false;
  double rel_change_last_step = std::numeric_limits<double>::quiet_NaN();
  /// Empty unless the point failed; the row is kept with this diagnostic.
  std::string error;

  bool ok() const { return error.empty(); }
};

struct LadderOptions {
  double tolerance = 1e-3;
  int l_step = 5;
  int l_cap = 100;
  int threads = 1;
  CouplingOptions coupling{};
  /// When positive, evaluate at this truncation only (see fixed_truncation_sample).
  int fixed_l_max = 0;
};

namespace detail {

inline EnergySample blank_sample(const SystemConfig& config) {
  EnergySample s;
  s.z = config.particle.gap();
  s.z_over_rmin = s.z / config.particle.spheroid().r_minor();
  return s;
}

inline double block_xi(const SpectralBlock& at_z, const SpectralBlock& isolated) {
  double sum = 0.0;
  for (int s = 0; s < at_z.dimension(); ++s) sum += std::sqrt(at_z.eigenvalues[s]) - std::sqrt(isolated.eigenvalues[s]);
  return 0.5 * sum;
}

}  // namespace detail

/// Ξ of a computed spectrum; every eigenvalue must lie in (0, 1).
inline double mode_sum_xi(const ModeSpectrum& spectrum) {
  double xi = 0.0;
  for (std::size_t k = 0; k < spectrum.blocks.size(); ++k) {
    require_physical(spectrum.blocks[k]);
    xi += spectrum.blocks[k].multiplicity() * detail::block_xi(spectrum.blocks[k], spectrum.isolated_blocks[k]);
  }
  return xi;
}

/// Ξ at the configured truncation l_max. The sample is marked not converged
/// because a single truncation carries no convergence evidence.
inline EnergySample zero_point_energy(const SystemConfig& config, int threads = 1, CouplingOptions coupling = {}) {
  EnergySample s = detail::blank_sample(config);
  s.xi = mode_sum_xi(mode_spectrum(config, threads, coupling));
  s.l_max_used = config.l_max;
  return s;
}

/// Same sum with every −m sector built and counted separately (multiplicity 1 each).
inline double zero_point_energy_explicit_sectors(const SystemConfig& config, CouplingOptions coupling = {}) {
  config.validate();
  const int m_max = config.effective_m_max();
  double xi = 0.0;
  for (int m = -m_max; m <= m_max; ++m) {
    const int am = std::abs(m);
    const auto b = spectral_block(config, am, coupling);
    const auto iso = isolated_block(config, am);
    require_physical(b);
    xi += detail::block_xi(b, iso);
  }
  return xi;
}

struct LadderStep {
  int l_max;
  double xi;
  bool physical;
  std::string error;
};

struct LadderTrace {
  std::vector<LadderStep> steps;
  EnergySample result;
};

/// Runs l_max = step, 2·step, … ≤ cap. The ladder stops at the first L with
/// |Ξ(L+step) − Ξ(L)| ≤ tol·|Ξ(L+step)|; it reports l_max_used = L and the
/// better estimate Ξ(L+step). Truncations with unphysical eigenvalues count
/// as not converged.
inline LadderTrace convergence_ladder_trace(const SystemConfig& config, const LadderOptions& opt = {}) {
  if (!(opt.tolerance > 0.0)) throw DomainError("convergence tolerance must be positive");
  if (opt.l_step < 1) throw DomainError("l_step must be at least 1");
  if (opt.l_cap < opt.l_step) throw DomainError("l_cap must be at least l_step");
  if (opt.l_cap > specfun::kMaxDegree) throw DomainError("l_cap exceeds the supported maximum degree");
  config.validate();

  LadderTrace trace;
  trace.result = detail::blank_sample(config);
  trace.result.xi = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> prev;
  int prev_l = 0;
  for (int L = opt.l_step; L <= opt.l_cap; L += opt.l_step) {
    LadderStep step{L, std::numeric_limits<double>::quiet_NaN(), true, {}};
    try {
      step.xi = mode_sum_xi(mode_spectrum(with_truncation(config, L), opt.threads, opt.coupling));
    } catch (const UnphysicalModeError& e) {
      step.physical = false;
      step.error = e.what();
    }
    trace.steps.push_back(step);
    if (!step.physical) {
      prev.reset();
      continue;
    }
    if (prev) {
      const double change = std::abs(step.xi - *prev);
      const double rel = step.xi == 0.0 ? (change == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()) : change / std::abs(step.xi);
      trace.result.xi = step.xi;
      trace.result.rel_change_last_step = rel;
      trace.result.l_max_used = prev_l;
      if (rel <= opt.tolerance) {
        trace.result.converged = true;
        return trace;
      }
    } else {
      trace.result.xi = step.xi;
      trace.result.l_max_used = L;
    }
    prev = step.xi;
    prev_l = L;
  }
  trace.result.l_max_used = trace.steps.back().l_max;
  char buf[200];
  std::snprintf(buf, sizeof buf, "energy not converged up to l_max=%d (last relative change %.3g, tolerance %.3g)",
                trace.result.l_max_used, trace.result.rel_change_last_step, opt.tolerance);
  trace.result.error = buf;
  return trace;
}

/// Ξ at opt.fixed_l_max, compared against l_max − l_step to fill in the
/// convergence fields. Unphysical eigenvalues are recorded in-row.
inline EnergySample fixed_truncation_sample(const SystemConfig& config, const LadderOptions& opt) {
  if (opt.fixed_l_max < 1) throw DomainError("fixed truncation requires l_max >= 1");
  if (!(opt.tolerance > 0.0)) throw DomainError("convergence tolerance must be positive");
  EnergySample s = detail::blank_sample(config);
  s.l_max_used = opt.fixed_l_max;
  try {
    s.xi = mode_sum_xi(mode_spectrum(with_truncation(config, opt.fixed_l_max), opt.threads, opt.coupling));
  } catch (const UnphysicalModeError& e) {
    s.xi = std::numeric_limits<double>::quiet_NaN();
    s.error = e.what();
    return s;
  }
  const int lower = opt.fixed_l_max - opt.l_step;
  if (lower >= 1) {
    try {
      const double prev = mode_sum_xi(mode_spectrum(with_truncation(config, lower), opt.threads, opt.coupling));
      const double change = std::abs(s.xi - prev);
      s.rel_change_last_step = s.xi == 0.0 ? (change == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()) : change / std::abs(s.xi);
      s.converged = s.rel_change_last_step <= opt.tolerance;
    } catch (const UnphysicalModeError&) {
    }
  }
  return s;
}

/// Converged Ξ; throws ConvergenceError when the cap is reached first.
inline EnergySample convergence_ladder(const SystemConfig& config, const LadderOptions& opt = {}) {
  auto trace = convergence_ladder_trace(config, opt);
  if (!trace.result.converged) {
    throw ConvergenceError(trace.result.error, trace.result.l_max_used, trace.result.rel_change_last_step);
  }
  return trace.result;
}

/// β at samples[index] by centred differences in ln(1 + z/r_min).
inline double local_exponent(const std::vector<EnergySample>& samples, int index) {
  if (samples.size() < 3) throw UndefinedExponentError("local exponent needs at least three samples");
  if (index < 1 || index + 1 >= static_cast<int>(samples.size())) {
    throw UndefinedExponentError("local exponent undefined at the ends of the grid");
  }
  const auto& a = samples[index - 1];
  const auto& b = samples[index + 1];
  const auto& c = samples[index];
  if (!a.ok() || !b.ok() || !c.ok()) throw UndefinedExponentError("local exponent stencil contains a failed sample");
  if (a.xi == 0.0 || b.xi == 0.0 || c.xi == 0.0 || (a.xi > 0.0) != (b.xi > 0.0) || (a.xi > 0.0) != (c.xi > 0.0)) {
    throw UndefinedExponentError("local exponent undefined for zero or sign-changing energy");
  }
  const double dz = std::log1p(b.z_over_rmin) - std::log1p(a.z_over_rmin);
  if (!(dz > 0.0)) throw UndefinedExponentError("local exponent requires increasing z");
  return -(std::log(std::abs(b.xi)) - std::log(std::abs(a.xi))) / dz;
}

/// β over a whole grid; empty where undefined.
inline std::vector<std::optional<double>> local_exponents(const std::vector<EnergySample>& samples) {
  std::vector<std::optional<double>> out(samples.size());
  for (int i = 1; i + 1 < static_cast<int>(samples.size()); ++i) {
    try {
      out[i] = local_exponent(samples, i);
    } catch (const UndefinedExponentError&) {
    }
  }
  return out;
}

/// Ladder (or fixed-truncation) evaluation of many configurations; results keep input order.
/// Failures are recorded in-row.
inline std::vector<EnergySample> evaluate_points(const std::vector<SystemConfig>& configs, const LadderOptions& opt, int threads) {
  LadderOptions inner = opt;
  inner.threads = 1;
  return parallel_map(static_cast<int>(configs.size()), threads, [&](int i) {
    try {
      if (inner.fixed_l_max > 0) return fixed_truncation_sample(configs[i], inner);
      return convergence_ladder_trace(configs[i], inner).result;
    } catch (const Error& e) {
      EnergySample s = detail::blank_sample(configs[i]);
      s.xi = std::numeric_limits<double>::quiet_NaN();
      s.error = e.what();
      return s;
    }
  });
}

struct SweepResult {
  std::string fingerprint;
  Family family = Family::sphere;
  double aspect = 1.0;
  Medium substrate = PerfectConductor{};
  double fc = 0.0;
  std::vector<EnergySample> samples;
  std::vector<std::optional<double>> beta;
};

struct SweepSpec {
  Family family = Family::sphere;
  double r_minor = 1.0;
  double ambient_epsilon = 1.0;
  std::vector<double> z_over_rmin;
  std::vector<Medium> substrates;
  std::vector<double> aspects;
  LadderOptions ladder{};
  int threads = 1;
};

inline std::string sweep_fingerprint(Family family, double aspect, double r_minor, const Medium& substrate, double ambient,
                                     const LadderOptions& opt) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "family=%s aspect=%.12g r_minor=%.12g substrate=%s ambient=%.12g tol=%.3g step=%d cap=%d",
                to_string(family), aspect, r_minor, describe(substrate).c_str(), ambient, opt.tolerance, opt.l_step, opt.l_cap);
  return buf;
}

/// Cartesian product substrate × aspect × z, substrate-major. Each
/// (substrate, aspect) pair yields one SweepResult over the z-grid.
inline std::vector<SweepResult> energy_sweep(const SweepSpec& spec) {
  for (std::size_t i = 1; i < spec.z_over_rmin.size(); ++i) {
    if (!(spec.z_over_rmin[i] > spec.z_over_rmin[i - 1])) throw DomainError("z grid must be strictly increasing");
  }
  for (double z : spec.z_over_rmin) {
    if (!(z > 0.0)) throw ContactError("sweep gap must be positive");
  }
  std::vector<SweepResult> results;
  std::vector<SystemConfig> configs;
  for (const auto& sub : spec.substrates) {
    for (double aspect : spec.aspects) {
      const Spheroid s = Spheroid::with_aspect(aspect == 1.0 ? Family::sphere : spec.family, aspect, spec.r_minor);
      SweepResult r;
      r.family = s.family();
      r.aspect = aspect;
      r.substrate = sub;
      r.fc = contrast_fc(spec.ambient_epsilon, sub);
      r.fingerprint = sweep_fingerprint(s.family(), aspect, spec.r_minor, sub, spec.ambient_epsilon, spec.ladder);
      results.push_back(std::move(r));
      for (double zt : spec.z_over_rmin) {
        SystemConfig c{PlacedParticle(s, zt * spec.r_minor)};
        c.substrate_medium = sub;
        c.ambient_epsilon = spec.ambient_epsilon;
        configs.push_back(c);
      }
    }
  }
  auto samples = evaluate_points(configs, spec.ladder, spec.threads);
  const std::size_t nz = spec.z_over_rmin.size();
  for (std::size_t k = 0; k < results.size(); ++k) {
    results[k].samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(k * nz),
                              samples.begin() + static_cast<std::ptrdiff_t>((k + 1) * nz));
    results[k].beta = local_exponents(results[k].samples);
  }
  return results;
}

}  // namespace casimir
