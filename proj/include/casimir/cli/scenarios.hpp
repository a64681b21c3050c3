#pragma once

// Scenario execution for the command-line front-end. Every scenario renders
// its CSV files in memory; writing them is left to the caller so that runs
// are testable and byte-deterministic.

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "casimir/cli/config.hpp"
#include "casimir/energy.hpp"
#include "casimir/oracles.hpp"
#include "casimir/pfa.hpp"
#include "casimir/spectral.hpp"

namespace casimir::cli {

struct RunOptions {
  int threads = 1;
  bool strict = false;
};

struct OutputFile {
  /// Empty path means standard output.
  std::string path;
  std::string content;
};

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitIo = 3 };

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<OutputFile> files;
  /// Diagnostics for standard error.
  std::vector<std::string> messages;
  int failed_rows = 0;
  int unconverged_rows = 0;
};

namespace detail {

inline std::string num(double v) { return format_number(v); }

inline std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

inline std::string boolean(bool b) { return b ? "true" : "false"; }

inline std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '"') c = ';';
  return s;
}

inline std::string status(const std::string& error) { return error.empty() ? "ok" : sanitize(error); }

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw ContractViolationError("CSV row width does not match header");
    rows_.push_back(std::move(row));
  }

  std::string render(const std::vector<std::string>& preamble) const {
    std::string out;
    for (const auto& line : preamble) out += line + "\n";
    auto join = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
      out += "\n";
    };
    join(header_);
    for (const auto& r : rows_) join(r);
    return out;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline const std::vector<std::string> kFixedColumns = {"z_over_rmin", "xi", "beta_local", "l_max_used", "converged"};

inline std::vector<std::string> columns(std::initializer_list<const char*> extra) {
  auto out = kFixedColumns;
  for (const char* c : extra) out.emplace_back(c);
  return out;
}

inline std::vector<std::string> fixed_cells(const EnergySample& s, const std::optional<double>& beta) {
  return {num(s.z_over_rmin), num(s.xi), opt_num(beta), std::to_string(s.l_max_used), boolean(s.converged)};
}

template <class... Cells>
std::vector<std::string> row(std::vector<std::string> head, Cells&&... cells) {
  (head.emplace_back(std::forward<Cells>(cells)), ...);
  return head;
}

inline std::vector<std::string> preamble(const RunConfig& cfg, const std::vector<double>& substrates, const std::vector<std::string>& notes) {
  std::vector<std::string> out;
  out.push_back(std::string("# ") + kToolName + " " + kToolVersion);
  for (const auto& [k, v] : echo_entries(cfg)) out.push_back("# " + k + " = " + v);
  for (double eps : substrates) {
    out.push_back("# f_c: " + num(contrast_fc(cfg.ambient_epsilon, substrate_from_epsilon(eps))) + " for substrate epsilon " + num(eps));
  }
  out.push_back("# note: eigenvalues of H are the depolarization factors n and modes oscillate at omega_p*sqrt(n)");
  out.push_back("# note: xi is U/(hbar*omega_p) summed as 1/2 * mult * (sqrt(n(z)) - sqrt(n(inf))) over sectors and modes");
  out.push_back("# note: multiplicity 1 for m 0 and 2 for m > 0; the -m sectors are degenerate with +m");
  out.push_back("# note: z_tilde is z/r_min (r_min the minor semi-axis); beta_local is -dln|xi|/dln(1+z_tilde) by centred differences");
  if (cfg.mode == TruncationMode::ladder) {
    out.push_back("# note: ladder l_max_used is the smallest L with |xi(L+step)-xi(L)| <= tol*|xi(L+step)|; xi is reported at L+step");
  } else {
    out.push_back("# note: fixed truncation at l_max; converged compares against l_max - l_step");
  }
  for (const auto& n : notes) out.push_back("# note: " + n);
  return out;
}

inline LadderOptions ladder_options(const RunConfig& cfg) {
  LadderOptions o;
  o.tolerance = cfg.tolerance;
  o.l_step = cfg.l_step;
  o.l_cap = cfg.l_cap;
  if (cfg.mode == TruncationMode::fixed) o.fixed_l_max = cfg.l_max;
  return o;
}

[[noreturn]] inline void missing(const char* key) { throw ParseError(std::string("missing required key '") + key + "'", 0, key); }

inline std::vector<double> substrate_list(const RunConfig& cfg) {
  if (cfg.substrates) return *cfg.substrates;
  return {cfg.substrate_epsilon.value_or(std::numeric_limits<double>::infinity())};
}

inline std::vector<double> aspect_list(const RunConfig& cfg) {
  if (cfg.aspects) {
    if (cfg.family == Family::sphere)
      for (double a : *cfg.aspects)
        if (a != 1.0) throw ParseError("sphere family only admits aspect 1", cfg.key_lines.at("sweep.aspects"), "sweep.aspects");
    return *cfg.aspects;
  }
  return {*cfg.r_major / *cfg.r_minor};
}

inline void require_geometry(const RunConfig& cfg) {
  if (!cfg.family) missing("geometry.family");
  if (!cfg.r_minor) missing("geometry.r_minor");
  if (!cfg.r_major && !cfg.aspects) missing("geometry.r_major");
}

inline const std::vector<double>& require_grid(const RunConfig& cfg) {
  if (!cfg.z_over_rmin) missing("sweep.z_over_rmin");
  return cfg.z_over_rmin->values;
}

inline Spheroid spheroid_for(Family family, double aspect, double r_minor) {
  return Spheroid::with_aspect(aspect == 1.0 ? Family::sphere : family, aspect, r_minor);
}

inline SystemConfig system_for(const Spheroid& s, double gap, double eps_sub, double ambient) {
  SystemConfig c{PlacedParticle(s, gap)};
  c.substrate_medium = substrate_from_epsilon(eps_sub);
  c.ambient_epsilon = ambient;
  return c;
}

inline void tally(RunOutcome& out, const EnergySample& s) {
  if (!s.ok()) ++out.failed_rows;
  else if (!s.converged) ++out.unconverged_rows;
}

inline std::string stem_of(const RunConfig& cfg, Scenario sc) {
  std::string path = cfg.output.value_or(to_string(sc));
  if (path.size() > 4 && path.compare(path.size() - 4, 4, ".csv") == 0) path.resize(path.size() - 4);
  return path;
}

inline std::string single_path(const RunConfig& cfg) { return cfg.output.value_or(""); }

// Scenario bodies ------------------------------------------------------------

inline void run_energy(const RunConfig& cfg, const RunOptions& ro, RunOutcome& out, bool exponent_view) {
  require_geometry(cfg);
  SweepSpec spec;
  spec.family = *cfg.family;
  spec.r_minor = *cfg.r_minor;
  spec.ambient_epsilon = cfg.ambient_epsilon;
  spec.z_over_rmin = require_grid(cfg);
  const auto subs = substrate_list(cfg);
  for (double e : subs) spec.substrates.push_back(substrate_from_epsilon(e));
  spec.aspects = aspect_list(cfg);
  spec.ladder = ladder_options(cfg);
  spec.threads = ro.threads;
  const auto results = energy_sweep(spec);

  auto header = columns({"epsilon_sub", "aspect_ratio", "f_c", "rel_change_last_step"});
  if (exponent_view) header.emplace_back("multipolar_order");
  if (cfg.hbar_omega_p) header.emplace_back("energy_ev");
  header.emplace_back("status");
  CsvTable table(header);
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& r = results[k];
    const double eps = subs[k / spec.aspects.size()];
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      const auto& s = r.samples[i];
      tally(out, s);
      auto cells = row(fixed_cells(s, r.beta[i]), num(eps), num(r.aspect), num(r.fc), num(s.rel_change_last_step));
      if (exponent_view) cells.push_back(r.beta[i] ? num(0.5 * (*r.beta[i] - 1.0)) : std::string());
      if (cfg.hbar_omega_p) cells.push_back(num(s.xi * *cfg.hbar_omega_p));
      cells.push_back(status(s.error));
      table.add(std::move(cells));
    }
  }
  std::vector<std::string> notes;
  if (exponent_view) notes.push_back("multipolar_order is (beta_local - 1)/2 assuming beta 2L+1 for a dominant order L");
  out.files.push_back({single_path(cfg), table.render(preamble(cfg, subs, notes))});
}

inline void run_pfa_compare(const RunConfig& cfg, const RunOptions& ro, RunOutcome& out) {
  require_geometry(cfg);
  const auto& grid = require_grid(cfg);
  const auto subs = substrate_list(cfg);
  const auto aspects = aspect_list(cfg);
  CsvTable table(columns({"epsilon_sub", "aspect_ratio", "apex_radius", "xi_pfa", "pfa_ratio", "beta_pfa", "pfa_outside_validity", "status"}));
  for (double eps : subs) {
    for (double aspect : aspects) {
      const Spheroid s = spheroid_for(*cfg.family, aspect, *cfg.r_minor);
      const auto rows = pfa_vs_spectral_report(system_for(s, 1.0, eps, cfg.ambient_epsilon), grid, ladder_options(cfg), ro.threads);
      for (const auto& r : rows) {
        EnergySample e;
        e.z_over_rmin = r.z_over_rmin;
        e.xi = r.xi_exact;
        e.l_max_used = r.l_max_used;
        e.converged = r.converged;
        e.error = r.error;
        tally(out, e);
        table.add(row(fixed_cells(e, r.beta_exact), num(eps), num(aspect), num(s.apex_radius()), num(r.xi_pfa), num(r.ratio),
                      opt_num(r.beta_pfa), boolean(r.outside_validity), status(r.error)));
      }
    }
  }
  out.files.push_back({single_path(cfg), table.render(preamble(cfg, subs,
                                                               {"xi_pfa is R*I(f_c)/(2*sqrt(2)*z) with R the apex radius of curvature",
                                                                "pfa_outside_validity flags gap/R > 0.2"}))});
}

inline void run_modes(const RunConfig& cfg, const RunOptions& ro, RunOutcome& out) {
  require_geometry(cfg);
  const auto& grid = require_grid(cfg);
  const auto subs = substrate_list(cfg);
  const auto aspects = aspect_list(cfg);
  LadderOptions fixed = ladder_options(cfg);
  fixed.fixed_l_max = cfg.l_max;
  CsvTable table(columns({"epsilon_sub", "aspect_ratio", "m", "multiplicity", "mode", "n", "n_isolated", "omega_over_omega_p",
                          "dominant_l", "dominant_strength", "status"}));
  struct Point {
    SystemConfig config;
    double eps;
    double aspect;
  };
  std::vector<Point> points;
  for (double eps : subs)
    for (double aspect : aspects)
      for (double zt : grid) {
        const Spheroid s = spheroid_for(*cfg.family, aspect, *cfg.r_minor);
        SystemConfig c = system_for(s, zt * s.r_minor(), eps, cfg.ambient_epsilon);
        c.l_max = cfg.l_max;
        points.push_back({c, eps, aspect});
      }
  struct Computed {
    EnergySample sample;
    ModeSpectrum spectrum;
  };
  const auto computed = parallel_map(static_cast<int>(points.size()), ro.threads, [&](int i) {
    return Computed{fixed_truncation_sample(points[i].config, fixed), mode_spectrum(points[i].config)};
  });
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& [sample, spec] = computed[i];
    tally(out, sample);
    for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
      const auto& b = spec.blocks[k];
      for (int s = 0; s < b.dimension(); ++s) {
        const double n = b.eigenvalues[s];
        const bool physical = n > 0.0 && n < 1.0;
        Eigen::Index dom = 0;
        const double strength = b.strengths.col(s).maxCoeff(&dom);
        table.add(row(fixed_cells(sample, std::nullopt), num(points[i].eps), num(points[i].aspect), std::to_string(b.m),
                      std::to_string(b.multiplicity()), std::to_string(s), num(n), num(spec.isolated_blocks[k].eigenvalues[s]),
                      physical ? num(std::sqrt(n)) : std::string("nan"), std::to_string(b.l_min + static_cast<int>(dom)),
                      num(strength), status(physical ? sample.error : std::string("unphysical eigenvalue"))));
      }
    }
  }
  out.files.push_back({single_path(cfg), table.render(preamble(cfg, subs,
                                                               {"modes computed at truncation.l_max; dominant_l is the basis degree "
                                                                "carrying the largest spectral strength"}))});
}

inline void run_convergence(const RunConfig& cfg, const RunOptions& ro, RunOutcome& out) {
  require_geometry(cfg);
  const auto& grid = require_grid(cfg);
  const auto subs = substrate_list(cfg);
  const auto aspects = aspect_list(cfg);
  LadderOptions opt = ladder_options(cfg);
  opt.fixed_l_max = 0;
  struct Point {
    SystemConfig config;
    double eps;
    double aspect;
  };
  std::vector<Point> points;
  for (double eps : subs)
    for (double aspect : aspects)
      for (double zt : grid) {
        const Spheroid s = spheroid_for(*cfg.family, aspect, *cfg.r_minor);
        points.push_back({system_for(s, zt * s.r_minor(), eps, cfg.ambient_epsilon), eps, aspect});
      }
  const auto traces = parallel_map(static_cast<int>(points.size()), ro.threads,
                                   [&](int i) { return convergence_ladder_trace(points[i].config, opt); });
  CsvTable table(columns({"epsilon_sub", "aspect_ratio", "ladder_l_max", "ladder_xi", "ladder_physical", "rel_change_last_step", "status"}));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& t = traces[i];
    tally(out, t.result);
    for (const auto& step : t.steps) {
      table.add(row(fixed_cells(t.result, std::nullopt), num(points[i].eps), num(points[i].aspect), std::to_string(step.l_max),
                    num(step.xi), boolean(step.physical), num(t.result.rel_change_last_step),
                    status(step.physical ? t.result.error : step.error)));
    }
  }
  out.files.push_back({single_path(cfg), table.render(preamble(cfg, subs, {"one row per ladder step; leading columns give the ladder result"}))});
}

// Figure scenarios ------------------------------------------------------------

inline const std::vector<double> kFigureSubstrates = {std::numeric_limits<double>::infinity(), 7.8, 3.12, 1.6};
inline constexpr double kSapphire = 3.12;
inline constexpr const char* kDefaultFigureGrid = "0.2:20:16:log";
inline const std::vector<double> kFigureAspects = {1.2, 1.6, 2.0};
inline const std::vector<double> kAspectSweep = {1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4, 2.6, 2.8, 3.0};

inline Grid default_grid() { return detail::LineParser(0, "sweep.z_over_rmin").grid(kDefaultFigureGrid); }

inline std::string eps_label(double eps) { return std::isinf(eps) ? "inf" : num(eps); }

inline void run_fig1(RunConfig cfg, const RunOptions& ro, RunOutcome& out) {
  cfg.family = Family::oblate;
  cfg.r_minor = 1.0;
  cfg.r_major = 1.4;
  cfg.aspects.reset();
  if (!cfg.substrates) cfg.substrates = kFigureSubstrates;
  if (!cfg.z_over_rmin) cfg.z_over_rmin = default_grid();
  cfg.substrate_epsilon.reset();
  SweepSpec spec;
  spec.family = Family::oblate;
  spec.r_minor = 1.0;
  spec.ambient_epsilon = cfg.ambient_epsilon;
  spec.z_over_rmin = cfg.z_over_rmin->values;
  for (double e : *cfg.substrates) spec.substrates.push_back(substrate_from_epsilon(e));
  spec.aspects = {1.4};
  spec.ladder = ladder_options(cfg);
  spec.threads = ro.threads;
  const auto results = energy_sweep(spec);
  const auto pre = preamble(cfg, *cfg.substrates, {"oblate spheroid r_major/r_minor = 1.4; one file per substrate"});
  const std::string stem = stem_of(cfg, Scenario::fig1);
  for (std::size_t k = 0; k < results.size(); ++k) {
    const double eps = (*cfg.substrates)[k];
    CsvTable table(columns({"epsilon_sub", "f_c", "status"}));
    for (std::size_t i = 0; i < results[k].samples.size(); ++i) {
      const auto& s = results[k].samples[i];
      tally(out, s);
      table.add(row(fixed_cells(s, results[k].beta[i]), num(eps), num(results[k].fc), status(s.error)));
    }
    out.files.push_back({stem + "_eps_" + eps_label(eps) + ".csv", table.render(pre)});
  }
}

inline void run_fig2(RunConfig cfg, const RunOptions& ro, RunOutcome& out) {
  cfg.family.reset();
  cfg.r_major.reset();
  cfg.r_minor = 1.0;
  cfg.substrates.reset();
  if (!cfg.substrate_epsilon) cfg.substrate_epsilon = kSapphire;
  if (!cfg.aspects) cfg.aspects = kFigureAspects;
  if (!cfg.z_over_rmin) cfg.z_over_rmin = default_grid();
  const auto pre = preamble(cfg, {*cfg.substrate_epsilon}, {"oblate and prolate families over sweep.aspects; one file per family"});
  const std::string stem = stem_of(cfg, Scenario::fig2);
  for (Family fam : {Family::oblate, Family::prolate}) {
    SweepSpec spec;
    spec.family = fam;
    spec.r_minor = 1.0;
    spec.ambient_epsilon = cfg.ambient_epsilon;
    spec.z_over_rmin = cfg.z_over_rmin->values;
    spec.substrates = {substrate_from_epsilon(*cfg.substrate_epsilon)};
    spec.aspects = *cfg.aspects;
    spec.ladder = ladder_options(cfg);
    spec.threads = ro.threads;
    const auto results = energy_sweep(spec);
    CsvTable table(columns({"family", "aspect_ratio", "status"}));
    for (const auto& r : results) {
      for (std::size_t i = 0; i < r.samples.size(); ++i) {
        tally(out, r.samples[i]);
        table.add(row(fixed_cells(r.samples[i], r.beta[i]), casimir::to_string(fam), num(r.aspect), status(r.samples[i].error)));
      }
    }
    out.files.push_back({stem + "_" + casimir::to_string(fam) + ".csv", table.render(pre)});
  }
}

/// Relative gap step used for local exponents on fixed-geometry sweeps.
inline constexpr double kExponentStep = 0.05;

struct FixedGeometryPoint {
  Spheroid spheroid;
  double gap;
};

/// Ξ at each point plus β from gaps (1 ± kExponentStep)·gap.
inline std::vector<std::pair<EnergySample, std::optional<double>>> evaluate_with_exponent(const std::vector<FixedGeometryPoint>& pts,
                                                                                         const RunConfig& cfg, const RunOptions& ro) {
  std::vector<SystemConfig> configs;
  for (const auto& p : pts)
    for (double f : {1.0 - kExponentStep, 1.0, 1.0 + kExponentStep})
      configs.push_back(system_for(p.spheroid, f * p.gap, *cfg.substrate_epsilon, cfg.ambient_epsilon));
  const auto samples = evaluate_points(configs, ladder_options(cfg), ro.threads);
  std::vector<std::pair<EnergySample, std::optional<double>>> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::vector<EnergySample> stencil(samples.begin() + 3 * i, samples.begin() + 3 * i + 3);
    std::optional<double> beta;
    try {
      beta = local_exponent(stencil, 1);
    } catch (const UndefinedExponentError&) {
    }
    out.emplace_back(stencil[1], beta);
  }
  return out;
}

inline void run_fig3(RunConfig cfg, const RunOptions& ro, RunOutcome& out) {
  cfg.family.reset();
  cfg.r_major.reset();
  cfg.r_minor.reset();
  cfg.substrates.reset();
  cfg.z_over_rmin.reset();
  if (!cfg.substrate_epsilon) cfg.substrate_epsilon = kSapphire;
  if (!cfg.aspects) cfg.aspects = kAspectSweep;
  const auto pre = preamble(cfg, {*cfg.substrate_epsilon},
                            {"part a: z/r_perp = 0.25 with r_perp = 1 over r = r_par/r_perp in [0.4; 2] (r < 1 prolate; r > 1 oblate)",
                             "part b (file suffix _b): prolate with r_minor = 1 and z/r_major = 0.1 over sweep.aspects",
                             "beta_local uses gaps z*(1 -/+ 0.05) at fixed shape"});
  std::vector<double> ratios;
  for (int i = 0; i <= 16; ++i) ratios.push_back(i == 6 ? 1.0 : 0.4 + 0.1 * i);
  std::vector<FixedGeometryPoint> a;
  for (double r : ratios) {
    if (r == 1.0) a.push_back({Spheroid::sphere(1.0), 0.25});
    else if (r < 1.0) a.push_back({Spheroid::prolate(1.0, r), 0.25});
    else a.push_back({Spheroid::oblate(r, 1.0), 0.25});
  }
  const auto ra = evaluate_with_exponent(a, cfg, ro);
  CsvTable ta(columns({"r_par_over_r_perp", "family", "aspect_ratio", "status"}));
  for (std::size_t i = 0; i < a.size(); ++i) {
    tally(out, ra[i].first);
    ta.add(row(fixed_cells(ra[i].first, ra[i].second), num(ratios[i]), casimir::to_string(a[i].spheroid.family()),
               num(a[i].spheroid.aspect()), status(ra[i].first.error)));
  }
  std::vector<FixedGeometryPoint> b;
  for (double asp : *cfg.aspects) {
    const Spheroid s = spheroid_for(Family::prolate, asp, 1.0);
    b.push_back({s, 0.1 * s.r_major()});
  }
  const auto rb = evaluate_with_exponent(b, cfg, ro);
  CsvTable tb(columns({"aspect_ratio", "z_over_rmajor", "status"}));
  for (std::size_t i = 0; i < b.size(); ++i) {
    tally(out, rb[i].first);
    tb.add(row(fixed_cells(rb[i].first, rb[i].second), num(b[i].spheroid.aspect()), num(0.1), status(rb[i].first.error)));
  }
  const std::string stem = stem_of(cfg, Scenario::fig3);
  out.files.push_back({cfg.output.value_or(stem + ".csv"), ta.render(pre)});
  out.files.push_back({stem + "_b.csv", tb.render(pre)});
}

inline void run_fig4(RunConfig cfg, const RunOptions& ro, RunOutcome& out) {
  cfg.family.reset();
  cfg.r_major.reset();
  cfg.r_minor.reset();
  cfg.substrates.reset();
  cfg.z_over_rmin.reset();
  if (!cfg.substrate_epsilon) cfg.substrate_epsilon = kSapphire;
  if (!cfg.aspects) cfg.aspects = kAspectSweep;
  const auto pre = preamble(cfg, {*cfg.substrate_epsilon},
                            {"fixed apex radius of curvature 1: oblate r_major^2/r_minor at z/r_major = 0.25; prolate r_minor^2/r_major at "
                             "z/r_major = 0.1",
                             "beta_local uses gaps z*(1 -/+ 0.05) at fixed shape"});
  const std::string stem = stem_of(cfg, Scenario::fig4);
  const double fc = contrast_fc(cfg.ambient_epsilon, substrate_from_epsilon(*cfg.substrate_epsilon));
  for (Family fam : {Family::oblate, Family::prolate}) {
    std::vector<FixedGeometryPoint> pts;
    const double z_ratio = fam == Family::oblate ? 0.25 : 0.1;
    for (double asp : *cfg.aspects) {
      // apex radius 1: oblate r_> = 1/a, r_< = 1/a²; prolate r_< = a, r_> = a²
      const Spheroid s = asp == 1.0 ? Spheroid::sphere(1.0)
                         : fam == Family::oblate ? Spheroid::oblate(1.0 / asp, 1.0 / (asp * asp))
                                                 : Spheroid::prolate(asp * asp, asp);
      pts.push_back({s, z_ratio * s.r_major()});
    }
    const auto res = evaluate_with_exponent(pts, cfg, ro);
    CsvTable table(columns({"family", "aspect_ratio", "apex_radius", "z_over_rmajor", "xi_pfa", "pfa_ratio", "status"}));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& [s, beta] = res[i];
      tally(out, s);
      const double xp = pfa_energy(pts[i].spheroid.apex_radius(), pts[i].gap, fc);
      table.add(row(fixed_cells(s, beta), casimir::to_string(fam), num(pts[i].spheroid.aspect()), num(pts[i].spheroid.apex_radius()),
                    num(z_ratio), num(xp), num(s.xi / xp), status(s.error)));
    }
    out.files.push_back({stem + "_" + casimir::to_string(fam) + ".csv", table.render(pre)});
  }
}

// Verification ----------------------------------------------------------------

struct Check {
  std::string name;
  double core;
  double oracle;
  double tolerance;
  bool relative = true;

  double deviation() const { return relative ? std::abs(core - oracle) / std::abs(oracle) : std::abs(core - oracle); }
  bool pass() const { return deviation() <= tolerance; }
};

inline std::vector<Check> verification_checks(int threads) {
  std::vector<Check> checks;
  char name[96];
  for (int l = 1; l <= 30; l += 29) {
    std::snprintf(name, sizeof name, "isolated sphere n_%d", l);
    checks.push_back({name, isolated_depolarization(Spheroid::sphere(1.0), l, 0), l / (2.0 * l + 1.0), 1e-10});
  }
  for (double aspect : {1.1, 1.4, 2.0, 5.0}) {
    for (Family fam : {Family::prolate, Family::oblate}) {
      const Spheroid s = Spheroid::with_aspect(fam, aspect, 1.0);
      std::snprintf(name, sizeof name, "%s %.3g dipole n_10 vs depolarization integral", casimir::to_string(fam), aspect);
      checks.push_back({name, isolated_depolarization(s, 1, 0), oracles::depolarization_integral(s, oracles::Axis::symmetry), 1e-8});
      std::snprintf(name, sizeof name, "%s %.3g dipole sum rule", casimir::to_string(fam), aspect);
      checks.push_back({name, isolated_depolarization(s, 1, 0) + 2.0 * isolated_depolarization(s, 1, 1), 1.0, 1e-10, false});
    }
  }
  for (double fc_sub : {std::numeric_limits<double>::infinity(), 3.0}) {
    for (double gap : {5.0, 10.0}) {
      SystemConfig c{PlacedParticle(Spheroid::sphere(1.0), gap)};
      c.substrate_medium = substrate_from_epsilon(fc_sub);
      c.l_max = 10;
      const auto pin = oracles::image_dipole_modes(1.0, 1.0 + gap, c.fc());
      for (int m : {0, 1}) {
        const auto b = spectral_block(c, m);
        int dip = 0;
        for (int s = 1; s < b.dimension(); ++s)
          if (b.strengths(0, s) > b.strengths(0, dip)) dip = s;
        std::snprintf(name, sizeof name, "sphere z/a=%g f_c=%.3g m=%d dipole shift vs image dipole", gap, c.fc(), m);
        checks.push_back({name, b.eigenvalues[dip] - 1.0 / 3.0, (m == 0 ? pin.n_perp : pin.n_par) - 1.0 / 3.0, 0.02});
      }
    }
  }
  {
    const PlacedParticle p(Spheroid::sphere(1.0), 1.0);
    SystemConfig c{p};
    c.l_max = 60;
    for (int m : {0, 1}) {
      const auto core = spectral_block(c, m).eigenvalues;
      const auto u = oracles::quasistatic_bem(p, -1.0, m, oracles::make_bem_mesh(p.spheroid(), 64), 3, threads);
      for (int k = 0; k < 3; ++k) {
        std::snprintf(name, sizeof name, "sphere z/a=1 f_c=-1 m=%d mode %d vs BEM", m, k);
        checks.push_back({name, core[k], u[k], 0.01});
      }
    }
  }
  {
    const PlacedParticle p(Spheroid::prolate(2.0, 1.0), 1.0);
    SystemConfig c{p};
    c.substrate_medium = ConstantMedium{1.0};
    c.l_max = 20;
    for (int m : {0, 1}) {
      const auto core = isolated_block(c, m).eigenvalues;
      const auto u = oracles::quasistatic_bem(p, 0.0, m, oracles::make_bem_mesh(p.spheroid(), 64), 3, threads);
      for (int k = 0; k < 3; ++k) {
        std::snprintf(name, sizeof name, "isolated prolate 2 m=%d mode %d vs BEM", m, k);
        checks.push_back({name, core[k], u[k], 0.01});
      }
    }
  }
  for (double fc : {0.01, -0.01}) {
    std::snprintf(name, sizeof name, "plate integral I(%g) vs f_c/8", fc);
    checks.push_back({name, plate_energy_integral(fc), fc / 8.0, 0.01});
  }
  return checks;
}

inline void run_verify(const RunConfig& cfg, const RunOptions& ro, RunOutcome& out) {
  const auto checks = verification_checks(ro.threads);
  CsvTable table({"check", "core", "oracle", "deviation", "tolerance", "pass"});
  int failures = 0;
  for (const auto& c : checks) {
    if (!c.pass()) {
      ++failures;
      out.messages.push_back("verify failed: " + c.name);
    }
    table.add({sanitize(c.name), num(c.core), num(c.oracle), num(c.deviation()), num(c.tolerance), boolean(c.pass())});
  }
  out.failed_rows += failures;
  out.files.push_back({single_path(cfg), table.render(preamble(cfg, {}, {"oracle report; deviation is relative except for sum rules"}))});
  if (failures > 0) out.exit_code = kExitNumerical;
}

}  // namespace detail

/// Executes a scenario; numerical trouble is reported through the exit code,
/// malformed input through ParseError.
inline RunOutcome run(RunConfig cfg, Scenario scenario, const RunOptions& ro = {}) {
  if (cfg.scenario && *cfg.scenario != scenario) {
    throw ParseError(std::string("configuration is for scenario '") + to_string(*cfg.scenario) + "'", cfg.key_lines.at("scenario"),
                     "scenario");
  }
  cfg.scenario = scenario;
  RunOutcome out;
  switch (scenario) {
    case Scenario::modes: detail::run_modes(cfg, ro, out); break;
    case Scenario::energy_sweep: detail::run_energy(cfg, ro, out, false); break;
    case Scenario::exponent: detail::run_energy(cfg, ro, out, true); break;
    case Scenario::pfa_compare: detail::run_pfa_compare(cfg, ro, out); break;
    case Scenario::convergence: detail::run_convergence(cfg, ro, out); break;
    case Scenario::verify: detail::run_verify(cfg, ro, out); break;
    case Scenario::fig1: detail::run_fig1(cfg, ro, out); break;
    case Scenario::fig2: detail::run_fig2(cfg, ro, out); break;
    case Scenario::fig3: detail::run_fig3(cfg, ro, out); break;
    case Scenario::fig4: detail::run_fig4(cfg, ro, out); break;
  }
  if (out.failed_rows + out.unconverged_rows > 0 && scenario != Scenario::verify) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d rows failed and %d rows did not converge", out.failed_rows, out.unconverged_rows);
    out.messages.emplace_back(buf);
    if (ro.strict) out.exit_code = kExitNumerical;
  }
  return out;
}

}  // namespace casimir::cli
