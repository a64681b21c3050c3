#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "casimir/cli/config.hpp"
#include "casimir/cli/scenarios.hpp"

using namespace casimir;
using namespace casimir::cli;

namespace {

const char* kSphere =
    "geometry.family = sphere\n"
    "geometry.r_minor = 1\n"
    "sweep.z_over_rmin = 0.5:4:4:log\n";

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  for (auto& l : lines_of(text))
    if (!l.empty() && l[0] != '#') out.push_back(l);
  return out;
}

bool contains_line(const std::string& text, const std::string& line) {
  for (const auto& l : lines_of(text))
    if (l == line) return true;
  return false;
}

std::vector<std::string> cells(const std::string& line) { return cli::detail::split(line, ','); }

std::string run_single(const std::string& config, Scenario s, int threads = 1) {
  auto out = run(parse_config(config), s, {threads, false});
  EXPECT_EQ(out.files.size(), 1u);
  return out.files.at(0).content;
}

struct Shell {
  int status;
  std::string out;
};

Shell shell(const std::string& cmd) {
  Shell r{0, {}};
  FILE* p = popen((cmd + " 2>/dev/null").c_str(), "r");
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("casimir_cli_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(ConfigParse, MinimalSphereEchoesDefaults) {
  const std::string csv = run_single(kSphere, Scenario::energy_sweep);
  const auto ls = lines_of(csv);
  ASSERT_FALSE(ls.empty());
  EXPECT_EQ(ls[0], "# casimir-spectral 1.0.0");
  for (const char* l : {"# scenario = energy_sweep", "# geometry.family = sphere", "# substrate.epsilon = inf", "# ambient.epsilon = 1",
                        "# sweep.z_over_rmin = 0.5:4:4:log", "# truncation.mode = ladder", "# truncation.l_step = 5",
                        "# truncation.l_cap = 100", "# truncation.tolerance = 0.001", "# f_c: -1 for substrate epsilon inf"}) {
    EXPECT_TRUE(contains_line(csv, l)) << l;
  }
}

TEST(ConfigParse, SapphireContrastInHeader) {
  const std::string csv = run_single(std::string(kSphere) + "substrate.epsilon = 3.12\n", Scenario::energy_sweep);
  EXPECT_TRUE(contains_line(csv, "# f_c: -0.514563106796 for substrate epsilon 3.12"));
}

TEST(ConfigParse, NegativeRadiusNamesLineAndKey) {
  try {
    parse_config("geometry.family = sphere\ngeometry.r_minor = -1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.key(), "geometry.r_minor");
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(ConfigParse, RejectsUnknownAndDuplicateKeys) {
  EXPECT_THROW(parse_config("geometry.colour = red\n"), ParseError);
  EXPECT_THROW(parse_config("geometry.r_minor = 1\ngeometry.r_minor = 2\n"), ParseError);
  EXPECT_THROW(parse_config("geometry.r_minor 1\n"), ParseError);
  EXPECT_THROW(parse_config("geometry.r_minor =\n"), ParseError);
}

TEST(ConfigParse, RejectsInconsistentGeometryAndMedia) {
  EXPECT_THROW(parse_config("geometry.family = sphere\ngeometry.r_major = 2\ngeometry.r_minor = 1\n"), ParseError);
  EXPECT_THROW(parse_config("geometry.family = prolate\ngeometry.r_major = 1\ngeometry.r_minor = 1\n"), ParseError);
  EXPECT_THROW(parse_config("geometry.family = oblate\ngeometry.r_major = 0.5\ngeometry.r_minor = 1\n"), ParseError);
  EXPECT_THROW(parse_config("substrate.perfect_conductor = true\nsubstrate.epsilon = 3\n"), ParseError);
  EXPECT_THROW(parse_config("substrate.epsilon = -2\n"), ParseError);
  EXPECT_THROW(parse_config("truncation.l_step = 10\ntruncation.l_cap = 5\n"), ParseError);
  EXPECT_THROW(parse_config("truncation.mode = adaptive\n"), ParseError);
  EXPECT_NO_THROW(parse_config("substrate.perfect_conductor = true\nsubstrate.epsilon = inf\n"));
}

TEST(ConfigParse, GridForms) {
  const auto a = parse_config("sweep.z_over_rmin = 0.2:20:16:log\n");
  const auto b = parse_config("sweep.z_over_rmin = 0.2:20:16(log)\n");
  ASSERT_TRUE(a.z_over_rmin && b.z_over_rmin);
  EXPECT_EQ(a.z_over_rmin->values, b.z_over_rmin->values);
  ASSERT_EQ(a.z_over_rmin->values.size(), 16u);
  EXPECT_DOUBLE_EQ(a.z_over_rmin->values.front(), 0.2);
  EXPECT_DOUBLE_EQ(a.z_over_rmin->values.back(), 20.0);
  for (std::size_t i = 1; i + 1 < 16; ++i) {
    const auto& v = a.z_over_rmin->values;
    EXPECT_NEAR(v[i] * v[i], v[i - 1] * v[i + 1], 1e-12 * v[i] * v[i]);
  }
  const auto lin = parse_config("sweep.z_over_rmin = 1:3:5\n");
  EXPECT_EQ(lin.z_over_rmin->values, (std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0}));
  const auto list = parse_config("sweep.z_over_rmin = 0.5, 1, 2\n");
  EXPECT_EQ(list.z_over_rmin->values, (std::vector<double>{0.5, 1.0, 2.0}));
  EXPECT_THROW(parse_config("sweep.z_over_rmin = 1:0:4\n"), ParseError);
  EXPECT_THROW(parse_config("sweep.z_over_rmin = 0:1:4:log\n"), ParseError);
  EXPECT_THROW(parse_config("sweep.z_over_rmin = 1,x\n"), ParseError);
}

TEST(ConfigParse, CommentsAndBlankLinesIgnored) {
  const auto c = parse_config("# a comment\n\ngeometry.r_minor = 2   # trailing\n");
  ASSERT_TRUE(c.r_minor);
  EXPECT_EQ(*c.r_minor, 2.0);
}

TEST(Scenarios, FixedColumnsLeadAndStatusTrails) {
  const auto rows = data_lines(run_single(kSphere, Scenario::energy_sweep));
  ASSERT_EQ(rows.size(), 5u);
  const auto header = cells(rows[0]);
  ASSERT_GE(header.size(), 6u);
  EXPECT_EQ(std::vector<std::string>(header.begin(), header.begin() + 5),
            (std::vector<std::string>{"z_over_rmin", "xi", "beta_local", "l_max_used", "converged"}));
  EXPECT_EQ(header.back(), "status");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto c = cells(rows[i]);
    ASSERT_EQ(c.size(), header.size());
    EXPECT_EQ(c.back(), "ok");
    EXPECT_EQ(c[4], "true");
    EXPECT_LT(std::stod(c[1]), 0.0);
  }
  EXPECT_TRUE(cells(rows[1])[2].empty());
  EXPECT_FALSE(cells(rows[2])[2].empty());
  EXPECT_TRUE(cells(rows[4])[2].empty());
}

TEST(Scenarios, EnergyColumnScalesXi) {
  const auto rows = data_lines(run_single(std::string(kSphere) + "particle.hbar_omega_p = 9\n", Scenario::energy_sweep));
  const auto header = cells(rows[0]);
  const auto it = std::find(header.begin(), header.end(), "energy_ev");
  ASSERT_NE(it, header.end());
  const auto col = it - header.begin();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto c = cells(rows[i]);
    EXPECT_NEAR(std::stod(c[col]), 9.0 * std::stod(c[1]), 1e-10 * std::abs(std::stod(c[col])));
  }
}

TEST(Scenarios, RerunFromCsvEchoIsIdentical) {
  const std::string cfg =
      "geometry.family = oblate\ngeometry.r_major = 1.4\ngeometry.r_minor = 1\nsubstrate.epsilon = 3.12\n"
      "sweep.z_over_rmin = 0.3:5:5:log\nparticle.hbar_omega_p = 9\n";
  for (Scenario s : {Scenario::energy_sweep, Scenario::exponent, Scenario::pfa_compare, Scenario::convergence}) {
    const std::string first = run_single(cfg, s);
    const RunConfig again = parse_config(first);
    ASSERT_TRUE(again.scenario);
    EXPECT_EQ(*again.scenario, s);
    EXPECT_EQ(run_single(first, s), first) << to_string(s);
  }
}

TEST(Scenarios, DeterministicAcrossThreadCounts) {
  const std::string cfg =
      "geometry.family = prolate\ngeometry.r_major = 2\ngeometry.r_minor = 1\nsweep.substrates = inf, 3.12\n"
      "sweep.aspects = 1, 1.5, 2\nsweep.z_over_rmin = 0.3:3:4:log\n";
  for (Scenario s : {Scenario::energy_sweep, Scenario::modes, Scenario::convergence}) {
    EXPECT_EQ(run_single(cfg, s, 1), run_single(cfg, s, 3)) << to_string(s);
  }
}

TEST(Scenarios, ScenarioMismatchAndMissingKeys) {
  EXPECT_THROW(run(parse_config(std::string(kSphere) + "scenario = modes\n"), Scenario::energy_sweep), ParseError);
  EXPECT_THROW(run(parse_config("geometry.family = sphere\ngeometry.r_minor = 1\n"), Scenario::energy_sweep), ParseError);
  EXPECT_THROW(run(parse_config("geometry.r_minor = 1\nsweep.z_over_rmin = 1\n"), Scenario::energy_sweep), ParseError);
  EXPECT_THROW(run(parse_config(std::string(kSphere) + "sweep.aspects = 2\n"), Scenario::energy_sweep), ParseError);
}

TEST(Scenarios, StrictModeFlagsUnconvergedRows) {
  const std::string cfg = std::string(kSphere) + "truncation.mode = fixed\ntruncation.l_max = 3\n";
  const auto loose = run(parse_config(cfg), Scenario::energy_sweep, {1, false});
  EXPECT_EQ(loose.exit_code, kExitOk);
  EXPECT_GT(loose.unconverged_rows, 0);
  const auto strict = run(parse_config(cfg), Scenario::energy_sweep, {1, true});
  EXPECT_EQ(strict.exit_code, kExitNumerical);
  EXPECT_EQ(run(parse_config(kSphere), Scenario::energy_sweep, {1, true}).exit_code, kExitOk);
}

TEST(Scenarios, ModesRowsMatchSpectrum) {
  const std::string cfg = "geometry.family = sphere\ngeometry.r_minor = 1\nsweep.z_over_rmin = 1\ntruncation.l_max = 4\n";
  const auto rows = data_lines(run_single(cfg, Scenario::modes));
  const auto header = cells(rows[0]);
  auto col = [&](const char* name) { return std::find(header.begin(), header.end(), name) - header.begin(); };
  // Σ_m (l_max − max(1,m) + 1) for l_max = 4: 4 + 4 + 3 + 2 + 1
  ASSERT_EQ(rows.size(), 1u + 14u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto c = cells(rows[i]);
    const int m = std::stoi(c[col("m")]);
    EXPECT_EQ(std::stoi(c[col("multiplicity")]), m == 0 ? 1 : 2);
    const double n = std::stod(c[col("n")]);
    EXPECT_NEAR(std::stod(c[col("omega_over_omega_p")]), std::sqrt(n), 1e-11);
    const int l = std::stoi(c[col("dominant_l")]);
    EXPECT_NEAR(std::stod(c[col("n_isolated")]), l / (2.0 * l + 1.0), 1e-11);
  }
}

TEST(Scenarios, VerifyPasses) {
  const auto out = run(parse_config(""), Scenario::verify);
  EXPECT_EQ(out.exit_code, kExitOk);
  const auto rows = data_lines(out.files.at(0).content);
  ASSERT_GT(rows.size(), 10u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(cells(rows[i]).back(), "true") << rows[i];
}

TEST(Scenarios, FigureFileLayout) {
  const auto f1 = run(parse_config("output = out/f1.csv\nsweep.z_over_rmin = 1,2\n"), Scenario::fig1);
  ASSERT_EQ(f1.files.size(), 4u);
  EXPECT_EQ(f1.files[0].path, "out/f1_eps_inf.csv");
  EXPECT_EQ(f1.files[1].path, "out/f1_eps_7.8.csv");
  EXPECT_EQ(f1.files[2].path, "out/f1_eps_3.12.csv");
  EXPECT_EQ(f1.files[3].path, "out/f1_eps_1.6.csv");
  const auto f2 = run(parse_config("sweep.z_over_rmin = 1,2\nsweep.aspects = 1.5\n"), Scenario::fig2);
  ASSERT_EQ(f2.files.size(), 2u);
  EXPECT_EQ(f2.files[0].path, "fig2_oblate.csv");
  EXPECT_EQ(f2.files[1].path, "fig2_prolate.csv");
  EXPECT_TRUE(contains_line(f2.files[0].content, "# f_c: -0.514563106796 for substrate epsilon 3.12"));
  const auto f3 = run(parse_config("output = g.csv\nsweep.aspects = 2\n"), Scenario::fig3);
  ASSERT_EQ(f3.files.size(), 2u);
  EXPECT_EQ(f3.files[0].path, "g.csv");
  EXPECT_EQ(f3.files[1].path, "g_b.csv");
  EXPECT_EQ(data_lines(f3.files[0].content).size(), 1u + 17u);
  const auto f4 = run(parse_config("sweep.aspects = 2\n"), Scenario::fig4);
  ASSERT_EQ(f4.files.size(), 2u);
  for (const auto& f : f4.files) {
    const auto rows = data_lines(f.content);
    const auto header = cells(rows[0]);
    const auto c = cells(rows[1]);
    const auto apex = std::find(header.begin(), header.end(), "apex_radius") - header.begin();
    EXPECT_NEAR(std::stod(c[apex]), 1.0, 1e-12);
  }
}

TEST(Binary, ExitCodesAndOutputs) {
  const std::string bin = CASIMIR_CLI_BINARY;
  const auto good = scratch("good.cfg");
  write(good, kSphere);
  const auto out = shell(bin + " energy_sweep --config " + good.string());
  EXPECT_EQ(out.status, 0);
  EXPECT_EQ(out.out, run_single(kSphere, Scenario::energy_sweep));

  const auto csv = scratch("result.csv");
  EXPECT_EQ(shell(bin + " energy_sweep --config " + good.string() + " --output " + csv.string() + " --threads 2").status, 0);
  std::ifstream in(csv);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(shell(bin + " energy_sweep --config " + csv.string()).out, ss.str());

  const auto bad = scratch("bad.cfg");
  write(bad, "geometry.r_minor = -1\n");
  EXPECT_EQ(shell(bin + " energy_sweep --config " + bad.string()).status, 1);
  EXPECT_EQ(shell(bin + " no_such_scenario --config " + good.string()).status, 1);
  EXPECT_EQ(shell(bin + " energy_sweep --config " + scratch("missing.cfg").string()).status, 3);
  EXPECT_EQ(shell(bin + " energy_sweep --config " + good.string() + " --output /nonexistent_dir/x.csv").status, 3);
  EXPECT_EQ(shell(bin).status, 1);

  const auto coarse = scratch("coarse.cfg");
  write(coarse, std::string(kSphere) + "truncation.mode = fixed\ntruncation.l_max = 3\n");
  EXPECT_EQ(shell(bin + " energy_sweep --config " + coarse.string()).status, 0);
  EXPECT_EQ(shell(bin + " energy_sweep --strict --config " + coarse.string()).status, 2);
  EXPECT_EQ(shell(bin + " verify").status, 0);
  std::filesystem::remove_all(good.parent_path());
}
