#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "casimir/cli/config.hpp"
#include "casimir/cli/scenarios.hpp"

namespace cli = casimir::cli;

namespace {

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return static_cast<bool>(in) || in.eof();
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-static plasmonic zero-point energy of a spheroid above a substrate"};
  app.set_version_flag("--version", std::string(cli::kToolName) + " " + cli::kToolVersion);

  std::string scenario_name, config_path, output_path;
  bool strict = false;
  int threads = 1;
  std::string names;
  for (const auto& [s, n] : cli::kScenarioNames) names += std::string(names.empty() ? "" : " | ") + n;
  app.add_option("scenario", scenario_name, names)->required();
  app.add_option("-c,--config", config_path, "Configuration file (key = value lines, or a CSV written by this tool)");
  app.add_option("-o,--output", output_path, "Output path; overrides the config 'output' key");
  app.add_flag("--strict", strict, "Exit with status 2 if any point fails or does not converge");
  app.add_option("-j,--threads", threads, "Worker threads (0 selects the hardware concurrency)")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitUsage;
  }

  const auto scenario = cli::parse_scenario(scenario_name);
  if (!scenario) {
    std::fprintf(stderr, "%s: unknown scenario '%s' (expected %s)\n", cli::kToolName, scenario_name.c_str(), names.c_str());
    return cli::kExitUsage;
  }

  std::string text;
  if (!config_path.empty() && !read_file(config_path, text)) {
    std::fprintf(stderr, "%s: cannot read '%s'\n", cli::kToolName, config_path.c_str());
    return cli::kExitIo;
  }

  cli::RunOutcome outcome;
  try {
    cli::RunConfig cfg = cli::parse_config(text);
    if (!output_path.empty()) cfg.output = output_path;
    outcome = cli::run(std::move(cfg), *scenario, {casimir::resolve_threads(threads), strict});
  } catch (const casimir::ParseError& e) {
    std::fprintf(stderr, "%s: %s%s%s\n", cli::kToolName, config_path.empty() ? "" : config_path.c_str(), config_path.empty() ? "" : ": ",
                 e.what());
    return cli::kExitUsage;
  } catch (const casimir::Error& e) {
    std::fprintf(stderr, "%s: %s\n", cli::kToolName, e.what());
    return cli::kExitNumerical;
  }

  for (const auto& f : outcome.files) {
    if (f.path.empty()) {
      std::cout << f.content;
      std::cout.flush();
      if (!std::cout) return cli::kExitIo;
    } else if (!write_file(f.path, f.content)) {
      std::fprintf(stderr, "%s: cannot write '%s'\n", cli::kToolName, f.path.c_str());
      return cli::kExitIo;
    }
  }
  for (const auto& m : outcome.messages) std::fprintf(stderr, "%s: %s\n", cli::kToolName, m.c_str());
  return outcome.exit_code;
}
