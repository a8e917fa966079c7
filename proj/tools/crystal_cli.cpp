#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "crystal/commands.hpp"
#include "crystal/error.hpp"

namespace {

bool load(const std::string& path, crystal::RunConfig& config) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read " << path << '\n';
    return false;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    config = crystal::parse_config(buffer.str());
    return true;
  } catch (const crystal::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crystalline curvature-flow simulator"};
  app.require_subcommand(1);

  std::string path;
  auto* run = app.add_subcommand("run", "simulate one configuration and write trajectory files");
  run->add_option("config", path, "JSON run configuration")->required();

  std::vector<double> m_list;
  unsigned jobs = 1;
  auto* converge = app.add_subcommand("converge", "sweep m and fit the H1 error rate against an oracle");
  converge->add_option("config", path, "JSON run configuration")->required();
  converge->add_option("--m", m_list, "decreasing slope-grid spacings")->delimiter(',')->required();
  converge->add_option("--jobs", jobs, "simultaneous runs")->check(CLI::PositiveNumber);

  auto* energy = app.add_subcommand("energy", "Frank diagram, Wulff polygon and growth constants");
  energy->add_option("config", path, "JSON run configuration")->required();

  auto* check = app.add_subcommand("validate", "parse a configuration and build its initial profile");
  check->add_option("config", path, "JSON run configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : crystal::kExitConfig;
  }

  crystal::RunConfig config;
  if (!load(path, config)) return crystal::kExitConfig;

  if (*run) return crystal::cmd_run(config, std::cout, std::cerr);
  if (*converge) return crystal::cmd_converge(config, m_list, jobs, std::cout, std::cerr);
  if (*energy) return crystal::cmd_energy(config, std::cout, std::cerr);
  return crystal::cmd_validate(config, std::cout, std::cerr);
}
