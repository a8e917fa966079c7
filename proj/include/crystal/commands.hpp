#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "crystal/config.hpp"
#include "crystal/metrics.hpp"

namespace crystal {

enum ExitCode { kExitOk = 0, kExitRuntime = 1, kExitConfig = 2 };

/// Output directory of a run: CRYSTAL_OUT when set, otherwise the configured one.
std::filesystem::path output_directory(const RunConfig& config);

struct ConvergenceRow {
  double m;
  std::size_t n0;
  ErrorReport error;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  std::vector<std::pair<double, double>> sup_h1;  // (m, max over snapshots of h1)
  RateFit fit;
  bool monotone = false;
};

/// One run per m against the configured oracle, `jobs` runs at a time.
ConvergenceResult converge(const RunConfig& config, const std::vector<double>& m_list, unsigned jobs,
                           const std::filesystem::path& out_dir);

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_converge(const RunConfig& config, const std::vector<double>& m_list, unsigned jobs, std::ostream& out,
                 std::ostream& err);
int cmd_energy(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace crystal
