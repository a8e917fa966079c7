#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "crystal/dynamics.hpp"
#include "crystal/energy.hpp"
#include "crystal/evolve.hpp"
#include "crystal/profile.hpp"

namespace crystal {

struct GridSpec {
  double lo = -4.0;
  double hi = 4.0;
  double m = 0.25;
  bool uniform = true;
  std::vector<double> slopes;  // used when uniform is false
};

struct InitialSpec {
  std::string kind = "sine";  // sine | parabola | hat | table | cosine
  double amplitude = 1.0;
  int mode = 1;
  std::vector<double> x, u;   // table samples
  std::vector<double> coeffs; // cosine: a x + (b - a) x^2 / 2 + Σ c_k cos(kπx), with a, b from the bc
};

/// a(t) = offset + amplitude * sin(omega * t) at one end.
struct EndMotion {
  double offset = 0.0;
  double amplitude = 0.0;
  double omega = 0.0;
};

struct BoundarySpec {
  BoundaryKind kind = BoundaryKind::HomogeneousDirichlet;
  double a = 0.0;  // Neumann slopes
  double b = 0.0;
  EndMotion left, right;
};

enum class Oracle { Auto, Exact, Fd, None };

struct RunConfig {
  EnergySpec energy;
  std::string mode = "heat";  // heat | curvature
  GridSpec grid;
  InitialSpec initial;
  BoundarySpec bc;
  double t_end = 0.1;
  std::size_t snapshots = 50;
  std::string output = "crystal-out";
  std::uint64_t seed = 0;
  Oracle oracle = Oracle::Auto;
  std::size_t fd_nx = 1024;
  IntegratorOptions integrator;
};

/// Parses and validates a JSON run configuration; unknown keys are rejected with their path.
RunConfig parse_config(const std::string& text);

Mobility mobility_of(const RunConfig& config);
std::shared_ptr<const SlopeGrid> make_grid(const GridSpec& spec);
BoundaryCondition make_boundary(const BoundarySpec& spec);
InitialData make_initial_data(const InitialSpec& spec);
AdmissibleProfile make_initial_profile(const RunConfig& config, std::shared_ptr<const SlopeGrid> grid);
std::vector<double> snapshot_times(const RunConfig& config);

}  // namespace crystal
