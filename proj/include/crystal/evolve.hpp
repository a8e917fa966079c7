#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crystal/dynamics.hpp"

namespace crystal {

struct IntegratorOptions {
  double t_end = 0.1;
  double dt_max = 0.0;          // 0 selects 1e-3 * t_end
  double safety = 0.2;
  double collapse_tol = 0.0;    // 0 selects 1e-10 * initial minimum face length
  double event_time_tol = 0.0;  // 0 selects 1e-12 * t_end
  std::vector<double> snapshot_times;
  std::size_t max_steps = 20'000'000;
};

struct Monitor {
  double t;
  double energy;
  double ux2_mass;  // Σ s_i^2 l_i
  double max_ut;
  double max_u;
  std::size_t n_faces;
};

struct Event {
  double t = 0.0;
  std::string kind;
  std::vector<int> faces;
  std::vector<double> deltas;  // |Δ| of each vanishing face at the event
  std::vector<int> pre, post;  // slope indices before and after surgery
  std::string note;
};

struct Snapshot {
  double t;
  AdmissibleProfile profile;
};

/// Called after every accepted step and after every event.
using StepObserver = std::function<void(double t, const AdmissibleProfile&, const RateVector&)>;

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<Monitor> monitors;
  std::vector<Event> events;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// One classical RK4 step of the corner abscissas and the left boundary value.
/// Throws StepRejected when a stage leaves the corners out of order.
AdmissibleProfile advance(const AdmissibleProfile& profile, const Model& model, const BoundaryCondition& bc,
                          double t, double dt);

struct EventLocation {
  double dt = 0.0;
  std::vector<int> faces;  // faces at or below the collapse tolerance at t + dt
  std::optional<AdmissibleProfile> state;
};

/// Shortens dt_proposed to the first instant a shrinking face reaches collapse_tol.
EventLocation locate_event(const AdmissibleProfile& profile, const Model& model, const BoundaryCondition& bc,
                           double t, double dt_proposed, double collapse_tol, double event_time_tol);

Monitor measure(const AdmissibleProfile& profile, const Model& model, const RateVector& rates, double t);

Trajectory run(const AdmissibleProfile& initial, const Model& model, const BoundaryCondition& bc,
               const IntegratorOptions& options, const StepObserver& observer = {});

}  // namespace crystal
