#include "crystal/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crystal/error.hpp"

namespace crystal {
namespace {

AdmissibleProfile with_state(const AdmissibleProfile& p, std::vector<double> corners, double left_value) {
  return AdmissibleProfile(p.grid_ptr(), std::move(corners),
                           std::vector<int>(p.slope_indices().begin(), p.slope_indices().end()), left_value);
}

// RK4 on (x_1 .. x_{N-1}, left_value). With `strict`, any stage or result whose corners
// go out of order is rejected; otherwise only faces with nonzero Δ must keep positive length.
AdmissibleProfile rk4(const AdmissibleProfile& p, const Model& model, const BoundaryCondition& bc, double t,
                      double dt, bool strict) {
  const std::size_t n = p.faces();
  if (n == 1) return p;
  const std::vector<double> x0(p.corners().begin(), p.corners().end());
  const double v0 = p.left_value();

  auto stage = [&](const RateVector* k, double h) {
    std::vector<double> x = x0;
    double v = v0;
    if (k) {
      for (std::size_t i = 0; i + 1 < n; ++i) x[i + 1] += h * k->corner_velocities[i];
      v += h * k->left_value_rate;
    }
    if (strict) {
      for (std::size_t i = 0; i < n; ++i) {
        if (x[i + 1] < x[i]) throw Error(ErrorKind::StepRejected, "corners crossed inside a stage");
      }
    }
    return with_state(p, std::move(x), v);
  };

  const RateVector k1 = assemble_rates(p, model, bc, t);
  const RateVector k2 = assemble_rates(stage(&k1, 0.5 * dt), model, bc, t + 0.5 * dt);
  const RateVector k3 = assemble_rates(stage(&k2, 0.5 * dt), model, bc, t + 0.5 * dt);
  const RateVector k4 = assemble_rates(stage(&k3, dt), model, bc, t + dt);

  std::vector<double> x = x0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    x[i + 1] += dt / 6.0 *
                (k1.corner_velocities[i] + 2.0 * k2.corner_velocities[i] + 2.0 * k3.corner_velocities[i] +
                 k4.corner_velocities[i]);
  }
  const double v =
      v0 + dt / 6.0 * (k1.left_value_rate + 2.0 * k2.left_value_rate + 2.0 * k3.left_value_rate + k4.left_value_rate);
  if (strict) {
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i + 1] < x[i]) throw Error(ErrorKind::StepRejected, "corners crossed during the step");
    }
  }
  return with_state(p, std::move(x), v);
}

// Faces that may vanish: inflection faces and faces with prescribed velocity.
std::vector<char> passive_faces(const RateVector& rates) {
  std::vector<char> out(rates.deltas.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = rates.prescribed[i] || rates.deltas[i] == 0.0;
  return out;
}

// Faces that shrank to the tolerance; throws StepRejected if a Δ-driven face did.
std::vector<int> vanishing(const AdmissibleProfile& before, const AdmissibleProfile& after,
                           const std::vector<char>& passive, double tol) {
  std::vector<int> out;
  for (std::size_t i = 0; i < after.faces(); ++i) {
    const double l = after.length(i);
    if (l > tol || !(l < before.length(i))) continue;
    if (!passive[i]) {
      throw Error(ErrorKind::StepRejected, "face " + std::to_string(i) + " with nonzero delta reached the collapse tolerance");
    }
    out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace

AdmissibleProfile advance(const AdmissibleProfile& p, const Model& model, const BoundaryCondition& bc, double t,
                          double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::Domain, "time step must be positive");
  return rk4(p, model, bc, t, dt, true);
}

EventLocation locate_event(const AdmissibleProfile& p, const Model& model, const BoundaryCondition& bc, double t,
                           double dt_proposed, double collapse_tol, double event_time_tol) {
  const auto passive = passive_faces(assemble_rates(p, model, bc, t));
  EventLocation out;
  out.dt = dt_proposed;
  AdmissibleProfile full = rk4(p, model, bc, t, dt_proposed, false);
  out.faces = vanishing(p, full, passive, collapse_tol);
  if (out.faces.empty()) {
    out.state = std::move(full);
    return out;
  }

  double lo = 0.0;
  double hi = dt_proposed;
  std::optional<AdmissibleProfile> at_hi = std::move(full);
  int iterations = 0;
  while (hi - lo > event_time_tol) {
    if (++iterations > 200) throw Error(ErrorKind::EventLocalization, "bisection did not converge in 200 steps");
    const double mid = 0.5 * (lo + hi);
    AdmissibleProfile trial = rk4(p, model, bc, t, mid, false);
    if (vanishing(p, trial, passive, collapse_tol).empty()) {
      lo = mid;
    } else {
      hi = mid;
      at_hi = std::move(trial);
    }
  }
  out.dt = hi;
  out.faces = vanishing(p, *at_hi, passive, collapse_tol);

  // Faces a hair away from vanishing at the same instant join this event.
  const RateVector rates = assemble_rates(*at_hi, model, bc, t + hi);
  for (std::size_t i = 0; i < at_hi->faces(); ++i) {
    const double l = at_hi->length(i);
    const double rate = rates.length_rates[i];
    if (passive[i] && rate < 0.0 && l <= 10.0 * event_time_tol * -rate &&
        std::find(out.faces.begin(), out.faces.end(), static_cast<int>(i)) == out.faces.end()) {
      out.faces.push_back(static_cast<int>(i));
    }
  }
  std::sort(out.faces.begin(), out.faces.end());
  out.state = std::move(at_hi);
  return out;
}

Monitor measure(const AdmissibleProfile& p, const Model& model, const RateVector& rates, double t) {
  Monitor m{t, total_energy(model.crystalline, p), 0.0, -std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity(), p.faces()};
  for (std::size_t i = 0; i < p.faces(); ++i) {
    m.ux2_mass += p.slope(i) * p.slope(i) * p.length(i);
    m.max_ut = std::max(m.max_ut, rates.face_velocities[i]);
  }
  for (double u : p.corner_values()) m.max_u = std::max(m.max_u, u);
  return m;
}

namespace {

std::vector<int> indices_of(const AdmissibleProfile& p) {
  return {p.slope_indices().begin(), p.slope_indices().end()};
}

class Runner {
 public:
  Runner(const AdmissibleProfile& initial, const Model& model, const BoundaryCondition& bc,
         const IntegratorOptions& options, const StepObserver& observer)
      : p_(initial), model_(model), bc_(bc), opt_(options), observer_(observer) {
    if (!(opt_.t_end > 0.0)) throw Error(ErrorKind::Configuration, "t_end must be positive");
    if (!(opt_.safety > 0.0 && opt_.safety <= 1.0)) throw Error(ErrorKind::Configuration, "safety must lie in (0, 1]");
    if (auto problems = validate(p_); !problems.empty()) {
      throw Error(ErrorKind::InvalidProfile, "initial profile: " + problems.front().message);
    }
    if (opt_.dt_max <= 0.0) opt_.dt_max = 1e-3 * opt_.t_end;
    if (opt_.collapse_tol <= 0.0) opt_.collapse_tol = 1e-10 * p_.min_length();
    if (opt_.event_time_tol <= 0.0) opt_.event_time_tol = 1e-12 * opt_.t_end;
    std::sort(opt_.snapshot_times.begin(), opt_.snapshot_times.end());
    general_ = std::get_if<GeneralDirichlet>(&bc_);
  }

  Trajectory go() {
    std::size_t next_snap = 0;
    auto take_snapshots = [&] {
      while (next_snap < opt_.snapshot_times.size() && opt_.snapshot_times[next_snap] <= t_ + 1e-12 * opt_.t_end) {
        traj_.snapshots.push_back({t_, p_});
        ++next_snap;
      }
    };

    create_faces(0, 0);
    take_snapshots();
    record();

    while (t_ < opt_.t_end) {
      if (traj_.accepted_steps >= opt_.max_steps) {
        throw Error(ErrorKind::StepRejected, "step budget exhausted at t = " + std::to_string(t_));
      }
      double horizon = opt_.t_end;
      if (next_snap < opt_.snapshot_times.size()) horizon = std::min(horizon, opt_.snapshot_times[next_snap]);
      step(proposed_step(horizon), horizon);
      take_snapshots();
    }
    return std::move(traj_);
  }

 private:
  double proposed_step(double horizon) {
    const RateVector rates = assemble_rates(p_, model_, bc_, t_);
    double dt = std::min(opt_.dt_max, horizon - t_);
    for (std::size_t i = 0; i < p_.faces(); ++i) {
      if (rates.prescribed[i] || rates.deltas[i] == 0.0) continue;
      const double rate = std::abs(rates.length_rates[i]);
      if (rate > 0.0) dt = std::min(dt, opt_.safety * p_.length(i) / rate);
    }
    return dt;
  }

  // Time of the first sign change of f on (t, t + dt], or dt if none.
  double crossing(const std::function<double(double)>& f, double dt) const {
    const double f0 = f(t_);
    const double f1 = f(t_ + dt);
    if (f0 == 0.0 || f0 * f1 >= 0.0) return dt;
    double lo = 0.0, hi = dt;
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      if (f(t_ + mid) * f0 > 0.0) lo = mid; else hi = mid;
    }
    return hi;
  }

  void step(double dt, double horizon) {
    // Prescribed velocities that change sign inside the step end it at the crossing.
    double sign_left = 0.0, sign_right = 0.0;
    if (general_) {
      const double cl = crossing(general_->a_dot, dt);
      const double cr = crossing(general_->b_dot, dt);
      if (cl < dt || cr < dt) {
        const double c = std::min(cl, cr);
        if (cl <= c) sign_left = general_->a_dot(t_ + dt) > 0.0 ? 1.0 : -1.0;
        if (cr <= c) sign_right = general_->b_dot(t_ + dt) > 0.0 ? 1.0 : -1.0;
        dt = c;
      }
    }
    const double planned = dt;

    EventLocation loc;
    for (;;) {
      try {
        loc = locate_event(p_, model_, bc_, t_, dt, opt_.collapse_tol, opt_.event_time_tol);
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::StepRejected) throw;
        ++traj_.rejected_steps;
        dt *= 0.5;
        if (dt < 1e-15 * opt_.t_end) {
          std::ostringstream msg;
          msg << "step size underflow at t = " << t_ << " with " << p_.faces() << " faces (" << e.what() << ")";
          throw Error(boundary_kind(bc_) == BoundaryKind::Neumann ? ErrorKind::UnsupportedCollapse
                                                                  : ErrorKind::StepRejected,
                      msg.str());
        }
      }
    }

    if (loc.dt < planned) sign_left = sign_right = 0.0;

    std::vector<std::pair<Side, CreationCase>> creations;
    if (general_) {
      const auto state = boundary_general_dirichlet(*loc.state, model_, *general_, t_ + loc.dt);
      const bool left = state.left == CreationCase::CaseII;
      const bool right = state.right == CreationCase::CaseII;
      if (left || right) {
        const double tau = limit_ratio(loc.dt, left, right);
        loc.dt = tau;
        loc.state = rk4(p_, model_, bc_, t_, tau, false);
        loc.faces.clear();
        sign_left = sign_right = 0.0;
        if (left) creations.emplace_back(Side::Left, CreationCase::CaseII);
        if (right) creations.emplace_back(Side::Right, CreationCase::CaseII);
      }
    }

    const bool reaches_horizon = loc.dt >= horizon - t_ && loc.faces.empty();
    t_ = reaches_horizon ? horizon : t_ + loc.dt;
    p_ = std::move(*loc.state);
    ++traj_.accepted_steps;

    if (!loc.faces.empty()) collapse(loc.faces);
    if (general_) {
      for (auto [side, kind] : creations) create(side, kind);
      create_faces(sign_left, sign_right);
    }
    record();
  }

  // Largest step at which both ratios r stay within 1 + 1e-9.
  double limit_ratio(double dt, bool left, bool right) {
    auto exceeds = [&](double tau) {
      const AdmissibleProfile trial = rk4(p_, model_, bc_, t_, tau, false);
      const auto s = boundary_general_dirichlet(trial, model_, *general_, t_ + tau);
      return (left && s.ghost.r_left > 1.0 + 1e-9) || (right && s.ghost.r_right > 1.0 + 1e-9);
    };
    double lo = 0.0, hi = dt;
    for (int it = 0; hi - lo > opt_.event_time_tol; ++it) {
      if (it > 200) throw Error(ErrorKind::EventLocalization, "ratio bisection did not converge");
      const double mid = 0.5 * (lo + hi);
      if (exceeds(mid)) hi = mid; else lo = mid;
    }
    return lo;
  }

  void collapse(const std::vector<int>& faces) {
    const RateVector rates = assemble_rates(p_, model_, bc_, t_);
    const auto sites = classify_collapses(p_, faces);
    Event event;
    event.t = t_;
    event.pre = indices_of(p_);
    for (const auto& site : sites) {
      if (!event.kind.empty()) event.kind += "+";
      event.kind += to_string(site.kind);
      for (int f = site.first; f < site.first + site.count; ++f) {
        event.faces.push_back(f);
        const auto i = static_cast<std::size_t>(f);
        if (rates.prescribed[i]) {
          event.note = "boundary face with prescribed velocity vanished";
          continue;
        }
        const double d = std::abs(rates.deltas[i]);
        if (d > 1e-8) {
          std::ostringstream msg;
          msg << "face " << f << " vanished with |delta| = " << d << " at t = " << t_;
          throw Error(ErrorKind::UnsupportedCollapse, msg.str());
        }
        event.deltas.push_back(d);
      }
    }
    p_ = apply_collapses(p_, sites);
    event.post = indices_of(p_);
    traj_.events.push_back(std::move(event));
  }

  void create(Side side, CreationCase kind) {
    if (p_.faces() < 2) throw Error(ErrorKind::DegenerateState, "face creation needs at least two faces");
    const auto state = boundary_general_dirichlet(p_, model_, *general_, t_);
    Event event;
    event.t = t_;
    event.kind = std::string(to_string(kind));
    event.pre = indices_of(p_);
    p_ = creation_apply(p_, side, kind, state.ghost);
    event.faces.push_back(side == Side::Left ? 0 : static_cast<int>(p_.faces()) - 1);
    event.post = indices_of(p_);
    event.note = side == Side::Left ? "left" : "right";
    traj_.events.push_back(std::move(event));
  }

  // Case I creations: prescribed velocity opposing the slope ordering at an end.
  // A nonzero `sign_*` overrides the sign of the velocity right after a zero crossing.
  void create_faces(double sign_left, double sign_right) {
    if (!general_ || p_.faces() < 2) return;
    auto incompatible = [&](Side side, double forced) {
      const std::size_t n = p_.faces();
      const double v = side == Side::Left ? general_->a_dot(t_) : -general_->b_dot(t_);
      const double sign = forced != 0.0 ? (side == Side::Left ? forced : -forced) : (v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0));
      if (sign == 0.0) return false;
      const int end = side == Side::Left ? p_.slope_index(0) : p_.slope_index(n - 1);
      const int inner = side == Side::Left ? p_.slope_index(1) : p_.slope_index(n - 2);
      return (inner > end) != (sign > 0.0);
    };
    if (incompatible(Side::Left, sign_left)) create(Side::Left, CreationCase::CaseI);
    if (incompatible(Side::Right, sign_right)) create(Side::Right, CreationCase::CaseI);
  }

  void record() {
    const RateVector rates = assemble_rates(p_, model_, bc_, t_);
    traj_.monitors.push_back(measure(p_, model_, rates, t_));
    if (observer_) observer_(t_, p_, rates);
  }

  AdmissibleProfile p_;
  const Model& model_;
  const BoundaryCondition& bc_;
  IntegratorOptions opt_;
  const StepObserver& observer_;
  const GeneralDirichlet* general_ = nullptr;
  double t_ = 0.0;
  Trajectory traj_;
};

}  // namespace

Trajectory run(const AdmissibleProfile& initial, const Model& model, const BoundaryCondition& bc,
               const IntegratorOptions& options, const StepObserver& observer) {
  return Runner(initial, model, bc, options, observer).go();
}

}  // namespace crystal
