#include "crystal/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <thread>

#include <json.hpp>

#include "crystal/error.hpp"
#include "crystal/io.hpp"
#include "crystal/reference.hpp"

namespace crystal {

namespace fs = std::filesystem;

fs::path output_directory(const RunConfig& config) {
  if (const char* env = std::getenv("CRYSTAL_OUT"); env && *env) return env;
  return config.output;
}

namespace {

std::ofstream open_file(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
}

// Everything a simulation needs, built before anything runs so that setup
// problems surface as configuration errors.
struct Setup {
  std::shared_ptr<const SlopeGrid> grid;
  std::optional<Model> model;
  BoundaryCondition bc;
  std::optional<AdmissibleProfile> initial;
  IntegratorOptions options;
};

Setup prepare(const RunConfig& config, std::shared_ptr<const SlopeGrid> grid) {
  Setup s;
  s.grid = std::move(grid);
  s.model.emplace(make_energy(config.energy), *s.grid, mobility_of(config));
  s.bc = make_boundary(config.bc);
  s.initial.emplace(make_initial_profile(config, s.grid));
  s.options = config.integrator;
  s.options.t_end = config.t_end;
  s.options.snapshot_times = snapshot_times(config);
  return s;
}

Oracle resolve_oracle(const RunConfig& config) {
  const bool exact_ok = config.mode == "heat" && config.energy.kind == EnergySpec::Kind::Quadratic &&
                        config.bc.kind == BoundaryKind::HomogeneousDirichlet && config.initial.kind == "sine";
  const bool fd_ok = config.bc.kind != BoundaryKind::GeneralDirichlet && config.initial.kind != "hat";
  switch (config.oracle) {
    case Oracle::Auto: return exact_ok ? Oracle::Exact : (fd_ok ? Oracle::Fd : Oracle::None);
    case Oracle::Fd:
      if (!fd_ok) throw Error(ErrorKind::Configuration, "oracle: fd needs smooth data and fixed boundary data");
      return Oracle::Fd;
    default: return config.oracle;
  }
}

struct Reference {
  std::optional<FourierSolution> exact;
  std::optional<FdSolution> fd;
  std::vector<double> times;

  std::pair<Field, Field> at(std::size_t snapshot) const {
    if (exact) {
      const FourierSolution* e = &*exact;
      return {[e](double x, double t) { return e->u(x, t); }, [e](double x, double t) { return e->ux(x, t); }};
    }
    const FdSolution* f = &*fd;
    return {[f, snapshot](double x, double) { return f->u(snapshot, x); },
            [f, snapshot](double x, double) { return f->ux(snapshot, x); }};
  }
};

Reference make_reference(const RunConfig& config, Oracle oracle) {
  Reference ref;
  ref.times = snapshot_times(config);
  if (oracle == Oracle::Exact) {
    FourierSolution sol;
    sol.coeffs.assign(static_cast<std::size_t>(config.initial.mode), 0.0);
    sol.coeffs.back() = config.initial.amplitude;
    ref.exact = sol;
  } else if (oracle == Oracle::Fd) {
    const InitialData data = config.initial.kind == "cosine"
                                 ? cosine_initial(config.bc.a, config.bc.b, config.initial.coeffs)
                                 : make_initial_data(config.initial);
    ref.fd.emplace(fd_reference(make_energy(config.energy), mobility_of(config), data,
                                {config.bc.kind, config.bc.a, config.bc.b}, config.fd_nx, ref.times));
  }
  return ref;
}

void write_run_outputs(const fs::path& dir, const Trajectory& traj) {
  make_dir(dir);
  {
    auto f = open_file(dir / "monitors.csv");
    write_monitors_csv(f, traj.monitors);
  }
  {
    auto f = open_file(dir / "snapshots.csv");
    write_snapshots_csv(f, traj.snapshots);
  }
  {
    auto f = open_file(dir / "events.jsonl");
    write_events_jsonl(f, traj.events);
  }
  {
    auto f = open_file(dir / "profile.svg");
    write_profile_svg(f, traj.snapshots);
  }
  if (!traj.snapshots.empty()) {
    auto f = open_file(dir / "final_profile.csv");
    write_profile_csv(f, traj.snapshots.back().profile);
  }
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::optional<Setup> setup;
  try {
    setup.emplace(prepare(config, make_grid(config.grid)));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    const Trajectory traj = run(*setup->initial, *setup->model, setup->bc, setup->options);
    const fs::path dir = output_directory(config);
    write_run_outputs(dir, traj);

    nlohmann::ordered_json summary;
    summary["t_end"] = config.t_end;
    summary["m"] = setup->grid->m();
    summary["faces_initial"] = setup->initial->faces();
    summary["faces_final"] = traj.snapshots.back().profile.faces();
    summary["energy_initial"] = traj.monitors.front().energy;
    summary["energy_final"] = traj.monitors.back().energy;
    summary["accepted_steps"] = traj.accepted_steps;
    summary["rejected_steps"] = traj.rejected_steps;
    summary["events"] = traj.events.size();
    auto f = open_file(dir / "summary.json");
    f << summary.dump(2) << '\n';
    out << "run finished: " << traj.accepted_steps << " steps, " << traj.events.size() << " events, "
        << traj.snapshots.back().profile.faces() << " faces; outputs in " << dir.string() << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

ConvergenceResult converge(const RunConfig& config, const std::vector<double>& m_list, unsigned jobs,
                           const fs::path& out_dir) {
  const Oracle oracle = resolve_oracle(config);
  if (oracle == Oracle::None) throw Error(ErrorKind::Configuration, "oracle: a convergence sweep needs an oracle");

  std::vector<std::shared_ptr<const SlopeGrid>> grids;
  std::vector<Setup> setups;
  for (double m : m_list) {
    GridSpec spec = config.grid;
    if (!spec.uniform) throw Error(ErrorKind::Configuration, "grid: a sweep over m needs a uniform grid");
    spec.m = m;
    setups.push_back(prepare(config, make_grid(spec)));
  }
  const Reference ref = make_reference(config, oracle);

  std::vector<std::vector<ConvergenceRow>> rows(m_list.size());
  std::vector<std::exception_ptr> failures(m_list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < m_list.size();) {
      try {
        const Setup& s = setups[k];
        const Trajectory traj = run(*s.initial, *s.model, s.bc, s.options);
        write_run_outputs(out_dir / ("m_" + fmt(m_list[k])), traj);
        for (std::size_t j = 0; j < traj.snapshots.size(); ++j) {
          const auto [u, ux] = ref.at(j);
          rows[k].push_back({s.grid->m(), s.initial->faces(), h1_error(traj.snapshots[j].profile, u, ux, traj.snapshots[j].t)});
        }
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(m_list.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  ConvergenceResult result;
  for (std::size_t k = 0; k < m_list.size(); ++k) {
    double worst = 0.0;
    for (const auto& row : rows[k]) {
      worst = std::max(worst, row.error.h1);
      result.rows.push_back(row);
    }
    result.sup_h1.emplace_back(setups[k].grid->m(), worst);
  }
  result.fit = fit_rate(result.sup_h1);
  result.monotone = true;
  for (std::size_t k = 1; k < result.sup_h1.size(); ++k) {
    result.monotone = result.monotone && result.sup_h1[k].second < result.sup_h1[k - 1].second;
  }
  return result;
}

int cmd_converge(const RunConfig& config, const std::vector<double>& m_list, unsigned jobs, std::ostream& out,
                 std::ostream& err) {
  if (m_list.size() < 3) {
    err << "error: --m needs at least 3 values\n";
    return kExitConfig;
  }
  for (std::size_t k = 0; k < m_list.size(); ++k) {
    if (!(m_list[k] > 0.0) || (k > 0 && !(m_list[k] < m_list[k - 1]))) {
      err << "error: --m values must be positive and decreasing\n";
      return kExitConfig;
    }
  }
  const fs::path dir = output_directory(config);
  ConvergenceResult result;
  try {
    result = converge(config, m_list, jobs, dir);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    const bool setup = e.kind() == ErrorKind::Configuration || e.kind() == ErrorKind::GridTooCoarse ||
                       e.kind() == ErrorKind::Coverage || e.kind() == ErrorKind::NotStrictlyStable;
    return setup ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  try {
    make_dir(dir);
    auto csv = open_file(dir / "convergence.csv");
    csv << "m,N0,t,l2_u,l2_ux,h1\n";
    for (const auto& r : result.rows) {
      csv << fmt(r.m) << ',' << r.n0 << ',' << fmt(r.error.t) << ',' << fmt(r.error.l2_u) << ','
          << fmt(r.error.l2_ux) << ',' << fmt(r.error.h1) << '\n';
    }
    nlohmann::ordered_json rate;
    rate["rate"] = result.fit.rate;
    rate["constant"] = result.fit.constant;
    rate["residual"] = result.fit.residual;
    rate["monotone"] = result.monotone;
    for (auto [m, e] : result.sup_h1) rate["sup_h1"].push_back({{"m", m}, {"h1", e}});
    auto json_out = open_file(dir / "rate.json");
    json_out << rate.dump(2) << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  for (auto [m, e] : result.sup_h1) out << "m = " << fmt(m) << "  sup h1 = " << fmt(e) << '\n';
  out << "fitted rate " << fmt(result.fit.rate) << (result.monotone ? "" : " (errors not monotone in m)") << '\n';
  return kExitOk;
}

int cmd_energy(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const fs::path dir = output_directory(config);
  try {
    nlohmann::ordered_json report;
    if (config.energy.kind != EnergySpec::Kind::Quadratic) {
      const AngularEnergy f = make_angular(config.energy);
      const auto margin = f.stability_margin(0.0, 2.0 * std::numbers::pi, 7201);
      report["stability_margin"] = margin.value;
      report["stability_theta"] = margin.theta;
      if (!(margin.value > 0.0)) {
        err << "error: not-strictly-stable: f + f'' = " << fmt(margin.value) << " at theta = " << fmt(margin.theta)
            << '\n';
        return kExitConfig;
      }
      make_dir(dir);
      std::vector<double> angles, values;
      for (int k = 0; k < 360; ++k) {
        angles.push_back(2.0 * std::numbers::pi * k / 360.0);
        values.push_back(f(angles.back()));
      }
      const WulffPolygon wulff = wulff_polygon(angles, values);
      const auto frank = frank_diagram(f, 720);
      auto frank_svg = open_file(dir / "frank.svg");
      write_polygon_svg(frank_svg, frank, true, "Frank diagram (polar plot of 1/f)");
      auto wulff_svg = open_file(dir / "wulff.svg");
      write_polygon_svg(wulff_svg, wulff.vertices, true, "Wulff polygon");
      report["wulff_area"] = wulff.area();
      report["wulff_facets"] = wulff.vertices.size();
    }
    const GrowthReport growth = check_growth_conditions(make_energy(config.energy));
    report["c1"] = growth.c1;
    report["c2"] = growth.c2;
    report["c3"] = growth.c3;
    report["growth_satisfied"] = growth.satisfied;
    make_dir(dir);
    auto json_out = open_file(dir / "growth.json");
    json_out << report.dump(2) << '\n';
    out << report.dump(2) << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::Io ? kExitRuntime : kExitConfig;
  }
}

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const Setup s = prepare(config, make_grid(config.grid));
    const auto problems = validate(*s.initial);
    for (const auto& v : problems) err << "violation: " << v.message << '\n';
    if (!problems.empty()) return kExitConfig;
    out << "ok: " << s.grid->size() << " slopes, m = " << fmt(s.grid->m()) << ", initial profile with "
        << s.initial->faces() << " faces\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace crystal
