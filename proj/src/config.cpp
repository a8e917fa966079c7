#include "crystal/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "crystal/error.hpp"

namespace crystal {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& message) {
  throw Error(ErrorKind::Configuration, path + ": " + message);
}

void only_keys(const json& object, const std::string& path, std::initializer_list<const char*> allowed) {
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& [key, value] : object.items()) {
    if (!names.count(key)) bad(path.empty() ? key : path + "." + key, "unknown key");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(path, "expected a finite number");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) bad(path, "must be positive");
  return v;
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) bad(path, "expected a nonnegative integer");
  return static_cast<std::size_t>(j.get<long long>());
}

EnergySpec parse_energy(const json& j) {
  EnergySpec spec;
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "quadratic") spec.kind = EnergySpec::Kind::Quadratic;
    else if (name == "area") spec.kind = EnergySpec::Kind::Area;
    else bad("energy", "unknown builtin '" + name + "' (quadratic, area, or {\"angular\": ...})");
    return spec;
  }
  if (!j.is_object()) bad("energy", "expected a builtin name or an object");
  only_keys(j, "energy", {"angular"});
  if (!j.contains("angular")) bad("energy", "object form needs an 'angular' entry");
  const json& a = j["angular"];
  if (!a.is_object()) bad("energy.angular", "expected an object");
  only_keys(a, "energy.angular", {"cos", "sin"});
  spec.kind = EnergySpec::Kind::Angular;
  if (a.contains("cos")) spec.cos_coeffs = numbers(a["cos"], "energy.angular.cos");
  if (a.contains("sin")) spec.sin_coeffs = numbers(a["sin"], "energy.angular.sin");
  if (spec.cos_coeffs.empty()) bad("energy.angular.cos", "needs at least the constant term");
  return spec;
}

GridSpec parse_grid(const json& j) {
  GridSpec spec;
  if (!j.is_object()) bad("grid", "expected an object");
  only_keys(j, "grid", {"lo", "hi", "m", "uniform", "slopes"});
  if (j.contains("slopes")) {
    spec.uniform = false;
    spec.slopes = numbers(j["slopes"], "grid.slopes");
    if (spec.slopes.size() < 3) bad("grid.slopes", "needs at least 3 slopes");
    for (std::size_t k = 1; k < spec.slopes.size(); ++k) {
      if (!(spec.slopes[k] > spec.slopes[k - 1])) bad("grid.slopes", "must be strictly increasing");
    }
    spec.lo = spec.slopes.front();
    spec.hi = spec.slopes.back();
    spec.m = 0.0;
    for (std::size_t k = 1; k < spec.slopes.size(); ++k) spec.m = std::max(spec.m, spec.slopes[k] - spec.slopes[k - 1]);
    if (j.contains("uniform") && j["uniform"] != false) bad("grid.uniform", "an explicit slope list is not uniform");
    return spec;
  }
  if (j.contains("uniform")) {
    if (!j["uniform"].is_boolean()) bad("grid.uniform", "expected true or false");
    if (!j["uniform"].get<bool>()) bad("grid.uniform", "a non-uniform grid needs an explicit 'slopes' list");
  }
  if (j.contains("lo")) spec.lo = number(j["lo"], "grid.lo");
  if (j.contains("hi")) spec.hi = number(j["hi"], "grid.hi");
  if (j.contains("m")) spec.m = positive(j["m"], "grid.m");
  if (!(spec.lo < spec.hi)) bad("grid", "lo must be smaller than hi");
  return spec;
}

InitialSpec parse_initial(const json& j) {
  InitialSpec spec;
  if (j.is_string()) {
    spec.kind = j.get<std::string>();
  } else if (j.is_object()) {
    only_keys(j, "initial", {"kind", "amplitude", "mode", "x", "u", "coeffs"});
    if (!j.contains("kind")) bad("initial.kind", "missing");
    spec.kind = text(j["kind"], "initial.kind");
    if (j.contains("amplitude")) spec.amplitude = number(j["amplitude"], "initial.amplitude");
    if (j.contains("mode")) {
      if (!j["mode"].is_number_integer() || j["mode"].get<int>() < 1) bad("initial.mode", "expected a positive integer");
      spec.mode = j["mode"].get<int>();
    }
    if (j.contains("x")) spec.x = numbers(j["x"], "initial.x");
    if (j.contains("u")) spec.u = numbers(j["u"], "initial.u");
    if (j.contains("coeffs")) spec.coeffs = numbers(j["coeffs"], "initial.coeffs");
  } else {
    bad("initial", "expected a builtin name or an object");
  }
  static const std::set<std::string> kinds{"sine", "parabola", "hat", "table", "cosine"};
  if (!kinds.count(spec.kind)) bad("initial.kind", "unknown initial data '" + spec.kind + "'");
  if (spec.kind == "table") {
    if (spec.x.size() < 3 || spec.x.size() != spec.u.size()) bad("initial", "table needs matching x and u with >= 3 samples");
  }
  return spec;
}

EndMotion parse_motion(const json& j, const std::string& path) {
  EndMotion m;
  if (!j.is_object()) bad(path, "expected an object");
  only_keys(j, path, {"offset", "amplitude", "omega"});
  if (j.contains("offset")) m.offset = number(j["offset"], path + ".offset");
  if (j.contains("amplitude")) m.amplitude = number(j["amplitude"], path + ".amplitude");
  if (j.contains("omega")) m.omega = number(j["omega"], path + ".omega");
  return m;
}

BoundarySpec parse_bc(const json& j) {
  BoundarySpec spec;
  if (j.is_string()) {
    if (j.get<std::string>() != "dirichlet0") bad("bc", "unknown boundary condition '" + j.get<std::string>() + "'");
    return spec;
  }
  if (!j.is_object() || j.size() != 1) bad("bc", "expected \"dirichlet0\", {\"neumann\": ...} or {\"dirichlet\": ...}");
  only_keys(j, "bc", {"neumann", "dirichlet"});
  if (j.contains("neumann")) {
    const json& n = j["neumann"];
    if (!n.is_object()) bad("bc.neumann", "expected an object");
    only_keys(n, "bc.neumann", {"a", "b"});
    if (!n.contains("a") || !n.contains("b")) bad("bc.neumann", "needs both a and b");
    spec.kind = BoundaryKind::Neumann;
    spec.a = number(n["a"], "bc.neumann.a");
    spec.b = number(n["b"], "bc.neumann.b");
  } else {
    const json& d = j["dirichlet"];
    if (!d.is_object()) bad("bc.dirichlet", "expected an object");
    only_keys(d, "bc.dirichlet", {"left", "right"});
    spec.kind = BoundaryKind::GeneralDirichlet;
    if (d.contains("left")) spec.left = parse_motion(d["left"], "bc.dirichlet.left");
    if (d.contains("right")) spec.right = parse_motion(d["right"], "bc.dirichlet.right");
  }
  return spec;
}

IntegratorOptions parse_integrator(const json& j, IntegratorOptions opt) {
  if (!j.is_object()) bad("integrator", "expected an object");
  only_keys(j, "integrator", {"dt_max", "safety", "collapse_tol", "event_time_tol"});
  if (j.contains("dt_max")) opt.dt_max = positive(j["dt_max"], "integrator.dt_max");
  if (j.contains("safety")) {
    opt.safety = positive(j["safety"], "integrator.safety");
    if (opt.safety > 1.0) bad("integrator.safety", "must not exceed 1");
  }
  if (j.contains("collapse_tol")) opt.collapse_tol = positive(j["collapse_tol"], "integrator.collapse_tol");
  if (j.contains("event_time_tol")) opt.event_time_tol = positive(j["event_time_tol"], "integrator.event_time_tol");
  return opt;
}

}  // namespace

RunConfig parse_config(const std::string& source) {
  json root;
  try {
    root = json::parse(source);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Configuration, std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) bad("(root)", "expected a JSON object");
  only_keys(root, "", {"energy", "mode", "grid", "initial", "bc", "t_end", "snapshots", "output", "seed", "oracle",
                       "fd_nx", "integrator"});

  RunConfig config;
  for (const char* key : {"energy", "mode", "grid", "initial", "bc", "t_end"}) {
    if (!root.contains(key)) bad(key, "missing");
  }
  config.energy = parse_energy(root["energy"]);
  config.mode = text(root["mode"], "mode");
  if (config.mode != "heat" && config.mode != "curvature") bad("mode", "expected heat or curvature");
  config.grid = parse_grid(root["grid"]);
  config.initial = parse_initial(root["initial"]);
  config.bc = parse_bc(root["bc"]);
  config.t_end = positive(root["t_end"], "t_end");
  if (root.contains("snapshots")) {
    config.snapshots = count(root["snapshots"], "snapshots");
    if (config.snapshots < 1) bad("snapshots", "must be at least 1");
  }
  if (root.contains("output")) config.output = text(root["output"], "output");
  if (root.contains("seed")) config.seed = count(root["seed"], "seed");
  if (root.contains("oracle")) {
    const std::string name = text(root["oracle"], "oracle");
    if (name == "auto") config.oracle = Oracle::Auto;
    else if (name == "exact") config.oracle = Oracle::Exact;
    else if (name == "fd") config.oracle = Oracle::Fd;
    else if (name == "none") config.oracle = Oracle::None;
    else bad("oracle", "expected auto, exact, fd or none");
  }
  if (root.contains("fd_nx")) {
    config.fd_nx = count(root["fd_nx"], "fd_nx");
    if (config.fd_nx < 64) bad("fd_nx", "must be at least 64");
  }
  config.integrator.t_end = config.t_end;
  if (root.contains("integrator")) config.integrator = parse_integrator(root["integrator"], config.integrator);

  if (config.initial.kind == "cosine" && config.bc.kind != BoundaryKind::Neumann) {
    bad("initial.kind", "cosine initial data needs a Neumann boundary condition");
  }
  if (config.bc.kind == BoundaryKind::Neumann && config.initial.kind != "cosine" && config.initial.kind != "table") {
    bad("initial.kind", "Neumann runs need cosine or table initial data");
  }
  if (config.oracle == Oracle::Exact &&
      (config.mode != "heat" || config.energy.kind != EnergySpec::Kind::Quadratic ||
       config.bc.kind != BoundaryKind::HomogeneousDirichlet || config.initial.kind != "sine")) {
    bad("oracle", "the exact oracle covers heat mode with quadratic energy, dirichlet0 and sine data only");
  }
  return config;
}

Mobility mobility_of(const RunConfig& config) {
  return config.mode == "heat" ? Mobility::Unit : Mobility::Geometric;
}

std::shared_ptr<const SlopeGrid> make_grid(const GridSpec& spec) {
  if (!spec.uniform) return std::make_shared<const SlopeGrid>(spec.slopes);
  return std::make_shared<const SlopeGrid>(build_slope_grid(spec.lo, spec.hi, spec.m));
}

BoundaryCondition make_boundary(const BoundarySpec& spec) {
  switch (spec.kind) {
    case BoundaryKind::HomogeneousDirichlet: return HomogeneousDirichlet{};
    case BoundaryKind::Neumann: return Neumann{spec.a, spec.b};
    case BoundaryKind::GeneralDirichlet: break;
  }
  auto value = [](EndMotion m) { return [m](double t) { return m.offset + m.amplitude * std::sin(m.omega * t); }; };
  auto rate = [](EndMotion m) { return [m](double t) { return m.amplitude * m.omega * std::cos(m.omega * t); }; };
  return GeneralDirichlet{value(spec.left), rate(spec.left), value(spec.right), rate(spec.right)};
}

InitialData make_initial_data(const InitialSpec& spec) {
  if (spec.kind == "sine") return sine_initial(spec.amplitude, spec.mode);
  if (spec.kind == "parabola") return parabola_initial(spec.amplitude);
  if (spec.kind == "table") return spline_initial(spec.x, spec.u);
  throw Error(ErrorKind::Configuration, "initial data '" + spec.kind + "' has no smooth form here");
}

AdmissibleProfile make_initial_profile(const RunConfig& config, std::shared_ptr<const SlopeGrid> grid) {
  const InitialSpec& spec = config.initial;
  if (spec.kind == "hat") {
    const int zero = grid->find(0.0);
    if (zero < 1 || zero + 1 >= static_cast<int>(grid->size())) {
      throw Error(ErrorKind::Configuration, "the hat needs a grid containing 0 and a slope on each side");
    }
    AdmissibleProfile hat(grid, {0.0, 0.25, 0.75, 1.0}, {zero + 1, zero, zero - 1}, 0.0);
    if (config.bc.kind == BoundaryKind::HomogeneousDirichlet && std::abs(hat.corner_values().back()) > 1e-12) {
      throw Error(ErrorKind::Configuration, "the hat does not return to 0 on this asymmetric grid");
    }
    if (config.bc.kind == BoundaryKind::Neumann) {
      throw Error(ErrorKind::Configuration, "the hat is not compatible with Neumann data");
    }
    return hat;
  }

  InitialData data = spec.kind == "cosine" ? cosine_initial(config.bc.a, config.bc.b, spec.coeffs)
                                           : make_initial_data(spec);
  if (config.bc.kind == BoundaryKind::HomogeneousDirichlet &&
      (std::abs(data.u(0.0)) > 1e-9 || std::abs(data.u(1.0)) > 1e-9)) {
    throw Error(ErrorKind::Configuration, "dirichlet0 needs initial data vanishing at both ends");
  }
  if (config.bc.kind == BoundaryKind::GeneralDirichlet) {
    const auto bc = std::get<GeneralDirichlet>(make_boundary(config.bc));
    if (std::abs(data.u(0.0) - bc.a(0.0)) > 1e-9 || std::abs(data.u(1.0) - bc.b(0.0)) > 1e-9) {
      throw Error(ErrorKind::Configuration, "initial data must match the prescribed end values at t = 0");
    }
  }
  return build_initial(data, std::move(grid), config.bc.kind);
}

std::vector<double> snapshot_times(const RunConfig& config) {
  std::vector<double> times;
  for (std::size_t k = 0; k <= config.snapshots; ++k) {
    times.push_back(config.t_end * static_cast<double>(k) / static_cast<double>(config.snapshots));
  }
  return times;
}

}  // namespace crystal
