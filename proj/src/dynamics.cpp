#include "crystal/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "crystal/error.hpp"

namespace crystal {

Model::Model(SmoothEnergy W, const SlopeGrid& grid, Mobility mode)
    : energy(std::move(W)), crystalline(energy, grid), mobility(mode) {}

BoundaryKind boundary_kind(const BoundaryCondition& bc) {
  if (std::holds_alternative<Neumann>(bc)) return BoundaryKind::Neumann;
  if (std::holds_alternative<GeneralDirichlet>(bc)) return BoundaryKind::GeneralDirichlet;
  return BoundaryKind::HomogeneousDirichlet;
}

Coefficients coefficients(double s_prev, double s_cur, double s_next) {
  if (s_prev == s_cur || s_cur == s_next) {
    throw Error(ErrorKind::InvalidFaceConfiguration, "coincident slopes in coefficient stencil");
  }
  const double left = 1.0 / (s_cur - s_prev);
  const double right = 1.0 / (s_next - s_cur);
  return {left + right, -left, -right};
}

double corner_velocity(double ut_i, double ut_next, double s_i, double s_next) {
  if (s_i == s_next) throw Error(ErrorKind::InvalidFaceConfiguration, "corner between equal slopes");
  return -(ut_next - ut_i) / (s_next - s_i);
}

GhostExtension boundary_homogeneous_dirichlet(const AdmissibleProfile& p) {
  const std::size_t n = p.faces();
  if (n < 2) throw Error(ErrorKind::DegenerateState, "odd reflection needs at least two faces");
  return {p.slope_index(1), p.slope_index(n - 2), 1.0, 1.0};
}

namespace {

// Slope index next to `end` on the far side from `inner`.
int outward_neighbour(const SlopeGrid& grid, int end, int inner, const char* which) {
  const int ghost = end - (inner - end);
  if (ghost < 0 || ghost >= static_cast<int>(grid.size())) {
    std::ostringstream msg;
    msg << which << " ghost face needs a grid slope beyond " << grid[static_cast<std::size_t>(end)];
    throw Error(ErrorKind::GridCoverage, msg.str());
  }
  return ghost;
}

double slope_at(const SlopeGrid& grid, int j) { return grid[static_cast<std::size_t>(j)]; }

}  // namespace

GhostExtension boundary_neumann(const AdmissibleProfile& p, double a, double b) {
  const std::size_t n = p.faces();
  if (n < 2) throw Error(ErrorKind::DegenerateState, "Neumann extension needs at least two faces");
  const SlopeGrid& grid = p.grid();
  if (std::abs(p.slope(0) - a) > 1e-9 || std::abs(p.slope(n - 1) - b) > 1e-9) {
    std::ostringstream msg;
    msg << "end slopes (" << p.slope(0) << ", " << p.slope(n - 1) << ") differ from the boundary data (" << a
        << ", " << b << ")";
    throw Error(ErrorKind::InternalConsistency, msg.str());
  }

  GhostExtension g;
  const int j1 = p.slope_index(0);
  const int j2 = p.slope_index(1);
  g.left_ghost_idx = outward_neighbour(grid, j1, j2, "left");
  g.r_left = (slope_at(grid, j2) - slope_at(grid, j1)) / (slope_at(grid, j2) - slope_at(grid, g.left_ghost_idx));

  const int jn = p.slope_index(n - 1);
  const int jm = p.slope_index(n - 2);
  g.right_ghost_idx = outward_neighbour(grid, jn, jm, "right");
  g.r_right = (slope_at(grid, jm) - slope_at(grid, jn)) / (slope_at(grid, jm) - slope_at(grid, g.right_ghost_idx));
  return g;
}

std::string_view to_string(CreationCase kind) {
  return kind == CreationCase::CaseI ? "creation-case-i" : "creation-case-ii";
}

GeneralDirichletState boundary_general_dirichlet(const AdmissibleProfile& p, const Model& model,
                                                 const GeneralDirichlet& bc, double t) {
  const std::size_t n = p.faces();
  if (n < 2) throw Error(ErrorKind::DegenerateState, "prescribed end velocities need at least two faces");
  const SlopeGrid& grid = p.grid();

  GeneralDirichletState state;
  state.a_dot = bc.a_dot(t);
  state.b_dot = bc.b_dot(t);

  // One end, seen from inside: `end` is the boundary face, `inner` its neighbour, and
  // `velocity` the prescribed u_t expressed so that a positive value pairs with inner > end.
  auto side = [&](std::size_t end, std::size_t inner, double velocity, int& ghost, double& r,
                  std::optional<CreationCase>& flag) {
    const int je = p.slope_index(end);
    const int ji = p.slope_index(inner);
    const double ordering = ji > je ? 1.0 : -1.0;
    r = 1.0;
    if (velocity == 0.0) {
      ghost = ji;
      return;
    }
    if ((velocity > 0.0) != (ordering > 0.0)) {
      ghost = ji;
      flag = CreationCase::CaseI;
      return;
    }
    ghost = outward_neighbour(grid, je, ji, end == 0 ? "left" : "right");
    const double d = delta(model.crystalline, ghost, je, ji);
    const double l = p.length(end);
    r = l * velocity / (mobility(model.mobility, slope_at(grid, je)) * d);
    if (r > 1.0 + 1e-9) flag = CreationCase::CaseII;
  };

  // Mirroring x -> 1 - x flips the sign convention of the right end.
  side(0, 1, state.a_dot, state.ghost.left_ghost_idx, state.ghost.r_left, state.left);
  side(n - 1, n - 2, -state.b_dot, state.ghost.right_ghost_idx, state.ghost.r_right, state.right);
  return state;
}

AdmissibleProfile creation_apply(const AdmissibleProfile& p, Side side, CreationCase kind,
                                 const GhostExtension& ghost) {
  const std::size_t n = p.faces();
  if (n < 2) throw Error(ErrorKind::DegenerateState, "face creation needs at least two faces");
  int slope_idx = 0;
  if (kind == CreationCase::CaseI) {
    slope_idx = side == Side::Left ? p.slope_index(1) : p.slope_index(n - 2);
  } else {
    slope_idx = side == Side::Left ? ghost.left_ghost_idx : ghost.right_ghost_idx;
  }
  return insert_boundary_face(p, side, slope_idx);
}

RateVector assemble_rates(const AdmissibleProfile& p, const Model& model, const BoundaryCondition& bc, double t) {
  const std::size_t n = p.faces();
  RateVector rates;
  rates.face_velocities.assign(n, 0.0);
  rates.length_rates.assign(n, 0.0);
  rates.deltas.assign(n, 0.0);
  rates.prescribed.assign(n, 0);
  if (n == 1) return rates;

  const SlopeGrid& grid = p.grid();
  const auto& W = model.crystalline;

  GhostExtension ghost;
  const GeneralDirichlet* general = std::get_if<GeneralDirichlet>(&bc);
  double a_dot = 0.0;
  double b_dot = 0.0;
  if (general) {
    a_dot = general->a_dot(t);
    b_dot = general->b_dot(t);
    rates.prescribed[0] = 1;
    rates.prescribed[n - 1] = 1;
  } else if (const auto* neumann = std::get_if<Neumann>(&bc)) {
    ghost = boundary_neumann(p, neumann->a, neumann->b);
  } else {
    ghost = boundary_homogeneous_dirichlet(p);
  }
  rates.ghost = ghost;

  for (std::size_t i = 0; i < n; ++i) {
    if (rates.prescribed[i]) {
      rates.face_velocities[i] = i == 0 ? a_dot : b_dot;
      continue;
    }
    const int prev = i == 0 ? ghost.left_ghost_idx : p.slope_index(i - 1);
    const int next = i + 1 == n ? ghost.right_ghost_idx : p.slope_index(i + 1);
    const int cur = p.slope_index(i);
    const double d = delta(W, prev, cur, next);
    rates.deltas[i] = d;
    if (d == 0.0) continue;
    const double l = p.length(i);
    if (!(l > 0.0)) {
      throw Error(ErrorKind::StepRejected, "face " + std::to_string(i) + " reached zero length with nonzero delta");
    }
    const double r = i == 0 ? ghost.r_left : (i + 1 == n ? ghost.r_right : 1.0);
    rates.face_velocities[i] = mobility(model.mobility, slope_at(grid, cur)) * d / l * r;
  }

  const auto& u = rates.face_velocities;
  rates.corner_velocities.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    rates.corner_velocities[i] = corner_velocity(u[i], u[i + 1], p.slope(i), p.slope(i + 1));
  }
  rates.length_rates[0] = rates.corner_velocities[0];
  rates.length_rates[n - 1] = -rates.corner_velocities[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto c = coefficients(p.slope(i - 1), p.slope(i), p.slope(i + 1));
    rates.length_rates[i] = c.c0 * u[i] + c.c_minus * u[i - 1] + c.c_plus * u[i + 1];
  }
  rates.left_value_rate = u[0];
  return rates;
}

}  // namespace crystal
