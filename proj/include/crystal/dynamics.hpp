#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "crystal/energy.hpp"
#include "crystal/profile.hpp"

namespace crystal {

/// Energy, its crystalline restriction to the slope grid, and the mobility law.
struct Model {
  Model(SmoothEnergy W, const SlopeGrid& grid, Mobility mode);

  SmoothEnergy energy;
  CrystallineEnergy crystalline;
  Mobility mobility;
};

struct HomogeneousDirichlet {};

struct Neumann {
  double a = 0.0;
  double b = 0.0;
};

struct GeneralDirichlet {
  std::function<double(double)> a, a_dot, b, b_dot;
};

using BoundaryCondition = std::variant<HomogeneousDirichlet, Neumann, GeneralDirichlet>;

BoundaryKind boundary_kind(const BoundaryCondition& bc);

struct RateVector {
  std::vector<double> face_velocities;    // N
  std::vector<double> corner_velocities;  // N - 1, interior corners
  std::vector<double> length_rates;       // N
  std::vector<double> deltas;             // N, zero for inflection faces
  std::vector<char> prescribed;           // faces whose velocity is imposed by the boundary data
  GhostExtension ghost;
  double left_value_rate = 0.0;
};

struct Coefficients {
  double c0, c_minus, c_plus;
};

Coefficients coefficients(double s_prev, double s_cur, double s_next);
double corner_velocity(double ut_i, double ut_next, double s_i, double s_next);

GhostExtension boundary_homogeneous_dirichlet(const AdmissibleProfile& profile);
GhostExtension boundary_neumann(const AdmissibleProfile& profile, double a, double b);

enum class CreationCase { CaseI, CaseII };
std::string_view to_string(CreationCase kind);

struct GeneralDirichletState {
  GhostExtension ghost;
  double a_dot = 0.0;
  double b_dot = 0.0;
  std::optional<CreationCase> left, right;
};

/// Ghost slopes and r factors for prescribed end velocities a'(t), b'(t).
///
/// Case I is flagged when the end velocity is nonzero and the slope ordering of the
/// two outermost faces disagrees with its sign; Case II when r exceeds 1 + 1e-9.
GeneralDirichletState boundary_general_dirichlet(const AdmissibleProfile& profile, const Model& model,
                                                 const GeneralDirichlet& bc, double t);

AdmissibleProfile creation_apply(const AdmissibleProfile& profile, Side side, CreationCase kind,
                                 const GhostExtension& ghost);

/// Right-hand side of the face-length system at time t.
/// A single face is stationary under every boundary condition.
RateVector assemble_rates(const AdmissibleProfile& profile, const Model& model, const BoundaryCondition& bc,
                          double t);

}  // namespace crystal
