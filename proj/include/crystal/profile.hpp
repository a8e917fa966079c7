#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "crystal/energy.hpp"

namespace crystal {

/// Continuous piecewise-linear graph on [0, 1] whose faces carry grid slopes.
///
/// Corner abscissas are the source of truth; face lengths are derived from them so
/// that Σ l_i = 1 holds to rounding. Face i spans [corners[i], corners[i+1]].
class AdmissibleProfile {
 public:
  AdmissibleProfile(std::shared_ptr<const SlopeGrid> grid, std::vector<double> corners,
                    std::vector<int> slope_indices, double left_value);

  std::size_t faces() const { return slope_indices_.size(); }
  const SlopeGrid& grid() const { return *grid_; }
  const std::shared_ptr<const SlopeGrid>& grid_ptr() const { return grid_; }

  std::span<const double> corners() const { return corners_; }
  std::span<const int> slope_indices() const { return slope_indices_; }
  double left_value() const { return left_value_; }

  int slope_index(std::size_t i) const { return slope_indices_[i]; }
  double slope(std::size_t i) const { return (*grid_)[static_cast<std::size_t>(slope_indices_[i])]; }
  double length(std::size_t i) const { return corners_[i + 1] - corners_[i]; }
  std::vector<double> lengths() const;
  double min_length() const;

  /// u at every corner, accumulated from the left boundary value.
  std::vector<double> corner_values() const;

 private:
  std::shared_ptr<const SlopeGrid> grid_;
  std::vector<double> corners_;
  std::vector<int> slope_indices_;
  double left_value_;
};

struct Violation {
  enum class Kind { Size, Endpoints, Monotonicity, ZeroLength, Adjacency, SlopeIndexRange };
  Kind kind;
  int index;  // face or junction index the violation refers to
  std::string message;
};

struct ValidateOptions {
  /// Zero-length faces exist transiently right after a boundary face is created.
  bool allow_zero_length = false;
  double endpoint_tol = 1e-12;
};

std::vector<Violation> validate(const AdmissibleProfile& profile, const ValidateOptions& options = {});
inline bool is_valid(const AdmissibleProfile& profile, const ValidateOptions& options = {}) {
  return validate(profile, options).empty();
}

double evaluate(const AdmissibleProfile& profile, double x);
/// At a corner the slope of the face on the left is returned.
double evaluate_slope(const AdmissibleProfile& profile, double x);
/// Index of the face containing x, with corners assigned to the face on the left.
std::size_t face_at(const AdmissibleProfile& profile, double x);

/// Virtual faces beyond the domain that encode the boundary condition.
struct GhostExtension {
  int left_ghost_idx = 0;
  int right_ghost_idx = 0;
  double r_left = 1.0;
  double r_right = 1.0;
};

// ---------------------------------------------------------------------------
// Face surgery

enum class CollapseCase {
  CaseI,          // an interior face vanishes and its neighbours join
  CaseII,         // two adjacent interior faces vanish, outer neighbours meet
  BoundaryCaseI,  // the first or last face vanishes
  BoundaryCaseII, // the two outermost faces vanish together
};

std::string_view to_string(CollapseCase kind);

struct CollapseSite {
  int first = 0;  // index of the first vanishing face
  int count = 1;  // 1 or 2
  CollapseCase kind = CollapseCase::CaseI;
};

/// Groups vanishing faces into sites and checks each against the admissible patterns.
/// Throws UnsupportedCollapse for three or more adjacent faces or mismatched slopes.
std::vector<CollapseSite> classify_collapses(const AdmissibleProfile& profile, std::vector<int> faces);

/// Applies every site in one pass; sites must be disjoint and non-touching.
AdmissibleProfile apply_collapses(const AdmissibleProfile& profile, std::span<const CollapseSite> sites);

/// Removes the vanishing face i (and its vanishing left neighbour, if any).
AdmissibleProfile merge_collapsed(const AdmissibleProfile& profile, int i, double tol);

enum class Side { Left, Right };

/// Inserts a zero-length face with the given slope index at one end of the domain.
AdmissibleProfile insert_boundary_face(const AdmissibleProfile& profile, Side side, int slope_idx);

// ---------------------------------------------------------------------------
// Initial data

struct InitialData {
  std::string name;
  std::function<double(double)> u, ux, uxx;
};

enum class BoundaryKind { HomogeneousDirichlet, Neumann, GeneralDirichlet };

/// Admissible approximation of smooth initial data built from tangent lines.
///
/// Each admissible slope crossed by u0' contributes the tangent line at the point
/// where u0' takes that slope. Inflection points of u0 contribute a line through
/// the point with the first grid slope beyond the extreme value of u0'. Dirichlet
/// ends use a line through the boundary point with the first grid slope beyond
/// u0'(end); Neumann ends use the tangent at the end, whose slope must be admissible.
AdmissibleProfile build_initial(const InitialData& data, std::shared_ptr<const SlopeGrid> grid,
                                BoundaryKind kind);

InitialData sine_initial(double amplitude, int mode = 1);
InitialData parabola_initial(double amplitude);
/// Σ_k b_k sin(kπx) with coeffs[k-1] = b_k.
InitialData sine_series_initial(std::vector<double> coeffs);
/// a x + (b - a) x² / 2 + Σ_k c_k cos(kπx): slope a at 0 and b at 1.
InitialData cosine_initial(double a, double b, std::vector<double> coeffs);
/// Natural cubic spline through (x_k, u_k).
InitialData spline_initial(std::vector<double> x, std::vector<double> u);

}  // namespace crystal
