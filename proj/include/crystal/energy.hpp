#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace crystal {

class AdmissibleProfile;

/// Factor converting weighted curvature into vertical velocity.
/// Unit is the pure heat-equation discretization, Geometric is sqrt(1 + s^2).
enum class Mobility { Unit, Geometric };

double mobility(Mobility mode, double slope);

struct SlopeInterval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double s) const { return s >= lo && s <= hi; }
};

/// Strictly convex C^3 energy density W(u_x), with its first three derivatives.
class SmoothEnergy {
 public:
  using Fn = std::function<double(double)>;

  /// Built-in energies get closed forms where the library needs integrals of W.
  enum class Family { Quadratic, Area, General };

  SmoothEnergy(std::string name, Fn eval, Fn d1, Fn d2, Fn d3, SlopeInterval domain = {},
               Family family = Family::General);

  /// W(s) = s^2 / 2.
  static SmoothEnergy quadratic();
  /// W(s) = sqrt(1 + s^2), the isotropic length functional.
  static SmoothEnergy area();

  double operator()(double s) const { return eval_(s); }
  double d1(double s) const { return d1_(s); }
  double d2(double s) const { return d2_(s); }
  double d3(double s) const { return d3_(s); }

  const SlopeInterval& domain() const { return domain_; }
  const std::string& name() const { return name_; }
  Family family() const { return family_; }

 private:
  std::string name_;
  Fn eval_, d1_, d2_, d3_;
  SlopeInterval domain_;
  Family family_;
};

/// Sorted set of admissible slopes. m() is the largest gap between neighbours.
class SlopeGrid {
 public:
  explicit SlopeGrid(std::vector<double> slopes);

  std::size_t size() const { return slopes_.size(); }
  double operator[](std::size_t j) const { return slopes_[j]; }
  std::span<const double> slopes() const { return slopes_; }
  double m() const;
  double min_gap() const;
  double lo() const { return slopes_.front(); }
  double hi() const { return slopes_.back(); }

  /// Index of the grid slope within `tol` of s, or -1.
  int find(double s, double tol = 1e-9) const;
  /// Index of the grid slope nearest to s.
  int nearest(double s) const;

 private:
  std::vector<double> slopes_;
};

/// Uniform grid on [lo, hi] with ceil((hi - lo) / m_target) equal gaps.
SlopeGrid build_slope_grid(double lo, double hi, double m_target);

/// Piecewise-linear W̄ that agrees with W at every grid slope.
class CrystallineEnergy {
 public:
  CrystallineEnergy(SlopeGrid grid, std::vector<double> corner_values);
  CrystallineEnergy(const SmoothEnergy& energy, SlopeGrid grid);

  const SlopeGrid& grid() const { return grid_; }
  double value(int j) const { return corner_values_[static_cast<std::size_t>(j)]; }
  std::span<const double> corner_values() const { return corner_values_; }

  /// Secant slope of W̄ between grid slopes j and k.
  double chord(int j, int k) const;

 private:
  SlopeGrid grid_;
  std::vector<double> corner_values_;
};

/// Difference of chord slopes of W across a face with neighbours s_prev and s_next.
double delta(const SmoothEnergy& energy, double s_prev, double s_cur, double s_next);
double delta(const CrystallineEnergy& energy, int j_prev, int j_cur, int j_next);

/// Vertical velocity of a face: mobility(s_cur) * delta / l * r.
double face_velocity(const SmoothEnergy& energy, double s_prev, double s_cur, double s_next, double l,
                     double r, Mobility mode = Mobility::Geometric);

/// Σ W(s_i) l_i over the faces of the profile.
double total_energy(const CrystallineEnergy& energy, const AdmissibleProfile& profile);

/// ∫_0^s sqrt(1 + y^2) W''(y) dy.
double w_tilde_prime(const SmoothEnergy& energy, double s);

// ---------------------------------------------------------------------------
// Angular description of the interfacial energy f(theta).

class AngularEnergy {
 public:
  using Fn = std::function<double(double)>;

  AngularEnergy(Fn f, Fn f1, Fn f2, Fn f3, std::string name = "angular");

  /// f(theta) = a_0 + Σ_k a_k cos(k theta) + b_k sin(k theta); b[0] multiplies sin(theta).
  static AngularEnergy fourier(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);
  static AngularEnergy constant(double c);

  double operator()(double theta) const { return f_(theta); }
  double d1(double theta) const { return f1_(theta); }
  double d2(double theta) const { return f2_(theta); }
  double d3(double theta) const { return f3_(theta); }
  const std::string& name() const { return name_; }

  /// min of f + f'' over `samples` equispaced angles of [lo, hi].
  struct Margin {
    double value;
    double theta;
  };
  Margin stability_margin(double lo, double hi, std::size_t samples) const;

 private:
  Fn f_, f1_, f2_, f3_;
  std::string name_;
};

/// Angle of the upward normal of a line with slope p, in (0, pi): p = -cot(theta).
double theta_of_slope(double p);
double slope_of_theta(double theta);

/// W(p) = f(theta(p)) sqrt(1 + p^2). Throws NotStrictlyStable if f + f'' <= 0 on (0, pi).
SmoothEnergy angular_to_cartesian(const AngularEnergy& f);

/// Normal velocity of the middle face of three, in terms of its true length L.
double angular_face_velocity(const AngularEnergy& f, double theta_prev, double theta_cur, double theta_next,
                             double length);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct WulffPolygon {
  std::vector<Vec2> vertices;              // counterclockwise
  std::vector<double> facet_angles;        // facet j joins vertices[j] and vertices[j+1]
  std::vector<Vec2> facet_normals;
  std::vector<double> facet_lengths;

  double area() const;
};

/// Intersection of the half-planes x . n(theta_j) <= values_j.
WulffPolygon wulff_polygon(std::span<const double> angles, std::span<const double> values);

/// Length of the facet with outer normal n(theta).
double delta_tilde(const WulffPolygon& polygon, double theta);

/// Jump of the one-sided derivatives of the support function h(theta) = max_v v . n(theta).
double support_derivative_jump(const WulffPolygon& polygon, double theta);

struct GrowthReport {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  bool satisfied = false;
};

/// Sampled constants of c1 <= (1+s^2)^{3/2} W'' <= c2 and (1+s^2)^2 |W'''| <= c3.
GrowthReport check_growth_conditions(const SmoothEnergy& energy, double lo = -20.0, double hi = 20.0,
                                     std::size_t samples = 4001);

/// Polar plot of 1/f.
std::vector<Vec2> frank_diagram(const AngularEnergy& f, std::size_t samples);

// ---------------------------------------------------------------------------

struct EnergySpec {
  enum class Kind { Quadratic, Area, Angular };
  Kind kind = Kind::Quadratic;
  std::vector<double> cos_coeffs;  // a_0, a_1, ...
  std::vector<double> sin_coeffs;  // b_1, b_2, ...
};

AngularEnergy make_angular(const EnergySpec& spec);
SmoothEnergy make_energy(const EnergySpec& spec);

}  // namespace crystal
