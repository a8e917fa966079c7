#include "crystal/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "crystal/error.hpp"
#include "crystal/profile.hpp"

namespace crystal {

double mobility(Mobility mode, double slope) {
  return mode == Mobility::Unit ? 1.0 : std::sqrt(1.0 + slope * slope);
}

SmoothEnergy::SmoothEnergy(std::string name, Fn eval, Fn d1, Fn d2, Fn d3, SlopeInterval domain,
                           Family family)
    : name_(std::move(name)),
      eval_(std::move(eval)),
      d1_(std::move(d1)),
      d2_(std::move(d2)),
      d3_(std::move(d3)),
      domain_(domain),
      family_(family) {}

SmoothEnergy SmoothEnergy::quadratic() {
  return SmoothEnergy(
      "quadratic", [](double s) { return 0.5 * s * s; }, [](double s) { return s; },
      [](double) { return 1.0; }, [](double) { return 0.0; }, {}, Family::Quadratic);
}

SmoothEnergy SmoothEnergy::area() {
  return SmoothEnergy(
      "area", [](double s) { return std::sqrt(1.0 + s * s); },
      [](double s) { return s / std::sqrt(1.0 + s * s); },
      [](double s) { return std::pow(1.0 + s * s, -1.5); },
      [](double s) { return -3.0 * s * std::pow(1.0 + s * s, -2.5); }, {}, Family::Area);
}

// ---------------------------------------------------------------------------

SlopeGrid::SlopeGrid(std::vector<double> slopes) : slopes_(std::move(slopes)) {
  if (slopes_.size() < 3) {
    throw Error(ErrorKind::GridTooCoarse, "a slope grid needs at least 3 slopes, got " +
                                              std::to_string(slopes_.size()));
  }
  for (std::size_t j = 1; j < slopes_.size(); ++j) {
    if (!(slopes_[j] > slopes_[j - 1])) {
      throw Error(ErrorKind::InvalidFaceConfiguration,
                  "slopes must be strictly increasing (index " + std::to_string(j) + ")");
    }
  }
}

double SlopeGrid::m() const {
  double gap = 0.0;
  for (std::size_t j = 1; j < slopes_.size(); ++j) gap = std::max(gap, slopes_[j] - slopes_[j - 1]);
  return gap;
}

double SlopeGrid::min_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < slopes_.size(); ++j) gap = std::min(gap, slopes_[j] - slopes_[j - 1]);
  return gap;
}

int SlopeGrid::find(double s, double tol) const {
  const int j = nearest(s);
  return std::abs(slopes_[static_cast<std::size_t>(j)] - s) <= tol ? j : -1;
}

int SlopeGrid::nearest(double s) const {
  auto it = std::lower_bound(slopes_.begin(), slopes_.end(), s);
  if (it == slopes_.begin()) return 0;
  if (it == slopes_.end()) return static_cast<int>(slopes_.size()) - 1;
  const auto j = static_cast<int>(it - slopes_.begin());
  return (s - *(it - 1) <= *it - s) ? j - 1 : j;
}

SlopeGrid build_slope_grid(double lo, double hi, double m_target) {
  if (!(lo < hi) || !(m_target > 0.0)) {
    throw Error(ErrorKind::Domain, "slope grid needs lo < hi and m > 0");
  }
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / m_target - 1e-12));
  if (n + 1 < 3) {
    std::ostringstream msg;
    msg << "m = " << m_target << " leaves fewer than 3 slopes on [" << lo << ", " << hi << "]";
    throw Error(ErrorKind::GridTooCoarse, msg.str());
  }
  std::vector<double> slopes(n + 1);
  const double nd = static_cast<double>(n);
  for (std::size_t k = 0; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    slopes[k] = (lo * (nd - kd) + hi * kd) / nd;
  }
  return SlopeGrid(std::move(slopes));
}

// ---------------------------------------------------------------------------

CrystallineEnergy::CrystallineEnergy(SlopeGrid grid, std::vector<double> corner_values)
    : grid_(std::move(grid)), corner_values_(std::move(corner_values)) {
  if (corner_values_.size() != grid_.size()) {
    throw Error(ErrorKind::InvalidEnergy, "one corner value per grid slope is required");
  }
}

CrystallineEnergy::CrystallineEnergy(const SmoothEnergy& energy, SlopeGrid grid) : grid_(std::move(grid)) {
  corner_values_.reserve(grid_.size());
  for (double s : grid_.slopes()) {
    if (!energy.domain().contains(s)) {
      throw Error(ErrorKind::Domain, "grid slope " + std::to_string(s) + " outside the energy domain");
    }
    corner_values_.push_back(energy(s));
  }
}

double CrystallineEnergy::chord(int j, int k) const {
  if (j == k) throw Error(ErrorKind::InvalidFaceConfiguration, "chord of coincident slopes");
  return (value(k) - value(j)) / (grid_[static_cast<std::size_t>(k)] - grid_[static_cast<std::size_t>(j)]);
}

// ---------------------------------------------------------------------------

double delta(const SmoothEnergy& energy, double s_prev, double s_cur, double s_next) {
  if (s_cur == s_prev || s_cur == s_next) {
    throw Error(ErrorKind::InvalidFaceConfiguration, "adjacent faces share a slope");
  }
  if (s_prev == s_next) return 0.0;
  const double w_prev = energy(s_prev);
  const double w_cur = energy(s_cur);
  const double w_next = energy(s_next);
  return (w_next - w_cur) / (s_next - s_cur) - (w_cur - w_prev) / (s_cur - s_prev);
}

double delta(const CrystallineEnergy& energy, int j_prev, int j_cur, int j_next) {
  if (j_cur == j_prev || j_cur == j_next) {
    throw Error(ErrorKind::InvalidFaceConfiguration, "adjacent faces share a slope index");
  }
  if (j_prev == j_next) return 0.0;
  return energy.chord(j_cur, j_next) - energy.chord(j_prev, j_cur);
}

double face_velocity(const SmoothEnergy& energy, double s_prev, double s_cur, double s_next, double l,
                     double r, Mobility mode) {
  if (!(l > 0.0)) throw Error(ErrorKind::DegenerateFace, "face length must be positive");
  return mobility(mode, s_cur) * delta(energy, s_prev, s_cur, s_next) / l * r;
}

double total_energy(const CrystallineEnergy& energy, const AdmissibleProfile& profile) {
  double sum = 0.0;
  for (std::size_t i = 0; i < profile.faces(); ++i) sum += energy.value(profile.slope_index(i)) * profile.length(i);
  return sum;
}

double w_tilde_prime(const SmoothEnergy& energy, double s) {
  switch (energy.family()) {
    case SmoothEnergy::Family::Area:
      return std::atan(s);
    case SmoothEnergy::Family::Quadratic:
      return 0.5 * (s * std::sqrt(1.0 + s * s) + std::asinh(s));
    case SmoothEnergy::Family::General:
      break;
  }
  if (s == 0.0) return 0.0;
  auto integrand = [&energy](double y) { return std::sqrt(1.0 + y * y) * energy.d2(y); };
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, s, 15, 1e-12, &error);
}

// ---------------------------------------------------------------------------

AngularEnergy::AngularEnergy(Fn f, Fn f1, Fn f2, Fn f3, std::string name)
    : f_(std::move(f)), f1_(std::move(f1)), f2_(std::move(f2)), f3_(std::move(f3)), name_(std::move(name)) {}

AngularEnergy AngularEnergy::fourier(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs) {
  if (cos_coeffs.empty()) cos_coeffs.push_back(0.0);
  auto series = std::make_shared<const std::pair<std::vector<double>, std::vector<double>>>(
      std::move(cos_coeffs), std::move(sin_coeffs));
  // order-th derivative of the series; derivatives of cos/sin cycle with period 4
  auto derivative = [series](int order) {
    return [series, order](double theta) {
      const auto& [a, b] = *series;
      double sum = order == 0 ? a[0] : 0.0;
      const std::size_t terms = std::max(a.size(), b.size() + 1);
      for (std::size_t k = 1; k < terms; ++k) {
        const double kd = static_cast<double>(k);
        const double ak = k < a.size() ? a[k] : 0.0;
        const double bk = k - 1 < b.size() ? b[k - 1] : 0.0;
        const double c = std::cos(kd * theta);
        const double s = std::sin(kd * theta);
        const double scale = std::pow(kd, order);
        switch (order % 4) {
          case 0: sum += scale * (ak * c + bk * s); break;
          case 1: sum += scale * (-ak * s + bk * c); break;
          case 2: sum += scale * (-ak * c - bk * s); break;
          default: sum += scale * (ak * s - bk * c); break;
        }
      }
      return sum;
    };
  };
  return AngularEnergy(derivative(0), derivative(1), derivative(2), derivative(3), "fourier");
}

AngularEnergy AngularEnergy::constant(double c) {
  return fourier({c}, {});
}

AngularEnergy::Margin AngularEnergy::stability_margin(double lo, double hi, std::size_t samples) const {
  Margin best{std::numeric_limits<double>::infinity(), lo};
  for (std::size_t k = 0; k < samples; ++k) {
    const double theta = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples - 1);
    const double value = f_(theta) + f2_(theta);
    if (value < best.value) best = {value, theta};
  }
  return best;
}

double theta_of_slope(double p) { return std::atan2(1.0, -p); }

double slope_of_theta(double theta) { return -std::cos(theta) / std::sin(theta); }

SmoothEnergy angular_to_cartesian(const AngularEnergy& f) {
  constexpr double kEps = 1e-9;
  const auto margin = f.stability_margin(kEps, std::numbers::pi - kEps, 4001);
  if (!(margin.value > 0.0)) {
    std::ostringstream msg;
    msg << "f + f'' = " << margin.value << " at theta = " << margin.theta;
    throw Error(ErrorKind::NotStrictlyStable, msg.str());
  }
  auto shared = std::make_shared<const AngularEnergy>(f);
  auto eval = [shared](double p) { return (*shared)(theta_of_slope(p)) * std::sqrt(1.0 + p * p); };
  auto d1 = [shared](double p) {
    const double th = theta_of_slope(p);
    return (shared->d1(th) + p * (*shared)(th)) / std::sqrt(1.0 + p * p);
  };
  auto d2 = [shared](double p) {
    const double th = theta_of_slope(p);
    return ((*shared)(th) + shared->d2(th)) * std::pow(1.0 + p * p, -1.5);
  };
  auto d3 = [shared](double p) {
    const double th = theta_of_slope(p);
    const double f0 = (*shared)(th);
    return (-3.0 * p * f0 + shared->d1(th) - 3.0 * p * shared->d2(th) + shared->d3(th)) *
           std::pow(1.0 + p * p, -2.5);
  };
  return SmoothEnergy("cartesian(" + f.name() + ")", eval, d1, d2, d3);
}

double angular_face_velocity(const AngularEnergy& f, double theta_prev, double theta_cur, double theta_next,
                             double length) {
  if (!(length > 0.0)) throw Error(ErrorKind::DegenerateFace, "face length must be positive");
  const double before = theta_cur - theta_prev;
  const double after = theta_next - theta_cur;
  if (before == 0.0 || after == 0.0) {
    throw Error(ErrorKind::InvalidFaceConfiguration, "adjacent faces share a normal angle");
  }
  const double bracket = f(theta_prev) / std::sin(before) -
                         f(theta_cur) * (1.0 / std::tan(before) + 1.0 / std::tan(after)) +
                         f(theta_next) / std::sin(after);
  return bracket / length;
}

GrowthReport check_growth_conditions(const SmoothEnergy& energy, double lo, double hi, std::size_t samples) {
  GrowthReport report;
  if (samples < 2) throw Error(ErrorKind::Domain, "growth check needs at least 2 samples");
  report.c1 = std::numeric_limits<double>::infinity();
  bool finite = true;
  for (std::size_t k = 0; k < samples; ++k) {
    const double s = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples - 1);
    const double q = 1.0 + s * s;
    const double lower = std::pow(q, 1.5) * energy.d2(s);
    const double third = q * q * std::abs(energy.d3(s));
    finite = finite && std::isfinite(lower) && std::isfinite(third);
    report.c1 = std::min(report.c1, lower);
    report.c2 = std::max(report.c2, lower);
    report.c3 = std::max(report.c3, third);
  }
  report.satisfied = finite && report.c1 > 0.0;
  return report;
}

std::vector<Vec2> frank_diagram(const AngularEnergy& f, std::size_t samples) {
  std::vector<Vec2> points;
  points.reserve(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(samples);
    const double value = f(theta);
    if (!(value > 0.0)) {
      std::ostringstream msg;
      msg << "f(" << theta << ") = " << value << " is not positive";
      throw Error(ErrorKind::InvalidEnergy, msg.str());
    }
    points.push_back({std::cos(theta) / value, std::sin(theta) / value});
  }
  return points;
}

AngularEnergy make_angular(const EnergySpec& spec) {
  switch (spec.kind) {
    case EnergySpec::Kind::Angular:
      return AngularEnergy::fourier(spec.cos_coeffs, spec.sin_coeffs);
    case EnergySpec::Kind::Area:
      return AngularEnergy::constant(1.0);
    case EnergySpec::Kind::Quadratic:
      break;
  }
  throw Error(ErrorKind::InvalidEnergy, "the quadratic energy has no angular form");
}

SmoothEnergy make_energy(const EnergySpec& spec) {
  switch (spec.kind) {
    case EnergySpec::Kind::Quadratic: return SmoothEnergy::quadratic();
    case EnergySpec::Kind::Area: return SmoothEnergy::area();
    case EnergySpec::Kind::Angular: return angular_to_cartesian(make_angular(spec));
  }
  throw Error(ErrorKind::InvalidEnergy, "unknown energy kind");
}

}  // namespace crystal
