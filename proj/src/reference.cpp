#include "crystal/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "crystal/error.hpp"

namespace crystal {

namespace {
constexpr double kPi = std::numbers::pi;
}

double FourierSolution::u(double x, double t) const {
  double sum = 0.0;
  for (std::size_t k = 1; k <= coeffs.size(); ++k) {
    const double w = static_cast<double>(k) * kPi;
    sum += coeffs[k - 1] * std::exp(-w * w * t) * std::sin(w * x);
  }
  return sum;
}

double FourierSolution::ux(double x, double t) const {
  double sum = 0.0;
  for (std::size_t k = 1; k <= coeffs.size(); ++k) {
    const double w = static_cast<double>(k) * kPi;
    sum += coeffs[k - 1] * w * std::exp(-w * w * t) * std::cos(w * x);
  }
  return sum;
}

double FourierSolution::ut(double x, double t) const {
  double sum = 0.0;
  for (std::size_t k = 1; k <= coeffs.size(); ++k) {
    const double w = static_cast<double>(k) * kPi;
    sum -= coeffs[k - 1] * w * w * std::exp(-w * w * t) * std::sin(w * x);
  }
  return sum;
}

double FourierSolution::uxx(double x, double t) const {
  double sum = 0.0;
  for (std::size_t k = 1; k <= coeffs.size(); ++k) {
    const double w = static_cast<double>(k) * kPi;
    sum -= coeffs[k - 1] * std::exp(-w * w * t) * w * w * std::sin(w * x);
  }
  return sum;
}

double FourierSolution::uxxx(double x, double t) const {
  double sum = 0.0;
  for (std::size_t k = 1; k <= coeffs.size(); ++k) {
    const double w = static_cast<double>(k) * kPi;
    sum -= coeffs[k - 1] * w * w * w * std::exp(-w * w * t) * std::cos(w * x);
  }
  return sum;
}

double FourierSolution::uxxx_bound(double t) const {
  double sum = 0.0;
  for (std::size_t k = 1; k <= coeffs.size(); ++k) {
    const double w = static_cast<double>(k) * kPi;
    sum += std::abs(coeffs[k - 1]) * w * w * w * std::exp(-w * w * t);
  }
  return sum;
}

// ---------------------------------------------------------------------------

struct FdSolution::Splines {
  std::vector<boost::math::interpolators::cardinal_cubic_b_spline<double>> per_snapshot;
};

FdSolution::FdSolution(double dx, double dt, std::vector<double> times, std::vector<std::vector<double>> values)
    : dx_(dx), dt_(dt), times_(std::move(times)), values_(std::move(values)) {
  auto splines = std::make_shared<Splines>();
  for (const auto& v : values_) {
    const std::size_t n = v.size() - 1;
    // One-sided fourth-order differences pin the end derivatives of the spline.
    const double left = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * dx_);
    const double right =
        (25.0 * v[n] - 48.0 * v[n - 1] + 36.0 * v[n - 2] - 16.0 * v[n - 3] + 3.0 * v[n - 4]) / (12.0 * dx_);
    splines->per_snapshot.emplace_back(v.data(), v.size(), 0.0, dx_, left, right);
  }
  splines_ = std::move(splines);
}

double FdSolution::u(std::size_t snapshot, double x) const {
  return splines_->per_snapshot.at(snapshot)(std::clamp(x, 0.0, 1.0));
}

double FdSolution::ux(std::size_t snapshot, double x) const {
  return splines_->per_snapshot.at(snapshot).prime(std::clamp(x, 0.0, 1.0));
}

namespace {

template <class Kappa>
void integrate(std::vector<double>& u, double dx, double dt, std::size_t steps, const FdBoundary& bc,
               Kappa kappa) {
  const std::size_t n = u.size() - 1;
  const bool neumann = bc.kind == BoundaryKind::Neumann;
  const double inv2dx = 0.5 / dx;
  const double invdx2 = 1.0 / (dx * dx);
  std::vector<double> k1(n + 1), k2(n + 1), k3(n + 1), k4(n + 1), tmp(n + 1);

  auto rhs = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::size_t j = 1; j < n; ++j) {
      const double s = (v[j + 1] - v[j - 1]) * inv2dx;
      out[j] = kappa(s) * (v[j + 1] - 2.0 * v[j] + v[j - 1]) * invdx2;
    }
    if (neumann) {
      // ghost nodes v[-1] = v[1] - 2 dx a and v[n+1] = v[n-1] + 2 dx b
      out[0] = kappa(bc.a) * (2.0 * v[1] - 2.0 * v[0] - 2.0 * dx * bc.a) * invdx2;
      out[n] = kappa(bc.b) * (2.0 * v[n - 1] - 2.0 * v[n] + 2.0 * dx * bc.b) * invdx2;
    } else {
      out[0] = 0.0;
      out[n] = 0.0;
    }
  };

  for (std::size_t step = 0; step < steps; ++step) {
    rhs(u, k1);
    for (std::size_t j = 0; j <= n; ++j) tmp[j] = u[j] + 0.5 * dt * k1[j];
    rhs(tmp, k2);
    for (std::size_t j = 0; j <= n; ++j) tmp[j] = u[j] + 0.5 * dt * k2[j];
    rhs(tmp, k3);
    for (std::size_t j = 0; j <= n; ++j) tmp[j] = u[j] + dt * k3[j];
    rhs(tmp, k4);
    for (std::size_t j = 0; j <= n; ++j) u[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
}

double max_slope(const std::vector<double>& u, double dx) {
  double s = 0.0;
  for (std::size_t j = 1; j < u.size(); ++j) s = std::max(s, std::abs(u[j] - u[j - 1]) / dx);
  return s;
}

}  // namespace

FdSolution fd_reference(const SmoothEnergy& energy, Mobility mode, const InitialData& u0, const FdBoundary& bc,
                        std::size_t nx, std::vector<double> times) {
  if (nx < 64) throw Error(ErrorKind::Configuration, "fd_reference needs nx >= 64");
  if (bc.kind == BoundaryKind::GeneralDirichlet) {
    throw Error(ErrorKind::Configuration, "fd_reference supports fixed Dirichlet and Neumann data only");
  }
  std::sort(times.begin(), times.end());
  if (times.empty() || times.front() < 0.0) throw Error(ErrorKind::Configuration, "snapshot times must be nonnegative");

  const double dx = 1.0 / static_cast<double>(nx);
  std::vector<double> u(nx + 1);
  for (std::size_t j = 0; j <= nx; ++j) u[j] = u0.u(static_cast<double>(j) * dx);

  // Reachable slopes are bounded by the initial ones (and the Neumann data) up to a margin.
  double reach = std::max(max_slope(u, dx), std::max(std::abs(bc.a), std::abs(bc.b)));
  for (std::size_t k = 0; k <= 1000; ++k) reach = std::max(reach, std::abs(u0.ux(static_cast<double>(k) / 1000.0)));
  reach = 1.25 * reach + 1e-3;
  auto generic = [&](double s) { return mobility(mode, s) * energy.d2(s); };
  double kmax = 0.0;
  for (std::size_t k = 0; k <= 2000; ++k) {
    const double s = -reach + 2.0 * reach * static_cast<double>(k) / 2000.0;
    kmax = std::max(kmax, generic(s));
  }
  if (!(kmax > 0.0) || !std::isfinite(kmax)) {
    throw Error(ErrorKind::Configuration, "mobility times W'' is not positive and finite on the slope range");
  }
  const double dt_limit = 0.2 * dx * dx / kmax;

  std::vector<std::vector<double>> snapshots;
  double t = 0.0;
  double dt_used = dt_limit;
  for (double target : times) {
    const double span = target - t;
    if (span > 0.0) {
      const auto steps = static_cast<std::size_t>(std::ceil(span / dt_limit));
      const double dt = span / static_cast<double>(steps);
      dt_used = dt;
      using Family = SmoothEnergy::Family;
      if (energy.family() == Family::Area && mode == Mobility::Geometric) {
        integrate(u, dx, dt, steps, bc, [](double s) { return 1.0 / (1.0 + s * s); });
      } else if (energy.family() == Family::Quadratic && mode == Mobility::Unit) {
        integrate(u, dx, dt, steps, bc, [](double) { return 1.0; });
      } else {
        integrate(u, dx, dt, steps, bc, generic);
      }
      if (max_slope(u, dx) > reach) {
        throw Error(ErrorKind::Configuration, "slopes left the range used to choose the time step (CFL)");
      }
      t = target;
    }
    snapshots.push_back(u);
  }
  return FdSolution(dx, dt_used, std::move(times), std::move(snapshots));
}

}  // namespace crystal
