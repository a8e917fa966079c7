#include "crystal/metrics.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "crystal/error.hpp"

namespace crystal {

using Gauss5 = boost::math::quadrature::gauss<double, 5>;

double slope_error_l2(const AdmissibleProfile& p, const Field& exact_ux, double t) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.faces(); ++i) {
    if (!(p.length(i) > 0.0)) continue;
    const double s = p.slope(i);
    sum += Gauss5::integrate(
        [&](double x) {
          const double e = exact_ux(x, t) - s;
          return e * e;
        },
        p.corners()[i], p.corners()[i + 1]);
  }
  return std::sqrt(sum);
}

ErrorReport h1_error(const AdmissibleProfile& p, const Field& exact_u, const Field& exact_ux, double t) {
  ErrorReport report;
  report.t = t;
  const auto values = p.corner_values();
  double u2 = 0.0;
  for (std::size_t i = 0; i < p.faces(); ++i) {
    if (!(p.length(i) > 0.0)) continue;
    const double x0 = p.corners()[i];
    const double s = p.slope(i);
    const double v0 = values[i];
    auto gap = [&](double x) { return exact_u(x, t) - (v0 + s * (x - x0)); };
    u2 += Gauss5::integrate([&](double x) { return gap(x) * gap(x); }, x0, p.corners()[i + 1]);
    report.mean_gap += Gauss5::integrate(gap, x0, p.corners()[i + 1]);
  }
  report.l2_u = std::sqrt(u2);
  report.l2_ux = slope_error_l2(p, exact_ux, t);
  report.h1 = std::sqrt(u2 + report.l2_ux * report.l2_ux);
  return report;
}

double mean_value(const AdmissibleProfile& p) {
  const auto values = p.corner_values();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.faces(); ++i) sum += 0.5 * (values[i] + values[i + 1]) * p.length(i);
  return sum;
}

RateFit fit_rate(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 3) throw Error(ErrorKind::Domain, "rate fit needs at least 3 (m, error) pairs");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (auto [m, e] : pairs) {
    if (!(m > 0.0) || !(e > 0.0)) throw Error(ErrorKind::Domain, "rate fit needs positive m and error");
    const double x = std::log(m);
    const double y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pairs.size());
  const double denom = n * sxx - sx * sx;
  if (!(denom > 1e-12 * n * sxx)) throw Error(ErrorKind::Domain, "rate fit needs at least two distinct m");
  RateFit fit;
  fit.rate = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.rate * sx) / n;
  fit.constant = std::exp(intercept);
  for (auto [m, e] : pairs) {
    fit.residual = std::max(fit.residual, std::abs(std::log(e) - (intercept + fit.rate * std::log(m))));
  }
  return fit;
}

}  // namespace crystal
