#pragma once

#include <functional>
#include <span>
#include <utility>

#include "crystal/profile.hpp"

namespace crystal {

/// Exact field as a function of (x, t).
using Field = std::function<double(double, double)>;

struct ErrorReport {
  double t = 0.0;
  double l2_u = 0.0;
  double l2_ux = 0.0;
  double h1 = 0.0;
  double mean_gap = 0.0;  // ∫ (u - u^m)
};

/// sqrt(∫ (exact_ux - u^m_x)²), five-point Gauss-Legendre on every face.
double slope_error_l2(const AdmissibleProfile& profile, const Field& exact_ux, double t);

ErrorReport h1_error(const AdmissibleProfile& profile, const Field& exact_u, const Field& exact_ux, double t);

/// ∫_0^1 u^m, exact for piecewise-linear profiles.
double mean_value(const AdmissibleProfile& profile);

struct RateFit {
  double rate = 0.0;
  double constant = 0.0;
  double residual = 0.0;  // largest |log error - fit| over the data
};

/// Least-squares line through (log m, log error). Needs at least 3 positive pairs.
RateFit fit_rate(std::span<const std::pair<double, double>> pairs);

}  // namespace crystal
