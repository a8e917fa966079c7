#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "crystal/error.hpp"
#include "crystal/profile.hpp"

namespace crystal {
namespace {

constexpr std::size_t kSamples = 2001;

template <class F>
double bisect(F&& g, double lo, double hi) {
  double glo = g(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Interior points where u'' changes sign, i.e. extrema of u'.
std::vector<double> inflection_points(const InitialData& data) {
  std::vector<double> points;
  double last_x = 0.0;
  double last_sign = 0.0;
  for (std::size_t k = 0; k < kSamples; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(kSamples - 1);
    const double v = data.uxx(x);
    const double sign = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    if (sign == 0.0) continue;
    if (last_sign != 0.0 && sign != last_sign) {
      const double p = bisect([&](double y) { return data.uxx(y) * last_sign; }, last_x, x);
      if (p > 0.0 && p < 1.0) points.push_back(p);
    }
    last_x = x;
    last_sign = sign;
  }
  return points;
}

struct Anchor {
  int idx;
  double x, y;
  bool end;
};

int smallest_at_least(const SlopeGrid& grid, double s) {
  if (int j = grid.find(s, 1e-12); j >= 0) return j;
  auto it = std::lower_bound(grid.slopes().begin(), grid.slopes().end(), s);
  if (it == grid.slopes().end()) return -1;
  return static_cast<int>(it - grid.slopes().begin());
}

int largest_at_most(const SlopeGrid& grid, double s) {
  if (int j = grid.find(s, 1e-12); j >= 0) return j;
  auto it = std::upper_bound(grid.slopes().begin(), grid.slopes().end(), s);
  if (it == grid.slopes().begin()) return -1;
  return static_cast<int>(it - grid.slopes().begin()) - 1;
}

[[noreturn]] void uncovered(double s) {
  std::ostringstream msg;
  msg << "slope grid does not cover u0' = " << s;
  throw Error(ErrorKind::Coverage, msg.str());
}

}  // namespace

AdmissibleProfile build_initial(const InitialData& data, std::shared_ptr<const SlopeGrid> grid_ptr,
                                BoundaryKind kind) {
  const SlopeGrid& grid = *grid_ptr;
  const auto slopes = grid.slopes();

  std::vector<double> breaks{0.0};
  for (double p : inflection_points(data)) breaks.push_back(p);
  breaks.push_back(1.0);
  std::vector<double> deriv(breaks.size());
  for (std::size_t k = 0; k < breaks.size(); ++k) deriv[k] = data.ux(breaks[k]);

  auto has_slope_between = [&](double a, double b) {
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    auto it = std::upper_bound(slopes.begin(), slopes.end(), lo);
    return it != slopes.end() && *it < hi;
  };

  // Interior extrema of u' that keep a line of their own; wiggles of u' too small
  // to cross a grid slope are absorbed into the surrounding faces in pairs.
  std::vector<char> keep(breaks.size(), 1);
  for (bool dropped = true; dropped;) {
    dropped = false;
    std::size_t prev = 0;
    for (std::size_t k = 1; k + 1 < breaks.size(); ++k) {
      if (!keep[k]) continue;
      if (prev != 0 && !has_slope_between(deriv[prev], deriv[k])) {
        keep[prev] = keep[k] = 0;
        dropped = true;
        break;
      }
      prev = k;
    }
  }

  std::vector<Anchor> anchors;
  auto line_through = [&](int j, double x, bool end) {
    if (j < 0) uncovered(data.ux(x));
    anchors.push_back({j, x, data.u(x), end});
  };

  const bool neumann = kind == BoundaryKind::Neumann;
  const double left_slope = deriv.front();
  const bool rising_at_left = deriv[1] > deriv[0];
  if (neumann) {
    const int j = grid.find(left_slope);
    if (j < 0) uncovered(left_slope);
    line_through(j, 0.0, true);
  } else {
    line_through(rising_at_left ? largest_at_most(grid, left_slope) : smallest_at_least(grid, left_slope), 0.0,
                 true);
  }

  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k];
    const double b = breaks[k + 1];
    const double da = deriv[k];
    const double db = deriv[k + 1];
    std::vector<int> crossed;
    for (std::size_t j = 0; j < slopes.size(); ++j) {
      const double s = slopes[j];
      if (s > std::min(da, db) && s < std::max(da, db)) crossed.push_back(static_cast<int>(j));
    }
    if (db < da) std::reverse(crossed.begin(), crossed.end());
    for (int j : crossed) {
      const double s = slopes[static_cast<std::size_t>(j)];
      const double x = bisect([&](double y) { return data.ux(y) - s; }, a, b);
      line_through(j, x, false);
    }
    if (k + 2 < breaks.size() && keep[k + 1]) {
      const bool maximum = db > da;
      line_through(maximum ? smallest_at_least(grid, db) : largest_at_most(grid, db), b, false);
    }
  }

  const double right_slope = deriv.back();
  const bool rising_at_right = deriv[deriv.size() - 1] > deriv[deriv.size() - 2];
  if (neumann) {
    const int j = grid.find(right_slope);
    if (j < 0) uncovered(right_slope);
    line_through(j, 1.0, true);
  } else {
    line_through(rising_at_right ? smallest_at_least(grid, right_slope) : largest_at_most(grid, right_slope), 1.0,
                 true);
  }

  // Consecutive anchors with the same slope describe one face; boundary anchors win.
  std::vector<Anchor> merged;
  for (const auto& a : anchors) {
    if (!merged.empty() && merged.back().idx == a.idx) {
      if (a.end) merged.back() = a;
      continue;
    }
    merged.push_back(a);
  }

  std::vector<double> corners{0.0};
  std::vector<int> idx{merged.front().idx};
  for (std::size_t k = 1; k < merged.size(); ++k) {
    const Anchor& p = merged[k - 1];
    const Anchor& q = merged[k];
    if (std::abs(p.idx - q.idx) != 1) {
      std::ostringstream msg;
      msg << "initial data jumps from slope " << slopes[static_cast<std::size_t>(p.idx)] << " to "
          << slopes[static_cast<std::size_t>(q.idx)] << " near x = " << q.x;
      throw Error(ErrorKind::Coverage, msg.str());
    }
    const double sp = slopes[static_cast<std::size_t>(p.idx)];
    const double sq = slopes[static_cast<std::size_t>(q.idx)];
    const double x = (q.y - p.y + sp * p.x - sq * q.x) / (sp - sq);
    if (!(x > corners.back()) || !(x < 1.0)) {
      std::ostringstream msg;
      msg << "tangent lines of slopes " << sp << " and " << sq << " meet at x = " << x
          << ", out of order; refine the grid or smooth u0";
      throw Error(ErrorKind::Coverage, msg.str());
    }
    corners.push_back(x);
    idx.push_back(q.idx);
  }
  corners.push_back(1.0);

  const Anchor& first = merged.front();
  const double left_value = first.y - slopes[static_cast<std::size_t>(first.idx)] * first.x;
  return AdmissibleProfile(std::move(grid_ptr), std::move(corners), std::move(idx), left_value);
}

InitialData sine_initial(double amplitude, int mode) {
  const double k = mode * std::numbers::pi;
  return {"sine",
          [=](double x) { return amplitude * std::sin(k * x); },
          [=](double x) { return amplitude * k * std::cos(k * x); },
          [=](double x) { return -amplitude * k * k * std::sin(k * x); }};
}

InitialData parabola_initial(double amplitude) {
  return {"parabola",
          [=](double x) { return amplitude * x * (1.0 - x); },
          [=](double x) { return amplitude * (1.0 - 2.0 * x); },
          [=](double) { return -2.0 * amplitude; }};
}

InitialData sine_series_initial(std::vector<double> coeffs) {
  auto b = std::make_shared<const std::vector<double>>(std::move(coeffs));
  auto term = [b](int order) {
    return [b, order](double x) {
      double sum = 0.0;
      for (std::size_t k = 1; k <= b->size(); ++k) {
        const double w = static_cast<double>(k) * std::numbers::pi;
        const double c = (*b)[k - 1];
        if (order == 0) sum += c * std::sin(w * x);
        if (order == 1) sum += c * w * std::cos(w * x);
        if (order == 2) sum -= c * w * w * std::sin(w * x);
      }
      return sum;
    };
  };
  return {"sine-series", term(0), term(1), term(2)};
}

InitialData cosine_initial(double a, double b, std::vector<double> coeffs) {
  auto c = std::make_shared<const std::vector<double>>(std::move(coeffs));
  auto series = [c](int order, double x) {
    double sum = 0.0;
    for (std::size_t k = 1; k <= c->size(); ++k) {
      const double w = static_cast<double>(k) * std::numbers::pi;
      const double ck = (*c)[k - 1];
      if (order == 0) sum += ck * std::cos(w * x);
      if (order == 1) sum -= ck * w * std::sin(w * x);
      if (order == 2) sum -= ck * w * w * std::cos(w * x);
    }
    return sum;
  };
  return {"cosine",
          [=](double x) { return a * x + 0.5 * (b - a) * x * x + series(0, x); },
          [=](double x) { return a + (b - a) * x + series(1, x); },
          [=](double x) { return (b - a) + series(2, x); }};
}

InitialData spline_initial(std::vector<double> x, std::vector<double> u) {
  const std::size_t n = x.size();
  if (n < 3 || u.size() != n) throw Error(ErrorKind::Configuration, "spline needs at least 3 matching samples");
  for (std::size_t k = 1; k < n; ++k) {
    if (!(x[k] > x[k - 1])) throw Error(ErrorKind::Configuration, "spline abscissas must increase");
  }
  if (std::abs(x.front()) > 1e-12 || std::abs(x.back() - 1.0) > 1e-12) {
    throw Error(ErrorKind::Configuration, "spline abscissas must span [0, 1]");
  }

  // Natural cubic spline: second derivatives from the tridiagonal system (Thomas algorithm).
  std::vector<double> m2(n, 0.0), c(n, 0.0), d(n, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double h0 = x[k] - x[k - 1];
    const double h1 = x[k + 1] - x[k];
    const double rhs = 6.0 * ((u[k + 1] - u[k]) / h1 - (u[k] - u[k - 1]) / h0);
    const double diag = 2.0 * (h0 + h1) - h0 * c[k - 1];
    c[k] = h1 / diag;
    d[k] = (rhs - h0 * d[k - 1]) / diag;
  }
  for (std::size_t k = n - 2; k >= 1; --k) m2[k] = d[k] - c[k] * m2[k + 1];

  struct Table {
    std::vector<double> x, u, m2;
    std::size_t piece(double t) const {
      auto it = std::upper_bound(x.begin(), x.end(), t);
      const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - x.begin(), 1)) - 1;
      return std::min(k, x.size() - 2);
    }
  };
  auto table = std::make_shared<const Table>(Table{std::move(x), std::move(u), std::move(m2)});
  auto value = [table](double t) {
    const auto& s = *table;
    const std::size_t k = s.piece(t);
    const double h = s.x[k + 1] - s.x[k];
    const double a = (s.x[k + 1] - t) / h;
    const double b = (t - s.x[k]) / h;
    return a * s.u[k] + b * s.u[k + 1] + ((a * a * a - a) * s.m2[k] + (b * b * b - b) * s.m2[k + 1]) * h * h / 6.0;
  };
  auto slope = [table](double t) {
    const auto& s = *table;
    const std::size_t k = s.piece(t);
    const double h = s.x[k + 1] - s.x[k];
    const double a = (s.x[k + 1] - t) / h;
    const double b = (t - s.x[k]) / h;
    return (s.u[k + 1] - s.u[k]) / h + ((1.0 - 3.0 * a * a) * s.m2[k] + (3.0 * b * b - 1.0) * s.m2[k + 1]) * h / 6.0;
  };
  auto curvature = [table](double t) {
    const auto& s = *table;
    const std::size_t k = s.piece(t);
    const double h = s.x[k + 1] - s.x[k];
    return ((s.x[k + 1] - t) * s.m2[k] + (t - s.x[k]) * s.m2[k + 1]) / h;
  };
  return {"spline", value, slope, curvature};
}

}  // namespace crystal
