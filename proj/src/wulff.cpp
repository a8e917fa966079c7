#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "crystal/energy.hpp"
#include "crystal/error.hpp"

namespace crystal {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAngleTol = 1e-9;
constexpr double kOffsetTol = 1e-12;

double wrap(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

double angle_distance(double a, double b) {
  const double d = std::abs(wrap(a) - wrap(b));
  return std::min(d, kTwoPi - d);
}

struct Constraint {
  double theta;
  Vec2 n;
  double c;
};

// Polygon boundary as a vertex ring; label[k] names the constraint carrying edge k -> k+1.
// Negative labels are the four sides of the bounding box.
struct Ring {
  std::vector<Vec2> v;
  std::vector<int> label;
};

Ring clip(const Ring& ring, const Constraint& h, int id, double eps) {
  Ring out;
  const std::size_t n = ring.v.size();
  auto side = [&](const Vec2& p) { return p.x * h.n.x + p.y * h.n.y - h.c; };
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2& p = ring.v[k];
    const Vec2& q = ring.v[(k + 1) % n];
    const double fp = side(p);
    const double fq = side(q);
    const bool pin = fp <= eps;
    const bool qin = fq <= eps;
    if (pin) {
      out.v.push_back(p);
      out.label.push_back(ring.label[k]);
    }
    if (pin != qin) {
      const double t = fp / (fp - fq);
      const Vec2 cut{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
      out.v.push_back(cut);
      out.label.push_back(pin ? id : ring.label[k]);
    }
  }
  return out;
}

// Drops zero-length edges; the surviving vertex takes over the following edge's label.
void drop_short_edges(Ring& ring, double tol) {
  bool changed = true;
  while (changed && ring.v.size() > 1) {
    changed = false;
    for (std::size_t k = 0; k < ring.v.size(); ++k) {
      const std::size_t next = (k + 1) % ring.v.size();
      const double len = std::hypot(ring.v[next].x - ring.v[k].x, ring.v[next].y - ring.v[k].y);
      if (len <= tol) {
        ring.label[k] = ring.label[next];
        ring.v.erase(ring.v.begin() + static_cast<std::ptrdiff_t>(next));
        ring.label.erase(ring.label.begin() + static_cast<std::ptrdiff_t>(next));
        changed = true;
        break;
      }
    }
  }
}

}  // namespace

double WulffPolygon::area() const {
  double twice = 0.0;
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    const Vec2& a = vertices[k];
    const Vec2& b = vertices[(k + 1) % vertices.size()];
    twice += a.x * b.y - a.y * b.x;
  }
  return 0.5 * twice;
}

WulffPolygon wulff_polygon(std::span<const double> angles, std::span<const double> values) {
  if (angles.size() != values.size()) {
    throw Error(ErrorKind::InvalidEnergy, "angles and values differ in length");
  }

  std::vector<Constraint> constraints;
  for (std::size_t k = 0; k < angles.size(); ++k) {
    const double theta = wrap(angles[k]);
    auto same = std::find_if(constraints.begin(), constraints.end(),
                             [&](const Constraint& c) { return angle_distance(c.theta, theta) <= kAngleTol; });
    if (same != constraints.end()) {
      same->c = std::min(same->c, values[k]);
      continue;
    }
    constraints.push_back({theta, {std::cos(theta), std::sin(theta)}, values[k]});
  }
  std::sort(constraints.begin(), constraints.end(),
            [](const Constraint& a, const Constraint& b) { return a.theta < b.theta; });

  if (constraints.size() < 3) {
    throw Error(ErrorKind::UnboundedWulffSet, "fewer than 3 distinct normal directions");
  }
  double widest = kTwoPi - (constraints.back().theta - constraints.front().theta);
  for (std::size_t k = 1; k < constraints.size(); ++k) {
    widest = std::max(widest, constraints[k].theta - constraints[k - 1].theta);
  }
  if (widest >= std::numbers::pi - kAngleTol) {
    std::ostringstream msg;
    msg << "normal directions leave an angular gap of " << widest;
    throw Error(ErrorKind::UnboundedWulffSet, msg.str());
  }

  double fmax = 0.0;
  for (const auto& c : constraints) fmax = std::max(fmax, std::abs(c.c));
  const double box = 2.0 * fmax / std::cos(0.5 * widest) + 1.0;
  Ring ring{{{-box, -box}, {box, -box}, {box, box}, {-box, box}}, {-1, -2, -3, -4}};

  const double eps = kOffsetTol * std::max(1.0, fmax);
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    ring = clip(ring, constraints[k], static_cast<int>(k), eps);
    if (ring.v.empty()) throw Error(ErrorKind::UnboundedWulffSet, "constraints have empty intersection");
  }
  drop_short_edges(ring, 1e-12 * std::max(1.0, fmax));
  if (ring.v.size() < 3) throw Error(ErrorKind::UnboundedWulffSet, "intersection is degenerate");

  WulffPolygon poly;
  poly.vertices = ring.v;
  for (std::size_t k = 0; k < ring.v.size(); ++k) {
    if (ring.label[k] < 0) throw Error(ErrorKind::UnboundedWulffSet, "bounding box edge survived clipping");
    const Constraint& c = constraints[static_cast<std::size_t>(ring.label[k])];
    const Vec2& a = ring.v[k];
    const Vec2& b = ring.v[(k + 1) % ring.v.size()];
    poly.facet_angles.push_back(c.theta);
    poly.facet_normals.push_back(c.n);
    poly.facet_lengths.push_back(std::hypot(b.x - a.x, b.y - a.y));
  }
  return poly;
}

double delta_tilde(const WulffPolygon& polygon, double theta) {
  for (std::size_t j = 0; j < polygon.facet_angles.size(); ++j) {
    if (angle_distance(polygon.facet_angles[j], theta) <= kAngleTol) return polygon.facet_lengths[j];
  }
  std::ostringstream msg;
  msg << "no facet has normal angle " << theta;
  throw Error(ErrorKind::NotAFacet, msg.str());
}

double support_derivative_jump(const WulffPolygon& polygon, double theta) {
  // h(theta) = max_v v.n(theta); on each side the derivative is v.t(theta) for the
  // maximiser that stays active, so the jump is the spread of v.t over the maximisers.
  const Vec2 n{std::cos(theta), std::sin(theta)};
  const Vec2 t{-std::sin(theta), std::cos(theta)};
  double h = -std::numeric_limits<double>::infinity();
  double scale = 1.0;
  for (const auto& v : polygon.vertices) {
    h = std::max(h, v.x * n.x + v.y * n.y);
    scale = std::max({scale, std::abs(v.x), std::abs(v.y)});
  }
  double right = -std::numeric_limits<double>::infinity();
  double left = std::numeric_limits<double>::infinity();
  for (const auto& v : polygon.vertices) {
    if (v.x * n.x + v.y * n.y < h - 1e-9 * scale) continue;
    const double tangential = v.x * t.x + v.y * t.y;
    right = std::max(right, tangential);
    left = std::min(left, tangential);
  }
  return right - left;
}

}  // namespace crystal
