#include "crystal/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crystal/error.hpp"

namespace crystal {

AdmissibleProfile::AdmissibleProfile(std::shared_ptr<const SlopeGrid> grid, std::vector<double> corners,
                                     std::vector<int> slope_indices, double left_value)
    : grid_(std::move(grid)),
      corners_(std::move(corners)),
      slope_indices_(std::move(slope_indices)),
      left_value_(left_value) {
  if (!grid_) throw Error(ErrorKind::InvalidProfile, "profile needs a slope grid");
  if (corners_.size() != slope_indices_.size() + 1) {
    throw Error(ErrorKind::InvalidProfile, "expected one more corner than faces");
  }
}

std::vector<double> AdmissibleProfile::lengths() const {
  std::vector<double> out(faces());
  for (std::size_t i = 0; i < faces(); ++i) out[i] = length(i);
  return out;
}

double AdmissibleProfile::min_length() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < faces(); ++i) best = std::min(best, length(i));
  return best;
}

std::vector<double> AdmissibleProfile::corner_values() const {
  std::vector<double> values(corners_.size());
  values[0] = left_value_;
  for (std::size_t i = 0; i < faces(); ++i) values[i + 1] = values[i] + slope(i) * length(i);
  return values;
}

std::vector<Violation> validate(const AdmissibleProfile& p, const ValidateOptions& options) {
  std::vector<Violation> out;
  const std::size_t n = p.faces();
  if (n == 0) {
    out.push_back({Violation::Kind::Size, 0, "profile has no faces"});
    return out;
  }
  const auto corners = p.corners();
  if (std::abs(corners.front()) > options.endpoint_tol || std::abs(corners.back() - 1.0) > options.endpoint_tol) {
    std::ostringstream msg;
    msg << "corners span [" << corners.front() << ", " << corners.back() << "] instead of [0, 1]";
    out.push_back({Violation::Kind::Endpoints, 0, msg.str()});
  }
  const int k = static_cast<int>(p.grid().size());
  for (std::size_t i = 0; i < n; ++i) {
    const int face = static_cast<int>(i);
    const double l = p.length(i);
    if (l < 0.0) {
      out.push_back({Violation::Kind::Monotonicity, face, "corners decrease across face " + std::to_string(i)});
    } else if (l == 0.0 && !options.allow_zero_length) {
      out.push_back({Violation::Kind::ZeroLength, face, "face " + std::to_string(i) + " has zero length"});
    }
    const int j = p.slope_index(i);
    if (j < 0 || j >= k) {
      out.push_back({Violation::Kind::SlopeIndexRange, face, "slope index " + std::to_string(j) + " is off the grid"});
    }
    if (i > 0 && std::abs(j - p.slope_index(i - 1)) != 1) {
      std::ostringstream msg;
      msg << "junction " << i << " joins slope indices " << p.slope_index(i - 1) << " and " << j;
      out.push_back({Violation::Kind::Adjacency, face, msg.str()});
    }
  }
  return out;
}

std::size_t face_at(const AdmissibleProfile& p, double x) {
  const auto corners = p.corners();
  auto it = std::lower_bound(corners.begin() + 1, corners.end(), x);
  const auto face = static_cast<std::size_t>(it - corners.begin()) - 1;
  return std::min(face, p.faces() - 1);
}

static void check_domain(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream msg;
    msg << "x = " << x << " lies outside [0, 1]";
    throw Error(ErrorKind::Domain, msg.str());
  }
}

double evaluate(const AdmissibleProfile& p, double x) {
  check_domain(x);
  const std::size_t face = face_at(p, x);
  double u = p.left_value();
  for (std::size_t i = 0; i < face; ++i) u += p.slope(i) * p.length(i);
  return u + p.slope(face) * (x - p.corners()[face]);
}

double evaluate_slope(const AdmissibleProfile& p, double x) {
  check_domain(x);
  return p.slope(face_at(p, x));
}

// ---------------------------------------------------------------------------

std::string_view to_string(CollapseCase kind) {
  switch (kind) {
    case CollapseCase::CaseI: return "collapse-case-i";
    case CollapseCase::CaseII: return "collapse-case-ii";
    case CollapseCase::BoundaryCaseI: return "collapse-boundary-i";
    case CollapseCase::BoundaryCaseII: return "collapse-boundary-ii";
  }
  return "collapse";
}

std::vector<CollapseSite> classify_collapses(const AdmissibleProfile& p, std::vector<int> faces) {
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  const int n = static_cast<int>(p.faces());

  std::vector<CollapseSite> sites;
  for (std::size_t k = 0; k < faces.size();) {
    std::size_t end = k + 1;
    while (end < faces.size() && faces[end] == faces[end - 1] + 1) ++end;
    const int first = faces[k];
    const int count = static_cast<int>(end - k);
    const int last = first + count - 1;
    if (first < 0 || last >= n) throw Error(ErrorKind::InternalConsistency, "collapse index out of range");

    auto fail = [&](const std::string& why) {
      std::ostringstream msg;
      msg << why << " (faces " << first << ".." << last << " of " << n << ", slope indices";
      for (int i = 0; i < n; ++i) msg << ' ' << p.slope_index(static_cast<std::size_t>(i));
      msg << ')';
      throw Error(ErrorKind::UnsupportedCollapse, msg.str());
    };

    if (count >= 3) fail("three or more adjacent faces vanish together");
    if (count >= n) fail("every face vanishes");
    const bool at_boundary = first == 0 || last == n - 1;
    if (at_boundary) {
      sites.push_back({first, count, count == 1 ? CollapseCase::BoundaryCaseI : CollapseCase::BoundaryCaseII});
    } else {
      const int outer_left = p.slope_index(static_cast<std::size_t>(first - 1));
      const int outer_right = p.slope_index(static_cast<std::size_t>(last + 1));
      if (count == 1 && outer_left != outer_right) fail("vanishing face is not an inflection face");
      if (count == 2 && std::abs(outer_left - outer_right) != 1) fail("outer neighbours of a vanishing pair are not adjacent");
      sites.push_back({first, count, count == 1 ? CollapseCase::CaseI : CollapseCase::CaseII});
    }
    k = end;
  }
  return sites;
}

AdmissibleProfile apply_collapses(const AdmissibleProfile& p, std::span<const CollapseSite> sites) {
  const std::size_t n = p.faces();
  const auto corners = p.corners();
  std::vector<char> removed(n, 0);
  std::vector<double> moved(corners.begin(), corners.end());

  for (const auto& site : sites) {
    const auto a = static_cast<std::size_t>(site.first);
    const auto b = a + static_cast<std::size_t>(site.count);  // corners a..b collapse to one point
    if (b > n) throw Error(ErrorKind::InternalConsistency, "collapse site out of range");
    double point = 0.0;
    if (a == 0) {
      point = 0.0;
    } else if (b == n) {
      point = 1.0;
    } else {
      for (std::size_t c = a; c <= b; ++c) point += corners[c];
      point /= static_cast<double>(b - a + 1);
    }
    for (std::size_t c = a; c <= b; ++c) moved[c] = point;
    for (std::size_t f = a; f < b; ++f) removed[f] = 1;
  }

  std::vector<double> new_corners{0.0};
  std::vector<int> new_idx;
  for (std::size_t f = 0; f < n; ++f) {
    if (removed[f]) continue;
    const int j = p.slope_index(f);
    if (!new_idx.empty() && new_idx.back() == j) {
      new_corners.back() = moved[f + 1];  // neighbours with equal slope join into one face
    } else {
      new_idx.push_back(j);
      new_corners.push_back(moved[f + 1]);
    }
  }
  new_corners.front() = 0.0;
  new_corners.back() = 1.0;

  AdmissibleProfile out(p.grid_ptr(), std::move(new_corners), std::move(new_idx), p.left_value());
  ValidateOptions options;
  options.allow_zero_length = true;
  if (auto problems = validate(out, options); !problems.empty()) {
    throw Error(ErrorKind::UnsupportedCollapse, "merge left an invalid profile: " + problems.front().message);
  }
  return out;
}

AdmissibleProfile merge_collapsed(const AdmissibleProfile& p, int i, double tol) {
  if (i < 0 || i >= static_cast<int>(p.faces())) throw Error(ErrorKind::Domain, "face index out of range");
  if (p.length(static_cast<std::size_t>(i)) > tol) {
    throw Error(ErrorKind::InternalConsistency, "face " + std::to_string(i) + " has not vanished");
  }
  std::vector<int> faces{i};
  if (i > 0 && p.length(static_cast<std::size_t>(i - 1)) <= tol) faces.push_back(i - 1);
  const auto sites = classify_collapses(p, faces);
  return apply_collapses(p, sites);
}

AdmissibleProfile insert_boundary_face(const AdmissibleProfile& p, Side side, int slope_idx) {
  std::vector<double> corners(p.corners().begin(), p.corners().end());
  std::vector<int> idx(p.slope_indices().begin(), p.slope_indices().end());
  if (side == Side::Left) {
    corners.insert(corners.begin(), 0.0);
    idx.insert(idx.begin(), slope_idx);
  } else {
    corners.push_back(1.0);
    idx.push_back(slope_idx);
  }
  AdmissibleProfile out(p.grid_ptr(), std::move(corners), std::move(idx), p.left_value());
  ValidateOptions options;
  options.allow_zero_length = true;
  if (auto problems = validate(out, options); !problems.empty()) {
    throw Error(ErrorKind::InternalConsistency, "boundary insertion: " + problems.front().message);
  }
  return out;
}

}  // namespace crystal
