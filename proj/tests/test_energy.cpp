#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "crystal/energy.hpp"
#include "crystal/error.hpp"
#include "crystal/profile.hpp"

using namespace crystal;
using doctest::Approx;

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kPi = std::numbers::pi;

// Composite Simpson, used as an independent quadrature oracle.
template <class F>
double simpson(F f, double a, double b, int panels = 20000) {
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int k = 1; k < panels; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return sum * h / 3.0;
}

long double chord_difference(auto W, long double a, long double b, long double c) {
  return (W(c) - W(b)) / (c - b) - (W(b) - W(a)) / (b - a);
}

}  // namespace

TEST_CASE("delta of the quadratic energy is half the slope spread") {
  CHECK(delta(SmoothEnergy::quadratic(), -1.0, 0.0, 1.0) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("delta vanishes exactly when the outer slopes agree") {
  for (auto W : {SmoothEnergy::quadratic(), SmoothEnergy::area()}) {
    CHECK(delta(W, 0.3, 0.7, 0.3) == 0.0);
    CHECK(delta(W, -2.0, -2.5, -2.0) == 0.0);
  }
}

TEST_CASE("delta of the area energy at (-1, 0, 1)") {
  const double expected = 2.0 * kSqrt2 - 2.0;
  auto W = [](long double s) { return std::sqrt(1.0L + s * s); };
  CHECK(static_cast<double>(chord_difference(W, -1, 0, 1)) == Approx(expected).epsilon(1e-15));
  CHECK(delta(SmoothEnergy::area(), -1.0, 0.0, 1.0) == Approx(expected).epsilon(1e-14));
}

TEST_CASE("delta rejects coincident neighbours") {
  CHECK_THROWS_AS(delta(SmoothEnergy::area(), 0.0, 0.0, 1.0), Error);
  try {
    delta(SmoothEnergy::area(), 0.0, 1.0, 1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidFaceConfiguration);
  }
}

TEST_CASE("face velocity examples") {
  CHECK(face_velocity(SmoothEnergy::area(), -1, 0, 1, 0.5, 1.0) == Approx(4.0 * kSqrt2 - 4.0).epsilon(1e-14));
  CHECK(face_velocity(SmoothEnergy::quadratic(), 0, 1, 2, 1.0, 1.0) == Approx(kSqrt2).epsilon(1e-14));
  CHECK(face_velocity(SmoothEnergy::area(), 0.5, 1.0, 0.5, 0.1, 0.7) == 0.0);
  CHECK(face_velocity(SmoothEnergy::quadratic(), 0, 1, 2, 1.0, 1.0, Mobility::Unit) == Approx(1.0));
  try {
    face_velocity(SmoothEnergy::area(), -1, 0, 1, 0.0, 1.0);
    FAIL("zero length accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateFace);
  }
}

TEST_CASE("convexity fixes the sign of delta; chords agree with brute force") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    // c2 > 3|c3| keeps W'' = 2 c2 + 6 c3 s positive on [-1, 1]
    const double c1 = unit(rng) - 0.5;
    const double c2 = 1.0 + unit(rng);
    const double c3 = (unit(rng) - 0.5) * 0.5 * c2;
    auto W = [=](long double s) { return c1 * s + c2 * s * s + c3 * s * s * s; };
    SmoothEnergy energy(
        "cubic", [=](double s) { return static_cast<double>(W(s)); },
        [=](double s) { return c1 + 2 * c2 * s + 3 * c3 * s * s; }, [=](double s) { return 2 * c2 + 6 * c3 * s; },
        [=](double) { return 6 * c3; });
    double s[3];
    for (double& v : s) v = 2.0 * unit(rng) - 1.0;
    std::sort(s, s + 3);
    if (s[1] - s[0] < 1e-3 || s[2] - s[1] < 1e-3) continue;
    const double forward = delta(energy, s[0], s[1], s[2]);
    const double backward = delta(energy, s[2], s[1], s[0]);
    CHECK(forward > 0.0);
    CHECK(backward < 0.0);
    CHECK(forward == Approx(static_cast<double>(chord_difference(W, s[0], s[1], s[2]))).epsilon(1e-12));
  }
}

TEST_CASE("uniform slope grids") {
  const SlopeGrid g = build_slope_grid(-1.0, 1.0, 0.5);
  REQUIRE(g.size() == 5);
  const double expected[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (std::size_t j = 0; j < 5; ++j) CHECK(g[j] == expected[j]);
  CHECK(g.m() == 0.5);

  // ceil(2 / 0.3) = 7 equal gaps
  const SlopeGrid h = build_slope_grid(-1.0, 1.0, 0.3);
  CHECK(h.size() == 8);
  CHECK(h.m() <= 0.3);
  CHECK(h.m() == Approx(2.0 / 7.0));
  CHECK(h.lo() == -1.0);
  CHECK(h.hi() == 1.0);

  try {
    build_slope_grid(0.0, 1.0, 2.0);
    FAIL("coarse grid accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GridTooCoarse);
  }
}

TEST_CASE("grid lookups") {
  const SlopeGrid g({-1.0, -0.2, 0.0, 0.7});
  CHECK(g.m() == Approx(0.8));
  CHECK(g.min_gap() == Approx(0.2));
  CHECK(g.find(0.0) == 2);
  CHECK(g.find(0.1) == -1);
  CHECK(g.nearest(0.5) == 3);
  CHECK(g.nearest(-5.0) == 0);
  CHECK_THROWS_AS(SlopeGrid({0.0, 0.0, 1.0}), Error);
}

TEST_CASE("crystalline energy matches W at the grid and is convex") {
  const SlopeGrid grid = build_slope_grid(-3.0, 3.0, 0.25);
  const CrystallineEnergy Wbar(SmoothEnergy::area(), grid);
  for (std::size_t j = 0; j < grid.size(); ++j) CHECK(Wbar.value(static_cast<int>(j)) == std::sqrt(1.0 + grid[j] * grid[j]));
  for (int j = 1; j + 1 < static_cast<int>(grid.size()); ++j) CHECK(Wbar.chord(j, j + 1) > Wbar.chord(j - 1, j));
  CHECK(delta(Wbar, 11, 12, 13) == Approx(delta(SmoothEnergy::area(), grid[11], grid[12], grid[13])).epsilon(1e-14));
}

TEST_CASE("total energy examples") {
  auto grid = std::make_shared<const SlopeGrid>(build_slope_grid(-1.0, 1.0, 1.0));
  const CrystallineEnergy area(SmoothEnergy::area(), *grid);
  const AdmissibleProfile flat(grid, {0.0, 1.0}, {1}, 0.0);
  CHECK(total_energy(area, flat) == 1.0);

  const AdmissibleProfile hat(grid, {0.0, 0.25, 0.75, 1.0}, {2, 1, 0}, 0.0);
  CHECK(total_energy(area, hat) == Approx(0.5 * kSqrt2 + 0.5).epsilon(1e-15));

  const CrystallineEnergy constant(*grid, {3.0, 3.0, 3.0});
  CHECK(total_energy(constant, hat) == Approx(3.0).epsilon(1e-15));
}

TEST_CASE("w tilde prime against quadrature") {
  auto integrand = [](const SmoothEnergy& W) { return [&W](double y) { return std::sqrt(1 + y * y) * W.d2(y); }; };
  const auto area = SmoothEnergy::area();
  const auto quad = SmoothEnergy::quadratic();
  CHECK(w_tilde_prime(area, 1.0) == Approx(kPi / 4).epsilon(1e-15));
  CHECK(w_tilde_prime(area, 1.0) == Approx(simpson(integrand(area), 0.0, 1.0)).epsilon(1e-12));
  CHECK(w_tilde_prime(quad, 1.0) == Approx((kSqrt2 + std::asinh(1.0)) / 2).epsilon(1e-15));
  CHECK(w_tilde_prime(quad, 1.0) == Approx(simpson(integrand(quad), 0.0, 1.0)).epsilon(1e-12));
  CHECK(w_tilde_prime(area, 0.0) == 0.0);
  CHECK(w_tilde_prime(quad, 0.0) == 0.0);

  const auto general = angular_to_cartesian(AngularEnergy::fourier({1.0, 0.0, 0.1}, {0.05}));
  for (double s : {-2.0, -0.3, 0.0, 0.8, 3.0}) {
    CHECK(w_tilde_prime(general, s) == Approx(simpson(integrand(general), 0.0, s)).epsilon(1e-10));
  }
}

TEST_CASE("angle dictionary") {
  CHECK(theta_of_slope(0.0) == Approx(kPi / 2));
  CHECK(theta_of_slope(1.0) == Approx(3 * kPi / 4));
  CHECK(-1.0 / std::tan(theta_of_slope(1.0)) == Approx(1.0));
  for (double p : {-7.0, -1.0, 0.3, 4.0}) CHECK(slope_of_theta(theta_of_slope(p)) == Approx(p).epsilon(1e-13));
}

TEST_CASE("isotropic angular energy gives the area energy") {
  const auto W = angular_to_cartesian(AngularEnergy::constant(1.0));
  for (double p : {-3.0, -0.5, 0.0, 1.0, 2.5}) {
    CHECK(W(p) == Approx(std::sqrt(1 + p * p)).epsilon(1e-14));
    CHECK(W.d1(p) == Approx(p / std::sqrt(1 + p * p)).epsilon(1e-14));
  }
  CHECK(W.d2(0.0) == Approx(1.0).epsilon(1e-14));
  const double h = 1e-4;
  CHECK((W(h) - 2 * W(0.0) + W(-h)) / (h * h) == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("angular round trip on random slopes") {
  const auto f = AngularEnergy::fourier({1.0, 0.05, 0.1, 0.0, 0.02}, {0.03, 0.0, 0.01});
  const auto W = angular_to_cartesian(f);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> slope(-20.0, 20.0);
  for (int k = 0; k < 1000; ++k) {
    const double p = slope(rng);
    CHECK(W(p) / std::sqrt(1 + p * p) == Approx(f(theta_of_slope(p))).epsilon(1e-12));
  }
}

TEST_CASE("derivatives agree with central differences at second order") {
  const std::vector<SmoothEnergy> energies{SmoothEnergy::quadratic(), SmoothEnergy::area(),
                                           angular_to_cartesian(AngularEnergy::fourier({1.0, 0.0, 0.1}, {0.04}))};
  for (const auto& W : energies) {
    for (double s : {-1.3, 0.0, 0.4, 2.0}) {
      auto errors = [&](double h) {
        return std::array<double, 3>{std::abs(W.d1(s) - (W(s + h) - W(s - h)) / (2 * h)),
                                     std::abs(W.d2(s) - (W.d1(s + h) - W.d1(s - h)) / (2 * h)),
                                     std::abs(W.d3(s) - (W.d2(s + h) - W.d2(s - h)) / (2 * h))};
      };
      const auto coarse = errors(1e-3);
      const auto fine = errors(1e-4);
      for (int d = 0; d < 3; ++d) {
        // central differences of a smooth function: error ~ h^2, so at most ~1e-6 and shrinking
        CHECK(coarse[d] < 1e-5);
        CHECK(fine[d] < 1e-7);
      }
    }
  }
}

TEST_CASE("fourier derivatives of the angular energy") {
  const auto f = AngularEnergy::fourier({1.0, 0.2, 0.1, 0.05}, {0.1, 0.03, 0.02});
  const double h = 1e-4;
  for (double t : {0.2, 1.0, 2.5, 4.0}) {
    CHECK(f.d1(t) == Approx((f(t + h) - f(t - h)) / (2 * h)).epsilon(1e-7));
    CHECK(f.d2(t) == Approx((f.d1(t + h) - f.d1(t - h)) / (2 * h)).epsilon(1e-7));
    CHECK(f.d3(t) == Approx((f.d2(t + h) - f.d2(t - h)) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("strict stability") {
  const auto stable = AngularEnergy::fourier({1.0, 0.0, 0.1}, {});
  CHECK(stable.stability_margin(0.0, 2 * kPi, 7201).value == Approx(0.7).epsilon(1e-9));
  try {
    angular_to_cartesian(AngularEnergy::fourier({1.0, 0.0, 1.0}, {}));
    FAIL("unstable energy accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotStrictlyStable);
  }
}

TEST_CASE("angular face velocity") {
  const auto f = AngularEnergy::constant(1.0);
  CHECK(angular_face_velocity(f, kPi / 4, kPi / 2, 3 * kPi / 4, 1.0) == Approx(2 * kSqrt2 - 2).epsilon(1e-14));
  const double cartesian = face_velocity(SmoothEnergy::area(), -1, 0, 1, std::sin(kPi / 2), 1.0);
  CHECK(angular_face_velocity(f, kPi / 4, kPi / 2, 3 * kPi / 4, 1.0) == Approx(cartesian).epsilon(1e-12));
  try {
    angular_face_velocity(f, kPi / 2, kPi / 2, 3 * kPi / 4, 1.0);
    FAIL("degenerate triple accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidFaceConfiguration);
  }
}

TEST_CASE("angular and cartesian velocities agree on random triples") {
  const auto f = AngularEnergy::fourier({1.0, 0.1, 0.08}, {0.05, 0.02});
  const auto W = angular_to_cartesian(f);
  const SlopeGrid grid = build_slope_grid(-3.0, 3.0, 0.2);
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> pick(1, static_cast<int>(grid.size()) - 2);
  for (int k = 0; k < 200; ++k) {
    const int j = pick(rng);
    const int jp = j + ((rng() & 1) ? 1 : -1);
    const int jn = (rng() & 1) ? jp : 2 * j - jp;
    const double sp = grid[jp], sc = grid[j], sn = grid[jn];
    const double L = 0.01 + (rng() % 1000) / 1000.0;
    const double tc = theta_of_slope(sc);
    const double lhs = angular_face_velocity(f, theta_of_slope(sp), tc, theta_of_slope(sn), L) * std::sqrt(1 + sc * sc);
    const double rhs = face_velocity(W, sp, sc, sn, L * std::sin(tc), 1.0);
    CHECK(lhs == Approx(rhs).epsilon(1e-10).scale(1e-300));
  }
}

TEST_CASE("growth constants") {
  const auto area = check_growth_conditions(SmoothEnergy::area(), -10.0, 10.0, 2001);
  CHECK(area.c1 == Approx(1.0).epsilon(1e-12));
  CHECK(area.c2 == Approx(1.0).epsilon(1e-12));
  CHECK(area.satisfied);

  const auto quad = check_growth_conditions(SmoothEnergy::quadratic(), -1.0, 1.0, 2001);
  CHECK(quad.c1 == Approx(1.0));
  CHECK(quad.c2 == Approx(std::pow(2.0, 1.5)));
  CHECK(quad.c3 == 0.0);

  CHECK(check_growth_conditions(angular_to_cartesian(AngularEnergy::constant(1.0))).satisfied);
}

TEST_CASE("frank diagram") {
  for (const auto& p : frank_diagram(AngularEnergy::constant(1.0), 64)) CHECK(std::hypot(p.x, p.y) == Approx(1.0));
  for (const auto& p : frank_diagram(AngularEnergy::constant(2.0), 64)) CHECK(std::hypot(p.x, p.y) == Approx(0.5));

  const auto pts = frank_diagram(AngularEnergy::fourier({1.0, 0.0, 0.1}, {}), 720);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto& a = pts[k];
    const auto& b = pts[(k + 1) % pts.size()];
    const auto& c = pts[(k + 2) % pts.size()];
    CHECK((b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x) > 0.0);
  }

  try {
    frank_diagram(AngularEnergy::fourier({0.5, 1.0}, {}), 16);
    FAIL("nonpositive f accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidEnergy);
  }
}

TEST_CASE("energy specs") {
  EnergySpec spec;
  CHECK(make_energy(spec).family() == SmoothEnergy::Family::Quadratic);
  spec.kind = EnergySpec::Kind::Area;
  CHECK(make_energy(spec)(1.0) == Approx(kSqrt2));
  CHECK(make_angular(spec)(0.3) == 1.0);
  spec.kind = EnergySpec::Kind::Angular;
  spec.cos_coeffs = {1.0, 0.0, 0.1};
  CHECK(make_energy(spec)(0.0) == Approx(1.0 + 0.1 * std::cos(kPi)));
}
