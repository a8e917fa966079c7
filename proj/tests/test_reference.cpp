#include <doctest.h>

#include <cmath>
#include <numbers>

#include "crystal/error.hpp"
#include "crystal/reference.hpp"

using namespace crystal;
using doctest::Approx;

namespace {
const double kPi = std::numbers::pi;
}

TEST_CASE("fourier series solves the heat equation") {
  const FourierSolution exact{{1.0, -0.3, 0.1}};
  const double h = 1e-4;
  for (double x : {0.1, 0.37, 0.8}) {
    for (double t : {0.01, 0.05}) {
      const double ut = (exact.u(x, t + h * h) - exact.u(x, t - h * h)) / (2 * h * h);
      const double uxx = (exact.u(x + h, t) - 2 * exact.u(x, t) + exact.u(x - h, t)) / (h * h);
      CHECK(ut == Approx(uxx).epsilon(1e-4));
      CHECK(exact.ut(x, t) == Approx(ut).epsilon(1e-4));
      CHECK(exact.ux(x, t) == Approx((exact.u(x + h, t) - exact.u(x - h, t)) / (2 * h)).epsilon(1e-6));
      CHECK(exact.uxxx(x, t) == Approx((exact.uxx(x + h, t) - exact.uxx(x - h, t)) / (2 * h)).epsilon(1e-5));
    }
  }
  CHECK(exact.u(0.0, 0.1) == 0.0);
  CHECK(std::abs(exact.u(1.0, 0.1)) < 1e-15);
}

TEST_CASE("third-derivative bound is attained by a single mode") {
  const FourierSolution one{{0.5}};
  CHECK(one.uxxx_bound(0.02) == Approx(0.5 * std::pow(kPi, 3) * std::exp(-kPi * kPi * 0.02)));
  CHECK(std::abs(one.uxxx(0.0, 0.02)) == Approx(one.uxxx_bound(0.02)));
  const FourierSolution two{{0.5, 0.2}};
  double sup = 0.0;
  for (int k = 0; k <= 1000; ++k) sup = std::max(sup, std::abs(two.uxxx(k / 1000.0, 0.0)));
  CHECK(sup <= two.uxxx_bound(0.0) + 1e-12);
}

TEST_CASE("finite differences reproduce the heat kernel at second order") {
  auto error = [](std::size_t nx) {
    const auto fd = fd_reference(SmoothEnergy::quadratic(), Mobility::Unit, sine_initial(1.0), {}, nx, {0.0, 0.05});
    double worst = 0.0;
    const auto& v = fd.values(1);
    for (std::size_t j = 0; j <= nx; ++j) {
      const double x = static_cast<double>(j) / nx;
      worst = std::max(worst, std::abs(v[j] - std::exp(-kPi * kPi * 0.05) * std::sin(kPi * x)));
    }
    return worst;
  };
  const double e64 = error(64), e128 = error(128);
  CHECK(e128 < 1e-4);
  CHECK(e64 / e128 == Approx(4.0).epsilon(0.1));
}

TEST_CASE("neumann finite differences against a cosine mode") {
  FdBoundary bc;
  bc.kind = BoundaryKind::Neumann;
  const auto fd = fd_reference(SmoothEnergy::quadratic(), Mobility::Unit, cosine_initial(0.0, 0.0, {0.3}), bc, 256,
                               {0.0, 0.02});
  const double decay = std::exp(-kPi * kPi * 0.02);
  for (double x : {0.0, 0.3, 0.5, 1.0}) CHECK(fd.u(1, x) == Approx(0.3 * decay * std::cos(kPi * x)).epsilon(1e-4).scale(1.0));
  CHECK(fd.ux(1, 0.5) == Approx(-0.3 * kPi * decay).epsilon(1e-3));
}

TEST_CASE("richardson ratio for curvature flow") {
  const auto u0 = sine_initial(0.1);
  std::vector<double> at_half;
  for (std::size_t nx : {64, 128, 256}) {
    const auto fd = fd_reference(SmoothEnergy::area(), Mobility::Geometric, u0, {}, nx, {0.0, 0.05});
    at_half.push_back(fd.values(1)[nx / 2]);
  }
  const double ratio = (at_half[0] - at_half[1]) / (at_half[1] - at_half[2]);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("spline sampling of snapshots") {
  const auto fd = fd_reference(SmoothEnergy::quadratic(), Mobility::Unit, sine_initial(1.0), {}, 128, {0.0});
  CHECK(fd.nx() == 128);
  CHECK(fd.dx() == Approx(1.0 / 128));
  CHECK(fd.dt() > 0.0);
  for (double x : {0.0, 0.1234, 0.5, 1.0}) {
    CHECK(fd.u(0, x) == Approx(std::sin(kPi * x)).epsilon(1e-6).scale(1.0));
    CHECK(fd.ux(0, x) == Approx(kPi * std::cos(kPi * x)).epsilon(1e-4).scale(1.0));
  }
}

TEST_CASE("finite-difference configuration errors") {
  auto expect_config = [](auto&& call) {
    try {
      call();
      FAIL("bad configuration accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Configuration);
    }
  };
  expect_config([] { fd_reference(SmoothEnergy::quadratic(), Mobility::Unit, sine_initial(1.0), {}, 32, {0.1}); });
  expect_config([] {
    FdBoundary bc;
    bc.kind = BoundaryKind::GeneralDirichlet;
    fd_reference(SmoothEnergy::quadratic(), Mobility::Unit, sine_initial(1.0), bc, 128, {0.1});
  });
  expect_config([] { fd_reference(SmoothEnergy::quadratic(), Mobility::Unit, sine_initial(1.0), {}, 128, {-0.1}); });
}
