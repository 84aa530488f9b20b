#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "displab/detail/fornberg.hpp"
#include "displab/initial_data.hpp"

using namespace displab;
using datum::InitialDatum;

namespace {
double sech(double x) { return 1.0 / std::cosh(x); }
}

TEST_CASE("sech hump: values and closed-form derivatives") {
  const auto d = datum::make_sech_datum(1.0);
  CHECK(d(0.0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(d(1.0) == doctest::Approx(-sech(1.0) * sech(1.0)).epsilon(1e-14));

  // u0' = 2 sech^2 x tanh x, u0'' = -4 sech^2 tanh^2 + 2 sech^4
  const double x = 0.7;
  const double s2 = sech(x) * sech(x);
  const double th = std::tanh(x);
  CHECK(d.derivative(x, 1) == doctest::Approx(2.0 * s2 * th).epsilon(1e-13));
  CHECK(d.derivative(x, 2) == doctest::Approx(-4.0 * s2 * th * th + 2.0 * s2 * s2).epsilon(1e-13));

  // higher orders against finite differences of the profile itself
  for (int m = 3; m <= 5; ++m) {
    const double fd = detail::fd_derivative([&](double t) { return d(t); }, x, m, 1e-2);
    CHECK(d.derivative(x, m) == doctest::Approx(fd).epsilon(2e-4));
  }
}

TEST_CASE("sech hump: minimum and decay scale") {
  const auto d = datum::make_sech_datum(2.5);
  CHECK(std::abs(d.minimum_location()) < 1e-9);
  CHECK(d.minimum_value() == doctest::Approx(-2.5).epsilon(1e-13));
  CHECK(std::abs(d(d.decay_scale())) < 1e-12);
  CHECK(std::abs(d(-d.decay_scale())) < 1e-12);
  CHECK(d.decay_scale() > 10.0);
}

TEST_CASE("decreasing-branch inversion hits analytic preimages") {
  const auto d = datum::make_sech_datum(1.0);
  // u0(-1) = -sech^2(1)
  const double u1 = -sech(1.0) * sech(1.0);
  CHECK(datum::invert_decreasing(d, u1) == doctest::Approx(-1.0).epsilon(1e-11));
  // u0(xi) = -1/2  =>  xi = -ln(1 + sqrt 2)
  CHECK(datum::invert_decreasing(d, -0.5) == doctest::Approx(-std::log(1.0 + std::sqrt(2.0))).epsilon(1e-11));
  // residual below the advertised resolution
  const double xi = datum::invert_decreasing(d, -0.123456789);
  CHECK(std::abs(d(xi) + 0.123456789) < 1e-12);
  CHECK(xi < d.minimum_location());
  // u close to zero still brackets (deep tail)
  const double far = datum::invert_decreasing(d, -1e-10);
  CHECK(d(far) == doctest::Approx(-1e-10).epsilon(1e-2));

  CHECK_THROWS_AS(datum::invert_decreasing(d, -1.5), domain_error);
  CHECK_THROWS_AS(datum::invert_decreasing(d, 0.0), domain_error);
  CHECK_THROWS_AS(datum::invert_decreasing(d, 0.25), domain_error);
}

TEST_CASE("inverse-function derivatives match the closed form for the sech hump") {
  // For u0 = -sech^2:  f_L(u) = -artanh(sqrt(1+u)),
  //   f_L'(u)   = 1 / (2 u sqrt(1+u))
  //   f_L''(u)  = -(2+3u) / (4 u^2 (1+u)^{3/2})
  //   f_L'''(-2/3) = -81 sqrt(3) / 16
  const auto d = datum::make_sech_datum(1.0);
  const double u = -2.0 / 3.0;
  CHECK(datum::fl_derivatives(d, u, 1) == doctest::Approx(-3.0 * std::sqrt(3.0) / 4.0).epsilon(1e-11));
  CHECK(std::abs(datum::fl_derivatives(d, u, 2)) < 1e-9);
  CHECK(datum::fl_derivatives(d, u, 3) == doctest::Approx(-81.0 * std::sqrt(3.0) / 16.0).epsilon(1e-8));

  const double v = -0.37;
  CHECK(datum::fl_derivatives(d, v, 1) == doctest::Approx(1.0 / (2.0 * v * std::sqrt(1.0 + v))).epsilon(1e-11));
  CHECK(datum::fl_derivatives(d, v, 2) ==
        doctest::Approx(-(2.0 + 3.0 * v) / (4.0 * v * v * std::pow(1.0 + v, 1.5))).epsilon(1e-9));

  // near the bottom of the hump the identities blow up
  CHECK_THROWS_AS(datum::fl_derivatives(d, -1.0 + 1e-15, 1), domain_error);
}

TEST_CASE("branch-inverse wrapper forwards to the free functions") {
  datum::BranchInverse fl(datum::make_sech_datum(1.0));
  CHECK(fl.umin() == doctest::Approx(-1.0));
  CHECK(fl.value(-0.5) == doctest::Approx(-std::log(1.0 + std::sqrt(2.0))).epsilon(1e-11));
  CHECK(fl.derivative(-2.0 / 3.0, 1) == doctest::Approx(-3.0 * std::sqrt(3.0) / 4.0).epsilon(1e-11));
}

TEST_CASE("table-backed datum reproduces the sampled hump") {
  std::vector<double> xs, us;
  for (int i = 0; i <= 1400; ++i) {
    const double x = -14.0 + 28.0 * i / 1400.0;
    xs.push_back(x);
    us.push_back(-sech(x) * sech(x));
  }
  const auto d = datum::make_table_datum(xs, us);
  CHECK(d.minimum_value() == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(std::abs(d.minimum_location()) < 1e-4);
  CHECK(datum::invert_decreasing(d, -0.5) == doctest::Approx(-std::log(1.0 + std::sqrt(2.0))).epsilon(1e-6));
  CHECK(datum::fl_derivatives(d, -0.5, 1) == doctest::Approx(1.0 / (2.0 * -0.5 * std::sqrt(0.5))).epsilon(1e-4));
}

TEST_CASE("inadmissible profiles are rejected") {
  CHECK_THROWS_AS(datum::make_sech_datum(-1.0), validation_error);
  CHECK_THROWS_AS(datum::make_sech_datum(0.0), validation_error);
  // sign-changing profile
  CHECK_THROWS_AS(datum::make_tanh_poly_datum({0.0, 1.0}), validation_error);
  // twin humps with a flat top at x = 0
  CHECK_THROWS_AS(datum::make_tanh_poly_datum({0.0, 0.0, 1.0}), validation_error);
  // table with non-negligible ends
  std::vector<double> xs, us;
  for (int i = 0; i <= 40; ++i) {
    const double x = -2.0 + 4.0 * i / 40.0;
    xs.push_back(x);
    us.push_back(-sech(x) * sech(x));
  }
  CHECK_THROWS_AS(datum::make_table_datum(xs, us), validation_error);
}
