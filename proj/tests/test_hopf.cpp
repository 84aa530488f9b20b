#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "displab/hopf.hpp"
#include "displab/initial_data.hpp"

using namespace displab;

namespace {

// Independent oracle: contractive fixed-point iteration for the foot of the
// single characteristic through (x,t), valid while 6 t max|u0'| < 1.
double foot_by_iteration(const datum::InitialDatum& d, double x, double t) {
  double xi = x;
  for (int i = 0; i < 300; ++i) xi = x - 6.0 * t * d(xi);
  return xi;
}

}  // namespace

TEST_CASE("breaking point of the unit sech hump matches closed forms") {
  const auto d = datum::make_sech_datum(1.0);
  const auto cp = hopf::find_catastrophe(d);
  CHECK(cp.t_c == doctest::Approx(std::sqrt(3.0) / 8.0).epsilon(1e-12));
  CHECK(cp.u_c == doctest::Approx(-2.0 / 3.0).epsilon(1e-10));
  CHECK(cp.xi_c == doctest::Approx(-std::atanh(1.0 / std::sqrt(3.0))).epsilon(1e-9));
  CHECK(cp.x_c ==
        doctest::Approx(-std::sqrt(3.0) / 2.0 - std::atanh(1.0 / std::sqrt(3.0))).epsilon(1e-9));
  CHECK(cp.k == doctest::Approx(81.0 * std::sqrt(3.0) / 16.0).epsilon(1e-7));
}

TEST_CASE("breaking time scales inversely with the hump amplitude") {
  const auto d = datum::make_sech_datum(2.5);
  const auto cp = hopf::find_catastrophe(d);
  CHECK(cp.t_c == doctest::Approx(std::sqrt(3.0) / (8.0 * 2.5)).epsilon(1e-11));
  CHECK(cp.u_c == doctest::Approx(-2.0 * 2.5 / 3.0).epsilon(1e-10));
}

TEST_CASE("characteristic solution before breaking") {
  const auto d = datum::make_sech_datum(1.0);

  // against the contraction-mapping oracle
  for (double x : {-2.0, -0.9, 0.0, 0.4, 1.7}) {
    const double xi = foot_by_iteration(d, x, 0.1);
    CHECK(hopf::hopf_evaluate(d, x, 0.1) == doctest::Approx(d(xi)).epsilon(1e-12));
  }

  // exact transport along a chosen characteristic
  const double xi0 = -1.1;
  const double t = 0.15;
  const double x = xi0 + 6.0 * t * d(xi0);
  CHECK(hopf::hopf_evaluate(d, x, t) == doctest::Approx(d(xi0)).epsilon(1e-11));

  // t = 0 reduces to the datum itself
  CHECK(hopf::hopf_evaluate(d, 0.37, 0.0) == doctest::Approx(d(0.37)).epsilon(1e-13));
}

TEST_CASE("after breaking three characteristics cross and are all reported") {
  const auto d = datum::make_sech_datum(1.0);
  const auto cp = hopf::find_catastrophe(d);
  const double t = cp.t_c + 0.1;
  const double x = cp.x_c + 6.0 * cp.u_c * 0.1;
  CHECK_THROWS_AS(hopf::hopf_evaluate(d, x, t), multivalued_error);
  try {
    hopf::hopf_evaluate(d, x, t);
  } catch (const multivalued_error& e) {
    REQUIRE(e.roots.size() == 3);
    for (double xi : e.roots) CHECK(xi + 6.0 * t * d(xi) == doctest::Approx(x).epsilon(1e-9));
  }
  // single-valued far from the fan at the same time
  CHECK_NOTHROW(hopf::hopf_evaluate(d, x + 5.0, t));
}

TEST_CASE("cube-root law at the breaking point") {
  const auto d = datum::make_sech_datum(1.0);
  const auto cp = hopf::find_catastrophe(d);
  std::vector<double> offsets{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  const double p = hopf::local_exponent(d, cp, offsets);
  CHECK(p > 1.0 / 3.0 - 0.04);
  CHECK(p < 1.0 / 3.0 + 0.04);

  // and from the left
  for (double& o : offsets) o = -o;
  const double q = hopf::local_exponent(d, cp, offsets);
  CHECK(q > 1.0 / 3.0 - 0.04);
  CHECK(q < 1.0 / 3.0 + 0.04);

  // offsets reaching far outside the scaling region break the fit
  std::vector<double> wild{1e-4, 1e-2, 0.5, 1.5};
  CHECK_THROWS_AS(hopf::local_exponent(d, cp, wild), numerical_error);
}

TEST_CASE("residual triple vanishes only at the breaking point") {
  const auto d = datum::make_sech_datum(1.0);
  const auto cp = hopf::find_catastrophe(d);
  const auto r0 = hopf::critical_residual(d, cp.x_c, cp.t_c, cp.u_c);
  CHECK(std::abs(r0.F) < 1e-8);
  CHECK(std::abs(r0.dF) < 1e-8);
  CHECK(std::abs(r0.d2F) < 1e-7);

  // analytic derivatives of f_L for the sech hump at a generic lambda
  const double lam = -0.4;
  const double t = 0.1;
  const auto r = hopf::critical_residual(d, -0.2, t, lam);
  CHECK(r.dF == doctest::Approx(6.0 * t + 1.0 / (2.0 * lam * std::sqrt(1.0 + lam))).epsilon(1e-10));
  CHECK(r.d2F ==
        doctest::Approx(-(2.0 + 3.0 * lam) / (4.0 * lam * lam * std::pow(1.0 + lam, 1.5))).epsilon(1e-8));
}

TEST_CASE("degenerate hump: genericity is flagged, quintic law via bypass") {
  // tuned so that u0'' = u0''' = u0'''' = 0 at the steepest point
  const auto d =
      datum::make_tanh_poly_datum({1.0, 0.5248010658718347, 0.6423929586246135});
  CHECK_THROWS_AS(hopf::find_catastrophe(d), genericity_error);

  const auto cp = hopf::find_catastrophe(d, false);
  CHECK(std::abs(cp.k) < 1e-5);
  std::vector<double> offsets{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  const double p = hopf::local_exponent(d, cp, offsets);
  CHECK(p > 1.0 / 5.0 - 0.04);
  CHECK(p < 1.0 / 5.0 + 0.04);
}
