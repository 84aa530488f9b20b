#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "displab/errors.hpp"
#include "displab/rh.hpp"

using namespace displab;
using rh::Complex;
using rh::Mat2;

namespace {

constexpr double kPi = std::numbers::pi;

double mat_dist(const Mat2& a, const Mat2& b) { return (a - b).cwiseAbs().maxCoeff(); }

Mat2 mat(Complex a, Complex b, Complex c, Complex d) {
  Mat2 m;
  m << a, b, c, d;
  return m;
}

const Complex kI{0.0, 1.0};

}  // namespace

TEST_CASE("built-in ray fans carry the frozen data and close up cyclically") {
  const rh::RayFan p12 = rh::builtin_fan("p12");
  REQUIRE(p12.rays.size() == 4);
  CHECK(p12.rays[0].angle == doctest::Approx(0.0));
  CHECK_FALSE(p12.rays[0].toward_node);
  CHECK(mat_dist(p12.rays[0].matrix, mat(1, 1, 0, 1)) == 0.0);
  CHECK(p12.rays[1].angle == doctest::Approx(6.0 * kPi / 7.0));
  CHECK(p12.rays[1].toward_node);
  CHECK(mat_dist(p12.rays[1].matrix, mat(1, 0, 1, 1)) == 0.0);
  CHECK(p12.rays[2].angle == doctest::Approx(kPi));
  CHECK(p12.rays[2].toward_node);
  CHECK(mat_dist(p12.rays[2].matrix, mat(0, 1, -1, 0)) == 0.0);
  CHECK(p12.rays[3].angle == doctest::Approx(-6.0 * kPi / 7.0));
  CHECK(p12.rays[3].toward_node);
  CHECK(mat_dist(p12.rays[3].matrix, mat(1, 0, 1, 1)) == 0.0);
  CHECK(rh::cyclic_defect(p12) < 1e-15);

  const rh::RayFan p1 = rh::builtin_fan("p1");
  REQUIRE(p1.rays.size() == 4);
  CHECK(p1.rays[0].angle == doctest::Approx(0.0));
  CHECK_FALSE(p1.rays[0].toward_node);
  CHECK(mat_dist(p1.rays[0].matrix, mat(1, 0, kI, 1)) == 0.0);
  CHECK(p1.rays[1].angle == doctest::Approx(2.0 * kPi / 5.0));
  CHECK_FALSE(p1.rays[1].toward_node);
  CHECK(mat_dist(p1.rays[1].matrix, mat(1, kI, 0, 1)) == 0.0);
  CHECK(p1.rays[2].angle == doctest::Approx(kPi));
  CHECK(p1.rays[2].toward_node);
  CHECK(mat_dist(p1.rays[2].matrix, mat(0, kI, kI, 0)) == 0.0);
  CHECK(p1.rays[3].angle == doctest::Approx(-2.0 * kPi / 5.0));
  CHECK_FALSE(p1.rays[3].toward_node);
  CHECK(mat_dist(p1.rays[3].matrix, mat(1, kI, 0, 1)) == 0.0);
  CHECK(rh::cyclic_defect(p1) < 1e-15);

  CHECK_THROWS_AS(rh::builtin_fan("airy"), validation_error);
}

TEST_CASE("only the orientation mask and its complement annihilate a fan") {
  // Crossing order is counterclockwise from just above the positive axis, so
  // the two mid-plane rays come first and the angle-0 ray last.
  const rh::RayFan p12 = rh::builtin_fan("p12");
  for (unsigned mask = 0; mask < 16; ++mask) {
    const double defect = rh::cyclic_defect_pattern(p12, mask);
    if (mask == 0b0111u || mask == 0b1000u)
      CHECK(defect < 1e-14);
    else
      CHECK(defect > 0.5);
  }
  const rh::RayFan p1 = rh::builtin_fan("p1");
  for (unsigned mask = 0; mask < 16; ++mask) {
    const double defect = rh::cyclic_defect_pattern(p1, mask);
    if (mask == 0b0010u || mask == 0b1101u)
      CHECK(defect < 1e-14);
    else
      CHECK(defect > 0.5);
  }
  CHECK_THROWS_AS(rh::cyclic_defect_pattern(p12, 16u), validation_error);

  rh::RayFan bad = p12;
  bad.rays[1].angle = bad.rays[2].angle;
  CHECK_THROWS_AS(rh::cyclic_defect(bad), validation_error);
  bad = p12;
  bad.rays[1].angle = 4.0;
  CHECK_THROWS_AS(rh::cyclic_defect(bad), validation_error);
}

TEST_CASE("normalization matrices match their hand-computed entries") {
  const Mat2 n12 = rh::normalization_matrix("p12");
  CHECK(mat_dist(n12, mat(Complex(0.5, -0.5), Complex(0.5, 0.5), Complex(-0.5, 0.5),
                          Complex(0.5, 0.5))) < 1e-15);
  CHECK(mat_dist(n12 * n12.adjoint(), Mat2::Identity()) < 1e-15);
  CHECK(std::abs(n12.determinant() - 1.0) < 1e-15);

  const double s = 1.0 / std::sqrt(2.0);
  const Mat2 n1 = rh::normalization_matrix("p1");
  CHECK(mat_dist(n1, mat(s, s, s, -s)) < 1e-15);
  CHECK(mat_dist(n1 * n1.adjoint(), Mat2::Identity()) < 1e-15);
  CHECK(std::abs(n1.determinant() + 1.0) < 1e-15);

  CHECK_THROWS_AS(rh::normalization_matrix("p3"), validation_error);
}

TEST_CASE("sector phases take principal branches and flip sign across the cut") {
  const Complex th = rh::p12_phase(Complex(1.0, 2.0), 0.3, -0.7);
  CHECK(std::abs(th - Complex(0.1932549473669925, 0.906302243107098)) < 1e-12);

  const Complex at = rh::p1_phase(Complex(2.0, 1.0), 1.5);
  CHECK(std::abs(at - Complex(0.2104176220907794, 4.966314083471397)) < 1e-12);

  const double delta = 1e-9;
  const Complex th_up = rh::p12_phase(Complex(-1.3, delta), 0.3, -0.7);
  const Complex th_dn = rh::p12_phase(Complex(-1.3, -delta), 0.3, -0.7);
  CHECK(std::abs(th_up + th_dn) < 1e-7);
  const Complex at_up = rh::p1_phase(Complex(-1.3, delta), 1.5);
  const Complex at_dn = rh::p1_phase(Complex(-1.3, -delta), 1.5);
  CHECK(std::abs(at_up + at_dn) < 1e-7);
}

TEST_CASE("reflection families: matrix layout, evolution factors, determinants") {
  const Complex r{0.3, 0.2};

  SUBCASE("kdv and its hierarchy") {
    const rh::ReflectionFamily kdv = rh::builtin_reflection("kdv");
    const Mat2 v = kdv.jump(-0.6, 0.4, 0.15, 0.05, r);
    const Complex osc = std::polar(1.0, 2.0 * 0.4 * std::sqrt(0.6) / 0.05);
    CHECK(std::abs(v(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(v(0, 1) - r * osc) < 1e-14);
    CHECK(std::abs(v(1, 0) + std::conj(r) * std::conj(osc)) < 1e-14);
    CHECK(std::abs(v(1, 1) - (1.0 - std::norm(r))) < 1e-15);
    CHECK(std::abs(v.determinant() - 1.0) < 1e-14);

    CHECK(mat_dist(kdv.jump(0.8, 0.4, 0.15, 0.05, r), mat(0, 1, 1, 0)) == 0.0);
    CHECK_THROWS_AS(kdv.jump(0.0, 0.4, 0.15, 0.05, r), domain_error);

    const Complex ev = kdv.evolution(-0.6, 0.15, 0.05);
    CHECK(std::abs(ev - Complex(0.1579534594576742, -0.9874465578679956)) < 1e-12);
    CHECK(std::abs(std::abs(ev) - 1.0) < 1e-14);
    CHECK_THROWS_AS(kdv.evolution(0.3, 0.15, 0.05), domain_error);

    const rh::ReflectionFamily h1 = rh::builtin_reflection("kdv_hierarchy_1");
    CHECK(std::abs(h1.evolution(-0.6, 0.15, 0.05) - ev) < 1e-14);
    const rh::ReflectionFamily h2 = rh::builtin_reflection("kdv_hierarchy_2");
    CHECK(std::abs(h2.evolution(-0.6, 0.15, 0.05) -
                   Complex(-0.06647427944558987, 0.9977881389213793)) < 1e-12);
    CHECK_THROWS_AS(rh::builtin_reflection("kdv_hierarchy_7"), validation_error);
    CHECK_THROWS_AS(rh::builtin_reflection("kdv_hierarchy_x"), validation_error);
  }

  SUBCASE("camassa-holm") {
    const rh::ReflectionFamily ch = rh::builtin_reflection("ch");
    const Mat2 v = ch.jump(0.7, 0.4, 0.15, 0.05, r);
    const Complex osc = std::polar(1.0, -2.0 * 0.4 * 0.7);
    CHECK(std::abs(v(0, 0) - (1.0 - std::norm(r))) < 1e-15);
    CHECK(std::abs(v(0, 1) - r * osc) < 1e-14);
    CHECK(std::abs(v(1, 0) + std::conj(r) * std::conj(osc)) < 1e-14);
    CHECK(std::abs(v(1, 1) - 1.0) < 1e-15);
    CHECK(std::abs(v.determinant() - 1.0) < 1e-14);
    CHECK(std::abs(ch.evolution(0.7, 0.15, 0.05) -
                   Complex(-0.9542201333406329, 0.2991052275159777)) < 1e-12);
  }

  SUBCASE("nls, both signs") {
    const rh::ReflectionFamily def = rh::builtin_reflection("nls_defocusing");
    const Complex osc = std::polar(1.0, 2.0 * 0.4 * 0.7 / 0.05);
    Mat2 v = def.jump(0.7, 0.4, 0.15, 0.05, r);
    CHECK(std::abs(v(0, 0) - (1.0 - std::norm(r))) < 1e-15);
    CHECK(std::abs(v(0, 1) + std::conj(r) * std::conj(osc)) < 1e-14);
    CHECK(std::abs(v(1, 0) - r * osc) < 1e-14);
    CHECK(std::abs(v(1, 1) - 1.0) < 1e-15);
    CHECK(std::abs(v.determinant() - 1.0) < 1e-14);

    const rh::ReflectionFamily foc = rh::builtin_reflection("nls_focusing");
    v = foc.jump(0.7, 0.4, 0.15, 0.05, r);
    CHECK(std::abs(v(0, 0) - (1.0 + std::norm(r))) < 1e-15);
    CHECK(std::abs(v(0, 1) - std::conj(r) * std::conj(osc)) < 1e-14);
    CHECK(std::abs(v(1, 0) - r * osc) < 1e-14);
    CHECK(std::abs(v(1, 1) - 1.0) < 1e-15);
    CHECK(std::abs(v.determinant() - 1.0) < 1e-14);

    const Complex ev = def.evolution(0.7, 0.15, 0.05);
    CHECK(std::abs(ev - Complex(0.9198159064366391, -0.3923502239914538)) < 1e-12);
    CHECK(std::abs(foc.evolution(0.7, 0.15, 0.05) - ev) < 1e-14);
  }

  SUBCASE("unimodular determinant across the oscillatory band") {
    for (const char* name :
         {"kdv", "kdv_hierarchy_2", "ch", "nls_defocusing", "nls_focusing"}) {
      CHECK(rh::det_defect(rh::builtin_reflection(name)) < 1e-14);
    }
    CHECK_THROWS_AS(rh::builtin_reflection("airy"), validation_error);
  }
}

TEST_CASE("wkb phase of the unit hump matches independent quadrature") {
  const datum::BranchInverse fl(datum::make_sech_datum(1.0));

  CHECK(rh::rho_wkb(fl, -0.9) == doctest::Approx(-0.7762113299395814).epsilon(1e-9));
  CHECK(rh::rho_wkb(fl, -0.5) == doctest::Approx(-0.881373587019543).epsilon(1e-9));
  CHECK(rh::rho_wkb(fl, -0.25) == doctest::Approx(-0.8239592165010823).epsilon(1e-9));
  CHECK(rh::rho_wkb(fl, -0.1) == doctest::Approx(-0.6748618600014202).epsilon(1e-9));

  CHECK_THROWS_AS(rh::rho_wkb(fl, 0.1), domain_error);
  CHECK_THROWS_AS(rh::rho_wkb(fl, -1.5), domain_error);
  CHECK_THROWS_AS(rh::rho_wkb(fl, -1e-7), domain_error);

  const Complex r0 = rh::wkb_reflection(fl, -0.5, 0.05);
  CHECK(std::abs(r0 - Complex(0.6422455417778716, -0.7664989654699138)) < 1e-8);
  CHECK(std::abs(std::abs(r0) - 1.0) < 1e-12);
  CHECK_THROWS_AS(rh::wkb_reflection(fl, -0.5, 0.0), validation_error);
}

TEST_CASE("phi vanishes to order 7/2 at breaking and 3/2 at the pre-breaking edge") {
  const datum::BranchInverse fl(datum::make_sech_datum(1.0));
  hopf::CatastrophePoint cp;
  cp.u_c = -2.0 / 3.0;
  cp.xi_c = -std::atanh(1.0 / std::sqrt(3.0));
  cp.t_c = std::sqrt(3.0) / 8.0;
  cp.x_c = 6.0 * cp.u_c * cp.t_c + cp.xi_c;
  cp.k = 81.0 * std::sqrt(3.0) / 16.0;

  CHECK(rh::phi_eval(fl, cp, -0.9, -1.4, 0.2) ==
        doctest::Approx(0.01506124608279391).epsilon(1e-9));
  CHECK(rh::phi_eval(fl, cp, -0.8, cp.x_c, cp.t_c) ==
        doctest::Approx(-6.626450264272066e-4).epsilon(1e-8));

  const double c72 = 8.0 * cp.k / 105.0;
  for (auto [d, expected] : {std::pair{1e-2, 1.00691599966}, std::pair{1e-3, 1.000669125}}) {
    const double phi = rh::phi_eval(fl, cp, cp.u_c - d, cp.x_c, cp.t_c);
    CHECK(phi / (-c72 * std::pow(d, 3.5)) == doctest::Approx(expected).epsilon(1e-6));
  }

  const double t_half = cp.t_c / 2.0;
  const double x_edge = 6.0 * cp.u_c * t_half + cp.xi_c;
  for (auto [d, expected] :
       {std::pair{1e-2, 1.00015535275}, std::pair{1e-3, 1.00000154389}}) {
    const double phi = rh::phi_eval(fl, cp, cp.u_c - d, x_edge, t_half);
    CHECK(phi / (-2.0 * cp.t_c * std::pow(d, 1.5)) == doctest::Approx(expected).epsilon(1e-6));
  }

  CHECK(rh::phi_eval(fl, cp, cp.u_c, 0.3, 0.1) == 0.0);
  CHECK_THROWS_AS(rh::phi_eval(fl, cp, -0.5, cp.x_c, cp.t_c), domain_error);
  CHECK_THROWS_AS(rh::phi_eval(fl, cp, -1.0, cp.x_c, cp.t_c), domain_error);

  const hopf::CatastrophePoint located = hopf::find_catastrophe(fl.datum());
  CHECK(rh::phi_eval(fl, located, -0.9, -1.4, 0.2) ==
        doctest::Approx(0.01506124608279391).epsilon(1e-7));
}

TEST_CASE("global parametrix: frozen value, jump relations, determinant") {
  const double u_c = -2.0 / 3.0;
  const Complex lam(0.3, 0.4);
  const Mat2 p = rh::global_parametrix(u_c, lam);
  const Complex p00(0.8240389579959022, 0.1108677405324334);
  const Complex p10(0.8045737330234413, 0.2755045643678325);
  CHECK(std::abs(p(0, 0) - p00) < 1e-12);
  CHECK(std::abs(p(0, 1) - p00) < 1e-12);
  CHECK(std::abs(p(1, 0) - p10) < 1e-12);
  CHECK(std::abs(p(1, 1) + p10) < 1e-12);
  CHECK(std::abs(p.determinant() - (-2.0 * kI * std::sqrt(-lam))) < 1e-12);

  const double delta = 1e-7;
  const Mat2 swap = mat(0, 1, 1, 0);
  const Mat2 iswap = mat(0, kI, kI, 0);
  {
    const Mat2 up = rh::global_parametrix(u_c, Complex(-0.3, delta));
    const Mat2 dn = rh::global_parametrix(u_c, Complex(-0.3, -delta));
    CHECK(mat_dist(up, dn * iswap) < 1e-5);
  }
  {
    const Mat2 up = rh::global_parametrix(u_c, Complex(0.8, delta));
    const Mat2 dn = rh::global_parametrix(u_c, Complex(0.8, -delta));
    CHECK(mat_dist(up, dn * swap) < 1e-5);
  }
  {
    const Mat2 up = rh::global_parametrix(u_c, Complex(-1.2, delta));
    const Mat2 dn = rh::global_parametrix(u_c, Complex(-1.2, -delta));
    CHECK(mat_dist(up, dn) < 1e-5);
  }
  CHECK_THROWS_AS(rh::global_parametrix(0.5, lam), validation_error);
}

TEST_CASE("scattering phases alpha and beta") {
  const Complex a = rh::alpha_phase(Complex(-0.5, 0.0), 0.4, 0.15);
  CHECK(std::abs(a.imag()) < 1e-15);
  CHECK(a.real() == doctest::Approx(0.4 * std::sqrt(0.5) + 0.6 * std::pow(0.5, 1.5))
                        .epsilon(1e-14));

  const double delta = 1e-9;
  const Complex up = rh::alpha_phase(Complex(0.5, delta), 0.4, 0.15);
  const Complex dn = rh::alpha_phase(Complex(0.5, -delta), 0.4, 0.15);
  CHECK(std::abs(up + dn) < 1e-6);

  CHECK(rh::beta_phase(0.7, 0.4, 0.15) ==
        doctest::Approx(-0.7 * (0.4 - 0.3 / 2.96)).epsilon(1e-14));
}
