#include <cmath>

#include "doctest.h"
#include "invsub/errors.hpp"
#include "invsub/quadrature.hpp"
#include "invsub/series.hpp"
#include "invsub/special.hpp"
#include "oracles.hpp"

using namespace invsub;
using namespace invsub::testing;
using doctest::Approx;

TEST_SUITE("series") {

TEST_CASE("incomplete gamma") {
  CHECK(special::upper_gamma(0.5, 1.0) == Approx(std::sqrt(kPi) * std::erfc(1.0)).epsilon(1e-13));
  // Gamma(-1/2, y) = 2 e^{-y}/sqrt(y) - 2 sqrt(pi) erfc(sqrt y)
  for (double y : {0.1, 1.0, 3.0}) {
    const double ex = 2 * std::exp(-y) / std::sqrt(y) - 2 * std::sqrt(kPi) * std::erfc(std::sqrt(y));
    CHECK(special::upper_gamma(-0.5, y) == Approx(ex).epsilon(1e-12));
  }
  CHECK(special::upper_gamma(0.0, 1.0) == Approx(0.21938393439552029).epsilon(1e-13));
  CHECK(special::rgamma(0.0) == 0.0);
  CHECK(special::rgamma(-3.0) == 0.0);
  // small y: Gamma(-a, y) = Gamma(-a) + y^{-a}/a + y^{1-a}/(1-a) - ...
  const double y = 1e-8, a = 0.3;
  const double small = std::tgamma(-a) + std::pow(y, -a) / a + std::pow(y, 1 - a) / (1 - a);
  CHECK(special::upper_gamma(-a, y) == Approx(small).epsilon(1e-12));
}

TEST_CASE("stable coefficients") {
  auto s3 = make_stable(0.3);
  for (int j = 0; j <= 6; ++j) {
    CAPTURE(j);
    const double ex = std::pow(-1.0, j) * stable_conv_closed(0.3, j, 1.5);
    CHECK(coefficient_I(s3, j, 0, 0, 1.5, CoefficientSource::stable_closed_form) == Approx(ex).epsilon(1e-12));
    CHECK(coefficient_I(s3, j, 0, 0, 1.5, CoefficientSource::keyhole_numeric) == Approx(ex).epsilon(1e-8));
  }
  auto s = make_stable(0.5);
  for (int j : {1, 3, 5}) CHECK(coefficient_I(s, j, 0, 0, 2.0, CoefficientSource::stable_closed_form) == 0.0);
  // q = b = 0: one multinomial term
  CHECK(coefficient_I(s3, 2, 1, 1, 1.0) == Approx(-conv_tail_cached(s3, 4, 4, 1.0, CoefficientSource::stable_closed_form).first)
                                               .epsilon(1e-10));
  // g series: term j is (-1)^{j+1} t^{-j a - 1} sin(pi j a) Gamma(1 + j a)/pi
  for (int j = 1; j <= 5; ++j) {
    const double a = 0.3, t = 1.3;
    const double ex = std::pow(-1.0, j + 1) * std::pow(t, -j * a - 1) * std::sin(kPi * j * a) * std::tgamma(1 + j * a) / kPi;
    CHECK(coefficient_frakI(s3, j, 0, 1, t) == Approx(ex).epsilon(1e-10));
  }
  auto co = series_coefficients(s, CoefficientFamily::frakI, 0, 1, 1.0, 12);
  CHECK(co.source == CoefficientSource::stable_closed_form);
  for (int j = 2; j <= 12; j += 2) CHECK(co.values[j] == 0.0);
}

TEST_CASE("series_f and series_G_g") {
  auto s = make_stable(0.5);
  auto f = series_f(s, {Target::f, 1.0, 1.0});
  CHECK(f.value == Approx(stable_half_f(1, 1)).epsilon(1e-10));
  CHECK(f.diagnostics.at("terms") <= 40);
  auto g = series_G_g(s, {Target::g, 1.0, 1.0});
  CHECK(g.value == Approx(stable_half_g(1, 1)).epsilon(1e-10));
  auto G0 = series_G_g(s, {Target::G, 1e-300, 1.0});
  CHECK(G0.value == Approx(1.0).epsilon(1e-14));
  // f(0+, t) = tail(t)
  CHECK(series_f(s, {Target::f, 1e-300, 2.0}).value == Approx(s.tail(2.0)).epsilon(1e-14));

  auto s3 = make_stable(0.3);
  auto a = series_f(s3, {Target::f, 0.5, 2.0});
  auto b = invert_bromwich(s3, {Target::f, 0.5, 2.0});
  CHECK(std::abs(a.value - b.value) <= a.error_scale + b.error_scale);
}

TEST_CASE("series against bromwich on a grid") {
  auto ts = make_tempered_stable(0.5, 1.0);
  for (auto d : {make_stable(0.3), make_stable(0.5), make_stable(0.7), ts})
    for (double x : {0.5, 1.0, 2.0})
      for (double t : {0.5, 1.0, 2.0}) {
        // stable(0.7) at x = 2, t = 0.5 needs about 135 terms
        auto a = series_f(d, {Target::f, x, t}, SeriesOptions{200, 1e-12});
        auto b = invert_bromwich(d, {Target::f, x, t});
        CAPTURE(d.name());
        CAPTURE(x);
        CAPTURE(t);
        CHECK(std::abs(a.value - b.value) <= a.error_scale + b.error_scale);
      }
}

TEST_CASE("derivative consistency in x") {
  auto s = make_stable(0.7);
  const double x = 0.8, t = 1.0, h = 1e-4;
  auto up = series_f(s, {Target::f, x + h, t});
  auto dn = series_f(s, {Target::f, x - h, t});
  auto dk = series_f(s, {Target::f, x, t, 1, 0});
  CHECK((up.value - dn.value) / (2 * h) == Approx(dk.value).epsilon(1e-4));
}

TEST_CASE("distribution and density agree") {
  auto s = make_stable(0.5);
  // int_0^X f dx = P(L(t) <= X) = G(0+, t) - G(X, t)
  auto I = quad::integrate<double>([&](double x) { return series_f(s, {Target::f, x, 1.0}).value; }, 0.0, 1.0,
                                   1e-12, 1e-12);
  const double G0 = series_G_g(s, {Target::G, 1e-300, 1.0}).value;
  const double G1 = series_G_g(s, {Target::G, 1.0, 1.0}).value;
  CHECK(std::abs(I.value - (G0 - G1)) < 1e-6);
  CHECK(G1 == Approx(std::erfc(0.5)).epsilon(1e-10));
}

TEST_CASE("tempered closed form") {
  auto ts = make_tempered_stable(0.5, 1.0);
  const double v = tempered_stable_series_f(0.5, 1.0, 1.0, 2.0);
  auto b = invert_bromwich(ts, {Target::f, 1.0, 2.0});
  CHECK(std::abs(v - b.value) < 1e-6);
  // lambda -> 0 recovers the stable series
  CHECK(tempered_stable_series_f(0.5, 1e-10, 1.0, 1.0) == Approx(stable_half_f(1, 1)).epsilon(1e-4));
  // j = 0 term of the bracket reduces to tail(t) in the small-lambda limit
  const double a = 0.5, l = 1e-9, t = 1.0;
  const double j0 = std::pow(l, a) * std::tgamma(1 + a) * special::upper_gamma(-a, l * t) * std::sin(a * kPi) / kPi;
  CHECK(j0 == Approx(std::tgamma(1 + a) * std::pow(t, -a) * std::sin(a * kPi) / (a * kPi)).epsilon(1e-4));
}

TEST_CASE("polynomial approximation exponents") {
  auto s = make_stable(0.5);
  // odd coefficients vanish for alpha = 1/2, so only n = 1 shows its nominal rate
  auto r1 = polynomial_approx(s, 1, 0, 0, {1.0, 2.0}, {1e-4, 1e-2});
  CHECK(r1.fitted_exponent == Approx(2.0).epsilon(0.1));
  auto r3 = polynomial_approx(make_stable(0.3), 2, 0, 0, {1.0, 2.0}, {1e-4, 1e-2});
  CHECK(r3.fitted_exponent == Approx(3.0).epsilon(0.2 / 3));
  auto r0 = polynomial_approx(make_stable(0.3), 0, 0, 0, {1.0, 2.0}, {1e-4, 1e-2});
  CHECK(r0.fitted_exponent == Approx(1.0).epsilon(0.1));
  // sup over 9 t values is at least each of them
  CHECK(r1.t_probe.size() == 9);
}

TEST_CASE("coefficient cache") {
  clear_coefficient_cache();
  auto ts = make_tempered_stable(0.5, 1.0);
  const double a = coefficient_I(ts, 2, 0, 0, 1.0, CoefficientSource::keyhole_numeric);
  const auto n = coefficient_cache_size();
  CHECK(n > 0);
  CHECK(coefficient_I(ts, 2, 0, 0, 1.0, CoefficientSource::keyhole_numeric) == a);
  CHECK(coefficient_cache_size() == n);
}

}  // TEST_SUITE
