#include <cmath>

#include "doctest.h"
#include "invsub/errors.hpp"
#include "invsub/saddle.hpp"
#include "oracles.hpp"

using namespace invsub;
using namespace invsub::testing;
using doctest::Approx;

TEST_SUITE("saddle") {

TEST_CASE("solve_saddle") {
  auto s = make_stable(0.5);
  CHECK(solve_saddle(s, 1.0, 1.0) == Approx(0.25).epsilon(1e-12));
  for (double alpha : {0.3, 0.7})
    for (double r : {0.1, 2.0, 50.0}) {
      const double c = solve_saddle(make_stable(alpha), r, 1.0);
      CHECK(c == Approx(std::pow(r / alpha, 1.0 / (alpha - 1.0))).epsilon(1e-11));
    }
  CHECK(solve_saddle(make_gamma(), 0.5, 1.0) == Approx(1.0).epsilon(1e-12));
  // Phi'(0+) = 1 for gamma; drift 0.3 puts the lower end at 0.3
  CHECK_THROWS_AS(solve_saddle(make_gamma(), 1.5, 1.0), DomainError);
  CHECK_THROWS_AS(solve_saddle(add_drift(make_stable(0.5), 0.3), 0.2, 1.0), DomainError);
  // decreasing in t
  double prev = 1e300;
  for (double t : {0.5, 1.0, 2.0}) {
    const double c = solve_saddle(make_tempered_stable(0.5, 1.0), t, 10.0);
    CHECK(c < prev);
    prev = c;
  }
}

TEST_CASE("argmin property and exponent sign") {
  for (auto d : {make_stable(0.5), make_tempered_stable(0.5, 1.0), make_gamma()}) {
    const double x = 3.0, t = 1.2;
    const double c = solve_saddle(d, t, x);
    auto h = [&](double a) { return a * t - x * d.phi(a); };
    CHECK(h(c) < h(0.9 * c));
    CHECK(h(c) < h(1.1 * c));
    if (t <= x * d.phi(c) / c) CHECK(h(c) <= 0.0);
  }
}

TEST_CASE("leading term for 1/2-stable is the exact density") {
  auto s = make_stable(0.5);
  for (double x : {10.0, 100.0}) {
    auto r = asymptotic_density(s, {Target::f, x, x});
    CHECK(r.c == Approx(0.25).epsilon(1e-12));
    // e^{-x/4}/sqrt(pi x)
    CHECK(r.leading == Approx(std::exp(-x / 4) / std::sqrt(kPi * x)).epsilon(1e-12));
    CHECK(r.regime == Regime::interior);
    CHECK(r.error_scale == Approx(std::sqrt(std::log(x) / x)).epsilon(1e-12));
  }
  // g at x = t = 100: closed form 1/2-stable density
  auto g = asymptotic_G_g(s, {Target::g, 100.0, 100.0});
  CHECK(g.leading == Approx(stable_half_g(100, 100)).epsilon(1e-12));
}

TEST_CASE("sign and identities") {
  auto ts = make_tempered_stable(0.5, 1.0);
  for (int k : {0, 1, 2, 3}) {
    auto r = asymptotic_density(ts, {Target::f, 40.0, 15.0, k, 0});
    CHECK(r.sign == (k % 2 ? -1 : 1));
    CHECK((r.leading < 0) == (k % 2 == 1));
  }
  for (int k : {0, 1})
    for (int l : {0, 2}) {
      DensityQuery qf{Target::f, 60.0, 20.0, k, l}, qG{Target::G, 60.0, 20.0, k, l};
      auto f = asymptotic_density(ts, qf);
      auto G = asymptotic_G_g(ts, qG);
      CHECK(G.leading * ts.phi_dagger(G.c) == Approx(f.leading).epsilon(1e-14));
    }
  CHECK(asymptotic(ts, {Target::f_k, 10.0, 4.0}).leading == 0.0);
  CHECK(asymptotic(ts, {Target::f_c, 10.0, 4.0}).leading == 0.0);
  auto d = add_kill(add_drift(ts, 0.2), 0.1);
  auto G = asymptotic(d, {Target::G, 10.0, 4.0});
  CHECK(asymptotic(d, {Target::f_k, 10.0, 4.0}).leading == Approx(0.1 * G.leading).epsilon(1e-14));
  auto g = asymptotic(d, {Target::g, 10.0, 4.0});
  CHECK(asymptotic(d, {Target::f_c, 10.0, 4.0}).leading == Approx(0.2 * g.leading).epsilon(1e-14));
}

TEST_CASE("regime classification") {
  auto g = make_gamma();  // Phi'(0+) = 1, b = 0, delta = 0.05
  CHECK(classify_regime(g, 0.5) == Regime::interior);
  CHECK(classify_regime(g, 0.01) == Regime::drift_edge);
  CHECK(classify_regime(g, 0.99) == Regime::mean_edge);
  auto d = add_drift(g, 0.3);
  CHECK(classify_regime(d, 0.31) == Regime::drift_edge);
}

TEST_CASE("schedule probes") {
  auto s = make_stable(0.5);
  // drift edge t = sqrt(x): a* = x/4
  std::vector<double> grid{1e2, 1e3, 1e4};
  auto tab = regime_schedule_probe(s, [](double x) { return std::sqrt(x); }, grid, 0, 0);
  REQUIRE(tab.rows.size() == 3);
  for (auto& r : tab.rows) {
    CHECK(r.a_star == Approx(r.x / 4).epsilon(1e-10));
    // edge band is t/x < 0.05 Phi'(1) = 0.025
    CHECK((r.regime == Regime::drift_edge) == (r.t / r.x < 0.025));
    CHECK(std::abs(r.ratio - 1.0) < 1e-6);
  }
  // mean edge t = x^2/lnln x: a* ~ C (lnln x)^2 / x^2 with C = 1/4
  auto me = regime_schedule_probe(s, [](double x) { return x * x / std::log(std::log(x)); }, grid, 0, 0);
  for (auto& r : me.rows) {
    const double l2 = std::log(std::log(r.x));
    CHECK(r.a_star == Approx(0.25 * l2 * l2 / (r.x * r.x)).epsilon(1e-10));
  }
  // interior on a tempered stable: a real rate to fit
  auto ts = make_tempered_stable(0.5, 1.0);
  auto it = regime_schedule_probe(ts, [](double x) { return 0.4 * x; }, {1e2, 3e2, 1e3, 3e3}, 0, 0);
  CHECK(it.resolvable_rows >= 2);
  for (auto& r : it.rows) CHECK(r.deviation < 0.2);
  CHECK(it.rows.back().deviation < it.rows.front().deviation);
}

}  // TEST_SUITE
