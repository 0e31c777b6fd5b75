#include <cmath>
#include <random>

#include "doctest.h"
#include "invariants.hpp"
#include "invsub/bernstein.hpp"
#include "invsub/errors.hpp"

using namespace invsub;
using doctest::Approx;

namespace {
const double kSqrtPi = std::sqrt(kPi);

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_SUITE("bernstein") {

TEST_CASE("stable closed forms") {
  auto s = make_stable(0.5);
  CHECK(s.phi(4.0) == Approx(2.0).epsilon(1e-15));
  CHECK(s.tail(1.0) == Approx(1.0 / kSqrtPi).epsilon(1e-14));
  auto s7 = make_stable(0.7);
  CHECK(s7.phi(cplx(1, 1)).real() >= s7.phi(1.0));
  // principal branch: i^(1/2) = e^{i pi/4}
  const cplx v = s.phi(cplx(0, 1));
  CHECK(v.real() == Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(v.imag() == Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK_THROWS_AS(make_stable(1.0), DomainError);
  CHECK_THROWS_AS(make_stable(0.0), DomainError);
}

TEST_CASE("tempered stable") {
  auto ts = make_tempered_stable(0.5, 1.0);
  CHECK(ts.phi(3.0) == Approx(1.0).epsilon(1e-14));
  CHECK(ts.phi(0.0) == 0.0);
  CHECK(make_tempered_stable(0.3, 5.0).phi(0.0) == 0.0);
  auto t6 = make_tempered_stable(0.6, 2.0);
  const double h = 1e-5;
  const double fd = (t6.phi(1.0 + h) - t6.phi(1.0 - h)) / (2 * h);
  CHECK(rel(t6.phi_deriv(1, 1.0), 0.6 * std::pow(3.0, -0.4)) < 1e-13);
  CHECK(rel(fd, t6.phi_deriv(1, 1.0)) < 1e-8);
  // upper edge of the cut: Im Phi_+(-rho) = sqrt(rho - 1)
  for (double rho : {1.5, 2.0, 10.0}) {
    const cplx v = ts.phi(cplx(-rho, +0.0));
    CHECK(v.imag() == Approx(std::sqrt(rho - 1.0)).epsilon(1e-13));
  }
  CHECK(ts.halfplane_extension());
  CHECK_THROWS_AS(make_tempered_stable(0.5, -1.0), DomainError);
}

TEST_CASE("gamma") {
  auto g = make_gamma();
  CHECK(g.phi(std::exp(1.0) - 1.0) == Approx(1.0).epsilon(1e-15));
  CHECK(g.phi_prime_at_zero() == Approx(1.0));
  CHECK(-g.phi_deriv(2, 1.0) == Approx(0.25).epsilon(1e-15));
  REQUIRE(g.sector_half_angle().has_value());
  CHECK(*g.sector_half_angle() < kPi);
  CHECK_FALSE(g.halfplane_extension());
}

TEST_CASE("levy density descriptors") {
  auto cut = make_from_levy_density([](double y) { return std::pow(y, -1.5); }, 0.0, 0.3, 0.5);
  CHECK(cut.phi(0.0) == Approx(0.3).epsilon(1e-15));
  auto e = make_from_levy_density([](double y) { return std::exp(-y); }, 0.0, 0.0, std::nullopt);
  CHECK(e.phi(1.0) == Approx(0.5).epsilon(1e-10));
  // Phi = z/(1+z) in closed form; complex point too
  const cplx z(2.0, 3.0);
  const cplx ex = z / (1.0 + z);
  CHECK(std::abs(e.phi(z) - ex) < 1e-9);
  CHECK(e.tail(2.0) == Approx(std::exp(-2.0)).epsilon(1e-9));
  CHECK(e.phi_prime_at_zero() == Approx(1.0).epsilon(1e-9));

  auto yl = make_from_levy_density([](double y) { return std::log(1.0 / y) / y; }, 0.0, 0.0, 1.0);
  // -Phi''(x) ~ ln x / x^2: the ratio settles
  std::vector<double> r;
  for (double x : {1e2, 1e3, 1e4}) r.push_back(-yl.phi_deriv(2, x) * x * x / std::log(x));
  CHECK(std::abs(r[2] / r[1] - 1.0) < 0.1);
  CHECK(std::abs(r[1] / r[0] - 1.0) < 0.2);

  CHECK_THROWS_AS(make_from_levy_density([](double y) { return std::pow(y, -2.5); }, 0.0, 0.0, 1.0),
                  IntegrabilityError);
  CHECK_THROWS_AS(e.phi(cplx(-1.0, 0.5)), DomainError);
}

TEST_CASE("combinators") {
  auto s = make_stable(0.5);
  auto sd = add_drift(s, 1.0);
  CHECK(sd.phi(4.0) == Approx(6.0).epsilon(1e-15));
  CHECK(sd.phi_dagger(4.0) == Approx(2.0).epsilon(1e-15));
  auto id = power_composition(make_gamma(), 1.0);
  for (double z : {0.5, 1.0, 2.0}) CHECK(id.phi(z) == Approx(make_gamma().phi(z)).epsilon(1e-14));
  auto pc = power_composition(make_poisson(1.0, 1.0), 0.5);
  CHECK(pc.phi(1.0) == Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  CHECK(pc.phi(4.0) == Approx(1.0 - std::exp(-2.0)).epsilon(1e-14));
  auto k = add_kill(s, 0.25);
  CHECK(k.phi(0.0) == 0.25);
  auto sum = combine_sum({s, make_gamma()});
  CHECK(sum.phi(3.0) == Approx(std::sqrt(3.0) + std::log(4.0)).epsilon(1e-14));
  CHECK_THROWS_AS(combine_sum({}), DomainError);
  // poisson is only declared on the closed right half-plane
  CHECK_THROWS_AS(make_poisson(1.0, 1.0).phi(cplx(-1.0, 0.1)), DomainError);
  CHECK_NOTHROW(s.phi(cplx(-1.0, 0.1)));
}

TEST_CASE("delta closed forms") {
  auto s = make_stable(0.5);
  CHECK(s.delta(4.0) == Approx(1.0 / (24.0 * kSqrtPi)).epsilon(1e-13));
  // support on (1, inf) only
  auto far = make_from_levy_density([](double y) { return y > 1.0 ? std::exp(-y) : 0.0; }, 0.0, 0.0, std::nullopt);
  CHECK(far.delta(2.0) == Approx(0.0).scale(1.0).epsilon(1e-12));
  auto e = make_from_levy_density([](double y) { return std::exp(-y); }, 0.0, 0.0, std::nullopt);
  CHECK(e.delta(1.0) == Approx(2.0 - 5.0 * std::exp(-1.0)).epsilon(1e-9));
  // tail-only bracket
  auto pc = power_composition(make_stable(0.5), 0.5);
  auto br = pc.delta_bracket(2.0);
  CHECK(br.lower <= br.upper);
  // power(stable(1/2), 1/2) is stable(1/4)
  CHECK(br.lower == Approx(make_stable(0.25).delta(2.0)).epsilon(1e-6));
}

TEST_CASE("conjugate symmetry, dagger identity, derivatives") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(0.1, 20.0), ub(-20.0, 20.0);
  for (auto& nd : testing::builtin_descriptors()) {
    CAPTURE(nd.name);
    const auto& d = nd.d;
    for (int i = 0; i < 20; ++i) {
      const cplx z(ua(rng), ub(rng));
      const cplx p = d.phi(z), pc = d.phi(std::conj(z));
      CHECK(std::abs(pc - std::conj(p)) <= 1e-12 * std::abs(p) + (nd.numeric ? 1e-8 * std::abs(p) : 0.0));
      const cplx dag = d.phi_dagger(z);
      CHECK(std::abs(dag - (p - d.kill_rate() - d.drift() * z)) <= 1e-12 * std::abs(p));
      // centered differences on a circle of 64 points around z (trapezoid
      // rule for the Cauchy formula); plain real-axis differences lose the
      // third derivative to roundoff wherever |Phi| dwarfs it
      const double r = 0.5 * z.real();
      const int m = 64;
      for (int n = 1; n <= 3; ++n) {
        cplx acc = 0;
        double peak = 0;
        for (int j = 0; j < m; ++j) {
          const cplx e = std::polar(1.0, 2 * kPi * j / m);
          const cplx v = d.phi(z + r * e);
          acc += v * std::pow(e, -n);
          peak = std::max(peak, std::abs(v));
        }
        const cplx fd = acc * std::tgamma(n + 1.0) / (m * std::pow(r, n));
        const cplx an = d.phi_deriv(n, z);
        const double noise = (nd.numeric ? 1e-9 : 1e-14) * peak * std::tgamma(n + 1.0) / std::pow(r, n);
        CHECK(std::abs(fd - an) <= 1e-6 * std::abs(an) + noise);
      }
    }
    CHECK(d.phi_dagger(0.0) == 0.0);
  }
}

TEST_CASE("dagger over z vanishes at infinity") {
  for (auto& nd : testing::builtin_descriptors()) {
    CAPTURE(nd.name);
    const double big = 1e8;
    CHECK(nd.d.phi_dagger(big) / big < 1e-2);
  }
}

TEST_CASE("tail matches integrated density") {
  auto e = make_from_levy_density([](double y) { return std::pow(y, -1.5) * std::exp(-y); }, 0.0, 0.0, std::nullopt);
  auto ts = make_tempered_stable(0.5, 1.0);
  // tempered stable measure is alpha/Gamma(1-alpha) y^{-1-alpha} e^{-lambda y}
  const double c = 0.5 / std::tgamma(0.5);
  for (double t : {0.1, 1.0, 3.0}) CHECK(c * e.tail(t) == Approx(ts.tail(t)).epsilon(1e-8));
}

TEST_CASE("invariant probes on every built-in descriptor") {
  for (auto& nd : testing::builtin_descriptors()) {
    CAPTURE(nd.name);
    auto tally = testing::probe_invariants(nd.d, nd.numeric, 200, 11);
    CAPTURE(tally.first_failure);
    CHECK(tally.total_failures() == 0);
  }
}

TEST_CASE("upper sandwich constant is 4 e^-2, not e^-1") {
  // one jump of size 1: -Phi''(2) = e^{-2}, Delta(2) = 0, tail(1/2) = 1
  auto p = make_poisson(1.0, 1.0);
  const double x = 2.0, m = -p.phi_deriv(2, x);
  CHECK(m == Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(p.delta(x) == 0.0);
  CHECK(m > std::exp(-1.0) * p.tail(1.0 / x) / (x * x));
  CHECK(m <= 4 * std::exp(-2.0) * p.tail(1.0 / x) / (x * x) * (1 + 1e-15));
}

}  // TEST_SUITE
