#include <cmath>
#include <limits>

#include "doctest.h"
#include "invariants.hpp"
#include "invsub/conditions.hpp"
#include "invsub/errors.hpp"

using namespace invsub;
using doctest::Approx;

namespace {
std::vector<double> decades(int lo, int hi) {
  std::vector<double> g;
  for (int e = lo; e <= hi; ++e) g.push_back(std::pow(10.0, e));
  return g;
}
BernsteinDescriptor ylog() {
  return make_from_levy_density([](double y) { return std::log(1.0 / y) / y; }, 0.0, 0.0, 1.0);
}
BernsteinDescriptor expdens() {
  return make_from_levy_density([](double y) { return std::exp(-y); }, 0.0, 0.0, std::nullopt);
}
}  // namespace

TEST_SUITE("conditions") {

TEST_CASE("delta oracle values") {
  CHECK(delta(make_stable(0.5), 4.0) == Approx(1.0 / (24.0 * std::sqrt(kPi))).epsilon(1e-13));
  CHECK(delta(expdens(), 1.0) == Approx(2.0 - 5.0 * std::exp(-1.0)).epsilon(1e-9));
  auto far = make_from_levy_density([](double y) { return y > 1.0 ? 1.0 / (y * y) : 0.0; }, 0.0, 0.0, std::nullopt);
  CHECK(delta(far, 2.0) == Approx(0.0).scale(1.0).epsilon(1e-14));
}

TEST_CASE("default grid") {
  auto g = default_condition_grid();
  REQUIRE(g.size() == 24);
  CHECK(g.front() == Approx(10.0));
  CHECK(g.back() == Approx(1e7));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("A1") {
  auto r = check_A1(make_stable(0.5), decades(1, 6));
  CHECK(r.verdict == Verdict::supported);
  CHECK(r.estimate == std::numeric_limits<double>::infinity());
  REQUIRE(r.ratio_values.size() == r.probe_grid.size());
  for (std::size_t i = 0; i < r.probe_grid.size(); ++i) {
    const double x = r.probe_grid[i];
    const double exact = x * x * 0.5 * std::pow(x, -1.5) / (1.5 * std::sqrt(kPi)) / std::log(x);
    CHECK(r.ratio_values[i] == Approx(exact).epsilon(1e-10));
  }
  // Delta tends to the second moment, so the ratio diverges
  auto cut = make_from_levy_density([](double y) { return std::pow(y, -1.5); }, 0.0, 0.0, 1.0);
  CHECK(check_A1(cut, decades(1, 6)).verdict == Verdict::supported);
  // Delta(x) ~ x^{-3}/3: ratio -> 0
  auto e = check_A1(expdens(), decades(1, 6));
  CHECK(e.verdict == Verdict::violated);
}

TEST_CASE("A2 and A2'") {
  for (double alpha : {0.3, 0.5, 0.7}) {
    auto r = check_A2(make_stable(alpha), default_condition_grid());
    CHECK(r.verdict == Verdict::supported);
    CHECK(r.estimate == Approx(2.0 - alpha).epsilon(1e-10));
    for (double v : r.ratio_values) CHECK(v == Approx(2.0 - alpha).epsilon(1e-10));
  }
  auto g = check_A2(make_gamma(), decades(1, 6));
  for (std::size_t i = 0; i < g.probe_grid.size(); ++i) {
    const double x = g.probe_grid[i];
    CHECK(g.ratio_values[i] == Approx(2 * x / (1 + x)).epsilon(1e-12));
  }
  CHECK(g.verdict == Verdict::supported);
  CHECK(g.estimate == Approx(2.0).epsilon(1e-3));
  auto e = check_A2(expdens(), decades(1, 6));
  for (std::size_t i = 0; i < e.probe_grid.size(); ++i) {
    const double x = e.probe_grid[i];
    CHECK(e.ratio_values[i] == Approx(3 * x / (1 + x)).epsilon(1e-6));
  }
  CHECK(e.verdict == Verdict::supported);
  auto z = check_A2(make_stable(0.5), decades(1, 6), true);
  CHECK(z.condition_id == ConditionId::A2prime);
  for (std::size_t i = 1; i < z.probe_grid.size(); ++i) CHECK(z.probe_grid[i] > z.probe_grid[i - 1]);
  for (double v : z.ratio_values) CHECK(v == Approx(1.5).epsilon(1e-10));
}

TEST_CASE("A2* and DR") {
  auto [a, dr] = check_A2star_and_DR(make_stable(0.5), default_condition_grid());
  for (double v : a.ratio_values) CHECK(v == Approx(std::pow(2.0, -1.5)).epsilon(1e-10));
  for (double v : dr.ratio_values) CHECK(v == Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(dr.verdict == Verdict::supported);
  auto [a2, dr2] = check_A2star_and_DR(ylog(), default_condition_grid());
  CHECK(dr2.verdict == Verdict::violated);
  CHECK(check_A1(ylog(), default_condition_grid()).verdict == Verdict::supported);
  CHECK(check_A2(ylog(), default_condition_grid()).verdict == Verdict::supported);
}

TEST_CASE("sandwich never violated on built-ins") {
  for (auto& nd : testing::builtin_descriptors()) {
    CAPTURE(nd.name);
    auto r = check_phi2_sandwich(nd.d, decades(-2, 5));
    CHECK(r.verdict != Verdict::violated);
  }
  // stable(1/2) at x = 1
  auto r = check_phi2_sandwich(make_stable(0.5), {1.0});
  CHECK(r.verdict == Verdict::supported);
}

TEST_CASE("addCondi schedules") {
  auto s = make_stable(0.5);
  auto grid = decades(2, 7);
  auto ok = check_addCondi(s, [](double x) { return x * x / std::log(std::log(std::max(x, 3.0))); }, grid);
  CHECK(ok.verdict == Verdict::supported);
  auto bad = check_addCondi(s, [](double x) { return std::pow(x, 2.5); }, grid);
  CHECK(bad.verdict == Verdict::violated);
  // finite Phi'(0+) = 1, Phi''(0+) finite
  auto g = make_gamma();
  auto edge = check_addCondi(g, [](double x) { return x - std::pow(x, 0.6); }, grid);
  CHECK(edge.verdict == Verdict::supported);
  CHECK_THROWS_AS(check_addCondi(g, [](double x) { return 2 * x; }, grid), DomainError);
}

}  // TEST_SUITE
