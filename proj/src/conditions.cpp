#include "invsub/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "invsub/errors.hpp"
#include "invsub/saddle.hpp"

namespace invsub {

std::string to_string(ConditionId c) {
  switch (c) {
    case ConditionId::A1: return "A1";
    case ConditionId::A2: return "A2";
    case ConditionId::A2prime: return "A2prime";
    case ConditionId::A2star: return "A2star";
    case ConditionId::DR: return "DR";
    case ConditionId::phi2_sandwich: return "phi2_sandwich";
    case ConditionId::addCondi: return "addCondi";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::supported: return "supported";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

double delta(const BernsteinDescriptor& d, double x) { return d.delta(x); }

std::vector<double> default_condition_grid() {
  std::vector<double> g;
  for (int i = 0; i < 24; ++i) g.push_back(std::pow(10.0, 1.0 + 6.0 * i / 23.0));
  return g;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_grid(const std::vector<double>& grid, double min_allowed, const char* who, std::size_t min_points = 4) {
  if (grid.size() < min_points)
    throw DomainError(std::string(who) + ": need at least " + std::to_string(min_points) + " grid points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > min_allowed))
      throw DomainError(std::string(who) + ": grid point out of range");
    if (i && !(grid[i] > grid[i - 1])) throw DomainError(std::string(who) + ": grid must be strictly increasing");
  }
}

double slope(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  double sab = 0, saa = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
  }
  return saa > 0 ? sab / saa : 0.0;
}

struct Trend {
  std::vector<double> tail;  // asymptotic half, ordered toward the limit
  bool increasing = true, decreasing = true, positive = true;
  double loglog = 0, lnln = 0;
};

// u grows toward the limit (u = x, or 1/x for the at-zero variants)
Trend trend(const std::vector<double>& u, const std::vector<double>& r) {
  Trend tr;
  const std::size_t n = u.size(), h = n / 2;
  std::vector<double> lu, llu, lr;
  for (std::size_t i = h; i < n; ++i) {
    tr.tail.push_back(r[i]);
    if (!(r[i] > 0)) tr.positive = false;
    if (i > h) {
      if (r[i] < r[i - 1]) tr.increasing = false;
      if (r[i] > r[i - 1]) tr.decreasing = false;
    }
  }
  if (!tr.positive) return tr;
  for (std::size_t i = h; i < n; ++i) {
    lu.push_back(std::log(u[i]));
    llu.push_back(std::log(std::max(std::log(u[i]), 1e-3)));
    lr.push_back(std::log(r[i]));
  }
  tr.loglog = slope(lu, lr);
  tr.lnln = slope(llu, lr);
  return tr;
}

// liminf r > 0
void classify_liminf(ConditionReport& rep, const std::vector<double>& u) {
  Trend tr = trend(u, rep.ratio_values);
  rep.loglog_slope = tr.loglog;
  rep.lnln_slope = tr.lnln;
  const double lo = *std::min_element(tr.tail.begin(), tr.tail.end());
  if (!tr.positive) {
    rep.verdict = Verdict::violated;
    rep.estimate = std::min(lo, 0.0);
    rep.note = "ratio reaches 0 on the grid";
  } else if (tr.decreasing && tr.lnln < -0.5) {
    // faster than any slowly varying floor: heading to 0
    rep.verdict = Verdict::violated;
    rep.estimate = 0.0;
    rep.note = "monotone decay toward 0";
  } else if (tr.increasing && tr.lnln > 0.5) {
    rep.verdict = Verdict::supported;
    rep.estimate = kInf;
    rep.note = "diverging";
  } else if (tr.lnln >= -0.5) {
    rep.verdict = Verdict::supported;
    rep.estimate = lo;
  } else {
    rep.verdict = Verdict::inconclusive;
    rep.estimate = lo;
    rep.note = "non-monotone with a downward trend";
  }
}

// limsup r < inf
void classify_limsup(ConditionReport& rep, const std::vector<double>& u) {
  std::vector<double> a(rep.ratio_values.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(rep.ratio_values[i]);
  Trend tr = trend(u, a);
  rep.loglog_slope = tr.loglog;
  rep.lnln_slope = tr.lnln;
  const double hi = *std::max_element(tr.tail.begin(), tr.tail.end());
  if (!std::isfinite(hi)) {
    rep.verdict = Verdict::violated;
    rep.estimate = kInf;
    rep.note = "non-finite ratio";
  } else if (!tr.positive) {
    rep.verdict = Verdict::supported;
    rep.estimate = hi;
  } else if (tr.increasing && tr.lnln > 0.5) {
    rep.verdict = Verdict::violated;
    rep.estimate = kInf;
    rep.note = "diverging";
  } else if (tr.lnln <= 0.5) {
    rep.verdict = Verdict::supported;
    rep.estimate = hi;
  } else {
    rep.verdict = Verdict::inconclusive;
    rep.estimate = hi;
    rep.note = "non-monotone with an upward trend";
  }
}

}  // namespace

ConditionReport check_A1(const BernsteinDescriptor& d, const std::vector<double>& grid) {
  check_grid(grid, 1.0, "check_A1");
  ConditionReport rep;
  rep.condition_id = ConditionId::A1;
  rep.probe_grid = grid;
  std::vector<double> lo, hi;
  for (double x : grid) {
    auto br = d.delta_bracket(x);
    rep.ratio_values.push_back(x * x * br.lower / std::log(x));
    lo.push_back(br.lower);
    hi.push_back(br.upper);
  }
  classify_liminf(rep, grid);
  if (d.node().tail_only()) {
    rep.extra = {{"delta", lo}, {"delta_surrogate", hi}};
    rep.note += rep.note.empty() ? "Delta from the tail identity" : "; Delta from the tail identity";
  }
  return rep;
}

ConditionReport check_A2(const BernsteinDescriptor& d, const std::vector<double>& grid, bool at_zero) {
  check_grid(grid, 0.0, "check_A2");
  ConditionReport rep;
  rep.condition_id = at_zero ? ConditionId::A2prime : ConditionId::A2;
  std::vector<double> u;
  if (at_zero) {
    // limit x -> 0: walk the reciprocal grid, report in increasing x
    for (auto it = grid.rbegin(); it != grid.rend(); ++it) rep.probe_grid.push_back(1.0 / *it);
  } else {
    rep.probe_grid = grid;
  }
  for (double x : rep.probe_grid) {
    const double p2 = d.phi_deriv(2, x), p3 = d.phi_deriv(3, x);
    rep.ratio_values.push_back(p2 == 0.0 ? 0.0 : x * p3 / -p2);
  }
  if (at_zero) {
    std::vector<double> r(rep.ratio_values.rbegin(), rep.ratio_values.rend());
    std::vector<double> uu(grid.begin(), grid.end());
    ConditionReport tmp = rep;
    tmp.ratio_values = r;
    classify_limsup(tmp, uu);
    rep.verdict = tmp.verdict;
    rep.estimate = tmp.estimate;
    rep.loglog_slope = tmp.loglog_slope;
    rep.lnln_slope = tmp.lnln_slope;
    rep.note = tmp.note;
  } else {
    classify_limsup(rep, grid);
  }
  return rep;
}

std::pair<ConditionReport, ConditionReport> check_A2star_and_DR(const BernsteinDescriptor& d,
                                                                const std::vector<double>& grid) {
  check_grid(grid, 0.0, "check_A2star_and_DR");
  ConditionReport star, dr;
  star.condition_id = ConditionId::A2star;
  dr.condition_id = ConditionId::DR;
  star.probe_grid = dr.probe_grid = grid;
  for (double x : grid) {
    const double p1 = d.phi_deriv(2, x);
    star.ratio_values.push_back(p1 == 0.0 ? 0.0 : d.phi_deriv(2, 2 * x) / p1);
    const double tail = d.tail(1.0 / x);
    dr.ratio_values.push_back(tail > 0 ? x * x * d.delta_bracket(x).lower / tail : kInf);
  }
  classify_liminf(star, grid);
  classify_liminf(dr, grid);
  return {star, dr};
}

ConditionReport check_phi2_sandwich(const BernsteinDescriptor& d, const std::vector<double>& grid) {
  check_grid(grid, 0.0, "check_phi2_sandwich", 1);
  ConditionReport rep;
  rep.condition_id = ConditionId::phi2_sandwich;
  rep.probe_grid = grid;
  std::vector<double> lower, mid, upper;
  const double ie = std::exp(-1.0);
  // y^2 e^{-xy} <= 4 e^{-2} x^{-2} for y >= 1/x; e^{-1} is too small here
  const double ce = 4.0 * std::exp(-2.0);
  int failures = 0;
  double worst = 0.0;
  for (double x : grid) {
    const auto br = d.delta_bracket(x);
    const double m = -d.phi_deriv(2, x);
    const double lo = ie * br.lower, up = br.lower + ce * d.tail(1.0 / x) / (x * x);
    lower.push_back(lo);
    mid.push_back(m);
    upper.push_back(up);
    rep.ratio_values.push_back(up > 0 ? m / up : 0.0);
    // quadrature noise allowance
    const double slack = 1e-8 * std::max(up, 1e-300);
    if (m < lo - slack || m > up + slack) ++failures;
    if (up > 0) worst = std::max(worst, m / up);
  }
  rep.extra = {{"lower", lower}, {"neg_phi2", mid}, {"upper", upper}};
  rep.verdict = failures ? Verdict::violated : Verdict::supported;
  rep.estimate = worst;
  if (failures) {
    std::ostringstream os;
    os << failures << " grid point(s) outside the bounds";
    rep.note = os.str();
  }
  return rep;
}

ConditionReport check_addCondi(const BernsteinDescriptor& d, const std::function<double(double)>& t_of_x,
                               const std::vector<double>& grid) {
  check_grid(grid, 0.0, "check_addCondi");
  ConditionReport rep;
  rep.condition_id = ConditionId::addCondi;
  rep.probe_grid = grid;
  std::vector<double> astar, second, third01, third1;
  for (double x : grid) {
    const double t = t_of_x(x);
    const double a = solve_saddle(d, t, x);  // throws DomainError outside the band
    const double p2 = -d.phi_deriv(2, a);
    astar.push_back(a);
    rep.ratio_values.push_back(x * p2 * a * a);
    second.push_back(-std::log(a) / x);
    // log form: e^{-delta x} x Phi''(a) a^2 underflows long before it matters
    const double base = std::log(x) + std::log(p2) + 2 * std::log(a);
    third01.push_back(-0.1 * x + base);
    third1.push_back(-1.0 * x + base);
  }
  rep.extra = {{"a_star", astar}, {"neg_ln_a_over_x", second}, {"ln_third_delta_0.1", third01},
               {"ln_third_delta_1", third1}};
  Trend tr = trend(grid, rep.ratio_values);
  rep.loglog_slope = tr.loglog;
  rep.lnln_slope = tr.lnln;
  const std::size_t h = grid.size() / 2;
  const double sec_max = *std::max_element(second.begin() + h, second.end());
  auto heading_down = [&](const std::vector<double>& v) {
    for (std::size_t i = h + 1; i < v.size(); ++i)
      if (v[i] > v[i - 1]) return false;
    return v.back() < -5.0;
  };
  const bool third_ok = heading_down(third01) && heading_down(third1);
  std::ostringstream os;
  if (tr.positive && tr.increasing && tr.loglog > 0) {
    rep.verdict = third_ok && std::isfinite(sec_max) ? Verdict::supported : Verdict::inconclusive;
    rep.estimate = kInf;
    os << "first limit growing";
  } else if (tr.positive && tr.decreasing) {
    rep.verdict = Verdict::violated;
    rep.estimate = 0.0;
    os << "first limit shrinking";
  } else {
    rep.verdict = Verdict::inconclusive;
    rep.estimate = tr.tail.empty() ? 0.0 : tr.tail.back();
    os << "first limit without a clear trend";
  }
  os << "; sup -ln(a*)/x on the upper half = " << sec_max;
  if (!third_ok) os << "; third limit not clearly -> 0";
  rep.note = os.str();
  return rep;
}

}  // namespace invsub
