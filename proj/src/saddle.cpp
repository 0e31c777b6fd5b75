#include "invsub/saddle.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "invsub/errors.hpp"

namespace invsub {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::drift_edge: return "drift_edge";
    case Regime::interior: return "interior";
    case Regime::mean_edge: return "mean_edge";
  }
  return "?";
}

double solve_saddle(const BernsteinDescriptor& d, double t, double x) {
  if (!(t > 0) || !(x > 0)) throw DomainError("solve_saddle: t and x must be positive");
  const double v = t / x;
  const double b = d.drift(), top = d.phi_prime_at_zero();
  std::ostringstream os;
  os.precision(17);
  if (!(v > b)) {
    os << "solve_saddle: t/x = " << v << " must exceed the drift b = " << b;
    throw DomainError(os.str());
  }
  if (!(v < top)) {
    os << "solve_saddle: t/x = " << v << " must be below Phi'(0+) = " << top;
    throw DomainError(os.str());
  }
  const double lv = std::log(v);
  // h is decreasing in u = ln a
  auto h = [&](double u) { return std::log(d.phi_deriv(1, std::exp(u))) - lv; };
  double ulo = 0.0, uhi = 0.0;
  double hlo = h(0.0), hhi = hlo;
  int grow = 0;
  if (hlo > 0) {
    while (hhi > 0) {
      ulo = uhi;
      hlo = hhi;
      uhi += std::log(2.0);
      hhi = h(uhi);
      if (++grow > 200) throw DomainError("solve_saddle: no bracket after 200 doublings");
    }
  } else {
    while (hlo < 0) {
      uhi = ulo;
      hhi = hlo;
      ulo -= std::log(2.0);
      hlo = h(ulo);
      if (++grow > 200) throw DomainError("solve_saddle: no bracket after 200 halvings");
    }
  }
  if (hlo == 0) return std::exp(ulo);
  if (hhi == 0) return std::exp(uhi);
  // Illinois false position, bisection fallback every few steps
  int side = 0;
  for (int it = 0; it < 300; ++it) {
    double u = (ulo * hhi - uhi * hlo) / (hhi - hlo);
    if (!(u > ulo && u < uhi) || it % 8 == 7) u = 0.5 * (ulo + uhi);
    const double hu = h(u);
    if (hu == 0) return std::exp(u);
    if (hu > 0) {
      ulo = u;
      hlo = hu;
      if (side == 1) hhi *= 0.5;
      side = 1;
    } else {
      uhi = u;
      hhi = hu;
      if (side == -1) hlo *= 0.5;
      side = -1;
    }
    if (uhi - ulo < 1e-13) break;
  }
  return std::exp(0.5 * (ulo + uhi));
}

Regime classify_regime(const BernsteinDescriptor& d, double v, const RegimeBands& bands) {
  const double b = d.drift(), top = d.phi_prime_at_zero();
  double lo, hi;
  if (std::isfinite(top)) {
    const double delta = bands.fraction * (top - b);
    lo = b + delta;
    hi = top - delta;
  } else {
    const double delta = bands.fraction * (d.phi_deriv(1, 1.0) - b);
    lo = b + delta;
    hi = b + 1.0 / delta;
  }
  if (v < lo) return Regime::drift_edge;
  if (v > hi) return Regime::mean_edge;
  return Regime::interior;
}

namespace {

SaddleSolution leading_f(const BernsteinDescriptor& d, double x, double t, int k, int l, const RegimeBands& bands) {
  if (k < 0 || l < 0) throw DomainError("derivative orders must be nonnegative");
  const double c = solve_saddle(d, t, x);
  const double phic = d.phi(c), dag = d.phi_dagger(c), p2 = d.phi_deriv(2, c);
  const double s2 = -p2 * x;
  if (!(s2 > 0)) throw std::logic_error("saddle: -Phi''(c) x <= 0 contradicts Phi'' < 0");
  SaddleSolution s;
  s.c = c;
  s.regime = classify_regime(d, t / x, bands);
  s.sign = (k % 2) ? -1 : 1;
  const double expo = c * t - x * phic;
  s.log_abs_leading = expo + std::log(dag) + k * std::log(phic) + (l - 1) * std::log(c) - 0.5 * std::log(s2) -
                      0.5 * std::log(2 * kPi);
  s.leading = s.sign * std::exp(s.log_abs_leading);
  if (s.regime == Regime::interior) {
    s.error_scale = std::sqrt(std::max(std::log(x), 1.0) / x);
  } else {
    const double w = c * std::sqrt(s2);
    s.error_scale = std::sqrt(std::max(std::log(w), 1.0)) / w;
  }
  s.diagnostics = {{"c", c},
                   {"exponent", expo},
                   {"neg_phi2_x", s2},
                   {"phi_dagger_c", dag},
                   {"regime", double(int(s.regime))},
                   {"log_abs_leading", s.log_abs_leading}};
  return s;
}

}  // namespace

SaddleSolution asymptotic_density(const BernsteinDescriptor& d, const DensityQuery& q, const RegimeBands& bands) {
  if (q.target != Target::f) throw DomainError("asymptotic_density handles target f; use asymptotic_G_g");
  return leading_f(d, q.x, q.t, q.k, q.l, bands);
}

SaddleSolution asymptotic_G_g(const BernsteinDescriptor& d, const DensityQuery& q, const RegimeBands& bands) {
  int l = q.l;
  double factor = 1.0;
  switch (q.target) {
    case Target::G: break;
    case Target::g: l += 1; break;
    case Target::f_k: factor = d.kill_rate(); break;
    case Target::f_c: factor = d.drift(); l += 1; break;
    case Target::f: throw DomainError("asymptotic_G_g handles G, g, f_k, f_c; use asymptotic_density");
  }
  SaddleSolution s = leading_f(d, q.x, q.t, q.k, l, bands);
  const double dag = s.diagnostics["phi_dagger_c"];
  if (!(dag > 0)) throw CapabilityError("saddle: Phi^dagger(c) = 0, the G/g asymptotics degenerate");
  if (factor == 0.0) {
    s.leading = 0.0;
    s.log_abs_leading = -std::numeric_limits<double>::infinity();
    s.sign = 1;
  } else {
    s.log_abs_leading += std::log(factor) - std::log(dag);
    s.leading = s.sign * std::exp(s.log_abs_leading);
  }
  s.diagnostics["log_abs_leading"] = s.log_abs_leading;
  return s;
}

SaddleSolution asymptotic(const BernsteinDescriptor& d, const DensityQuery& q, const RegimeBands& bands) {
  return q.target == Target::f ? asymptotic_density(d, q, bands) : asymptotic_G_g(d, q, bands);
}

ProbeTable regime_schedule_probe(const BernsteinDescriptor& d, const std::function<double(double)>& schedule,
                                 const std::vector<double>& x_grid, int k, int l, Target target,
                                 const ContourSpec& reference) {
  ProbeTable tab;
  std::vector<double> lx, ly;
  for (double x : x_grid) {
    ProbeRow row;
    row.x = x;
    row.t = schedule(x);
    DensityQuery q{target, x, row.t, k, l};
    auto s = asymptotic(d, q);
    row.a_star = s.c;
    row.regime = s.regime;
    row.leading = s.leading;
    row.error_scale = s.error_scale;
    ContourSpec spec = reference;
    if (spec.kind == ContourSpec::Kind::bromwich && !spec.a) spec.a = s.c;
    auto ref = spec.kind == ContourSpec::Kind::bromwich ? invert_bromwich(d, q, spec) : invert_keyhole(d, q, spec);
    row.reference = ref.value;
    row.reference_rel_error = ref.mantissa_error / std::abs(ref.mantissa);
    row.ratio = s.sign * std::exp(s.log_abs_leading - ref.log_scale) / ref.mantissa;
    row.deviation = std::abs(row.ratio - 1.0);
    // a deviation inside the reference's own error floor carries no rate information
    if (row.deviation > 10.0 * row.reference_rel_error + 1e-13) {
      lx.push_back(std::log(row.error_scale));
      ly.push_back(std::log(row.deviation));
    }
    tab.rows.push_back(row);
  }
  tab.resolvable_rows = int(lx.size());
  if (lx.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    tab.fitted_exponent = sxx > 0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
    tab.fitted_intercept = my - tab.fitted_exponent * mx;
  } else {
    tab.fitted_exponent = std::numeric_limits<double>::quiet_NaN();
    tab.fitted_intercept = std::numeric_limits<double>::quiet_NaN();
  }
  return tab;
}

}  // namespace invsub
