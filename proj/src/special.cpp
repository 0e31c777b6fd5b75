#include "invsub/special.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "invsub/errors.hpp"
#include "invsub/quadrature.hpp"

namespace invsub::special {

double rgamma(double w) {
  if (w <= 0.0 && w == std::floor(w)) return 0.0;
  if (w > 171.0) return std::exp(-std::lgamma(w));
  return 1.0 / std::tgamma(w);
}

double expint_e1(double y) {
  if (!(y > 0.0)) throw DomainError("E1 needs y > 0");
  return -std::expint(-y);
}

namespace {

// Gamma(s,y) = e^{-y} y^s / (y + 1 - s - 1(1-s)/(y + 3 - s - ...)), modified Lentz
double upper_gamma_cf(double s, double y) {
  const double tiny = 1e-300, eps = 1e-16;
  double b = y + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return std::exp(-y + s * std::log(y)) * h;
}

// s0 in (0,1], y < 2:
// Gamma(s0,y) = (Gamma(1+s0) - 1 - (y^s0 - 1))/s0 - y^s0 sum_{n>=1} (-y)^n / (n! (s0+n))
// written so that s0 -> 0 does not cancel.
double upper_gamma_small_y(double s0, double y) {
  const double head = (boost::math::tgamma1pm1(s0) - std::expm1(s0 * std::log(y))) / s0;
  double term = 1.0, sum = 0.0;
  for (int n = 1; n < 200; ++n) {
    term *= -y / n;
    const double add = term / (s0 + n);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return head - std::pow(y, s0) * sum;
}

double upper_gamma_quadrature(double s, double y) {
  auto f = [s](double u) { return std::exp((s - 1.0) * std::log(u) - u); };
  auto r = quad::dyadic_sweep<double>(f, y, std::numeric_limits<double>::infinity(), false, 1e-12);
  if (r.diverged || !(r.value > 0.0) || !std::isfinite(r.value))
    throw AccuracyError("upper incomplete gamma: quadrature fallback failed", r.error);
  return r.value;
}

}  // namespace

double upper_gamma(double s, double y) {
  if (!(y > 0.0)) throw DomainError("upper incomplete gamma needs y > 0");
  double v;
  if (y >= 2.0) {
    v = upper_gamma_cf(s, y);
  } else if (s > 0.0 && s <= 1.0) {
    v = upper_gamma_small_y(s, y);
  } else if (s > 1.0) {
    v = boost::math::tgamma(s, y);
  } else {
    // descend from s0 = s + m in (0,1], or from 0 when s is an integer
    const double m = std::ceil(-s);
    double s0 = s + m;
    double cur;
    if (s0 == 0.0) {
      cur = expint_e1(y);
    } else {
      if (s0 > 1.0) s0 -= 1.0;  // guard rounding
      cur = upper_gamma_small_y(s0, y);
    }
    const double ly = std::log(y);
    for (double sc = s0 - 1.0; sc >= s - 1e-12; sc -= 1.0) {
      cur = (cur - std::exp(sc * ly - y)) / sc;
    }
    v = cur;
  }
  if (!(v > 0.0) || !std::isfinite(v)) v = upper_gamma_quadrature(s, y);
  return v;
}

double lower_gamma(double s, double y) {
  if (!(s > 0.0)) throw DomainError("lower incomplete gamma needs s > 0");
  if (!(y >= 0.0)) throw DomainError("lower incomplete gamma needs y >= 0");
  if (y == 0.0) return 0.0;
  if (y < s + 1.0) {
    double term = 1.0 / s, sum = term;
    for (int n = 1; n < 1000; ++n) {
      term *= y / (s + n);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::exp(s * std::log(y) - y) * sum;
  }
  return std::tgamma(s) - upper_gamma(s, y);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double student_t_critical(double level, int dof) {
  boost::math::students_t dist(dof);
  return boost::math::quantile(boost::math::complement(dist, 0.5 * (1.0 - level)));
}

}  // namespace invsub::special
