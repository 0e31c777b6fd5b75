#include "invsub/series.hpp"

#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <tuple>

#include "invsub/errors.hpp"
#include "invsub/special.hpp"

namespace invsub {

std::string to_string(CoefficientSource s) {
  switch (s) {
    case CoefficientSource::automatic: return "auto";
    case CoefficientSource::keyhole_numeric: return "keyhole_numeric";
    case CoefficientSource::halfplane_numeric: return "halfplane_numeric";
    case CoefficientSource::stable_closed_form: return "stable_closed_form";
    case CoefficientSource::tempered_closed_form: return "tempered_closed_form";
  }
  return "?";
}

namespace {

using Key = std::tuple<std::uint64_t, int, int, std::uint64_t, int>;

struct Cache {
  std::shared_mutex mu;
  std::map<Key, std::pair<double, double>> map;
};

Cache& cache() {
  static Cache c;
  return c;
}

CoefficientSource resolve(const BernsteinDescriptor& d, CoefficientSource src) {
  if (src != CoefficientSource::automatic) return src;
  if (d.node().info().kind == NodeKind::stable) return CoefficientSource::stable_closed_form;
  if (d.halfplane_extension()) return CoefficientSource::halfplane_numeric;
  return CoefficientSource::keyhole_numeric;
}

double log_multinomial(int n, int a, int b, int c) {
  return std::lgamma(n + 1.0) - std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(c + 1.0);
}

// sum over k1 + k2 + k3 = n (k3 >= k3_min) of multinomial q^k1 b^k2 D^{r0 + k2 + k3} tail^{*(k3 + n_shift)}
double multinomial_sum(const BernsteinDescriptor& d, int n, int k3_min, int r0, int n_shift, double t,
                       CoefficientSource src, double* error) {
  const double q = d.kill_rate(), b = d.drift();
  double sum = 0.0, err = 0.0;
  for (int k3 = k3_min; k3 <= n; ++k3) {
    for (int k2 = 0; k2 <= n - k3; ++k2) {
      const int k1 = n - k3 - k2;
      if (k1 > 0 && q == 0.0) continue;
      if (k2 > 0 && b == 0.0) continue;
      double w = std::exp(log_multinomial(n, k1, k2, k3));
      if (k1) w *= std::pow(q, k1);
      if (k2) w *= std::pow(b, k2);
      std::pair<double, double> v;
      try {
        v = conv_tail_cached(d, k3 + n_shift, r0 + k2 + k3, t, src);
      } catch (const ConvergenceError& e) {
        std::ostringstream os;
        os << e.what() << " [k1=" << k1 << " k2=" << k2 << " k3=" << k3 << "]";
        throw ConvergenceError(os.str(), e.partial(), e.last_term());
      } catch (const AccuracyError& e) {
        std::ostringstream os;
        os << e.what() << " [k1=" << k1 << " k2=" << k2 << " k3=" << k3 << "]";
        throw AccuracyError(os.str(), e.achieved());
      }
      sum += w * v.first;
      err += w * v.second;
    }
  }
  if (error) *error = err;
  return sum;
}

// coefficients a_i of the stable-like bracket; f = e^{lambda^alpha x} sum_i a_i x^i / i!
double tempered_bracket(double alpha, double lambda, int i, double t) {
  const double y = lambda * t;
  auto piece = [&](int m) {
    if (m == 0) return 0.0;
    const double s = std::sin(m * alpha * kPi);
    if (s == 0.0) return 0.0;
    return std::tgamma(1.0 + alpha * m) * special::upper_gamma(-alpha * m, y) * s;
  };
  const double sgn = (i % 2) ? -1.0 : 1.0;
  return sgn * std::pow(lambda, alpha * (i + 1)) * (piece(i + 1) - piece(i)) / kPi;
}

double tempered_coefficient(const BernsteinDescriptor& d, int j, int k, int l, double t) {
  const auto info = d.node().info();
  if (info.kind != NodeKind::tempered_stable || d.kill_rate() != 0.0 || d.drift() != 0.0 || k != 0 || l != 0)
    throw CapabilityError("tempered_closed_form covers f itself (k = l = 0) of a bare tempered stable exponent");
  const double la = std::pow(info.lambda, info.alpha);
  // Cauchy product with e^{lambda^alpha x}
  double s = 0.0;
  for (int m = 0; m <= j; ++m) {
    const double binom = std::exp(std::lgamma(j + 1.0) - std::lgamma(m + 1.0) - std::lgamma(j - m + 1.0));
    s += binom * std::pow(la, m) * tempered_bracket(info.alpha, info.lambda, j - m, t);
  }
  return s;
}

}  // namespace

std::pair<double, double> conv_tail_cached(const BernsteinDescriptor& d, int n, int r, double t,
                                           CoefficientSource src) {
  src = resolve(d, src);
  if (n < 1) throw DomainError("conv_tail_cached: n must be >= 1");
  if (src == CoefficientSource::stable_closed_form) {
    const auto info = d.node().info();
    if (info.kind != NodeKind::stable) throw CapabilityError("stable_closed_form needs a stable exponent");
    // tail^{*n} has transform z^{n(alpha - 1)}: t^{n(1-alpha) - 1 - r} / Gamma(n(1-alpha) - r)
    const double w = n * (1.0 - info.alpha) - r;
    return {std::pow(t, w - 1.0) * special::rgamma(w), 0.0};
  }
  if (src == CoefficientSource::tempered_closed_form)
    throw CapabilityError("tempered_closed_form gives whole coefficients, not convolution tails");
  const Key key{d.id(), n, r, std::bit_cast<std::uint64_t>(t), int(src)};
  auto& c = cache();
  {
    std::shared_lock lock(c.mu);
    auto it = c.map.find(key);
    if (it != c.map.end()) return it->second;
  }
  ContourIntegral ci = src == CoefficientSource::halfplane_numeric ? conv_tail_halfplane(d, n, r, t)
                                                                   : conv_tail_derivative(d, n, r, t);
  std::pair<double, double> v{ci.value, ci.error};
  std::unique_lock lock(c.mu);
  c.map[key] = v;
  return v;
}

void clear_coefficient_cache() {
  std::unique_lock lock(cache().mu);
  cache().map.clear();
}

std::size_t coefficient_cache_size() {
  std::shared_lock lock(cache().mu);
  return cache().map.size();
}

double coefficient_I(const BernsteinDescriptor& d, int j, int k, int l, double t, CoefficientSource src,
                     double* error) {
  if (j < 0 || k < 0 || l < 0) throw DomainError("coefficient indices must be nonnegative");
  if (!(t > 0)) throw DomainError("coefficient_I: t must be positive");
  if (src == CoefficientSource::tempered_closed_form) {
    if (error) *error = 0.0;
    return tempered_coefficient(d, j, k, l, t);
  }
  const double sgn = ((k + j) % 2) ? -1.0 : 1.0;
  return sgn * multinomial_sum(d, k + j, 0, l, 1, t, src, error);
}

double coefficient_frakI(const BernsteinDescriptor& d, int j, int k, int l, double t, CoefficientSource src,
                         double* error) {
  if (j < 0 || k < 0 || l < 0) throw DomainError("coefficient indices must be nonnegative");
  if (!(t > 0)) throw DomainError("coefficient_frakI: t must be positive");
  if (src == CoefficientSource::tempered_closed_form)
    throw CapabilityError("tempered_closed_form is available for f only");
  const double sgn = ((k + j) % 2) ? -1.0 : 1.0;
  // transform of tail^{*k3} times z^{k2+k3-1}: derivative order l + k2 + k3 - 1
  return sgn * multinomial_sum(d, k + j, 1, l - 1, 0, t, src, error);
}

SeriesCoefficients series_coefficients(const BernsteinDescriptor& d, CoefficientFamily fam, int k, int l, double t,
                                       int n_max, CoefficientSource src) {
  SeriesCoefficients out;
  out.family = fam;
  out.k = k;
  out.l = l;
  out.t = t;
  out.source = src == CoefficientSource::tempered_closed_form ? src : resolve(d, src);
  out.values.assign(n_max + 1, 0.0);
  out.errors.assign(n_max + 1, 0.0);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int j = 0; j <= n_max; ++j) {
    try {
      double e = 0.0;
      out.values[j] = fam == CoefficientFamily::I ? coefficient_I(d, j, k, l, t, out.source, &e)
                                                  : coefficient_frakI(d, j, k, l, t, out.source, &e);
      out.errors[j] = e;
    } catch (...) {
#pragma omp critical(invsub_series_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

namespace {

constexpr int kBlock = 8;

// sum_j x^j/j! c_j with the three-small-terms rule; `base` is added to the partial sum
MethodResult sum_series(const BernsteinDescriptor& d, CoefficientFamily fam, int k, int l, double x, double t,
                        double base, const SeriesOptions& opt) {
  if (opt.n_max < 0) throw DomainError("n_max must be nonnegative");
  const auto src = opt.source == CoefficientSource::tempered_closed_form ? opt.source : resolve(d, opt.source);
  auto coef = [&](int j, double* e) {
    return fam == CoefficientFamily::I ? coefficient_I(d, j, k, l, t, src, e)
                                       : coefficient_frakI(d, j, k, l, t, src, e);
  };
  std::vector<double> c, ce;
  auto ensure = [&](int j) {
    if (j < int(c.size())) return;
    const int lo = int(c.size()), hi = std::max(j, lo + kBlock - 1);
    c.resize(hi + 1);
    ce.resize(hi + 1);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = lo; i <= hi; ++i) {
      try {
        c[i] = coef(i, &ce[i]);
      } catch (...) {
#pragma omp critical(invsub_series_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  };
  double partial = base, abs_sum = std::abs(base), coef_err = 0.0, pw = 1.0, last = 0.0;
  int small = 0, used = -1;
  bool converged = false;
  for (int j = 0; j <= opt.n_max; ++j) {
    if (j > 0) pw *= x / j;
    ensure(j);
    const double term = pw * c[j];
    partial += term;
    abs_sum += std::abs(term);
    coef_err += pw * ce[j];
    last = term;
    used = j;
    if (std::abs(term) <= opt.tol * std::max(std::abs(partial), 1e-300)) {
      if (++small >= 3) {
        converged = true;
        break;
      }
    } else {
      small = 0;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "series did not settle within n_max = " << opt.n_max << " terms";
    throw ConvergenceError(os.str(), partial, std::abs(last));
  }
  // first omitted terms; two of them because closed forms can be exactly 0
  double omitted = 0.0;
  for (int j = used + 1; j <= used + 2; ++j) {
    pw *= x / j;
    ensure(j);
    omitted = std::max(omitted, std::abs(pw * c[j]));
  }
  MethodResult r;
  r.method = Method::series;
  r.value = r.mantissa = partial;
  r.error_scale = r.mantissa_error =
      omitted + coef_err + 4 * std::numeric_limits<double>::epsilon() * abs_sum;
  r.diagnostics = {{"terms", double(used + 1)},
                   {"first_omitted", omitted},
                   {"coefficient_error", coef_err},
                   {"source", double(int(src))}};
  return r;
}

}  // namespace

MethodResult series_f(const BernsteinDescriptor& d, const DensityQuery& q, const SeriesOptions& opt) {
  if (q.target != Target::f) throw DomainError("series_f handles target f; use series_G_g");
  if (q.k < 0 || q.l < 0) throw DomainError("derivative orders must be nonnegative");
  require_in_region(d, q.x, q.t);
  return sum_series(d, CoefficientFamily::I, q.k, q.l, q.x, q.t, 0.0, opt);
}

MethodResult series_G_g(const BernsteinDescriptor& d, const DensityQuery& q, const SeriesOptions& opt) {
  if (q.k < 0 || q.l < 0) throw DomainError("derivative orders must be nonnegative");
  require_in_region(d, q.x, q.t);
  const double qk = d.kill_rate();
  auto G_part = [&](int l) {
    // (-q)^k e^{-qx} survives only without t-derivatives
    const double base = l == 0 ? std::pow(-qk, q.k) * std::exp(-qk * q.x) : 0.0;
    return sum_series(d, CoefficientFamily::frakI, q.k, l, q.x, q.t, base, opt);
  };
  MethodResult r;
  switch (q.target) {
    case Target::G: return G_part(q.l);
    case Target::g: return G_part(q.l + 1);
    case Target::f_k: {
      if (qk == 0.0) break;
      r = G_part(q.l);
      r.value *= qk;
      r.mantissa = r.value;
      r.error_scale *= qk;
      r.mantissa_error = r.error_scale;
      return r;
    }
    case Target::f_c: {
      const double b = d.drift();
      if (b == 0.0) break;
      r = G_part(q.l + 1);
      r.value *= b;
      r.mantissa = r.value;
      r.error_scale *= b;
      r.mantissa_error = r.error_scale;
      return r;
    }
    case Target::f: throw DomainError("series_G_g handles G, g, f_k, f_c; use series_f");
  }
  r.method = Method::series;
  r.diagnostics["trivial_zero"] = 1.0;
  return r;
}

MethodResult series(const BernsteinDescriptor& d, const DensityQuery& q, const SeriesOptions& opt) {
  return q.target == Target::f ? series_f(d, q, opt) : series_G_g(d, q, opt);
}

PolynomialReport polynomial_approx(const BernsteinDescriptor& d, int n, int k, int l, std::pair<double, double> t_band,
                                   std::pair<double, double> x_band, int t_points, int x_points,
                                   const SeriesOptions& opt) {
  if (n < 0) throw DomainError("polynomial_approx: n must be nonnegative");
  if (!(t_band.first > 0 && t_band.second >= t_band.first)) throw DomainError("polynomial_approx: bad t band");
  if (!(x_band.first > 0 && x_band.second > x_band.first)) throw DomainError("polynomial_approx: bad x band");
  if (t_points < 1 || x_points < 2) throw DomainError("polynomial_approx: need >= 1 t and >= 2 x probes");
  if (d.drift() > 0 && !(x_band.second < t_band.first / d.drift()))
    throw DomainError("polynomial_approx: x band must lie below t1 / b");
  PolynomialReport rep;
  rep.n = n;
  rep.k = k;
  rep.l = l;
  for (int i = 0; i < t_points; ++i)
    rep.t_probe.push_back(t_points == 1 ? t_band.first
                                        : t_band.first + (t_band.second - t_band.first) * i / (t_points - 1));
  const double lx0 = std::log(x_band.first), lx1 = std::log(x_band.second);
  for (int i = 0; i < x_points; ++i) rep.x_probe.push_back(std::exp(lx0 + (lx1 - lx0) * i / (x_points - 1)));
  rep.sup_remainder.assign(x_points, 0.0);
  for (double t : rep.t_probe) {
    auto co = series_coefficients(d, CoefficientFamily::I, k, l, t, opt.n_max, opt.source);
    rep.coefficients.emplace_back(co.values.begin(), co.values.begin() + std::min(n + 1, int(co.values.size())));
    for (int i = 0; i < x_points; ++i) {
      const double x = rep.x_probe[i];
      double pw = 1.0, tail = 0.0;
      int small = 0;
      bool done = false;
      for (int j = 1; j <= opt.n_max; ++j) {
        pw *= x / j;
        if (j <= n) continue;
        const double term = pw * co.values[j];
        tail += term;
        if (std::abs(term) <= opt.tol * std::abs(tail)) {
          if (++small >= 3) {
            done = true;
            break;
          }
        } else {
          small = 0;
        }
      }
      if (!done) throw ConvergenceError("polynomial_approx: remainder series did not settle", tail, 0.0);
      rep.sup_remainder[i] = std::max(rep.sup_remainder[i], std::abs(tail));
    }
  }
  std::vector<double> lx, ly;
  double fact = std::exp(std::lgamma(n + 2.0));
  for (int i = 0; i < x_points; ++i) {
    if (rep.sup_remainder[i] > 0) {
      lx.push_back(std::log(rep.x_probe[i]));
      ly.push_back(std::log(rep.sup_remainder[i]));
      rep.constant = std::max(rep.constant, rep.sup_remainder[i] * fact / std::pow(rep.x_probe[i], n + 1));
    }
  }
  if (lx.size() < 2) {
    rep.fitted_exponent = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
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
  rep.fitted_exponent = sxy / sxx;
  return rep;
}

double tempered_stable_series_f(double alpha, double lambda, double x, double t, int n_max, double tol) {
  if (!(alpha > 0 && alpha < 1)) throw DomainError("tempered_stable_series_f: alpha must lie in (0,1)");
  if (!(lambda > 0)) throw DomainError("tempered_stable_series_f: lambda must be positive");
  if (!(x > 0 && t > 0)) throw DomainError("tempered_stable_series_f: x and t must be positive");
  double sum = 0.0, pw = 1.0, last = 0.0;
  int small = 0;
  for (int j = 0; j <= n_max; ++j) {
    if (j > 0) pw *= x / j;
    last = pw * tempered_bracket(alpha, lambda, j, t);
    sum += last;
    if (std::abs(last) <= tol * std::abs(sum)) {
      if (++small >= 3) return std::exp(std::pow(lambda, alpha) * x) * sum;
    } else {
      small = 0;
    }
  }
  throw ConvergenceError("tempered_stable_series_f: no convergence within n_max terms",
                         std::exp(std::pow(lambda, alpha) * x) * sum, std::abs(last));
}

}  // namespace invsub
