#include "invsub/contour.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "invsub/errors.hpp"
#include "invsub/saddle.hpp"

namespace invsub {

std::string to_string(Target t) {
  switch (t) {
    case Target::f: return "f";
    case Target::f_k: return "f_k";
    case Target::f_c: return "f_c";
    case Target::g: return "g";
    case Target::G: return "G";
  }
  return "?";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::bromwich: return "bromwich";
    case Method::keyhole: return "keyhole";
    case Method::series: return "series";
    case Method::saddle: return "saddle";
    case Method::monte_carlo: return "mc";
    case Method::closed_form: return "closed_form";
  }
  return "?";
}

Target parse_target(const std::string& s) {
  if (s == "f") return Target::f;
  if (s == "f_k" || s == "fk") return Target::f_k;
  if (s == "f_c" || s == "fc") return Target::f_c;
  if (s == "g") return Target::g;
  if (s == "G") return Target::G;
  throw DomainError("unknown target '" + s + "' (expected f, f_k, f_c, g, G)");
}

ContourSpec ContourSpec::bromwich_at(std::optional<double> a) {
  ContourSpec s;
  s.kind = Kind::bromwich;
  s.a = a;
  return s;
}

ContourSpec ContourSpec::keyhole(double theta, std::optional<double> eps) {
  ContourSpec s;
  s.kind = Kind::keyhole;
  s.theta = theta;
  s.eps = eps;
  return s;
}

ContourSpec ContourSpec::halfplane(std::optional<double> eps) {
  ContourSpec s;
  s.kind = Kind::halfplane_keyhole;
  s.theta = 0.0;
  s.eps = eps;
  return s;
}

void require_in_region(const BernsteinDescriptor& d, double x, double t) {
  std::ostringstream os;
  os.precision(17);
  if (!(t > 0) || !std::isfinite(t)) {
    os << "t = " << t << " must be positive";
    throw DomainError(os.str());
  }
  if (!(x > 0) || !std::isfinite(x)) {
    os << "x = " << x << " must be positive";
    throw DomainError(os.str());
  }
  if (d.drift() > 0 && !(d.drift() * x < t)) {
    os << "(x,t) = (" << x << "," << t << ") outside D: need x < t/b = " << t / d.drift();
    throw DomainError(os.str());
  }
}

namespace {

struct Weights {
  bool use_dagger;  // f carries Phi^dagger, G and g do not
  int zpow;         // power of z
  double factor;    // q for f_k, b for f_c
};

Weights weights_for(const BernsteinDescriptor& d, const DensityQuery& q) {
  switch (q.target) {
    case Target::f: return {true, q.l - 1, 1.0};
    case Target::G: return {false, q.l - 1, 1.0};
    case Target::g: return {false, q.l, 1.0};
    case Target::f_k: return {false, q.l - 1, d.kill_rate()};
    case Target::f_c: return {false, q.l, d.drift()};
  }
  return {true, 0, 1.0};
}

cplx ipow(cplx z, int n) {
  if (n == 0) return 1.0;
  cplx r = 1.0, b = n > 0 ? z : 1.0 / z;
  for (int m = std::abs(n); m; m >>= 1) {
    if (m & 1) r *= b;
    b *= b;
  }
  return r;
}

MethodResult trivial_zero(Method m, const char* why) {
  MethodResult r;
  r.method = m;
  r.diagnostics["trivial_zero"] = 1.0;
  (void)why;
  return r;
}

double default_eps(const ContourSpec& s, double t) { return s.eps ? *s.eps : std::min(0.1, 1.0 / (10.0 * t)); }

}  // namespace

// ---------------------------------------------------------------- keyhole kernel

ContourIntegral keyhole_integral(const std::function<cplx(cplx)>& H, double decay, const KeyholeGeometry& geo,
                                 const quad::PanelControl& ctl, quad::Exec exec) {
  if (!(geo.psi > kPi / 2) || geo.psi > kPi) throw DomainError("keyhole: ray angle must lie in (pi/2, pi]");
  if (!(geo.eps > 0)) throw DomainError("keyhole: eps must be positive");
  const bool edge = geo.psi >= kPi;
  const cplx w = edge ? cplx(-1.0, 0.0) : std::polar(1.0, geo.psi);
  auto ray = [&](double rho) {
    const cplx z = edge ? cplx(-rho, 0.0) : rho * w;
    return (H(z) * w).imag() / kPi;
  };
  const double damp = -decay * std::cos(geo.psi);  // t cos(theta/2)
  const double osc = decay * std::sin(geo.psi);
  double wmax = 1.0 / damp;
  if (osc > 1e-12) wmax = std::min(wmax, kPi / (2.0 * osc));
  quad::PanelPlan plan{geo.eps, std::min(geo.eps, wmax), 1.25, wmax};
  quad::PanelControl c = ctl;
  c.min_extent = std::max(c.min_extent, geo.eps + 2.0 / damp);
  auto r = quad::integrate_panels(ray, plan, c, exec);
  if (!r.converged) {
    std::ostringstream os;
    os << "keyhole ray did not decay within " << r.panels << " panels (radius " << r.radius << ")";
    throw ConvergenceError(os.str(), r.value, r.l1);
  }
  auto arc = [&](double xi) {
    const cplx z = (edge && xi >= kPi) ? cplx(-geo.eps, 0.0) : std::polar(geo.eps, xi);
    return (H(z) * z).real() / kPi;
  };
  const double ref = std::max(std::abs(r.value), 1e-6 * r.l1);
  auto a = quad::integrate<double>(arc, 0.0, geo.psi, ctl.quad_tol * ref * 0.1, ctl.quad_tol, 400, true);
  ContourIntegral out;
  out.ray = r.value;
  out.arc = a.value;
  out.value = r.value + a.value;
  const double eps = std::numeric_limits<double>::epsilon();
  out.error = r.quad_error + r.trunc_error + a.error + 4 * eps * (r.l1 + a.l1);
  out.panels = r.panels;
  out.radius = r.radius;
  out.evals = r.evals + a.evals;
  return out;
}

// ---------------------------------------------------------------- Bromwich

constexpr int kBromwichSweep = 20000;

MethodResult invert_bromwich(const BernsteinDescriptor& d, const DensityQuery& q, const ContourSpec& spec) {
  if (q.k < 0 || q.l < 0) throw DomainError("derivative orders must be nonnegative");
  require_in_region(d, q.x, q.t);
  if (q.target == Target::f_c && d.drift() == 0.0) return trivial_zero(Method::bromwich, "b = 0");
  if (q.target == Target::f_k && d.kill_rate() == 0.0) return trivial_zero(Method::bromwich, "q = 0");
  const double x = q.x, t = q.t;
  double a;
  bool at_saddle = false;
  if (spec.a) {
    a = *spec.a;
    if (!(a > 0)) throw DomainError("Bromwich abscissa must be positive");
  } else {
    const double v = t / x;
    if (v > d.drift() && v < d.phi_prime_at_zero()) {
      a = solve_saddle(d, t, x);
      at_saddle = true;
    } else {
      // past Phi'(0+) the exponent t a - x Phi(a) only grows with a; a = 1
      // would carry e^t into the integrand and cancel it away again
      a = std::min(1.0, 1.0 / t);
    }
  }
  const Weights w = weights_for(d, q);
  const double phia = d.phi(a);
  const double dag_a = d.phi_dagger(a);
  const double log_scale = t * a - x * phia;
  const double sgn = (q.k % 2) ? -1.0 : 1.0;
  const double b = d.drift(), qk = d.kill_rate();
  auto H = [&](double s) {
    const cplx z(a, s);
    const cplx dag = d.phi_dagger(z);
    const cplx phi = qk + b * z + dag;
    // t(z - a) - x(Phi(z) - Phi(a)), without forming the two big pieces
    const cplx ex = cplx(0.0, t * s) - x * (cplx(0.0, b * s) + (dag - dag_a));
    cplx v = std::exp(ex) * ipow(z, w.zpow);
    if (q.k) v *= ipow(phi, q.k);
    if (w.use_dagger) v *= dag;
    return sgn * w.factor * v.real() / kPi;
  };
  double nat = a;
  const double p2 = std::abs(d.phi_deriv(2, a));
  if (p2 > 0) nat = std::min(nat, 1.0 / std::sqrt(x * p2));
  // |d/ds phase| <= t - b x + x (Phi'(a) - b) since |Phi'(z) - b| <= Phi'(a) - b
  const double rate = t - b * x + x * std::max(d.phi_deriv(1, a) - b, 0.0);
  const double wmax = kPi / (2.0 * std::max(rate, 1e-12 * t));
  quad::PanelPlan plan{0.0, std::min(wmax, nat / 4.0), 1.2, wmax};
  quad::PanelControl ctl;
  ctl.trunc_tol = spec.trunc_tol;
  ctl.quad_tol = spec.quad_tol;
  ctl.max_panels = std::min(spec.max_panels, kBromwichSweep);
  ctl.min_extent = 4.0 * nat;
  auto r = quad::integrate_panels(H, plan, ctl, spec.exec);
  bool extrapolated = false;
  if (!r.converged && spec.max_panels > kBromwichSweep) {
    // algebraic decay (gamma-like Phi): sum half periods, Wynn-accelerate
    // no point asking the tail for more than the head's own rounding
    const double tol = std::max(spec.trunc_tol * std::max(std::abs(r.value), 1e-8 * r.l1),
                                16 * std::numeric_limits<double>::epsilon() * r.l1);
    // the linear phase is (t - b x) s
    const double freq = std::max(t - b * x, 0.05 * t);
    auto tail = quad::oscillatory_tail(H, r.radius, freq, tol, std::min(spec.max_panels - r.panels, 400));
    r.panels += tail.panels;
    r.evals += tail.evals;
    r.radius = tail.radius;
    r.quad_error += tail.quad_error;
    r.trunc_error = tail.trunc_error;
    r.value += tail.value;
    r.l1 += tail.l1;
    r.converged = tail.converged;
    extrapolated = true;
  }
  if (!r.converged) {
    std::ostringstream os;
    os << "Bromwich integrand did not decay within " << r.panels << " panels (b up to " << r.radius << ")";
    throw ConvergenceError(os.str(), r.value * std::exp(log_scale), r.l1);
  }
  MethodResult out;
  out.method = Method::bromwich;
  out.mantissa = r.value;
  out.log_scale = log_scale;
  out.mantissa_error = r.quad_error + r.trunc_error + 4 * std::numeric_limits<double>::epsilon() * r.l1;
  out.value = r.value * std::exp(log_scale);
  out.error_scale = out.mantissa_error * std::exp(log_scale);
  out.diagnostics = {{"a", a},
                     {"at_saddle", at_saddle ? 1.0 : 0.0},
                     {"panels", double(r.panels)},
                     {"truncation_radius", r.radius},
                     {"log_scale", log_scale},
                     {"quad_error", r.quad_error},
                     {"trunc_error", r.trunc_error},
                     {"evals", double(r.evals)},
                     {"extrapolated_tail", extrapolated ? 1.0 : 0.0}};
  return out;
}

// ---------------------------------------------------------------- keyhole

namespace {

KeyholeGeometry geometry_for(const BernsteinDescriptor& d, const ContourSpec& spec, double t) {
  const double eps = default_eps(spec, t);
  if (spec.kind == ContourSpec::Kind::halfplane_keyhole) {
    if (!d.halfplane_extension())
      throw CapabilityError(d.name() + " declares no continuous extension to the closed upper half-plane");
    return {kPi, eps};
  }
  if (!(spec.theta > 0 && spec.theta < kPi)) throw DomainError("keyhole: theta must lie in (0, pi)");
  const double psi = kPi - spec.theta / 2;
  auto sec = d.sector_half_angle();
  if (!sec || *sec < psi - 1e-12) {
    std::ostringstream os;
    os << "keyhole: theta = " << spec.theta << " needs a sector of half-angle " << psi << ", " << d.name()
       << " declares " << (sec ? *sec : kPi / 2);
    throw DomainError(os.str());
  }
  return {psi, eps};
}

quad::PanelControl controls(const ContourSpec& spec) {
  quad::PanelControl c;
  c.trunc_tol = spec.trunc_tol;
  c.quad_tol = spec.quad_tol;
  c.max_panels = spec.max_panels;
  return c;
}

}  // namespace

MethodResult invert_keyhole(const BernsteinDescriptor& d, const DensityQuery& q, const ContourSpec& spec) {
  if (q.k < 0 || q.l < 0) throw DomainError("derivative orders must be nonnegative");
  require_in_region(d, q.x, q.t);
  if (q.target == Target::f_c && d.drift() == 0.0) return trivial_zero(Method::keyhole, "b = 0");
  if (q.target == Target::f_k && d.kill_rate() == 0.0) return trivial_zero(Method::keyhole, "q = 0");
  ContourSpec s = spec;
  if (s.kind == ContourSpec::Kind::bromwich) s.kind = ContourSpec::Kind::keyhole;
  const auto geo = geometry_for(d, s, q.t);
  const Weights w = weights_for(d, q);
  const double sgn = (q.k % 2) ? -1.0 : 1.0;
  const double x = q.x, t = q.t;
  auto H = [&](cplx z) {
    const cplx phi = d.phi(z);
    cplx v = std::exp(t * z - x * phi) * ipow(z, w.zpow);
    if (q.k) v *= ipow(phi, q.k);
    if (w.use_dagger) v *= d.phi_dagger(z);
    return sgn * w.factor * v;
  };
  // the ray decays like exp(-(t - b x) rho cos(theta/2))
  const double rate = t - d.drift() * x;
  auto r = keyhole_integral(H, rate, geo, controls(s), s.exec);
  MethodResult out;
  out.method = Method::keyhole;
  out.value = out.mantissa = r.value;
  out.error_scale = out.mantissa_error = r.error;
  out.diagnostics = {{"theta", 2 * (kPi - geo.psi)}, {"eps", geo.eps},          {"panels", double(r.panels)},
                     {"truncation_radius", r.radius}, {"ray", r.ray},           {"arc", r.arc},
                     {"evals", double(r.evals)}};
  return out;
}

ContourIntegral conv_tail_derivative(const BernsteinDescriptor& d, int n, int r, double t, const ContourSpec& spec) {
  if (n < 1) throw DomainError("conv_tail_derivative: n must be >= 1");
  if (r < 0) throw DomainError("conv_tail_derivative: r must be >= 0");
  if (!(t > 0)) throw DomainError("conv_tail_derivative: t must be positive");
  ContourSpec s = spec;
  if (s.kind == ContourSpec::Kind::bromwich) s.kind = ContourSpec::Kind::keyhole;
  const auto geo = geometry_for(d, s, t);
  auto H = [&](cplx z) { return std::exp(t * z) * ipow(d.phi_dagger(z), n) * ipow(z, r - n); };
  return keyhole_integral(H, t, geo, controls(s), s.exec);
}

ContourIntegral conv_tail_halfplane(const BernsteinDescriptor& d, int n, int r, double t, std::optional<double> eps,
                                    const ContourSpec& controls_spec) {
  ContourSpec s = controls_spec;
  s.kind = ContourSpec::Kind::halfplane_keyhole;
  if (eps) s.eps = eps;
  return conv_tail_derivative(d, n, r, t, s);
}

}  // namespace invsub
