#include "invsub/bernstein.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include "invsub/complex_math.hpp"
#include "invsub/errors.hpp"
#include "invsub/keyhole.hpp"
#include "invsub/quadrature.hpp"
#include "invsub/special.hpp"

namespace invsub {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
std::atomic<std::uint64_t> g_next_id{1};

// alpha (alpha-1) ... (alpha-n+1)
double falling(double a, int n) {
  double p = 1.0;
  for (int i = 0; i < n; ++i) p *= a - i;
  return p;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

class StableNode final : public ExponentNode {
 public:
  explicit StableNode(double a) : a_(a), c_(a / std::tgamma(1.0 - a)) {}
  cplx dagger(cplx z) const override { return cpow(z, a_); }
  cplx dagger_deriv(int n, cplx z) const override { return falling(a_, n) * cpow(z, a_ - n); }
  double tail(double t) const override { return t > 0 ? std::pow(t, -a_) / std::tgamma(1.0 - a_) : kInf; }
  double delta(double x) const override { return c_ * std::pow(x, a_ - 2.0) / (2.0 - a_); }
  std::optional<double> density(double y) const override { return y > 0 ? c_ * std::pow(y, -1.0 - a_) : 0.0; }
  double total_mass() const override { return kInf; }
  double prime_at_zero() const override { return kInf; }
  double second_at_zero() const override { return -kInf; }
  double sector() const override { return kPi; }
  bool halfplane() const override { return true; }
  bool complete() const override { return true; }
  std::string name() const override { return "stable(" + fmt(a_) + ")"; }
  NodeInfo info() const override {
    NodeInfo i;
    i.kind = NodeKind::stable;
    i.alpha = a_;
    return i;
  }

 private:
  double a_, c_;
};

class TemperedNode final : public ExponentNode {
 public:
  TemperedNode(double a, double l) : a_(a), l_(l), la_(std::pow(l, a)), c_(a / std::tgamma(1.0 - a)) {}
  cplx dagger(cplx z) const override {
    // lambda^a ((1 + z/lambda)^a - 1), no cancellation near 0
    return la_ * cexpm1(a_ * clog1p(z / l_));
  }
  cplx dagger_deriv(int n, cplx z) const override { return falling(a_, n) * cpow(l_ + z, a_ - n); }
  double tail(double t) const override {
    if (!(t > 0)) return kInf;
    return c_ * la_ * special::upper_gamma(-a_, l_ * t);
  }
  double delta(double x) const override {
    return c_ * std::pow(l_, a_ - 2.0) * special::lower_gamma(2.0 - a_, l_ / x);
  }
  std::optional<double> density(double y) const override {
    return y > 0 ? c_ * std::pow(y, -1.0 - a_) * std::exp(-l_ * y) : 0.0;
  }
  double total_mass() const override { return kInf; }
  double prime_at_zero() const override { return a_ * std::pow(l_, a_ - 1.0); }
  double second_at_zero() const override { return a_ * (a_ - 1.0) * std::pow(l_, a_ - 2.0); }
  double sector() const override { return kPi; }
  bool halfplane() const override { return true; }
  bool complete() const override { return true; }
  std::string name() const override { return "tempered_stable(" + fmt(a_) + "," + fmt(l_) + ")"; }
  NodeInfo info() const override {
    NodeInfo i;
    i.kind = NodeKind::tempered_stable;
    i.alpha = a_;
    i.lambda = l_;
    return i;
  }

 private:
  double a_, l_, la_, c_;
};

class GammaNode final : public ExponentNode {
 public:
  cplx dagger(cplx z) const override { return clog1p(z); }
  cplx dagger_deriv(int n, cplx z) const override {
    const cplx w = 1.0 + z;
    if (n == 1) return 1.0 / w;
    if (n == 2) return -1.0 / (w * w);
    return 2.0 / (w * w * w);
  }
  double tail(double t) const override { return t > 0 ? special::expint_e1(t) : kInf; }
  double delta(double x) const override { return special::lower_gamma(2.0, 1.0 / x); }
  std::optional<double> density(double y) const override { return y > 0 ? std::exp(-y) / y : 0.0; }
  double total_mass() const override { return kInf; }
  double prime_at_zero() const override { return 1.0; }
  double second_at_zero() const override { return -1.0; }
  // holomorphic off (-inf, -1] but unbounded at -1, so every closed sector
  // below pi works and pi itself does not; 0.99 pi is a declared choice
  double sector() const override { return 0.99 * kPi; }
  bool halfplane() const override { return false; }
  bool complete() const override { return true; }
  std::string name() const override { return "gamma"; }
  NodeInfo info() const override {
    NodeInfo i;
    i.kind = NodeKind::gamma;
    return i;
  }
};

class PoissonNode final : public ExponentNode {
 public:
  PoissonNode(double rate, double jump) : r_(rate), j_(jump) {}
  cplx dagger(cplx z) const override { return -r_ * cexpm1(-j_ * z); }
  cplx dagger_deriv(int n, cplx z) const override {
    const double sgn = (n % 2 == 1) ? 1.0 : -1.0;
    return sgn * r_ * std::pow(j_, n) * std::exp(-j_ * z);
  }
  double tail(double t) const override { return t < j_ ? r_ : 0.0; }
  double delta(double x) const override { return j_ <= 1.0 / x ? r_ * j_ * j_ : 0.0; }
  double total_mass() const override { return r_; }
  double prime_at_zero() const override { return r_ * j_; }
  double second_at_zero() const override { return -r_ * j_ * j_; }
  double sector() const override { return kPi / 2; }
  bool halfplane() const override { return false; }
  bool complete() const override { return false; }
  std::string name() const override { return "poisson(" + fmt(r_) + "," + fmt(j_) + ")"; }
  NodeInfo info() const override {
    NodeInfo i;
    i.kind = NodeKind::poisson;
    i.rate = r_;
    i.jump = j_;
    return i;
  }

 private:
  double r_, j_;
};

class ZeroNode final : public ExponentNode {
 public:
  cplx dagger(cplx) const override { return 0.0; }
  cplx dagger_deriv(int, cplx) const override { return 0.0; }
  double tail(double) const override { return 0.0; }
  double delta(double) const override { return 0.0; }
  double total_mass() const override { return 0.0; }
  double prime_at_zero() const override { return 0.0; }
  double second_at_zero() const override { return 0.0; }
  double sector() const override { return kPi; }
  bool halfplane() const override { return true; }
  bool complete() const override { return true; }
  std::string name() const override { return "zero"; }
  NodeInfo info() const override { return {}; }
};

// Phi^dagger from a Levy density by quadrature, split at 1/|z| and at the
// support cut-off.
class DensityNode final : public ExponentNode {
 public:
  DensityNode(std::function<double(double)> m, std::optional<double> upper, double tol)
      : m_(std::move(m)), u_(upper), tol_(tol) {
    if (u_ && !(*u_ > 0)) throw DomainError("levy_density: support_upper must be positive");
    const double U = upper_or_inf();
    const double one = std::min(1.0, U);
    // integrability against min(y,1)
    auto ym = [this](double y) { return y * m_(y); };
    auto near = quad::dyadic_sweep<double>(ym, one, U, true, tol_);
    if (near.diverged) throw IntegrabilityError("levy_density: int_0^1 y m(y) dy diverges");
    double far = 0.0;
    if (U > 1.0) {
      auto r = quad::dyadic_sweep<double>(m_, 1.0, U, false, tol_);
      if (r.diverged) throw IntegrabilityError("levy_density: int_1^inf m(y) dy diverges");
      far = r.value;
    }
    // total mass and moments at 0
    auto m0 = quad::dyadic_sweep<double>(m_, one, U, true, tol_);
    mass_ = m0.diverged ? kInf : m0.value + far;
    double first_far = 0.0, second_far = 0.0;
    bool first_div = false, second_div = false;
    if (U > 1.0) {
      auto y2m = [this](double y) { return y * y * m_(y); };
      auto r1 = quad::dyadic_sweep<double>(ym, 1.0, U, false, tol_);
      auto r2 = quad::dyadic_sweep<double>(y2m, 1.0, U, false, tol_);
      first_div = r1.diverged;
      second_div = r2.diverged;
      first_far = r1.value;
      second_far = r2.value;
    }
    prime0_ = first_div ? kInf : near.value + first_far;
    auto y2m = [this](double y) { return y * y * m_(y); };
    auto s2 = quad::dyadic_sweep<double>(y2m, one, U, true, tol_);
    second0_ = second_div ? -kInf : -(s2.value + second_far);
  }

  cplx dagger(cplx z) const override {
    if (z == cplx(0.0)) return 0.0;
    auto f = [&](double y) { return -cexpm1(-z * y) * m_(y); };
    auto osc = [&](double y) { return std::exp(-z * y) * m_(y); };
    return integral<cplx>(f, z, &osc);
  }
  cplx dagger_deriv(int n, cplx z) const override {
    auto f = [&](double y) { return std::pow(y, n) * std::exp(-z * y) * m_(y); };
    const double sgn = (n % 2 == 1) ? 1.0 : -1.0;
    if (z == cplx(0.0)) return n == 1 ? prime0_ : (n == 2 ? second0_ : kInf);
    return sgn * integral<cplx>(f, z);
  }
  double tail(double t) const override {
    const double U = upper_or_inf();
    if (t >= U) return 0.0;
    if (!(t > 0)) return mass_;
    auto r = quad::dyadic_sweep<double>(m_, t, U, false, tol_);
    if (r.diverged) throw AccuracyError("levy_density: tail quadrature failed", r.error);
    return r.value;
  }
  double delta(double x) const override {
    const double top = std::min(1.0 / x, upper_or_inf());
    auto y2m = [this](double y) { return y * y * m_(y); };
    auto r = quad::dyadic_sweep<double>(y2m, top, kInf, true, tol_);
    if (r.diverged) throw AccuracyError("levy_density: Delta quadrature failed", r.error);
    return r.value;
  }
  std::optional<double> density(double y) const override {
    if (u_ && y >= *u_) return 0.0;
    return m_(y);
  }
  std::optional<double> support_upper() const override { return u_; }
  double total_mass() const override { return mass_; }
  double prime_at_zero() const override { return prime0_; }
  double second_at_zero() const override { return second0_; }
  double sector() const override { return kPi / 2; }
  bool halfplane() const override { return false; }
  bool complete() const override { return false; }
  std::string name() const override { return "levy_density"; }
  NodeInfo info() const override {
    NodeInfo i;
    i.kind = NodeKind::levy_density;
    return i;
  }

 private:
  double upper_or_inf() const { return u_ ? *u_ : kInf; }

  // split at 1/|z|; far part by half periods when the oscillation dominates.
  // `osc`, when given, is the e^{-zy} m(y) piece of f = (1 - e^{-zy}) m(y),
  // so the far part becomes tail(s) - int osc
  template <class T, class F, class G = F>
  T integral(const F& f, cplx z, const G* osc = nullptr) const {
    const double U = upper_or_inf();
    const double s = std::min(1.0 / std::abs(z), U);
    auto a = quad::dyadic_sweep<T>(f, s, U, true, tol_);
    T total = a.value;
    double err = a.error;
    bool bad = a.diverged;
    const double w = std::abs(z.imag());
    if (s < U && w > std::max(z.real(), 0.0) && w * (U - s) > 50.0) {
      // weakly damped oscillation: half periods, Wynn-accelerated when U = inf
      const double h = kPi / w;
      auto run = [&](const auto& g, double ref) {
        auto first = quad::integrate<T>(g, s, std::min(s + h, U), 0.0, tol_, 100, true);
        const double abs_tol = tol_ * std::max(ref, first.l1);
        return quad::oscillatory_sum<T>(g, s, w, abs_tol, std::isfinite(U) ? 10000000 : 2000, U);
      };
      quad::OscillatorySum<T> b;
      if (osc) {
        const double smooth = tail(s);
        b = run(*osc, std::max(std::abs(a.value), smooth));
        b.value = T(smooth) - b.value;
      } else {
        b = run(f, std::abs(a.value));
      }
      total += b.value;
      err += b.quad_error + b.trunc_error;
      bad = bad || !b.converged;
    } else if (s < U) {
      auto b = quad::dyadic_sweep<T>(f, s, U, false, tol_);
      total += b.value;
      err += b.error;
      bad = bad || b.diverged;
    }
    if (bad || !std::isfinite(std::abs(total)))
      throw AccuracyError("levy_density: exponent quadrature did not converge", err);
    return total;
  }

  std::function<double(double)> m_;
  std::optional<double> u_;
  double tol_;
  double mass_ = 0, prime0_ = 0, second0_ = 0;
};

class SumNode final : public ExponentNode {
 public:
  explicit SumNode(std::vector<std::shared_ptr<const ExponentNode>> parts) : p_(std::move(parts)) {}
  cplx dagger(cplx z) const override {
    cplx s = 0.0;
    for (auto& p : p_) s += p->dagger(z);
    return s;
  }
  cplx dagger_deriv(int n, cplx z) const override {
    cplx s = 0.0;
    for (auto& p : p_) s += p->dagger_deriv(n, z);
    return s;
  }
  double tail(double t) const override { return acc([&](auto& p) { return p->tail(t); }); }
  double delta(double x) const override { return acc([&](auto& p) { return p->delta(x); }); }
  std::optional<double> density(double y) const override {
    double s = 0.0;
    for (auto& p : p_) {
      auto d = p->density(y);
      if (!d) return std::nullopt;
      s += *d;
    }
    return s;
  }
  std::optional<double> support_upper() const override {
    double u = 0.0;
    for (auto& p : p_) {
      auto s = p->support_upper();
      if (!s) return std::nullopt;
      u = std::max(u, *s);
    }
    return u;
  }
  double total_mass() const override { return acc([](auto& p) { return p->total_mass(); }); }
  double prime_at_zero() const override { return acc([](auto& p) { return p->prime_at_zero(); }); }
  double second_at_zero() const override { return acc([](auto& p) { return p->second_at_zero(); }); }
  double sector() const override {
    double s = kPi;
    for (auto& p : p_) s = std::min(s, p->sector());
    return s;
  }
  bool halfplane() const override {
    return std::all_of(p_.begin(), p_.end(), [](auto& p) { return p->halfplane(); });
  }
  bool complete() const override {
    return std::all_of(p_.begin(), p_.end(), [](auto& p) { return p->complete(); });
  }
  bool tail_only() const override {
    return std::any_of(p_.begin(), p_.end(), [](auto& p) { return p->tail_only(); });
  }
  std::string name() const override {
    std::string s = "sum(";
    for (std::size_t i = 0; i < p_.size(); ++i) s += (i ? "," : "") + p_[i]->name();
    return s + ")";
  }
  NodeInfo info() const override {
    NodeInfo i;
    i.kind = NodeKind::sum;
    return i;
  }
  std::vector<std::shared_ptr<const ExponentNode>> children() const override { return p_; }

 private:
  template <class F>
  double acc(F f) const {
    double s = 0.0;
    for (auto& p : p_) s += f(p);
    return s;
  }
  std::vector<std::shared_ptr<const ExponentNode>> p_;
};

// Phi^dagger_alpha(z) = b_in z^alpha + Phi_in^dagger(z^alpha).  The Levy
// measure has no usable closed form; its tail comes from inverting
// Phi^dagger_alpha(z)/z on a keyhole and Delta from the tail identity
// Delta(x) = 2 int_0^{1/x} w tail(w) dw - x^{-2} tail(1/x).
class PowerNode final : public ExponentNode {
 public:
  PowerNode(double alpha, double inner_b, double inner_q, std::shared_ptr<const ExponentNode> inner)
      : a_(alpha), b_(inner_b), q_(inner_q), in_(std::move(inner)) {}
  cplx dagger(cplx z) const override {
    const cplx w = cpow(z, a_);
    return b_ * w + in_->dagger(w);
  }
  cplx dagger_deriv(int n, cplx z) const override {
    const cplx w = cpow(z, a_);
    const cplx w1 = a_ * cpow(z, a_ - 1.0);
    const cplx d1 = b_ + in_->dagger_deriv(1, w);
    if (n == 1) return d1 * w1;
    const cplx w2 = a_ * (a_ - 1.0) * cpow(z, a_ - 2.0);
    const cplx d2 = in_->dagger_deriv(2, w);
    if (n == 2) return d2 * w1 * w1 + d1 * w2;
    const cplx w3 = a_ * (a_ - 1.0) * (a_ - 2.0) * cpow(z, a_ - 3.0);
    return in_->dagger_deriv(3, w) * w1 * w1 * w1 + 3.0 * d2 * w1 * w2 + d1 * w3;
  }
  double tail(double t) const override {
    if (!(t > 0)) return total_mass();
    const double psi = std::min(0.75 * kPi, sector());
    auto H = [&](cplx z) { return std::exp(t * z) * dagger(z) / z; };
    quad::PanelControl ctl;
    ctl.trunc_tol = 1e-13;
    ctl.quad_tol = 1e-12;
    auto r = keyhole_integral(H, t, {psi, std::min(0.1, 0.1 / t)}, ctl, quad::Exec::serial);
    return std::max(r.value, 0.0);
  }
  double delta(double x) const override { return identity_pair(x).first; }
  std::pair<double, double> identity_pair(double x) const {
    const double s = 1.0 / x;
    auto wt = [this](double w) { return w * tail(w); };
    auto r = quad::dyadic_sweep<double>(wt, s, kInf, true, 1e-9);
    if (r.diverged) throw AccuracyError("power composition: Delta quadrature failed", r.error);
    const double upper = 2.0 * r.value;
    return {std::max(upper - s * s * tail(s), 0.0), upper};
  }
  double total_mass() const override { return b_ > 0 ? kInf : in_->total_mass(); }
  double prime_at_zero() const override { return nontrivial() ? kInf : 0.0; }
  double second_at_zero() const override { return nontrivial() ? -kInf : 0.0; }
  double sector() const override { return std::min(kPi, in_->sector() / a_); }
  bool halfplane() const override { return in_->sector() >= a_ * kPi - 1e-12; }
  bool complete() const override { return in_->complete(); }
  bool tail_only() const override { return true; }
  std::string name() const override { return "power(" + fmt(a_) + "," + in_->name() + ")"; }
  NodeInfo info() const override {
    NodeInfo i;
    i.kind = NodeKind::power;
    i.alpha = a_;
    i.inner_drift = b_;
    i.inner_kill = q_;
    return i;
  }
  std::vector<std::shared_ptr<const ExponentNode>> children() const override { return {in_}; }

 private:
  bool nontrivial() const { return b_ > 0 || in_->info().kind != NodeKind::zero; }
  double a_, b_, q_;
  std::shared_ptr<const ExponentNode> in_;
};

void check_param(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

// ---------------------------------------------------------------- descriptor

BernsteinDescriptor::BernsteinDescriptor(double kill, double drift, std::shared_ptr<const ExponentNode> node)
    : q_(kill), b_(drift), node_(std::move(node)), id_(g_next_id.fetch_add(1)) {
  check_param(q_ >= 0 && std::isfinite(q_), "kill rate must be finite and nonnegative");
  check_param(b_ >= 0 && std::isfinite(b_), "drift must be finite and nonnegative");
  if (!node_) node_ = std::make_shared<ZeroNode>();
}

std::string BernsteinDescriptor::name() const {
  std::string s = node_->name();
  if (b_ > 0) s += "+drift(" + fmt(b_) + ")";
  if (q_ > 0) s += "+kill(" + fmt(q_) + ")";
  return s;
}

bool BernsteinDescriptor::in_domain(cplx z) const {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  if (z.real() >= 0.0) return true;
  return std::abs(std::arg(z)) <= node_->sector() * (1.0 + 1e-14);
}

void BernsteinDescriptor::check(cplx z) const {
  if (!in_domain(z)) {
    std::ostringstream os;
    os.precision(17);
    os << "z = (" << z.real() << "," << z.imag() << ") outside the declared domain of " << name();
    throw DomainError(os.str());
  }
}

cplx BernsteinDescriptor::phi(cplx z) const {
  check(z);
  return q_ + b_ * z + node_->dagger(z);
}

cplx BernsteinDescriptor::phi_dagger(cplx z) const {
  check(z);
  return node_->dagger(z);
}

cplx BernsteinDescriptor::phi_deriv(int n, cplx z) const {
  if (n < 1 || n > 3) throw DomainError("phi_deriv: order must be 1, 2 or 3");
  check(z);
  return (n == 1 ? b_ : 0.0) + node_->dagger_deriv(n, z);
}

double BernsteinDescriptor::phi(double x) const { return phi(cplx(x, 0.0)).real(); }
double BernsteinDescriptor::phi_dagger(double x) const { return phi_dagger(cplx(x, 0.0)).real(); }
double BernsteinDescriptor::phi_deriv(int n, double x) const { return phi_deriv(n, cplx(x, 0.0)).real(); }

double BernsteinDescriptor::delta(double x) const {
  if (!(x > 0)) throw DomainError("delta needs x > 0");
  return node_->delta(x);
}

BernsteinDescriptor::Bracket BernsteinDescriptor::delta_bracket(double x) const {
  if (!(x > 0)) throw DomainError("delta needs x > 0");
  if (auto* p = dynamic_cast<const PowerNode*>(node_.get())) {
    auto pr = p->identity_pair(x);
    return {pr.first, pr.second};
  }
  const double d = node_->delta(x);
  return {d, d};
}

LevyMeasureSpec BernsteinDescriptor::levy() const {
  LevyMeasureSpec s;
  auto node = node_;
  s.tail = [node](double t) { return node->tail(t); };
  if (node->density(1.0)) s.density = [node](double y) { return node->density(y).value_or(0.0); };
  s.support_upper = node->support_upper();
  s.truncated_second_moment = [node](double x) { return node->delta(x); };
  s.total_mass = node->total_mass();
  return s;
}

std::optional<double> BernsteinDescriptor::sector_half_angle() const {
  const double s = node_->sector();
  if (s > kPi / 2 + 1e-15) return s;
  return std::nullopt;
}

double BernsteinDescriptor::phi_prime_at_zero() const { return b_ + node_->prime_at_zero(); }
double BernsteinDescriptor::phi_second_at_zero() const { return node_->second_at_zero(); }

// ---------------------------------------------------------------- catalog

BernsteinDescriptor make_stable(double alpha) {
  check_param(alpha > 0 && alpha < 1, "stable: alpha must lie in (0,1)");
  return BernsteinDescriptor(0.0, 0.0, std::make_shared<StableNode>(alpha));
}

BernsteinDescriptor make_tempered_stable(double alpha, double lambda) {
  check_param(alpha > 0 && alpha < 1, "tempered_stable: alpha must lie in (0,1)");
  check_param(lambda > 0 && std::isfinite(lambda), "tempered_stable: lambda must be positive");
  return BernsteinDescriptor(0.0, 0.0, std::make_shared<TemperedNode>(alpha, lambda));
}

BernsteinDescriptor make_gamma() { return BernsteinDescriptor(0.0, 0.0, std::make_shared<GammaNode>()); }

BernsteinDescriptor make_poisson(double rate, double jump) {
  check_param(rate > 0 && std::isfinite(rate), "poisson: rate must be positive");
  check_param(jump > 0 && std::isfinite(jump), "poisson: jump must be positive");
  return BernsteinDescriptor(0.0, 0.0, std::make_shared<PoissonNode>(rate, jump));
}

BernsteinDescriptor make_from_levy_density(std::function<double(double)> density, double drift, double kill,
                                           std::optional<double> support_upper, QuadratureOptions opts) {
  check_param(opts.rel_tol > 0 && opts.rel_tol < 1e-2, "levy_density: rel_tol must lie in (0, 1e-2)");
  return BernsteinDescriptor(kill, drift,
                             std::make_shared<DensityNode>(std::move(density), support_upper, opts.rel_tol));
}

std::function<double(double)> density_from_family(const DensityFamily& f) {
  if (f.log_power != 0.0 && (!f.cutoff || *f.cutoff > 1.0))
    throw DomainError("density family: log_power needs cutoff <= 1");
  if (!(f.coeff > 0)) throw DomainError("density family: coeff must be positive");
  if (f.rate < 0) throw DomainError("density family: rate must be nonnegative");
  return [f](double y) {
    if (!(y > 0)) return 0.0;
    if (f.cutoff && y >= *f.cutoff) return 0.0;
    double v = f.coeff * std::pow(y, f.power);
    if (f.log_power != 0.0) v *= std::pow(-std::log(y), f.log_power);
    if (f.rate != 0.0) v *= std::exp(-f.rate * y);
    return v;
  };
}

// ---------------------------------------------------------------- combinators

BernsteinDescriptor combine_sum(const std::vector<BernsteinDescriptor>& parts) {
  if (parts.empty()) throw DomainError("sum: needs at least one operand");
  if (parts.size() == 1) return parts.front();
  double q = 0, b = 0;
  std::vector<std::shared_ptr<const ExponentNode>> nodes;
  for (auto& p : parts) {
    q += p.kill_rate();
    b += p.drift();
    nodes.push_back(p.node_ptr());
  }
  return BernsteinDescriptor(q, b, std::make_shared<SumNode>(std::move(nodes)));
}

BernsteinDescriptor power_composition(const BernsteinDescriptor& inner, double alpha) {
  check_param(alpha > 0 && alpha <= 1, "power_composition: alpha must lie in (0,1]");
  if (alpha == 1.0) return inner;
  return BernsteinDescriptor(
      inner.kill_rate(), 0.0,
      std::make_shared<PowerNode>(alpha, inner.drift(), inner.kill_rate(), inner.node_ptr()));
}

BernsteinDescriptor add_drift(const BernsteinDescriptor& d, double b) {
  check_param(b >= 0, "add_drift: b must be nonnegative");
  return BernsteinDescriptor(d.kill_rate(), d.drift() + b, d.node_ptr());
}

BernsteinDescriptor add_kill(const BernsteinDescriptor& d, double q) {
  check_param(q >= 0, "add_kill: q must be nonnegative");
  return BernsteinDescriptor(d.kill_rate() + q, d.drift(), d.node_ptr());
}

}  // namespace invsub
