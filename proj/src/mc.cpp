#include "invsub/mc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <random>

#include "invsub/errors.hpp"
#include "invsub/special.hpp"

namespace invsub {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng stream(std::uint64_t seed, int batch) { return Rng(splitmix64(seed ^ splitmix64(std::uint64_t(batch) + 1))); }

double uniform(Rng& g) {
  // (0,1), never 0
  return (double(g() >> 11) + 0.5) * 0x1.0p-53;
}

double expo(Rng& g) { return -std::log(uniform(g)); }

// log of a Gamma(a, 1) draw, safe for tiny a
double log_gamma_draw(double a, Rng& g) {
  if (a >= 1.0) return std::log(std::gamma_distribution<double>(a, 1.0)(g));
  return std::log(std::gamma_distribution<double>(a + 1.0, 1.0)(g)) + std::log(uniform(g)) / a;
}

// positive stable with E exp(-z S) = exp(-z^alpha)
double stable_unit(double alpha, Rng& g) {
  const double u = kPi * uniform(g), e = expo(g);
  const double a = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha);
  const double b = std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
  return a * b;
}

class Sampler {
 public:
  virtual ~Sampler() = default;
  // exact increment of the pure-jump part over a length-h stretch of x
  virtual double increment(double h, Rng& g) const = 0;
  // compound Poisson skeleton: jump rate, jump law, compensating drift
  virtual bool compound() const { return false; }
  virtual double rate() const { return 0.0; }
  virtual double jump(Rng&) const { return 0.0; }
  virtual double drift() const { return 0.0; }
};

class StableS final : public Sampler {
 public:
  explicit StableS(double a) : a_(a) {}
  double increment(double h, Rng& g) const override { return std::pow(h, 1.0 / a_) * stable_unit(a_, g); }

 private:
  double a_;
};

class TemperedS final : public Sampler {
 public:
  TemperedS(double a, double l) : a_(a), l_(l) {}
  double increment(double h, Rng& g) const override {
    // rejection from the stable law; chunks keep the acceptance >= e^{-1/2}
    const int m = std::max(1, int(std::ceil(h * std::pow(l_, a_) / 0.5)));
    const double hc = h / m, sc = std::pow(hc, 1.0 / a_);
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      for (;;) {
        const double v = sc * stable_unit(a_, g);
        if (uniform(g) <= std::exp(-l_ * v)) {
          s += v;
          break;
        }
      }
    }
    return s;
  }

 private:
  double a_, l_;
};

class GammaS final : public Sampler {
 public:
  double increment(double h, Rng& g) const override { return std::exp(log_gamma_draw(h, g)); }
};

class ZeroS final : public Sampler {
 public:
  double increment(double, Rng&) const override { return 0.0; }
  bool compound() const override { return true; }
};

double poisson_sum(const Sampler& s, double h, Rng& g) {
  double acc = s.drift() * h;
  const double lam = s.rate() * h;
  if (lam <= 0) return acc;
  const long n = std::poisson_distribution<long>(lam)(g);
  for (long i = 0; i < n; ++i) acc += s.jump(g);
  return acc;
}

class PoissonS final : public Sampler {
 public:
  PoissonS(double r, double j) : r_(r), j_(j) {}
  double increment(double h, Rng& g) const override { return poisson_sum(*this, h, g); }
  bool compound() const override { return true; }
  double rate() const override { return r_; }
  double jump(Rng&) const override { return j_; }

 private:
  double r_, j_;
};

// jumps above the cut from a log-log table of the tail, small jumps as drift
class DensityS final : public Sampler {
 public:
  DensityS(const ExponentNode& node, double cut) {
    const double mass = node.total_mass();
    const double lo = std::isfinite(mass) ? std::max(1e-14, 1e-12 * cut) : cut;
    if (!std::isfinite(mass)) {
      auto ym = [&](double y) { return y * node.density(y).value_or(0.0); };
      auto r = quad::dyadic_sweep<double>(ym, cut, 0.0, true, 1e-10);
      if (r.diverged) throw IntegrabilityError("levy density: int_0^cut y m(y) dy diverges");
      drift_ = r.value;
    }
    double hi = node.support_upper().value_or(kInf);
    const double top = node.tail(lo);
    if (!std::isfinite(hi)) {
      hi = std::max(1.0, 2 * lo);
      while (node.tail(hi) > 1e-15 * top && hi < 1e15) hi *= 2;
    }
    const int n = 2048;
    ly_.resize(n);
    lt_.resize(n);
    for (int i = 0; i < n; ++i) {
      const double y = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
      ly_[i] = std::log(y);
      lt_[i] = std::log(std::max(node.tail(y), 1e-300 * top));
    }
    rate_ = top;
    if (!(rate_ > 0 && std::isfinite(rate_))) rate_ = 0.0;
  }
  double increment(double h, Rng& g) const override { return poisson_sum(*this, h, g); }
  bool compound() const override { return true; }
  double rate() const override { return rate_; }
  double drift() const override { return drift_; }
  double jump(Rng& g) const override {
    // P(Y > y) = tail(y) / tail(lo)
    const double target = lt_[0] + std::log(uniform(g));
    auto it = std::lower_bound(lt_.begin(), lt_.end(), target, [](double a, double b) { return a > b; });
    if (it == lt_.begin()) return std::exp(ly_[0]);
    if (it == lt_.end()) return std::exp(ly_.back());
    const std::size_t i = it - lt_.begin();
    const double w = (target - lt_[i - 1]) / (lt_[i] - lt_[i - 1]);
    return std::exp(ly_[i - 1] + w * (ly_[i] - ly_[i - 1]));
  }

 private:
  std::vector<double> ly_, lt_;
  double rate_ = 0.0, drift_ = 0.0;
};

class SumS final : public Sampler {
 public:
  explicit SumS(std::vector<std::unique_ptr<Sampler>> p) : p_(std::move(p)) {
    for (auto& s : p_) {
      compound_ = compound_ && s->compound();
      rate_ += s->rate();
      drift_ += s->drift();
    }
  }
  double increment(double h, Rng& g) const override {
    double s = 0.0;
    for (auto& c : p_) s += c->increment(h, g);
    return s;
  }
  bool compound() const override { return compound_; }
  double rate() const override { return rate_; }
  double drift() const override { return drift_; }
  double jump(Rng& g) const override {
    double u = uniform(g) * rate_;
    for (auto& c : p_) {
      if (u < c->rate()) return c->jump(g);
      u -= c->rate();
    }
    return p_.back()->jump(g);
  }

 private:
  std::vector<std::unique_ptr<Sampler>> p_;
  bool compound_ = true;
  double rate_ = 0.0, drift_ = 0.0;
};

// sigma(x) = S_alpha(sigma_inner(x))
class PowerS final : public Sampler {
 public:
  PowerS(double a, double b_in, std::unique_ptr<Sampler> in) : a_(a), b_(b_in), in_(std::move(in)) {}
  double increment(double h, Rng& g) const override {
    const double s = b_ * h + in_->increment(h, g);
    return s > 0 ? std::pow(s, 1.0 / a_) * stable_unit(a_, g) : 0.0;
  }

 private:
  double a_, b_;
  std::unique_ptr<Sampler> in_;
};

// prefer_cp: swap exact infinite-activity samplers for the compound Poisson
// skeleton, which is what lets drift crossings be tagged as creeping
std::unique_ptr<Sampler> build(const ExponentNode& node, double cut, bool prefer_cp = false) {
  const NodeInfo info = node.info();
  switch (info.kind) {
    case NodeKind::stable:
      if (prefer_cp) return std::make_unique<DensityS>(node, cut);
      return std::make_unique<StableS>(info.alpha);
    case NodeKind::tempered_stable:
      if (prefer_cp) return std::make_unique<DensityS>(node, cut);
      return std::make_unique<TemperedS>(info.alpha, info.lambda);
    case NodeKind::gamma:
      if (prefer_cp) return std::make_unique<DensityS>(node, cut);
      return std::make_unique<GammaS>();
    case NodeKind::poisson: return std::make_unique<PoissonS>(info.rate, info.jump);
    case NodeKind::zero: return std::make_unique<ZeroS>();
    case NodeKind::levy_density: return std::make_unique<DensityS>(node, cut);
    case NodeKind::sum: {
      std::vector<std::unique_ptr<Sampler>> p;
      for (auto& c : node.children()) p.push_back(build(*c, cut, prefer_cp));
      return std::make_unique<SumS>(std::move(p));
    }
    case NodeKind::power: {
      auto kids = node.children();
      return std::make_unique<PowerS>(info.alpha, info.inner_drift, build(*kids.at(0), cut));
    }
  }
  throw CapabilityError("no sampler for " + node.name());
}

void check_config(const SimulationConfig& c) {
  if (c.n_paths < 1) throw DomainError("n_paths must be positive");
  if (c.batches < 1 || c.batches > c.n_paths) throw DomainError("batches must lie in [1, n_paths]");
  if (!(c.small_jump_cut > 0)) throw DomainError("small_jump_cut must be positive");
  if (!(c.step_clock > 0)) throw DomainError("step_clock must be positive");
}

long batch_size(const SimulationConfig& c, int b) {
  return c.n_paths / c.batches + (b < c.n_paths % c.batches ? 1 : 0);
}

template <class Body>
void for_batches(const SimulationConfig& cfg, Body body) {
  std::exception_ptr failure;
  auto run = [&](int b) {
    try {
      body(b);
    } catch (...) {
#pragma omp critical(invsub_mc_failure)
      if (!failure) failure = std::current_exception();
    }
  };
  if (cfg.exec == quad::Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int b = 0; b < cfg.batches; ++b) run(b);
  } else {
    for (int b = 0; b < cfg.batches; ++b) run(b);
  }
  if (failure) std::rethrow_exception(failure);
}

bool has_power(const ExponentNode& n) {
  if (n.info().kind == NodeKind::power) return true;
  for (auto& c : n.children())
    if (has_power(*c)) return true;
  return false;
}

std::unique_ptr<Sampler> path_sampler(const BernsteinDescriptor& d, double cut) {
  return build(d.node(), cut, d.drift() > 0 && !has_power(d.node()));
}

enum class Mode { exact_stable, compound, grid };

Mode mode_of(const BernsteinDescriptor& d, const Sampler& s) {
  if (d.node().info().kind == NodeKind::stable && d.drift() == 0.0) return Mode::exact_stable;
  if (s.compound()) return Mode::compound;
  return Mode::grid;
}

PassageSample passage_one(const BernsteinDescriptor& d, const Sampler& s, Mode mode, double t,
                          const SimulationConfig& cfg, Rng& g) {
  const double q = d.kill_rate(), b = d.drift();
  const double ek = q > 0 ? expo(g) / q : kInf;
  PassageSample out;
  double L = kInf;
  if (mode == Mode::exact_stable) {
    // self-similarity: L(t) = (t / sigma(1))^alpha
    const double a = d.node().info().alpha;
    L = std::pow(t / stable_unit(a, g), a);
  } else if (mode == Mode::compound) {
    const double D = b + s.drift(), lam = s.rate();
    double x = 0.0, sig = 0.0;
    for (;;) {
      const double tau = lam > 0 ? expo(g) / lam : kInf;
      if (D > 0 && sig + D * tau >= t) {
        L = x + (t - sig) / D;
        // drift crossing: creeping for the share of the drift that is real
        if (b > 0 && uniform(g) * D < b) out.tag = PassageTag::creep;
        break;
      }
      if (!std::isfinite(tau) || x > ek) break;
      x += tau;
      sig += D * tau + s.jump(g);
      if (sig > t) {
        L = x;
        break;
      }
    }
  } else {
    const bool gamma = d.node().info().kind == NodeKind::gamma;
    // the gamma bridge is exact, so a coarse step costs nothing in accuracy
    const double h = gamma ? std::max(cfg.step_clock, 0.25) : cfg.step_clock;
    double x = 0.0, sig = 0.0;
    while (x <= ek) {
      const double inc = s.increment(h, g);
      if (sig + b * h + inc > t) {
        if (gamma) {
          // Beta bridge bisection on the gamma part
          double lo = x, w = h, G = inc;
          for (int it = 0; it < 48 && w > 1e-14 * std::max(1.0, lo); ++it) {
            const double la = log_gamma_draw(w / 2, g), lb = log_gamma_draw(w / 2, g);
            const double left = G / (1.0 + std::exp(lb - la));
            const double mid = sig + b * w / 2 + left;
            if (mid > t) {
              G = left;
            } else {
              sig = mid;
              G -= left;
              lo += w / 2;
            }
            w /= 2;
          }
          L = lo + w / 2;
        } else {
          L = x + h * (t - sig) / (b * h + inc);
        }
        break;
      }
      sig += b * h + inc;
      x += h;
    }
  }
  if (ek <= L) {
    out.L = ek;
    out.tag = PassageTag::killed;
  } else {
    out.L = L;
  }
  return out;
}

}  // namespace

std::string passage_mode(const BernsteinDescriptor& d) {
  auto s = path_sampler(d, 1e-4);
  switch (mode_of(d, *s)) {
    case Mode::exact_stable: return "exact_stable";
    case Mode::compound: return "compound_poisson";
    case Mode::grid: return "grid";
  }
  return "?";
}

std::vector<double> sample_sigma(const BernsteinDescriptor& d, double x, const SimulationConfig& cfg) {
  check_config(cfg);
  if (!(x > 0)) throw DomainError("sample_sigma: x must be positive");
  auto s = build(d.node(), cfg.small_jump_cut);
  std::vector<double> out(cfg.n_paths);
  std::vector<long> offset(cfg.batches + 1, 0);
  for (int b = 0; b < cfg.batches; ++b) offset[b + 1] = offset[b] + batch_size(cfg, b);
  const double q = d.kill_rate(), drift = d.drift();
  for_batches(cfg, [&](int b) {
    Rng g = stream(cfg.rng_seed, b);
    for (long i = offset[b]; i < offset[b + 1]; ++i) {
      const bool killed = q > 0 && expo(g) / q < x;
      const double v = drift * x + s->increment(x, g);
      out[i] = killed ? kInf : v;
    }
  });
  return out;
}

std::vector<PassageSample> sample_passage(const BernsteinDescriptor& d, double t, const SimulationConfig& cfg) {
  check_config(cfg);
  if (!(t > 0)) throw DomainError("sample_passage: t must be positive");
  auto s = path_sampler(d, cfg.small_jump_cut);
  const Mode mode = mode_of(d, *s);
  if (mode == Mode::compound && s->rate() == 0.0 && d.drift() == 0.0 && d.kill_rate() == 0.0)
    throw CapabilityError("descriptor never moves: L(t) = +inf");
  std::vector<PassageSample> out(cfg.n_paths);
  std::vector<long> offset(cfg.batches + 1, 0);
  for (int b = 0; b < cfg.batches; ++b) offset[b + 1] = offset[b] + batch_size(cfg, b);
  for_batches(cfg, [&](int b) {
    Rng g = stream(cfg.rng_seed, b);
    for (long i = offset[b]; i < offset[b + 1]; ++i) out[i] = passage_one(d, *s, mode, t, cfg, g);
  });
  return out;
}

double silverman_bandwidth(std::vector<double> v) {
  const std::size_t n = v.size();
  if (n < 2) throw DomainError("silverman_bandwidth: need at least two samples");
  std::sort(v.begin(), v.end());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1));
  auto quantile = [&](double p) {
    const double pos = p * (n - 1);
    const std::size_t i = std::size_t(pos);
    const double w = pos - i;
    return i + 1 < n ? v[i] * (1 - w) + v[i + 1] * w : v[i];
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0)) spread = sd > 0 ? sd : 1.0;
  return 0.8 * 0.9 * spread * std::pow(double(n), -0.2);
}

std::vector<double> reflected_kde(const std::vector<double>& sorted, const std::vector<double>& x_grid, double h,
                                  double norm, quad::Exec exec) {
  std::vector<double> out(x_grid.size(), 0.0);
  const double c = 1.0 / (norm * h * std::sqrt(2 * kPi));
  const double reach = 8.0 * h;
  auto point = [&](std::size_t k) {
    const double x = x_grid[k];
    double acc = 0.0;
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), x - reach);
    auto hi = std::upper_bound(lo, sorted.end(), x + reach);
    for (auto it = lo; it != hi; ++it) {
      const double u = (x - *it) / h;
      acc += std::exp(-0.5 * u * u);
    }
    // mirror images -X of the samples with X < reach - x
    if (x < reach) {
      auto end = std::upper_bound(sorted.begin(), sorted.end(), reach - x);
      for (auto it = sorted.begin(); it != end; ++it) {
        const double u = (x + *it) / h;
        acc += std::exp(-0.5 * u * u);
      }
    }
    out[k] = acc * c;
  };
  const long n = long(x_grid.size());
  if (exec == quad::Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long k = 0; k < n; ++k) point(std::size_t(k));
  } else {
    for (long k = 0; k < n; ++k) point(std::size_t(k));
  }
  return out;
}

InverseDensityEstimate estimate_inverse_density(const BernsteinDescriptor& d, double t,
                                                const std::vector<double>& x_grid, const SimulationConfig& cfg) {
  if (cfg.batches < 2) throw DomainError("estimate_inverse_density: need at least two batches for a band");
  for (double x : x_grid)
    if (!(x >= 0)) throw DomainError("estimate_inverse_density: grid points must be nonnegative");
  auto draws = sample_passage(d, t, cfg);
  InverseDensityEstimate est;
  est.x = x_grid;
  est.n_paths = cfg.n_paths;
  auto s = path_sampler(d, cfg.small_jump_cut);
  const Mode mode = mode_of(d, *s);
  est.mode = mode == Mode::exact_stable ? "exact_stable" : mode == Mode::compound ? "compound_poisson" : "grid";
  long creep = 0, killed = 0;
  std::vector<double> jumps;
  jumps.reserve(draws.size());
  for (auto& p : draws) {
    if (p.tag == PassageTag::creep) ++creep;
    else if (p.tag == PassageTag::killed) ++killed;
    else jumps.push_back(p.L);
  }
  est.creep_fraction = double(creep) / cfg.n_paths;
  if (mode == Mode::grid && d.drift() > 0) est.creep_fraction = std::numeric_limits<double>::quiet_NaN();
  est.killed_fraction = double(killed) / cfg.n_paths;
  est.bandwidth = jumps.size() >= 2 ? silverman_bandwidth(jumps) : 1.0;
  const std::size_t m = x_grid.size();
  std::vector<std::vector<double>> per(cfg.batches);
  std::vector<long> offset(cfg.batches + 1, 0);
  for (int b = 0; b < cfg.batches; ++b) offset[b + 1] = offset[b] + batch_size(cfg, b);
  for_batches(cfg, [&](int b) {
    std::vector<double> v;
    for (long i = offset[b]; i < offset[b + 1]; ++i)
      if (draws[i].tag == PassageTag::jump) v.push_back(draws[i].L);
    std::sort(v.begin(), v.end());
    per[b] = reflected_kde(v, x_grid, est.bandwidth, double(offset[b + 1] - offset[b]));
  });
  const double tc = special::student_t_critical(cfg.ci_level, cfg.batches - 1);
  est.estimate.assign(m, 0.0);
  est.ci_lo.assign(m, 0.0);
  est.ci_hi.assign(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    double mean = 0.0;
    for (int b = 0; b < cfg.batches; ++b) mean += per[b][k];
    mean /= cfg.batches;
    double ss = 0.0;
    for (int b = 0; b < cfg.batches; ++b) ss += (per[b][k] - mean) * (per[b][k] - mean);
    const double half = tc * std::sqrt(ss / (cfg.batches - 1) / cfg.batches);
    est.estimate[k] = mean;
    est.ci_lo[k] = mean - half;
    est.ci_hi[k] = mean + half;
  }
  return est;
}

}  // namespace invsub
