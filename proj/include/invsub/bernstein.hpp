#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace invsub {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Levy measure view.  All functions are pure; `density` is empty for
// measures with atoms or when only the tail is known.
struct LevyMeasureSpec {
  std::function<double(double)> tail;
  std::function<double(double)> density;
  std::optional<double> support_upper;
  std::function<double(double)> truncated_second_moment;  // Delta(x) = int_0^{1/x} y^2 mu(dy)
  double total_mass = 0.0;                                // mu((0,inf)), may be +inf
};

// Structural tag, used by closed-form fast paths and the samplers.
enum class NodeKind { stable, tempered_stable, gamma, poisson, levy_density, sum, power, zero };

struct NodeInfo {
  NodeKind kind = NodeKind::zero;
  double alpha = 0.0;
  double lambda = 0.0;
  double rate = 0.0;
  double jump = 0.0;
  double inner_drift = 0.0;  // power composition: drift of the inner exponent
  double inner_kill = 0.0;
};

// Pure-jump exponent node Phi^dagger plus its Levy measure.
class ExponentNode {
 public:
  virtual ~ExponentNode() = default;
  virtual cplx dagger(cplx z) const = 0;
  virtual cplx dagger_deriv(int n, cplx z) const = 0;  // n = 1, 2, 3
  virtual double tail(double t) const = 0;
  virtual double delta(double x) const = 0;
  virtual std::optional<double> density(double y) const { (void)y; return std::nullopt; }
  virtual std::optional<double> support_upper() const { return std::nullopt; }
  virtual double total_mass() const = 0;
  virtual double prime_at_zero() const = 0;   // Phi^dagger'(0+), may be +inf
  virtual double second_at_zero() const = 0;  // Phi^dagger''(0+), may be -inf
  virtual double sector() const = 0;          // half-angle of declared closed sector, >= pi/2
  virtual bool halfplane() const = 0;         // continuous extension to the closed upper half-plane
  virtual bool complete() const = 0;
  virtual std::string name() const = 0;
  virtual NodeInfo info() const = 0;
  virtual std::vector<std::shared_ptr<const ExponentNode>> children() const { return {}; }
  // true when Delta comes from the tail identity rather than a density / closed form
  virtual bool tail_only() const { return false; }
};

// Immutable handle: Phi(z) = q + b z + Phi^dagger(z).
class BernsteinDescriptor {
 public:
  BernsteinDescriptor(double kill, double drift, std::shared_ptr<const ExponentNode> node);

  double kill_rate() const { return q_; }
  double drift() const { return b_; }
  const ExponentNode& node() const { return *node_; }
  std::shared_ptr<const ExponentNode> node_ptr() const { return node_; }
  std::uint64_t id() const { return id_; }
  std::string name() const;

  bool in_domain(cplx z) const;
  cplx phi(cplx z) const;
  cplx phi_dagger(cplx z) const;
  cplx phi_deriv(int n, cplx z) const;
  double phi(double x) const;
  double phi_dagger(double x) const;
  double phi_deriv(int n, double x) const;

  double tail(double t) const { return node_->tail(t); }
  double delta(double x) const;
  struct Bracket {
    double lower;
    double upper;
  };
  // exact Delta for density / closed-form measures (lower == upper); for
  // tail-only measures the pair (identity value, 2 int_0^{1/x} w tail(w) dw)
  Bracket delta_bracket(double x) const;
  LevyMeasureSpec levy() const;

  std::optional<double> sector_half_angle() const;
  bool complete() const { return node_->complete(); }
  bool halfplane_extension() const { return node_->halfplane(); }
  double phi_prime_at_zero() const;
  double phi_second_at_zero() const;

 private:
  void check(cplx z) const;
  double q_, b_;
  std::shared_ptr<const ExponentNode> node_;
  std::uint64_t id_;
};

// ---------------------------------------------------------------- catalog

BernsteinDescriptor make_stable(double alpha);
BernsteinDescriptor make_tempered_stable(double alpha, double lambda);
BernsteinDescriptor make_gamma();
// compound Poisson with a single jump size: Phi(z) = rate (1 - e^{-jump z})
BernsteinDescriptor make_poisson(double rate, double jump);

struct QuadratureOptions {
  double rel_tol = 1e-10;
};

BernsteinDescriptor make_from_levy_density(std::function<double(double)> density, double drift, double kill,
                                           std::optional<double> support_upper,
                                           QuadratureOptions opts = {});

// c y^p (ln 1/y)^m e^{-beta y} 1{y < U}; the family the config loader understands
struct DensityFamily {
  double coeff = 1.0;
  double power = -1.5;
  double log_power = 0.0;
  double rate = 0.0;
  std::optional<double> cutoff;
};
std::function<double(double)> density_from_family(const DensityFamily& fam);

// ---------------------------------------------------------------- combinators

BernsteinDescriptor combine_sum(const std::vector<BernsteinDescriptor>& parts);
BernsteinDescriptor power_composition(const BernsteinDescriptor& inner, double alpha);
BernsteinDescriptor add_drift(const BernsteinDescriptor& d, double b);
BernsteinDescriptor add_kill(const BernsteinDescriptor& d, double q);

}  // namespace invsub
