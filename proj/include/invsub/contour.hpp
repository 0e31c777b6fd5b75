#pragma once

#include <map>
#include <optional>
#include <string>

#include "invsub/bernstein.hpp"
#include "invsub/keyhole.hpp"
#include "invsub/quadrature.hpp"

namespace invsub {

enum class Target { f, f_k, f_c, g, G };
enum class Method { bromwich, keyhole, series, saddle, monte_carlo, closed_form };

std::string to_string(Target t);
std::string to_string(Method m);
Target parse_target(const std::string& s);  // throws DomainError

struct DensityQuery {
  Target target = Target::f;
  double x = 1.0;
  double t = 1.0;
  int k = 0;
  int l = 0;
};

// value = mantissa * exp(log_scale); log_scale is nonzero only when the
// integrand was rescaled (Bromwich at the saddle), so tiny values survive.
struct MethodResult {
  double value = 0.0;
  double error_scale = 0.0;
  Method method = Method::bromwich;
  std::map<std::string, double> diagnostics;
  double mantissa = 0.0;
  double log_scale = 0.0;
  double mantissa_error = 0.0;
};

struct ContourSpec {
  enum class Kind { bromwich, keyhole, halfplane_keyhole };
  Kind kind = Kind::bromwich;
  std::optional<double> a;        // Bromwich abscissa; empty = saddle point (fallback min(1, 1/t))
  double theta = kPi / 2;         // keyhole opening
  std::optional<double> eps;      // arc radius; empty = min(0.1, 1/(10t))
  double trunc_tol = 1e-12;
  double quad_tol = 1e-12;
  int max_panels = 400000;
  quad::Exec exec = quad::Exec::parallel;

  static ContourSpec bromwich_at(std::optional<double> a = std::nullopt);
  static ContourSpec keyhole(double theta = kPi / 2, std::optional<double> eps = std::nullopt);
  static ContourSpec halfplane(std::optional<double> eps = std::nullopt);
};

// throws DomainError when (x,t) is outside D = {t > 0, 0 < x < t/b}
void require_in_region(const BernsteinDescriptor& d, double x, double t);

MethodResult invert_bromwich(const BernsteinDescriptor& d, const DensityQuery& q,
                             const ContourSpec& spec = ContourSpec::bromwich_at());
MethodResult invert_keyhole(const BernsteinDescriptor& d, const DensityQuery& q,
                            const ContourSpec& spec = ContourSpec::keyhole());

// d^r/dt^r of the n-fold convolution power of the Levy tail
ContourIntegral conv_tail_derivative(const BernsteinDescriptor& d, int n, int r, double t,
                                     const ContourSpec& spec = ContourSpec::keyhole());
ContourIntegral conv_tail_halfplane(const BernsteinDescriptor& d, int n, int r, double t,
                                    std::optional<double> eps = std::nullopt,
                                    const ContourSpec& controls = ContourSpec::halfplane());

}  // namespace invsub
