#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "invsub/bernstein.hpp"
#include "invsub/contour.hpp"

namespace invsub {

enum class Regime { drift_edge, interior, mean_edge };
std::string to_string(Regime r);

struct SaddleSolution {
  double c = 0.0;
  Regime regime = Regime::interior;
  double leading = 0.0;          // may underflow; see log_abs_leading
  double error_scale = 0.0;      // relative speed term, not a bound
  double log_abs_leading = 0.0;
  int sign = 1;
  std::map<std::string, double> diagnostics;
};

// interior band is [b + delta, Phi'(0+) - delta], delta = fraction * (Phi'(0+) - b);
// with Phi'(0+) = inf: delta = fraction * (Phi'(1) - b), band [b + delta, b + 1/delta]
struct RegimeBands {
  double fraction = 0.05;
};

double solve_saddle(const BernsteinDescriptor& d, double t, double x);
Regime classify_regime(const BernsteinDescriptor& d, double t_over_x, const RegimeBands& bands = {});

SaddleSolution asymptotic_density(const BernsteinDescriptor& d, const DensityQuery& q,
                                  const RegimeBands& bands = {});
SaddleSolution asymptotic_G_g(const BernsteinDescriptor& d, const DensityQuery& q, const RegimeBands& bands = {});
// dispatch on q.target
SaddleSolution asymptotic(const BernsteinDescriptor& d, const DensityQuery& q, const RegimeBands& bands = {});

struct ProbeRow {
  double x = 0, t = 0;
  double a_star = 0;
  Regime regime = Regime::interior;
  double leading = 0;
  double error_scale = 0;
  double reference = 0;       // inversion value
  double reference_rel_error = 0;
  double ratio = 0;           // leading / reference, formed in log space
  double deviation = 0;       // |ratio - 1|
};

struct ProbeTable {
  std::vector<ProbeRow> rows;
  // least-squares slope of ln|ratio-1| against ln(error_scale); NaN when fewer
  // than two rows have a deviation above the reference's own error floor
  double fitted_exponent = 0;
  double fitted_intercept = 0;
  int resolvable_rows = 0;
};

ProbeTable regime_schedule_probe(const BernsteinDescriptor& d, const std::function<double(double)>& schedule,
                                 const std::vector<double>& x_grid, int k, int l, Target target = Target::f,
                                 const ContourSpec& reference = ContourSpec::bromwich_at());

}  // namespace invsub
