#pragma once

#include <utility>
#include <vector>

#include "invsub/bernstein.hpp"
#include "invsub/contour.hpp"

namespace invsub {

enum class CoefficientFamily { I, frakI };  // I for f, frakI for G and g
enum class CoefficientSource { automatic, keyhole_numeric, halfplane_numeric, stable_closed_form, tempered_closed_form };
std::string to_string(CoefficientSource s);

struct SeriesCoefficients {
  CoefficientFamily family = CoefficientFamily::I;
  int k = 0, l = 0;
  double t = 1.0;
  std::vector<double> values;
  std::vector<double> errors;  // quadrature error per coefficient, 0 for closed forms
  CoefficientSource source = CoefficientSource::keyhole_numeric;
};

// d^r/dt^r of the n-fold convolution power of the tail, cached per
// (descriptor id, n, r, t, source).  Returns (value, error).
std::pair<double, double> conv_tail_cached(const BernsteinDescriptor& d, int n, int r, double t,
                                           CoefficientSource src);
void clear_coefficient_cache();
std::size_t coefficient_cache_size();

// coefficient of x^j/j! in the k-th x / l-th t derivative of f
double coefficient_I(const BernsteinDescriptor& d, int j, int k, int l, double t,
                     CoefficientSource src = CoefficientSource::automatic, double* error = nullptr);
// coefficient of x^j/j! in d^l/dt^l d^k/dx^k (G(x,t) - (-q)^k e^{-qx} [l = 0])
double coefficient_frakI(const BernsteinDescriptor& d, int j, int k, int l, double t,
                         CoefficientSource src = CoefficientSource::automatic, double* error = nullptr);

// j = 0..n_max, computed in parallel across j
SeriesCoefficients series_coefficients(const BernsteinDescriptor& d, CoefficientFamily fam, int k, int l, double t,
                                       int n_max, CoefficientSource src = CoefficientSource::automatic);

struct SeriesOptions {
  int n_max = 80;
  double tol = 1e-12;
  CoefficientSource source = CoefficientSource::automatic;
};

MethodResult series_f(const BernsteinDescriptor& d, const DensityQuery& q, const SeriesOptions& opt = {});
// targets G, g, f_k = q G, f_c = b g
MethodResult series_G_g(const BernsteinDescriptor& d, const DensityQuery& q, const SeriesOptions& opt = {});
MethodResult series(const BernsteinDescriptor& d, const DensityQuery& q, const SeriesOptions& opt = {});

struct PolynomialReport {
  int n = 0, k = 0, l = 0;
  std::vector<double> t_probe;
  std::vector<double> x_probe;
  std::vector<double> sup_remainder;  // sup over t_probe of |f-derivative - P_n|
  double fitted_exponent = 0.0;       // slope of ln sup_remainder against ln x
  double constant = 0.0;              // C in sup_remainder ~ C x^{n+1}/(n+1)!
  // P_n coefficients I_{j,k,l}(t) for each t_probe, j = 0..n
  std::vector<std::vector<double>> coefficients;
};

// the remainder is the tail sum of the series beyond j = n, so no
// cancellation against f itself
PolynomialReport polynomial_approx(const BernsteinDescriptor& d, int n, int k, int l, std::pair<double, double> t_band,
                                   std::pair<double, double> x_band, int t_points = 9, int x_points = 9,
                                   const SeriesOptions& opt = {});

// tempered stable density of L(t) from the incomplete-gamma series
double tempered_stable_series_f(double alpha, double lambda, double x, double t, int n_max = 200,
                                double tol = 1e-14);

}  // namespace invsub
