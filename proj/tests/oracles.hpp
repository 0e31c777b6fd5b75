#pragma once

// Closed-form oracles and the Laplace round-trip helper shared by the unit
// and acceptance tests.

#include <cmath>
#include <complex>
#include <vector>

#include "invsub/bernstein.hpp"
#include "invsub/contour.hpp"
#include "invsub/quadrature.hpp"

namespace invsub::testing {

// inverse 1/2-stable: L(t) density and the 1/2-stable density of sigma(x)
inline double stable_half_f(double x, double t) { return std::exp(-x * x / (4 * t)) / std::sqrt(kPi * t); }
inline double stable_half_g(double x, double t) {
  return x * std::pow(t, -1.5) * std::exp(-x * x / (4 * t)) / (2 * std::sqrt(kPi));
}

// d^j/dt^j of the (j+1)-fold convolution of the stable tail
inline double stable_conv_closed(double alpha, int j, double t) {
  const double s = alpha * (j + 1);
  return std::pow(t, -s) * std::sin(kPi * s) * std::tgamma(s + 1) / (kPi * s);
}

struct RoundTrip {
  std::vector<double> z;
  std::vector<double> integral;  // int_0^T f(x,t) e^{-zt} dt
  std::vector<double> quad_error;
  std::vector<double> transform;  // Phi^dagger(z)/z e^{-x Phi(z)}
  int inversions = 0;
};

// f(x, .) sampled once on composite GK15 nodes in u = ln t over
// [t_lo, t_hi], reused for every z.  Truncation: f e^{-z t} at t_hi and the
// mass below t_lo are both far below 1e-9 for the cases used here.
inline RoundTrip laplace_round_trip(const BernsteinDescriptor& d, double x, const std::vector<double>& zs,
                                    double t_lo = 1e-3, double t_hi = 60.0, int panels = 96) {
  RoundTrip out;
  out.z = zs;
  out.integral.assign(zs.size(), 0.0);
  out.quad_error.assign(zs.size(), 0.0);
  const double u0 = std::log(t_lo), u1 = std::log(t_hi), h = (u1 - u0) / panels;
  const int m = 15;
  for (int p = 0; p < panels; ++p) {
    const double c = u0 + (p + 0.5) * h, hh = 0.5 * h;
    double node[m], wk[m], wgauss[m];
    for (int j = 0; j < 7; ++j) {
      node[j] = c - hh * quad::detail::xgk[j];
      node[14 - j] = c + hh * quad::detail::xgk[j];
      wk[j] = wk[14 - j] = quad::detail::wgk[j];
      wgauss[j] = wgauss[14 - j] = (j % 2 == 1) ? quad::detail::wg[j / 2] : 0.0;
    }
    node[7] = c;
    wk[7] = quad::detail::wgk[7];
    wgauss[7] = quad::detail::wg[3];
    double fv[m];
    for (int j = 0; j < m; ++j) {
      const double t = std::exp(node[j]);
      fv[j] = invert_bromwich(d, {Target::f, x, t}).value * t;  // dt = t du
      ++out.inversions;
    }
    for (std::size_t iz = 0; iz < zs.size(); ++iz) {
      double k = 0, g = 0;
      for (int j = 0; j < m; ++j) {
        const double v = fv[j] * std::exp(-zs[iz] * std::exp(node[j]));
        k += wk[j] * v;
        g += wgauss[j] * v;
      }
      out.integral[iz] += k * hh;
      out.quad_error[iz] += std::abs(k - g) * hh;
    }
  }
  for (double z : zs) out.transform.push_back(d.phi_dagger(z) / z * std::exp(-x * d.phi(z)));
  return out;
}

}  // namespace invsub::testing
