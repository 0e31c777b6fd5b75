#pragma once

// Low-level contour quadrature shared by the inversion routines and by
// exponents whose Levy tail is only reachable through inversion.

#include <complex>
#include <functional>

#include "invsub/quadrature.hpp"

namespace invsub {

struct KeyholeGeometry {
  double psi;   // ray angle pi - theta/2; psi = pi means the upper edge of the negative axis
  double eps;   // arc radius
};

struct ContourIntegral {
  double value = 0.0;
  double ray = 0.0;
  double arc = 0.0;
  double error = 0.0;  // quadrature + truncation
  int panels = 0;
  double radius = 0.0;
  long evals = 0;
};

// (1/2 pi i) int H(z) dz over the keyhole around the negative axis:
//   (1/pi) int_eps^inf Im[H(rho w) w] drho + (1/pi) int_0^psi Re[H(eps e^{i xi}) eps e^{i xi}] dxi
// for H with conjugate symmetry H(conj z) = conj H(z).  `decay` is the rate t
// in e^{tz}; it sets panel widths on the ray.  Throws ConvergenceError.
ContourIntegral keyhole_integral(const std::function<std::complex<double>(std::complex<double>)>& H,
                                 double decay, const KeyholeGeometry& geo, const quad::PanelControl& ctl,
                                 quad::Exec exec);

}  // namespace invsub
