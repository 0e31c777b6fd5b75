#pragma once

#include <cmath>
#include <complex>

namespace invsub {

// e^w - 1 without cancellation near w = 0
inline std::complex<double> cexpm1(std::complex<double> w) {
  const double a = w.real(), b = w.imag();
  if (b == 0.0) return {std::expm1(a), 0.0};
  const double sh = std::sin(0.5 * b);
  return {std::expm1(a) * std::cos(b) - 2.0 * sh * sh, std::exp(a) * std::sin(b)};
}

// log(1 + w), principal branch
inline std::complex<double> clog1p(std::complex<double> w) {
  if (std::abs(w) < 1e-3) {
    std::complex<double> p = w, s = w;
    for (int k = 2; k <= 7; ++k) {
      p *= -w;
      s += p / double(k);
    }
    return s;
  }
  return std::log(1.0 + w);
}

// principal z^a with z = 0 -> 0 for a > 0
inline std::complex<double> cpow(std::complex<double> z, double a) {
  if (z == std::complex<double>(0.0, 0.0)) return a > 0 ? 0.0 : (a == 0 ? 1.0 : INFINITY);
  if (z.imag() == 0.0 && z.real() > 0.0 && !std::signbit(z.imag())) return {std::pow(z.real(), a), 0.0};
  return std::exp(a * std::log(z));
}

}  // namespace invsub
