#pragma once

namespace invsub::special {

// 1/Gamma(w), exactly 0 at w = 0, -1, -2, ...
double rgamma(double w);

// Gamma(s, y) for real s (any sign) and y > 0.
// y >= 2: Legendre continued fraction.  y < 2: series at s0 in (0,1]
// (E1 when s is an integer <= 0) followed by the downward recurrence
// Gamma(s, y) = (Gamma(s+1, y) - y^s e^{-y}) / s.  Falls back to direct
// quadrature if the result is not finite and positive; throws AccuracyError
// if that fails too.
double upper_gamma(double s, double y);

// lower incomplete gamma(s, y), s > 0
double lower_gamma(double s, double y);

// E1(y) = Gamma(0, y)
double expint_e1(double y);

double normal_cdf(double z);

// two-sided Student t critical value for confidence level `level`
double student_t_critical(double level, int dof);

}  // namespace invsub::special
