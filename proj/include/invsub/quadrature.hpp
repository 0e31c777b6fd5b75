#pragma once

// Gauss-Kronrod 7/15 machinery: a globally adaptive integrator on finite
// intervals (real or complex valued), dyadic drivers for endpoint
// singularities / infinite ranges, and the panel kernel used for contour
// integrals (serial reference + OpenMP version, same reduction order).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

namespace invsub::quad {

namespace detail {
// nodes on [0,1], G7 nodes are the odd-indexed kronrod ones
inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double mag(double v) { return std::abs(v); }
inline double mag(const std::complex<double>& v) { return std::abs(v); }
}  // namespace detail

template <class T>
struct Estimate {
  T value{};
  double error = 0.0;
  double l1 = 0.0;  // integral of |f|
  long evals = 0;
  bool converged = true;
};

template <class T>
struct Segment {
  double a, b;
  T value;
  double error;
  double l1;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// one GK15 application, error estimate in the QUADPACK style
template <class T, class F>
Segment<T> gk15(const F& f, double a, double b) {
  using detail::mag;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  T fc = f(c);
  T resg = fc * detail::wg[3];
  T resk = fc * detail::wgk[7];
  double resabs = detail::wgk[7] * mag(fc);
  T fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * detail::xgk[j];
    fv1[j] = f(c - dx);
    fv2[j] = f(c + dx);
    T s = fv1[j] + fv2[j];
    resk += detail::wgk[j] * s;
    resabs += detail::wgk[j] * (mag(fv1[j]) + mag(fv2[j]));
    if (j % 2 == 1) resg += detail::wg[j / 2] * s;
  }
  T mean = resk * 0.5;
  double resasc = detail::wgk[7] * mag(fc - mean);
  for (int j = 0; j < 7; ++j) resasc += detail::wgk[j] * (mag(fv1[j] - mean) + mag(fv2[j] - mean));
  const double ah = std::abs(h);
  double err = mag((resk - resg) * h);
  resasc *= ah;
  resabs *= ah;
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, T(resk * h), err, resabs};
}

// Globally adaptive GK15.  Tolerance is max(abs_tol, rel_tol * |I|); with
// rel_to_l1 the relative part is measured against int |f| instead, which is
// the sensible yardstick for oscillating integrands.
template <class T, class F>
Estimate<T> integrate(const F& f, double a, double b, double abs_tol, double rel_tol,
                      int max_segments = 400, bool rel_to_l1 = false) {
  Estimate<T> out;
  if (a == b) return out;
  std::priority_queue<Segment<T>> heap;
  auto first = gk15<T>(f, a, b);
  heap.push(first);
  T total = first.value;
  double err = first.error, l1 = first.l1;
  long evals = 15;
  auto target = [&] {
    const double ref = rel_to_l1 ? l1 : detail::mag(total);
    return std::max(abs_tol, rel_tol * ref);
  };
  int nseg = 1;
  while (err > target() && nseg < max_segments) {
    auto s = heap.top();
    heap.pop();
    const double m = 0.5 * (s.a + s.b);
    if (!(m > std::min(s.a, s.b) && m < std::max(s.a, s.b))) {  // interval exhausted
      heap.push(s);
      break;
    }
    auto left = gk15<T>(f, s.a, m);
    auto right = gk15<T>(f, m, s.b);
    evals += 30;
    total += left.value + right.value - s.value;
    err += left.error + right.error - s.error;
    l1 += left.l1 + right.l1 - s.l1;
    heap.push(left);
    heap.push(right);
    ++nseg;
  }
  // re-sum to shed accumulated drift from the running updates
  T resum{};
  double eresum = 0.0, lresum = 0.0;
  while (!heap.empty()) {
    resum += heap.top().value;
    eresum += heap.top().error;
    lresum += heap.top().l1;
    heap.pop();
  }
  out.value = resum;
  out.error = eresum;
  out.l1 = lresum;
  out.evals = evals;
  out.converged = eresum <= std::max(abs_tol, rel_tol * (rel_to_l1 ? lresum : detail::mag(resum))) * 1.0000001;
  return out;
}

// Dyadic sweeps.  Sum contributions over [s/2^{k+1}, s/2^k] (toward 0) or
// [2^k s, 2^{k+1} s] (toward infinity, stopping at `upper` if finite).  Once
// the ratio of successive pieces settles below 1 in modulus the remainder is
// extrapolated geometrically; a ratio stuck at 1 means divergence.
template <class T>
struct DyadicResult {
  T value{};
  double error = 0.0;
  double l1 = 0.0;
  bool diverged = false;
  int pieces = 0;
};

template <class T, class F>
DyadicResult<T> dyadic_sweep(const F& f, double s, double upper, bool toward_zero, double rel_tol,
                             int max_pieces = 1200) {
  using detail::mag;
  DyadicResult<T> out;
  double lo, hi;
  if (toward_zero) {
    hi = s;
    lo = s * 0.5;
  } else {
    lo = s;
    hi = std::isfinite(upper) ? std::min(2.0 * s, upper) : 2.0 * s;
  }
  std::vector<T> piece;
  T sum{};
  double err = 0.0, l1 = 0.0;
  int quiet = 0;
  for (int k = 0; k < max_pieces; ++k) {
    auto e = integrate<T>(f, lo, hi, 0.0, rel_tol * 0.1, 200, true);
    sum += e.value;
    l1 += e.l1;
    err += e.error;
    piece.push_back(e.value);
    ++out.pieces;
    if (!std::isfinite(mag(sum))) {  // overflowed on the way to a singularity
      out.diverged = true;
      break;
    }
    if (!toward_zero && std::isfinite(upper) && hi >= upper) break;
    const std::size_t n = piece.size();
    const double scale = std::max(mag(sum), 1e-12 * l1);
    if (l1 == 0.0) {
      if (++quiet > 60) break;  // identically zero on this side
    } else if (mag(piece[n - 1]) <= 1e-3 * rel_tol * scale) {
      // negligible already; a few in a row and we are done
      if (++quiet >= 3) break;
    } else {
      quiet = 0;
      if (n >= 4) {
        const bool nz = mag(piece[n - 2]) > 0.0 && mag(piece[n - 3]) > 0.0;
        const T q1 = nz ? T(piece[n - 1] / piece[n - 2]) : T(1.0);
        const T q2 = nz ? T(piece[n - 2] / piece[n - 3]) : T(1.0);
        const double r = mag(q1);
        if (nz && r < 1.0 - 1e-7 && mag(q2) < 1.0 - 1e-7) {
          const T tail = piece[n - 1] * q1 / (T(1.0) - q1);
          const double unc = mag(tail) * mag(q1 - q2) / (1.0 - r);
          if (unc <= 0.1 * rel_tol * scale && mag(tail) <= 0.5 * scale) {
            sum += tail;
            err += unc;
            break;
          }
        }
      }
    }
    if (toward_zero) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-300) {
        out.diverged = true;
        break;
      }
    } else {
      lo = hi;
      hi = std::isfinite(upper) ? std::min(2.0 * hi, upper) : 2.0 * hi;
      if (hi > 1e300) {
        out.diverged = true;
        break;
      }
    }
    if (k == max_pieces - 1) out.diverged = true;
  }
  out.value = sum;
  out.error = err;
  out.l1 = l1;
  return out;
}

// ---------------------------------------------------------------- panels

struct PanelPlan {
  double start = 0.0;
  double first_width = 1.0;
  double growth = 1.25;
  double max_width = 1.0;
};

struct PanelControl {
  double trunc_tol = 1e-12;
  double quad_tol = 1e-12;
  int max_panels = 200000;
  int block = 32;
  int consecutive = 3;
  double min_extent = 0.0;  // no truncation before the path parameter passes this
};

struct PathIntegral {
  double value = 0.0;
  double quad_error = 0.0;
  double trunc_error = 0.0;
  double l1 = 0.0;
  int panels = 0;
  double radius = 0.0;
  long evals = 0;
  bool converged = false;
};

enum class Exec { serial, parallel };

template <class F>
PathIntegral integrate_panels(const F& f, const PanelPlan& plan, const PanelControl& ctl, Exec exec) {
  PathIntegral out;
  double s = plan.start, w = plan.first_width;
  int small_run = 0;
  double tail_l1 = 0.0;
  std::vector<double> lo(ctl.block), hi(ctl.block);
  std::vector<Estimate<double>> res(ctl.block);
  while (out.panels < ctl.max_panels) {
    const int nb = std::min(ctl.block, ctl.max_panels - out.panels);
    for (int i = 0; i < nb; ++i) {
      lo[i] = s;
      hi[i] = s + w;
      s += w;
      w = std::min(w * plan.growth, plan.max_width);
    }
    const double ref = std::max(std::abs(out.value), 1e-6 * out.l1);
    const double abs_tol = ctl.quad_tol * ref / 64.0;
    auto run = [&](int i) {
      res[i] = integrate<double>(f, lo[i], hi[i], abs_tol, ctl.quad_tol, 100, true);
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
      for (int i = 0; i < nb; ++i) run(i);
    } else {
      for (int i = 0; i < nb; ++i) run(i);
    }
    for (int i = 0; i < nb; ++i) {
      out.value += res[i].value;
      out.quad_error += res[i].error;
      out.l1 += res[i].l1;
      out.evals += res[i].evals;
      out.radius = hi[i];
      ++out.panels;
      const double scale = std::max(std::abs(out.value), 1e-8 * out.l1);
      const bool small = out.l1 > 0.0 && res[i].l1 <= ctl.trunc_tol * scale;
      if (small && hi[i] >= ctl.min_extent) {
        ++small_run;
        tail_l1 += res[i].l1;
      } else {
        small_run = 0;
        tail_l1 = 0.0;
      }
      if (small_run >= ctl.consecutive) {
        out.trunc_error = tail_l1;
        out.converged = true;
        return out;
      }
    }
  }
  return out;
}


// Wynn epsilon on partial sums; returns the last even-column entry and the
// gap to the previous one as an error guess
template <class T>
struct Extrapolated {
  T value{};
  double error = std::numeric_limits<double>::infinity();
};

template <class T>
Extrapolated<T> wynn_epsilon(const std::vector<T>& sums) {
  using detail::mag;
  Extrapolated<T> out;
  const std::size_t n = sums.size();
  if (n == 0) return out;
  out.value = sums.back();
  if (n < 3) return out;
  std::vector<T> prev(n + 1, T{}), cur(sums.begin(), sums.end());
  T best = sums.back(), last = sums[n - 2];
  for (std::size_t k = 1; cur.size() > 1; ++k) {
    std::vector<T> nxt(cur.size() - 1);
    bool ok = true;
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      const T diff = cur[i + 1] - cur[i];
      if (mag(diff) == 0.0) {
        ok = false;
        break;
      }
      nxt[i] = prev[i + 1] + T(1.0) / diff;
    }
    if (!ok) break;
    prev.assign(cur.begin(), cur.end());
    cur.swap(nxt);
    if (k % 2 == 0) {
      last = cur.size() > 1 ? cur[cur.size() - 2] : best;
      best = cur.back();
    }
  }
  out.value = best;
  out.error = mag(best - last);
  return out;
}

template <class T>
struct OscillatorySum {
  T value{};
  double quad_error = 0.0;
  double trunc_error = 0.0;
  double l1 = 0.0;
  long evals = 0;
  int terms = 0;
  double end = 0.0;
  bool converged = false;
};

// int_start^end of an integrand oscillating with period 2 pi / freq, summed
// half period by half period.  With end = inf the partial sums are
// Wynn-accelerated; a finite end is summed outright.
template <class T, class F>
OscillatorySum<T> oscillatory_sum(const F& f, double start, double freq, double abs_tol, int max_terms,
                                  double end = std::numeric_limits<double>::infinity()) {
  OscillatorySum<T> out;
  const double h = std::numbers::pi / freq;
  std::vector<T> sums;
  double s = start;
  T acc{};
  double prev_err = std::numeric_limits<double>::infinity();
  int steady = 0;
  double peak = 0.0;
  const bool finite = std::isfinite(end);
  for (int n = 0; n < max_terms; ++n) {
    const double e1 = finite ? std::min(s + h, end) : s + h;
    auto e = integrate<T>(f, s, e1, abs_tol / 8, 1e-13, 100, true);
    s = e1;
    acc += e.value;
    out.quad_error += e.error;
    out.l1 += e.l1;
    out.evals += e.evals;
    ++out.terms;
    if (finite) {
      if (s >= end) {
        out.value = acc;
        out.converged = true;
        break;
      }
      continue;
    }
    sums.push_back(acc);
    peak = std::max(peak, detail::mag(acc));
    if (sums.size() < 6) continue;
    auto ex = wynn_epsilon(sums);
    out.value = ex.value;
    out.trunc_error = std::max(ex.error, prev_err);
    prev_err = ex.error;
    // the extrapolation cannot beat rounding or quadrature noise in the partial sums
    const double floor = std::max(1024 * std::numeric_limits<double>::epsilon() * peak, out.quad_error);
    if (out.trunc_error <= std::max(abs_tol, floor)) {
      if (++steady >= 2) {
        out.converged = true;
        break;
      }
    } else {
      steady = 0;
    }
  }
  if (finite && !out.converged) out.value = acc;
  out.end = s;
  return out;
}

// tail from start to infinity of an integrand that oscillates with period
// 2 pi / freq under an algebraically decaying envelope
template <class F>
PathIntegral oscillatory_tail(const F& f, double start, double freq, double abs_tol, int max_terms = 80) {
  auto r = oscillatory_sum<double>(f, start, freq, abs_tol, max_terms);
  PathIntegral out;
  out.value = r.value;
  out.quad_error = r.quad_error;
  out.trunc_error = r.trunc_error;
  out.l1 = r.l1;
  out.evals = r.evals;
  out.panels = r.terms;
  out.radius = r.end;
  out.converged = r.converged;
  return out;
}

}  // namespace invsub::quad
