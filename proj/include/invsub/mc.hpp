#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "invsub/bernstein.hpp"
#include "invsub/quadrature.hpp"

namespace invsub {

struct SimulationConfig {
  long n_paths = 100000;
  double small_jump_cut = 1e-4;  // jumps below this are replaced by their mean drift
  std::uint64_t rng_seed = 42;
  double step_clock = 1e-2;      // grid step in x for paths without a compound Poisson skeleton
  int batches = 20;
  double ci_level = 0.95;        // two-sided, per grid point
  quad::Exec exec = quad::Exec::parallel;
};

// n_paths draws of sigma(x); +inf when killed before x
std::vector<double> sample_sigma(const BernsteinDescriptor& d, double x, const SimulationConfig& cfg);

enum class PassageTag { jump, creep, killed };

struct PassageSample {
  double L = 0.0;
  PassageTag tag = PassageTag::jump;
};

// draws of L(t) = inf{x : sigma(x) > t}, batch by batch in batch order
std::vector<PassageSample> sample_passage(const BernsteinDescriptor& d, double t, const SimulationConfig& cfg);

// "exact_stable", "compound_poisson" or "grid"
std::string passage_mode(const BernsteinDescriptor& d);

struct InverseDensityEstimate {
  std::vector<double> x, estimate, ci_lo, ci_hi;
  double creep_fraction = 0.0;   // NaN when the path mode cannot resolve creeping
  double killed_fraction = 0.0;
  double bandwidth = 0.0;
  long n_paths = 0;
  std::string mode;
};

// KDE of the jump-across component f (creeping and killed draws are
// tagged and left out), Student-t band from batch means
InverseDensityEstimate estimate_inverse_density(const BernsteinDescriptor& d, double t,
                                                const std::vector<double>& x_grid, const SimulationConfig& cfg);

// Gaussian KDE with reflection at 0, windowed on sorted samples; `norm` is
// the number of draws the density is relative to
std::vector<double> reflected_kde(const std::vector<double>& sorted, const std::vector<double>& x_grid, double h,
                                  double norm, quad::Exec exec = quad::Exec::serial);
double silverman_bandwidth(std::vector<double> samples);

}  // namespace invsub
