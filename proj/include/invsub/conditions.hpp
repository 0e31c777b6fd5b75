#pragma once

#include <functional>
#include <string>
#include <vector>

#include "invsub/bernstein.hpp"

namespace invsub {

enum class ConditionId { A1, A2, A2prime, A2star, DR, phi2_sandwich, addCondi };
enum class Verdict { supported, violated, inconclusive };
std::string to_string(ConditionId c);
std::string to_string(Verdict v);

struct ConditionReport {
  ConditionId condition_id = ConditionId::A1;
  std::vector<double> probe_grid;    // increasing
  std::vector<double> ratio_values;  // aligned with probe_grid
  Verdict verdict = Verdict::inconclusive;
  double estimate = 0.0;  // liminf / limsup guess, +inf when diverging
  // trend diagnostics over the asymptotic half of the grid
  double loglog_slope = 0.0;  // d ln r / d ln x
  double lnln_slope = 0.0;    // d ln r / d ln ln x
  std::string note;
  // extra aligned columns (sandwich bounds, the addCondi side limits)
  std::vector<std::pair<std::string, std::vector<double>>> extra;
};

// Delta(x) = int_0^{1/x} y^2 mu(dy)
double delta(const BernsteinDescriptor& d, double x);

// 24 log-spaced points in [10, 1e7]
std::vector<double> default_condition_grid();

ConditionReport check_A1(const BernsteinDescriptor& d, const std::vector<double>& grid);
// at_zero: the A2' variant, probed at 1/grid (grid >= 1) and reported in increasing x
ConditionReport check_A2(const BernsteinDescriptor& d, const std::vector<double>& grid, bool at_zero = false);
std::pair<ConditionReport, ConditionReport> check_A2star_and_DR(const BernsteinDescriptor& d,
                                                                const std::vector<double>& grid);
ConditionReport check_phi2_sandwich(const BernsteinDescriptor& d, const std::vector<double>& grid);
ConditionReport check_addCondi(const BernsteinDescriptor& d, const std::function<double(double)>& t_of_x,
                               const std::vector<double>& grid);

}  // namespace invsub
