#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "invsub/bernstein.hpp"
#include "invsub/contour.hpp"
#include "invsub/io.hpp"
#include "invsub/mc.hpp"
#include "invsub/saddle.hpp"
#include "invsub/series.hpp"

namespace invsub {

// %.17g; nan / inf spelled out
std::string fmt17(double v);

// one method's outcome at a grid point
struct MethodCell {
  std::optional<double> value;
  double error_scale = 0.0;  // absolute; CI half-width for MC
  std::string error;         // "<method>: <kind>: <message>" when the method threw
  bool neutral = true;       // domain / capability errors do not count against agreement
};

struct ComparisonRow {
  double x = 0, t = 0;
  int k = 0, l = 0;
  Target target = Target::f;
  std::map<Method, MethodCell> cells;
  struct Delta {
    Method a, b;
    double delta, allowed;
  };
  std::vector<Delta> deltas;
  bool agree = true;
};

struct CompareConfig {
  BernsteinDescriptor descriptor = make_stable(0.5);
  Target target = Target::f;
  int k = 0, l = 0;
  std::vector<double> x_grid, t_grid;
  std::vector<Method> methods;
  double rel_tol = 0.0;  // extra slack rel_tol * max|value| on top of the error scales
  ContourSpec bromwich = ContourSpec::bromwich_at();
  ContourSpec keyhole = ContourSpec::keyhole();
  SeriesOptions series;
  SimulationConfig mc;
  // MC bands are family-wise over the grid: per point 1 - (1 - level)/points
  bool mc_familywise = true;
};

// schema_version, descriptor, target, k, l, x, t, methods, rel_tol,
// contour{trunc_tol, quad_tol}, series{n_max, tol}, mc{paths, seed, batches, small_jump_cut, step_clock, ci_level, familywise}
CompareConfig compare_config_from_json(const nlohmann::json& doc);

// rows in grid order (t outer, x inner); rows computed in parallel
std::vector<ComparisonRow> run_compare(const CompareConfig& cfg);
std::string compare_csv(const std::vector<ComparisonRow>& rows);
std::string compare_json(const std::vector<ComparisonRow>& rows);

enum class StudyQuantity { density_ratio, G_ratio };

struct StudyRow {
  ProbeRow probe;              // probe.error_scale is the predicted scale
  double inv_a_star = 0;       // 1/a*
  double gap = 0;              // t/x - b
};

struct StudyReport {
  StudyQuantity quantity = StudyQuantity::density_ratio;
  std::vector<StudyRow> rows;
  double fitted_exponent = 0;
  double predicted_exponent = 1;
  int resolvable_rows = 0;
};

// ratio vs x along t = schedule(x), inversion as reference.  G_ratio forms
// Phi^dagger(c) * d^k d^l G / d^k d^l f from two inversions.
StudyReport run_asymptotic_study(const BernsteinDescriptor& d, const std::function<double(double)>& schedule,
                                 const std::vector<double>& x_grid, int k, int l, Target target,
                                 StudyQuantity quantity = StudyQuantity::density_ratio);
std::string study_csv(const StudyReport& r);

}  // namespace invsub
