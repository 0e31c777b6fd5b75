// invsub: command-line front end.  stdout carries data only, stderr diagnostics.
// exit 0 ok, 1 numerical failure / disagreement, 2 config or usage error

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "invsub/app.hpp"
#include "invsub/conditions.hpp"
#include "invsub/errors.hpp"

using namespace invsub;

namespace {

struct Globals {
  std::string descriptor;
  std::string out;
  std::string format;
  int threads = 0;
  std::optional<std::uint64_t> seed;
};

struct Point {
  std::string target = "f";
  double x = 1, t = 1;
  int k = 0, l = 0;
};

std::string jnum(double v) { return std::isfinite(v) ? fmt17(v) : "null"; }
std::string jstr(const std::string& s) { return nlohmann::json(s).dump(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) {
    if (c == '"') o += '"';
    o += c;
  }
  return o + "\"";
}

BernsteinDescriptor need_descriptor(const Globals& g) {
  if (g.descriptor.empty()) throw ConfigError("--descriptor", "required for this subcommand");
  return load_descriptor_file(g.descriptor);
}

std::string fmt_or(const Globals& g, const std::string& fallback) {
  if (g.format.empty()) return fallback;
  return g.format;
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw ConfigError("--out", "cannot open " + g.out);
  f << text;
}

Target target_of(const std::string& s) {
  try {
    return parse_target(s);
  } catch (const DomainError& e) {
    throw ConfigError("--target", e.what());
  }
}

std::string diag_json(const std::map<std::string, double>& dg) {
  std::string o = "{";
  bool first = true;
  for (const auto& [k, v] : dg) {
    o += (first ? "" : ", ") + jstr(k) + ": " + jnum(v);
    first = false;
  }
  return o + "}";
}

std::string result_json(const DensityQuery& q, const MethodResult& r) {
  std::ostringstream os;
  os << "{\"target\": " << jstr(to_string(q.target)) << ", \"x\": " << jnum(q.x) << ", \"t\": " << jnum(q.t)
     << ", \"k\": " << q.k << ", \"l\": " << q.l << ", \"method\": " << jstr(to_string(r.method))
     << ", \"value\": " << jnum(r.value) << ", \"error_scale\": " << jnum(r.error_scale)
     << ", \"diagnostics\": " << diag_json(r.diagnostics) << "}";
  return os.str();
}

const char* kResultCsvHeader = "target,x,t,k,l,method,value,error_scale,error\n";

std::string result_csv(const DensityQuery& q, const MethodResult* r, const std::string& err) {
  std::ostringstream os;
  os << to_string(q.target) << ',' << fmt17(q.x) << ',' << fmt17(q.t) << ',' << q.k << ',' << q.l << ','
     << (r ? to_string(r->method) : "") << ',' << (r ? fmt17(r->value) : "") << ','
     << (r ? fmt17(r->error_scale) : "") << ',' << csv_field(err) << '\n';
  return os.str();
}

// rows of x,t,k,l from a CSV file; a header line is skipped when it does not parse
std::vector<DensityQuery> read_batch(const std::string& file, Target target) {
  std::ifstream in(file);
  if (!in) throw ConfigError("--batch", "cannot open " + file);
  std::vector<DensityQuery> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    const std::string where = file + ":" + std::to_string(lineno);
    if (f.size() < 2 || f.size() > 4) throw ConfigError(where, "expected x,t[,k[,l]]");
    try {
      DensityQuery q{target, std::stod(f[0]), std::stod(f[1]), f.size() > 2 ? std::stoi(f[2]) : 0,
                     f.size() > 3 ? std::stoi(f[3]) : 0};
      out.push_back(q);
    } catch (const std::exception&) {
      if (lineno == 1) continue;
      throw ConfigError(where, "bad number");
    }
  }
  return out;
}

// run one query per row; errors become error rows (json: {"error": ...}), return count of failures
template <class F>
int run_queries(const Globals& g, const std::vector<DensityQuery>& qs, F&& eval) {
  const std::string fmt = fmt_or(g, "json");
  if (fmt != "json" && fmt != "csv") throw ConfigError("--format", "expected csv or json");
  std::vector<std::string> lines(qs.size());
  std::vector<std::exception_ptr> errs(qs.size());
  int failures = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : failures) if (qs.size() > 1)
  for (std::size_t i = 0; i < qs.size(); ++i) {
    try {
      MethodResult r = eval(qs[i]);
      lines[i] = fmt == "json" ? result_json(qs[i], r) + "\n" : result_csv(qs[i], &r, "");
    } catch (const std::exception& e) {
      ++failures;
      errs[i] = std::current_exception();
      lines[i] = fmt == "json" ? "{\"target\": " + jstr(to_string(qs[i].target)) + ", \"x\": " + jnum(qs[i].x) +
                                     ", \"t\": " + jnum(qs[i].t) + ", \"error\": " + jstr(e.what()) + "}\n"
                               : result_csv(qs[i], nullptr, e.what());
    }
  }
  std::string text = fmt == "csv" ? kResultCsvHeader : "";
  for (auto& l : lines) text += l;
  emit(g, text);
  // single query: classify the failure through main's handlers
  if (qs.size() == 1 && errs[0]) std::rethrow_exception(errs[0]);
  return failures ? 1 : 0;
}

void add_point(CLI::App* c, Point& p) {
  c->add_option("--target", p.target, "f, f_k, f_c, g or G")->capture_default_str();
  c->add_option("--x", p.x, "space variable")->capture_default_str();
  c->add_option("--t", p.t, "time variable")->capture_default_str();
  c->add_option("--k", p.k, "x derivative order")->capture_default_str();
  c->add_option("--l", p.l, "t derivative order")->capture_default_str();
}

CoefficientSource source_of(const std::string& s) {
  if (s == "auto" || s == "automatic") return CoefficientSource::automatic;
  if (s == "keyhole") return CoefficientSource::keyhole_numeric;
  if (s == "halfplane") return CoefficientSource::halfplane_numeric;
  if (s == "stable") return CoefficientSource::stable_closed_form;
  if (s == "tempered") return CoefficientSource::tempered_closed_form;
  throw ConfigError("--source", "expected auto, keyhole, halfplane, stable or tempered");
}

std::string probe_csv(const ProbeTable& tab) {
  std::ostringstream os;
  os << "x,t,a_star,regime,leading,error_scale,reference,reference_rel_error,ratio,deviation,fitted_exponent\n";
  for (const auto& r : tab.rows)
    os << fmt17(r.x) << ',' << fmt17(r.t) << ',' << fmt17(r.a_star) << ',' << to_string(r.regime) << ','
       << fmt17(r.leading) << ',' << fmt17(r.error_scale) << ',' << fmt17(r.reference) << ','
       << fmt17(r.reference_rel_error) << ',' << fmt17(r.ratio) << ',' << fmt17(r.deviation) << ','
       << fmt17(tab.fitted_exponent) << '\n';
  return os.str();
}

std::string conditions_csv(const std::vector<ConditionReport>& reps) {
  std::ostringstream os;
  os << "condition,x,ratio,verdict,estimate,loglog_slope,lnln_slope\n";
  for (const auto& r : reps) {
    const std::string name = to_string(r.condition_id);
    for (std::size_t i = 0; i < r.probe_grid.size(); ++i)
      os << name << ',' << fmt17(r.probe_grid[i]) << ',' << fmt17(r.ratio_values[i]) << ",,,,\n";
    for (const auto& [col, vals] : r.extra)
      for (std::size_t i = 0; i < vals.size() && i < r.probe_grid.size(); ++i)
        os << name << '.' << col << ',' << fmt17(r.probe_grid[i]) << ',' << fmt17(vals[i]) << ",,,,\n";
    os << name << ",,," << to_string(r.verdict) << ',' << fmt17(r.estimate) << ',' << fmt17(r.loglog_slope) << ','
       << fmt17(r.lnln_slope) << '\n';
  }
  return os.str();
}

std::string conditions_json(const std::vector<ConditionReport>& reps) {
  std::ostringstream os;
  os << "[\n";
  for (std::size_t j = 0; j < reps.size(); ++j) {
    const auto& r = reps[j];
    auto arr = [&](const std::vector<double>& v) {
      std::string o = "[";
      for (std::size_t i = 0; i < v.size(); ++i) o += (i ? ", " : "") + jnum(v[i]);
      return o + "]";
    };
    os << "  {\"condition_id\": " << jstr(to_string(r.condition_id)) << ", \"verdict\": "
       << jstr(to_string(r.verdict)) << ", \"estimate\": " << (std::isinf(r.estimate) ? "\"inf\"" : jnum(r.estimate))
       << ", \"loglog_slope\": " << jnum(r.loglog_slope) << ", \"lnln_slope\": " << jnum(r.lnln_slope)
       << ", \"note\": " << jstr(r.note) << ", \"probe_grid\": " << arr(r.probe_grid)
       << ", \"ratio_values\": " << arr(r.ratio_values);
    for (const auto& [col, vals] : r.extra) os << ", " << jstr(col) << ": " << arr(vals);
    os << "}" << (j + 1 < reps.size() ? "," : "") << "\n";
  }
  os << "]\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"densities of inverse subordinators: inversion, series, saddle asymptotics, Monte Carlo"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--descriptor", g.descriptor, "descriptor JSON file");
  app.add_option("--out", g.out, "write data here instead of stdout");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", g.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "RNG seed for Monte Carlo");
  app.fallthrough();

  // invert
  auto* inv = app.add_subcommand("invert", "contour inversion");
  Point ip;
  std::string inv_method = "bromwich", inv_batch;
  double inv_tol = 1e-12;
  std::optional<double> inv_a, inv_theta;
  add_point(inv, ip);
  inv->add_option("--method", inv_method, "bromwich, keyhole or halfplane")
      ->check(CLI::IsMember({"bromwich", "keyhole", "halfplane"}))
      ->capture_default_str();
  inv->add_option("--tol", inv_tol, "truncation and panel tolerance")->capture_default_str();
  inv->add_option("--a", inv_a, "Bromwich abscissa (default: saddle point)");
  inv->add_option("--theta", inv_theta, "keyhole opening angle");
  inv->add_option("--batch", inv_batch, "CSV of x,t[,k[,l]] rows");

  // series
  auto* ser = app.add_subcommand("series", "convolution-power series");
  Point sp;
  int ser_nmax = 80;
  double ser_tol = 1e-12;
  std::string ser_source = "auto";
  add_point(ser, sp);
  ser->add_option("--nmax", ser_nmax, "highest power of x")->capture_default_str();
  ser->add_option("--tol", ser_tol, "relative stopping tolerance")->capture_default_str();
  ser->add_option("--source", ser_source, "coefficients: auto, keyhole, halfplane, stable, tempered")
      ->capture_default_str();

  // saddle
  auto* sad = app.add_subcommand("saddle", "saddle-point leading term");
  Point dp;
  dp.x = 100;
  dp.t = 100;
  add_point(sad, dp);

  // saddle-probe
  auto* spr = app.add_subcommand("saddle-probe", "saddle term against inversion along t = t(x)");
  std::string spr_sched = "x", spr_grid = "1e2:1e4:5:log";
  Point spp;
  spr->add_option("--schedule", spr_sched, "t(x) expression")->capture_default_str();
  spr->add_option("--grid", spr_grid, "x grid lo:hi:n[:log|:lin]")->capture_default_str();
  spr->add_option("--target", spp.target)->capture_default_str();
  spr->add_option("--k", spp.k)->capture_default_str();
  spr->add_option("--l", spp.l)->capture_default_str();

  // conditions
  auto* con = app.add_subcommand("conditions", "regularity condition heuristics");
  std::string con_check = "a1,a2,dr", con_grid = "10:1e7:24", con_sched = "x";
  con->add_option("--check", con_check, "a1,a2,a2prime,a2star,dr,sandwich,addcondi")->capture_default_str();
  con->add_option("--grid", con_grid, "probe grid")->capture_default_str();
  con->add_option("--schedule", con_sched, "t(x) for addcondi")->capture_default_str();

  // mc
  auto* mcc = app.add_subcommand("mc", "Monte Carlo estimate of f(., t)");
  double mc_t = 1.0, mc_paths = 1e5, mc_cut = 1e-4, mc_step = 1e-2;
  int mc_batches = 20;
  std::string mc_grid = "0.01:3:64";
  mcc->add_option("--t", mc_t)->capture_default_str();
  mcc->add_option("--grid", mc_grid, "x grid")->capture_default_str();
  mcc->add_option("--paths", mc_paths, "number of paths")->capture_default_str();
  mcc->add_option("--batches", mc_batches, "batches for the confidence band")->capture_default_str();
  mcc->add_option("--cut", mc_cut, "small jump cut")->capture_default_str();
  mcc->add_option("--step", mc_step, "grid step for paths without a compound Poisson skeleton")
      ->capture_default_str();

  // compare
  auto* cmp = app.add_subcommand("compare", "cross-method comparison grid");
  std::string cmp_config;
  cmp->add_option("config", cmp_config, "comparison config JSON")->required();

  // study
  auto* stu = app.add_subcommand("study", "asymptotic rate study");
  std::string stu_sched = "x", stu_grid = "1e2:1e4:5:log", stu_quantity = "ratio";
  Point stp;
  stu->add_option("--schedule", stu_sched, "t(x) expression")->capture_default_str();
  stu->add_option("--grid", stu_grid, "x grid")->capture_default_str();
  stu->add_option("--target", stp.target)->capture_default_str();
  stu->add_option("--k", stp.k)->capture_default_str();
  stu->add_option("--l", stp.l)->capture_default_str();
  stu->add_option("--quantity", stu_quantity, "ratio or G-ratio")
      ->check(CLI::IsMember({"ratio", "G-ratio"}))
      ->capture_default_str();

  // poly
  auto* pol = app.add_subcommand("poly", "polynomial approximation near x = 0");
  int pol_n = 2, pol_k = 0, pol_l = 0, pol_tp = 9, pol_xp = 9;
  std::string pol_tband = "1:2", pol_xband = "1e-4:1e-2";
  pol->add_option("--n", pol_n, "polynomial degree")->capture_default_str();
  pol->add_option("--k", pol_k)->capture_default_str();
  pol->add_option("--l", pol_l)->capture_default_str();
  pol->add_option("--t-band", pol_tband)->capture_default_str();
  pol->add_option("--x-band", pol_xband)->capture_default_str();
  pol->add_option("--t-points", pol_tp)->capture_default_str();
  pol->add_option("--x-points", pol_xp)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (g.threads > 0) omp_set_num_threads(g.threads);

  try {
    if (*inv) {
      auto d = need_descriptor(g);
      ContourSpec spec = inv_method == "bromwich"  ? ContourSpec::bromwich_at(inv_a)
                         : inv_method == "keyhole" ? ContourSpec::keyhole(inv_theta.value_or(kPi / 2))
                                                   : ContourSpec::halfplane();
      spec.trunc_tol = spec.quad_tol = inv_tol;
      const Target tg = target_of(ip.target);
      std::vector<DensityQuery> qs =
          inv_batch.empty() ? std::vector<DensityQuery>{{tg, ip.x, ip.t, ip.k, ip.l}} : read_batch(inv_batch, tg);
      if (qs.size() > 1) spec.exec = quad::Exec::serial;  // rows are the parallel axis
      return run_queries(g, qs, [&](const DensityQuery& q) {
        return spec.kind == ContourSpec::Kind::bromwich ? invert_bromwich(d, q, spec) : invert_keyhole(d, q, spec);
      });
    }
    if (*ser) {
      auto d = need_descriptor(g);
      SeriesOptions opt{ser_nmax, ser_tol, source_of(ser_source)};
      return run_queries(g, {{target_of(sp.target), sp.x, sp.t, sp.k, sp.l}},
                         [&](const DensityQuery& q) { return series(d, q, opt); });
    }
    if (*sad) {
      auto d = need_descriptor(g);
      const DensityQuery q{target_of(dp.target), dp.x, dp.t, dp.k, dp.l};
      auto s = asymptotic(d, q);
      std::ostringstream os;
      if (fmt_or(g, "json") == "json") {
        os << "{\"target\": " << jstr(to_string(q.target)) << ", \"x\": " << jnum(q.x) << ", \"t\": " << jnum(q.t)
           << ", \"k\": " << q.k << ", \"l\": " << q.l << ", \"c\": " << jnum(s.c) << ", \"leading\": "
           << jnum(s.leading) << ", \"log_abs_leading\": " << jnum(s.log_abs_leading) << ", \"sign\": " << s.sign
           << ", \"error_scale\": " << jnum(s.error_scale) << ", \"regime\": " << jstr(to_string(s.regime))
           << ", \"diagnostics\": " << diag_json(s.diagnostics) << "}\n";
      } else {
        os << "target,x,t,k,l,c,leading,log_abs_leading,error_scale,regime\n"
           << to_string(q.target) << ',' << fmt17(q.x) << ',' << fmt17(q.t) << ',' << q.k << ',' << q.l << ','
           << fmt17(s.c) << ',' << fmt17(s.leading) << ',' << fmt17(s.log_abs_leading) << ','
           << fmt17(s.error_scale) << ',' << to_string(s.regime) << '\n';
      }
      emit(g, os.str());
      return 0;
    }
    if (*spr) {
      auto d = need_descriptor(g);
      auto sched = parse_schedule(spr_sched);
      auto tab = regime_schedule_probe(d, sched, parse_grid(spr_grid, "--grid"), spp.k, spp.l, target_of(spp.target));
      emit(g, probe_csv(tab));
      std::cerr << "fitted exponent " << fmt17(tab.fitted_exponent) << " over " << tab.resolvable_rows
                << " resolvable rows\n";
      return 0;
    }
    if (*con) {
      auto d = need_descriptor(g);
      auto grid = parse_grid(con_grid, "--grid");
      std::vector<ConditionReport> reps;
      std::stringstream ss(con_check);
      std::string item;
      std::optional<std::pair<ConditionReport, ConditionReport>> sd;
      auto star_dr = [&]() -> std::pair<ConditionReport, ConditionReport>& {
        if (!sd) sd = check_A2star_and_DR(d, grid);
        return *sd;
      };
      while (std::getline(ss, item, ',')) {
        if (item == "a1") reps.push_back(check_A1(d, grid));
        else if (item == "a2") reps.push_back(check_A2(d, grid));
        else if (item == "a2prime") reps.push_back(check_A2(d, grid, true));
        else if (item == "a2star") reps.push_back(star_dr().first);
        else if (item == "dr") reps.push_back(star_dr().second);
        else if (item == "sandwich") reps.push_back(check_phi2_sandwich(d, grid));
        else if (item == "addcondi") reps.push_back(check_addCondi(d, parse_schedule(con_sched), grid));
        else throw ConfigError("--check", "unknown condition '" + item + "'");
      }
      emit(g, fmt_or(g, "csv") == "csv" ? conditions_csv(reps) : conditions_json(reps));
      return 0;
    }
    if (*mcc) {
      auto d = need_descriptor(g);
      SimulationConfig cfg;
      if (!(mc_paths >= 1)) throw ConfigError("--paths", "must be positive");
      cfg.n_paths = long(mc_paths);
      cfg.batches = mc_batches;
      cfg.small_jump_cut = mc_cut;
      cfg.step_clock = mc_step;
      if (g.seed) cfg.rng_seed = *g.seed;
      auto est = estimate_inverse_density(d, mc_t, parse_grid(mc_grid, "--grid"), cfg);
      std::ostringstream os;
      if (fmt_or(g, "csv") == "csv") {
        os << "x,estimate,ci_lo,ci_hi,creep_fraction\n";
        for (std::size_t i = 0; i < est.x.size(); ++i)
          os << fmt17(est.x[i]) << ',' << fmt17(est.estimate[i]) << ',' << fmt17(est.ci_lo[i]) << ','
             << fmt17(est.ci_hi[i]) << ',' << fmt17(est.creep_fraction) << '\n';
      } else {
        os << "{\"t\": " << jnum(mc_t) << ", \"mode\": " << jstr(est.mode) << ", \"n_paths\": " << est.n_paths
           << ", \"bandwidth\": " << jnum(est.bandwidth) << ", \"creep_fraction\": " << jnum(est.creep_fraction)
           << ", \"killed_fraction\": " << jnum(est.killed_fraction) << ", \"rows\": [";
        for (std::size_t i = 0; i < est.x.size(); ++i)
          os << (i ? ", " : "") << "{\"x\": " << jnum(est.x[i]) << ", \"estimate\": " << jnum(est.estimate[i])
             << ", \"ci_lo\": " << jnum(est.ci_lo[i]) << ", \"ci_hi\": " << jnum(est.ci_hi[i]) << "}";
        os << "]}\n";
      }
      emit(g, os.str());
      std::cerr << "mode " << est.mode << ", bandwidth " << fmt17(est.bandwidth) << ", killed fraction "
                << fmt17(est.killed_fraction) << "\n";
      return 0;
    }
    if (*cmp) {
      auto doc = read_json_file(cmp_config);
      auto cfg = compare_config_from_json(doc);
      if (!g.descriptor.empty()) cfg.descriptor = load_descriptor_file(g.descriptor);
      if (g.seed) cfg.mc.rng_seed = *g.seed;
      auto rows = run_compare(cfg);
      emit(g, fmt_or(g, "csv") == "csv" ? compare_csv(rows) : compare_json(rows));
      int bad = 0;
      for (const auto& r : rows) bad += !r.agree;
      std::cerr << rows.size() - bad << "/" << rows.size() << " rows agree\n";
      return bad ? 1 : 0;
    }
    if (*stu) {
      auto d = need_descriptor(g);
      auto rep = run_asymptotic_study(d, parse_schedule(stu_sched), parse_grid(stu_grid, "--grid"), stp.k, stp.l,
                                      target_of(stp.target),
                                      stu_quantity == "ratio" ? StudyQuantity::density_ratio : StudyQuantity::G_ratio);
      if (fmt_or(g, "csv") == "csv") {
        emit(g, study_csv(rep));
      } else {
        std::ostringstream os;
        os << "{\"quantity\": " << jstr(stu_quantity) << ", \"fitted_exponent\": " << jnum(rep.fitted_exponent)
           << ", \"predicted_exponent\": " << jnum(rep.predicted_exponent)
           << ", \"resolvable_rows\": " << rep.resolvable_rows << ", \"rows\": [";
        for (std::size_t i = 0; i < rep.rows.size(); ++i) {
          const auto& p = rep.rows[i].probe;
          os << (i ? ", " : "") << "{\"x\": " << jnum(p.x) << ", \"t\": " << jnum(p.t) << ", \"a_star\": "
             << jnum(p.a_star) << ", \"ratio\": " << jnum(p.ratio) << ", \"deviation\": " << jnum(p.deviation)
             << ", \"predicted_scale\": " << jnum(p.error_scale) << "}";
        }
        os << "]}\n";
        emit(g, os.str());
      }
      std::cerr << "fitted exponent " << fmt17(rep.fitted_exponent) << " (predicted "
                << fmt17(rep.predicted_exponent) << ")\n";
      return 0;
    }
    if (*pol) {
      auto d = need_descriptor(g);
      auto rep = polynomial_approx(d, pol_n, pol_k, pol_l, parse_band(pol_tband, "--t-band"),
                                   parse_band(pol_xband, "--x-band"), pol_tp, pol_xp);
      std::ostringstream os;
      if (fmt_or(g, "json") == "json") {
        os << "{\"n\": " << rep.n << ", \"k\": " << rep.k << ", \"l\": " << rep.l
           << ", \"fitted_exponent\": " << jnum(rep.fitted_exponent) << ", \"expected_exponent\": " << rep.n + 1
           << ", \"constant\": " << jnum(rep.constant) << ", \"x\": [";
        for (std::size_t i = 0; i < rep.x_probe.size(); ++i) os << (i ? ", " : "") << jnum(rep.x_probe[i]);
        os << "], \"sup_remainder\": [";
        for (std::size_t i = 0; i < rep.sup_remainder.size(); ++i)
          os << (i ? ", " : "") << jnum(rep.sup_remainder[i]);
        os << "]}\n";
      } else {
        os << "x,sup_remainder,fitted_exponent\n";
        for (std::size_t i = 0; i < rep.x_probe.size(); ++i)
          os << fmt17(rep.x_probe[i]) << ',' << fmt17(rep.sup_remainder[i]) << ',' << fmt17(rep.fitted_exponent)
             << '\n';
      }
      emit(g, os.str());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
