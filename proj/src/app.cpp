#include "invsub/app.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "invsub/errors.hpp"

namespace invsub {

using nlohmann::json;

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string jnum(double v) { return std::isfinite(v) ? fmt17(v) : "null"; }
std::string jstr(const std::string& s) { return json(s).dump(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Method parse_method(const std::string& s, const std::string& key) {
  if (s == "bromwich") return Method::bromwich;
  if (s == "keyhole") return Method::keyhole;
  if (s == "series") return Method::series;
  if (s == "saddle") return Method::saddle;
  if (s == "mc" || s == "monte_carlo") return Method::monte_carlo;
  throw ConfigError(key, "unknown method '" + s + "'");
}

void check_keys(const json& v, const std::string& path, const std::set<std::string>& allowed) {
  if (!v.is_object()) throw ConfigError(path, "expected an object");
  for (auto it = v.begin(); it != v.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(path + "." + it.key(), "unknown key");
}

template <class T>
T get(const json& v, const std::string& path, const std::string& key, T fallback) {
  if (!v.contains(key)) return fallback;
  try {
    return v.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + "." + key, "wrong type");
  }
}

MethodCell failed(Method m, const char* kind, const std::exception& e, bool neutral) {
  MethodCell c;
  c.error = to_string(m) + ": " + kind + ": " + e.what();
  c.neutral = neutral;
  return c;
}

// every failure mode lands in the cell, nothing escapes
template <class F>
MethodCell guarded(Method m, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    return failed(m, "domain", e, true);
  } catch (const CapabilityError& e) {
    return failed(m, "capability", e, true);
  } catch (const ConvergenceError& e) {
    return failed(m, "convergence", e, false);
  } catch (const AccuracyError& e) {
    return failed(m, "accuracy", e, false);
  } catch (const std::exception& e) {
    return failed(m, "error", e, false);
  }
}

MethodCell from_result(const MethodResult& r) {
  MethodCell c;
  c.value = r.value;
  c.error_scale = r.error_scale;
  return c;
}

}  // namespace

CompareConfig compare_config_from_json(const json& doc) {
  const std::string p = "config";
  check_keys(doc, p, {"schema_version", "descriptor", "target", "k", "l", "x", "t", "methods", "rel_tol", "contour",
                      "series", "mc"});
  if (!doc.contains("schema_version") || !doc.at("schema_version").is_number_integer() ||
      doc.at("schema_version").get<int>() != kSchemaVersion)
    throw ConfigError(p + ".schema_version", "missing or unsupported (expected " + std::to_string(kSchemaVersion) + ")");
  CompareConfig c;
  if (!doc.contains("descriptor")) throw ConfigError(p + ".descriptor", "missing");
  c.descriptor = descriptor_from_value(doc.at("descriptor"), p + ".descriptor");
  try {
    c.target = parse_target(get<std::string>(doc, p, "target", "f"));
  } catch (const DomainError& e) {
    throw ConfigError(p + ".target", e.what());
  }
  c.k = get<int>(doc, p, "k", 0);
  c.l = get<int>(doc, p, "l", 0);
  if (c.k < 0 || c.l < 0) throw ConfigError(p + ".k", "derivative orders must be nonnegative");
  for (const char* key : {"x", "t"})
    if (!doc.contains(key)) throw ConfigError(p + "." + key, "missing");
  c.x_grid = grid_from_json(doc.at("x"), p + ".x");
  c.t_grid = grid_from_json(doc.at("t"), p + ".t");
  if (doc.contains("methods")) {
    const json& m = doc.at("methods");
    if (m.is_string() && m.get<std::string>() == "all") {
      c.methods = {Method::series, Method::bromwich, Method::keyhole, Method::saddle, Method::monte_carlo};
    } else if (m.is_array()) {
      for (std::size_t i = 0; i < m.size(); ++i) {
        const std::string key = p + ".methods[" + std::to_string(i) + "]";
        if (!m[i].is_string()) throw ConfigError(key, "expected a string");
        c.methods.push_back(parse_method(m[i].get<std::string>(), key));
      }
    } else {
      throw ConfigError(p + ".methods", "expected \"all\" or an array of names");
    }
  } else {
    c.methods = {Method::series, Method::bromwich, Method::keyhole};
  }
  c.rel_tol = get<double>(doc, p, "rel_tol", 0.0);
  if (doc.contains("contour")) {
    const json& v = doc.at("contour");
    check_keys(v, p + ".contour", {"trunc_tol", "quad_tol", "max_panels"});
    for (ContourSpec* s : {&c.bromwich, &c.keyhole}) {
      s->trunc_tol = get<double>(v, p + ".contour", "trunc_tol", s->trunc_tol);
      s->quad_tol = get<double>(v, p + ".contour", "quad_tol", s->quad_tol);
      s->max_panels = get<int>(v, p + ".contour", "max_panels", s->max_panels);
    }
  }
  if (doc.contains("series")) {
    const json& v = doc.at("series");
    check_keys(v, p + ".series", {"n_max", "tol"});
    c.series.n_max = get<int>(v, p + ".series", "n_max", c.series.n_max);
    c.series.tol = get<double>(v, p + ".series", "tol", c.series.tol);
  }
  if (doc.contains("mc")) {
    const json& v = doc.at("mc");
    const std::string mp = p + ".mc";
    check_keys(v, mp, {"paths", "seed", "batches", "small_jump_cut", "step_clock", "ci_level", "familywise"});
    c.mc.n_paths = long(get<double>(v, mp, "paths", double(c.mc.n_paths)));
    c.mc.rng_seed = get<std::uint64_t>(v, mp, "seed", c.mc.rng_seed);
    c.mc.batches = get<int>(v, mp, "batches", c.mc.batches);
    c.mc.small_jump_cut = get<double>(v, mp, "small_jump_cut", c.mc.small_jump_cut);
    c.mc.step_clock = get<double>(v, mp, "step_clock", c.mc.step_clock);
    c.mc.ci_level = get<double>(v, mp, "ci_level", c.mc.ci_level);
    c.mc_familywise = get<bool>(v, mp, "familywise", c.mc_familywise);
    if (!(c.mc.ci_level > 0 && c.mc.ci_level < 1)) throw ConfigError(mp + ".ci_level", "must lie in (0, 1)");
  }
  return c;
}

std::vector<ComparisonRow> run_compare(const CompareConfig& cfg) {
  const auto& d = cfg.descriptor;
  std::vector<ComparisonRow> rows;
  for (double t : cfg.t_grid)
    for (double x : cfg.x_grid) {
      ComparisonRow r;
      r.x = x;
      r.t = t;
      r.k = cfg.k;
      r.l = cfg.l;
      r.target = cfg.target;
      rows.push_back(r);
    }
  const std::size_t nx = cfg.x_grid.size();

  // MC runs one batch of paths per t for the whole x grid; it is parallel inside
  bool want_mc = false;
  for (Method m : cfg.methods) want_mc |= m == Method::monte_carlo;
  if (want_mc) {
    for (std::size_t it = 0; it < cfg.t_grid.size(); ++it) {
      const double t = cfg.t_grid[it];
      InverseDensityEstimate est;
      MethodCell fail = guarded(Method::monte_carlo, [&]() -> MethodCell {
        if (cfg.target != Target::f || cfg.k != 0 || cfg.l != 0)
          throw CapabilityError("the Monte Carlo oracle estimates f only, with k = l = 0");
        std::vector<double> xs;
        for (double x : cfg.x_grid) {
          if (x > 0 && (d.drift() == 0 || x < t / d.drift())) xs.push_back(x);
        }
        SimulationConfig mc = cfg.mc;
        if (cfg.mc_familywise) mc.ci_level = 1.0 - (1.0 - mc.ci_level) / double(rows.size());
        est = estimate_inverse_density(d, t, xs, mc);
        return {};
      });
      for (std::size_t ix = 0; ix < nx; ++ix) {
        auto& row = rows[it * nx + ix];
        if (!fail.error.empty()) {
          row.cells[Method::monte_carlo] = fail;
          continue;
        }
        const double x = row.x;
        row.cells[Method::monte_carlo] = guarded(Method::monte_carlo, [&]() -> MethodCell {
          require_in_region(d, x, t);
          for (std::size_t j = 0; j < est.x.size(); ++j)
            if (est.x[j] == x) {
              MethodCell c;
              c.value = est.estimate[j];
              c.error_scale = 0.5 * (est.ci_hi[j] - est.ci_lo[j]);
              return c;
            }
          throw DomainError("x outside the simulated grid");
        });
      }
    }
  }

#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    const DensityQuery q{cfg.target, row.x, row.t, cfg.k, cfg.l};
    for (Method m : cfg.methods) {
      switch (m) {
        case Method::series:
          row.cells[m] = guarded(m, [&] { return from_result(series(d, q, cfg.series)); });
          break;
        case Method::bromwich:
          row.cells[m] = guarded(m, [&] { return from_result(invert_bromwich(d, q, cfg.bromwich)); });
          break;
        case Method::keyhole:
          row.cells[m] = guarded(m, [&] { return from_result(invert_keyhole(d, q, cfg.keyhole)); });
          break;
        case Method::saddle:
          row.cells[m] = guarded(m, [&] {
            require_in_region(d, q.x, q.t);
            auto s = asymptotic(d, q);
            MethodCell c;
            c.value = s.leading;
            c.error_scale = std::abs(s.leading) * s.error_scale;
            return c;
          });
          break;
        default:
          break;
      }
    }
    // pairwise deltas over the methods that produced a value
    std::vector<Method> have;
    for (Method m : cfg.methods) {
      const auto& c = row.cells[m];
      if (c.value) have.push_back(m);
      else if (!c.neutral) row.agree = false;
    }
    for (std::size_t a = 0; a < have.size(); ++a)
      for (std::size_t b = a + 1; b < have.size(); ++b) {
        const auto& ca = row.cells[have[a]];
        const auto& cb = row.cells[have[b]];
        const double delta = std::abs(*ca.value - *cb.value);
        const double allowed =
            ca.error_scale + cb.error_scale + cfg.rel_tol * std::max(std::abs(*ca.value), std::abs(*cb.value));
        row.deltas.push_back({have[a], have[b], delta, allowed});
        if (!(delta <= allowed)) row.agree = false;
      }
  }
  return rows;
}

std::string compare_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  os << "x,t,k,l,target,method,value,error_scale,agree,error\n";
  for (const auto& r : rows)
    for (const auto& [m, c] : r.cells) {
      os << fmt17(r.x) << ',' << fmt17(r.t) << ',' << r.k << ',' << r.l << ',' << to_string(r.target) << ','
         << to_string(m) << ',' << (c.value ? fmt17(*c.value) : "") << ',' << (c.value ? fmt17(c.error_scale) : "")
         << ',' << (r.agree ? 1 : 0) << ',' << csv_field(c.error) << '\n';
    }
  return os.str();
}

std::string compare_json(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  os << "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    os << "  {\"x\": " << jnum(r.x) << ", \"t\": " << jnum(r.t) << ", \"k\": " << r.k << ", \"l\": " << r.l
       << ", \"target\": " << jstr(to_string(r.target)) << ", \"agree\": " << (r.agree ? "true" : "false")
       << ", \"methods\": {";
    bool first = true;
    for (const auto& [m, c] : r.cells) {
      os << (first ? "" : ", ") << jstr(to_string(m)) << ": {";
      first = false;
      if (c.value) os << "\"value\": " << jnum(*c.value) << ", \"error_scale\": " << jnum(c.error_scale);
      else os << "\"error\": " << jstr(c.error);
      os << "}";
    }
    os << "}, \"deltas\": [";
    for (std::size_t j = 0; j < r.deltas.size(); ++j) {
      const auto& dl = r.deltas[j];
      os << (j ? ", " : "") << "{\"a\": " << jstr(to_string(dl.a)) << ", \"b\": " << jstr(to_string(dl.b))
         << ", \"delta\": " << jnum(dl.delta) << ", \"allowed\": " << jnum(dl.allowed) << "}";
    }
    os << "]}" << (i + 1 < rows.size() ? "," : "") << "\n";
  }
  os << "]\n";
  return os.str();
}

// ---------------------------------------------------------------- study

namespace {

std::pair<double, double> fit_line(const std::vector<double>& lx, const std::vector<double>& ly) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (lx.size() < 2) return {nan, nan};
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= lx.size();
  my /= ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (!(sxx > 0)) return {nan, nan};
  return {sxy / sxx, my - sxy / sxx * mx};
}

}  // namespace

StudyReport run_asymptotic_study(const BernsteinDescriptor& d, const std::function<double(double)>& schedule,
                                 const std::vector<double>& x_grid, int k, int l, Target target,
                                 StudyQuantity quantity) {
  StudyReport rep;
  rep.quantity = quantity;
  if (quantity == StudyQuantity::density_ratio) {
    auto tab = regime_schedule_probe(d, schedule, x_grid, k, l, target);
    for (const auto& p : tab.rows) {
      StudyRow r;
      r.probe = p;
      r.inv_a_star = 1.0 / p.a_star;
      r.gap = p.t / p.x - d.drift();
      rep.rows.push_back(r);
    }
    rep.fitted_exponent = tab.fitted_exponent;
    rep.resolvable_rows = tab.resolvable_rows;
    return rep;
  }
  // Phi^dagger(c) * dG / df -> 1, both from inversions at the saddle abscissa
  std::vector<double> lx, ly;
  for (double x : x_grid) {
    StudyRow r;
    auto& p = r.probe;
    p.x = x;
    p.t = schedule(x);
    const DensityQuery qf{Target::f, x, p.t, k, l};
    const DensityQuery qG{Target::G, x, p.t, k, l};
    auto s = asymptotic_density(d, qf);
    p.a_star = s.c;
    p.regime = s.regime;
    p.error_scale = s.error_scale;
    const auto spec = ContourSpec::bromwich_at(s.c);
    auto f = invert_bromwich(d, qf, spec);
    auto G = invert_bromwich(d, qG, spec);
    p.leading = d.phi_dagger(s.c) * G.value;
    p.reference = f.value;
    p.reference_rel_error = f.mantissa_error / std::abs(f.mantissa) + G.mantissa_error / std::abs(G.mantissa);
    p.ratio = d.phi_dagger(s.c) * G.mantissa / f.mantissa * std::exp(G.log_scale - f.log_scale);
    p.deviation = std::abs(p.ratio - 1.0);
    if (p.deviation > 10.0 * p.reference_rel_error + 1e-13) {
      lx.push_back(std::log(p.error_scale));
      ly.push_back(std::log(p.deviation));
    }
    r.inv_a_star = 1.0 / s.c;
    r.gap = p.t / x - d.drift();
    rep.rows.push_back(r);
  }
  rep.resolvable_rows = int(lx.size());
  rep.fitted_exponent = fit_line(lx, ly).first;
  return rep;
}

std::string study_csv(const StudyReport& rep) {
  std::ostringstream os;
  os << "x,t,t_over_x,a_star,regime,estimate,reference,ratio,deviation,predicted_scale,inv_a_star,gap,"
        "fitted_exponent,predicted_exponent\n";
  for (const auto& r : rep.rows) {
    const auto& p = r.probe;
    os << fmt17(p.x) << ',' << fmt17(p.t) << ',' << fmt17(p.t / p.x) << ',' << fmt17(p.a_star) << ','
       << to_string(p.regime) << ',' << fmt17(p.leading) << ',' << fmt17(p.reference) << ',' << fmt17(p.ratio) << ','
       << fmt17(p.deviation) << ',' << fmt17(p.error_scale) << ',' << fmt17(r.inv_a_star) << ',' << fmt17(r.gap)
       << ',' << fmt17(rep.fitted_exponent) << ',' << fmt17(rep.predicted_exponent) << '\n';
  }
  return os.str();
}

}  // namespace invsub
