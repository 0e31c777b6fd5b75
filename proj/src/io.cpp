#include "invsub/io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "invsub/errors.hpp"

namespace invsub {

using nlohmann::json;

namespace {

void require_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path, "expected an object");
}

void check_keys(const json& v, const std::string& path, const std::set<std::string>& allowed) {
  for (auto it = v.begin(); it != v.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(path + "." + it.key(), "unknown key");
}

double number(const json& v, const std::string& path, const std::string& key, std::optional<double> fallback = {}) {
  auto it = v.find(key);
  if (it == v.end()) {
    if (fallback) return *fallback;
    throw ConfigError(path + "." + key, "missing");
  }
  if (!it->is_number()) throw ConfigError(path + "." + key, "expected a number");
  double x = it->get<double>();
  if (!std::isfinite(x)) throw ConfigError(path + "." + key, "not finite");
  return x;
}

std::optional<double> optional_number(const json& v, const std::string& path, const std::string& key) {
  if (!v.contains(key) || v.at(key).is_null()) return std::nullopt;
  return number(v, path, key);
}

BernsteinDescriptor build(const json& v, const std::string& path, bool top) {
  require_object(v, path);
  if (!v.contains("kind")) throw ConfigError(path + ".kind", "missing");
  if (!v.at("kind").is_string()) throw ConfigError(path + ".kind", "expected a string");
  const std::string kind = v.at("kind").get<std::string>();
  std::set<std::string> keys{"kind", "drift", "kill"};
  if (top) keys.insert("schema_version");
  if (top && v.contains("schema_version")) {
    const auto& sv = v.at("schema_version");
    if (!sv.is_number_integer() || sv.get<int>() != kSchemaVersion)
      throw ConfigError(path + ".schema_version", "unsupported (expected " + std::to_string(kSchemaVersion) + ")");
  }
  std::optional<BernsteinDescriptor> d;
  try {
    if (kind == "stable") {
      keys.insert("alpha");
      check_keys(v, path, keys);
      d = make_stable(number(v, path, "alpha"));
    } else if (kind == "tempered_stable") {
      keys.insert({"alpha", "lambda"});
      check_keys(v, path, keys);
      d = make_tempered_stable(number(v, path, "alpha"), number(v, path, "lambda"));
    } else if (kind == "gamma") {
      check_keys(v, path, keys);
      d = make_gamma();
    } else if (kind == "poisson") {
      keys.insert({"rate", "jump"});
      check_keys(v, path, keys);
      d = make_poisson(number(v, path, "rate"), number(v, path, "jump"));
    } else if (kind == "levy_density") {
      keys.insert({"density", "rel_tol"});
      check_keys(v, path, keys);
      const std::string dp = path + ".density";
      if (!v.contains("density")) throw ConfigError(dp, "missing");
      const json& dj = v.at("density");
      require_object(dj, dp);
      check_keys(dj, dp, {"coeff", "power", "log_power", "rate", "cutoff"});
      DensityFamily fam;
      fam.coeff = number(dj, dp, "coeff", 1.0);
      fam.power = number(dj, dp, "power");
      fam.log_power = number(dj, dp, "log_power", 0.0);
      fam.rate = number(dj, dp, "rate", 0.0);
      fam.cutoff = optional_number(dj, dp, "cutoff");
      if (fam.log_power != 0.0 && !(fam.cutoff && *fam.cutoff <= 1.0))
        throw ConfigError(dp + ".cutoff", "log_power needs cutoff <= 1");
      QuadratureOptions qo;
      qo.rel_tol = number(v, path, "rel_tol", qo.rel_tol);
      d = make_from_levy_density(density_from_family(fam), 0.0, 0.0, fam.cutoff, qo);
    } else if (kind == "combine") {
      keys.insert("parts");
      check_keys(v, path, keys);
      const std::string pp = path + ".parts";
      if (!v.contains("parts") || !v.at("parts").is_array() || v.at("parts").empty())
        throw ConfigError(pp, "expected a nonempty array");
      std::vector<BernsteinDescriptor> parts;
      for (std::size_t i = 0; i < v.at("parts").size(); ++i)
        parts.push_back(build(v.at("parts")[i], pp + "[" + std::to_string(i) + "]", false));
      d = combine_sum(parts);
    } else if (kind == "power") {
      keys.insert({"alpha", "inner"});
      check_keys(v, path, keys);
      if (!v.contains("inner")) throw ConfigError(path + ".inner", "missing");
      auto inner = build(v.at("inner"), path + ".inner", false);
      d = power_composition(inner, number(v, path, "alpha"));
    } else {
      throw ConfigError(path + ".kind", "unknown kind '" + kind + "'");
    }
    const double b = number(v, path, "drift", 0.0);
    const double q = number(v, path, "kill", 0.0);
    if (b != 0.0) d = add_drift(*d, b);
    if (q != 0.0) d = add_kill(*d, q);
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  return *d;
}

}  // namespace

json read_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file, "cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(file, std::string("invalid JSON: ") + e.what());
  }
}

BernsteinDescriptor descriptor_from_json(const json& doc, const std::string& path) { return build(doc, path, true); }

BernsteinDescriptor load_descriptor_file(const std::string& file) {
  return descriptor_from_json(read_json_file(file), file);
}

BernsteinDescriptor descriptor_from_value(const json& v, const std::string& path) {
  if (v.is_string()) return load_descriptor_file(v.get<std::string>());
  return descriptor_from_json(v, path);
}

// ------------------------------------------------------------------ grids

namespace {

double to_double(const std::string& s, const std::string& key) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (...) {
    throw ConfigError(key, "bad number '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError(key, "bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::vector<double> parse_grid(const std::string& s, const std::string& key) {
  if (s.find(':') == std::string::npos) {
    std::vector<double> out;
    for (auto& p : split(s, ',')) out.push_back(to_double(p, key));
    if (out.empty()) throw ConfigError(key, "empty grid");
    return out;
  }
  auto parts = split(s, ':');
  if (parts.size() != 3 && parts.size() != 4) throw ConfigError(key, "expected lo:hi:n[:log|:lin]");
  const double lo = to_double(parts[0], key), hi = to_double(parts[1], key);
  const double nd = to_double(parts[2], key);
  if (!(nd >= 1) || nd != std::floor(nd)) throw ConfigError(key, "point count must be a positive integer");
  const int n = int(nd);
  if (!(hi >= lo)) throw ConfigError(key, "need lo <= hi");
  // three decades or more reads as a scale sweep; anything narrower as a band
  bool logsp = lo > 0 && hi / lo >= 1000;
  if (parts.size() == 4) {
    if (parts[3] == "log") logsp = true;
    else if (parts[3] == "lin") logsp = false;
    else throw ConfigError(key, "spacing must be log or lin");
  }
  if (logsp && !(lo > 0)) throw ConfigError(key, "log spacing needs lo > 0");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const double u = n == 1 ? 0.0 : double(i) / (n - 1);
    out[i] = logsp ? std::pow(10.0, std::log10(lo) + u * (std::log10(hi) - std::log10(lo))) : lo + u * (hi - lo);
  }
  out.front() = lo;
  if (n > 1) out.back() = hi;
  return out;
}

std::vector<double> grid_from_json(const json& v, const std::string& key) {
  if (v.is_string()) return parse_grid(v.get<std::string>(), key);
  if (v.is_number()) return {v.get<double>()};
  if (v.is_array()) {
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(key + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    if (out.empty()) throw ConfigError(key, "empty grid");
    return out;
  }
  throw ConfigError(key, "expected a grid string, number or array");
}

std::pair<double, double> parse_band(const std::string& s, const std::string& key) {
  auto parts = split(s, ':');
  if (parts.size() != 2) throw ConfigError(key, "expected lo:hi");
  const double lo = to_double(parts[0], key), hi = to_double(parts[1], key);
  if (!(lo > 0 && hi > lo)) throw ConfigError(key, "need 0 < lo < hi");
  return {lo, hi};
}

// --------------------------------------------------------------- schedules

namespace {

using Fn = std::function<double(double)>;

struct Parser {
  std::string s;
  std::size_t i = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("schedule", what + " at position " + std::to_string(i) + " in '" + s + "'");
  }
  void skip() {
    while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
  }
  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }

  Fn expr() {
    Fn lhs = term();
    for (;;) {
      if (eat('+')) {
        Fn r = term();
        lhs = [lhs, r](double x) { return lhs(x) + r(x); };
      } else if (eat('-')) {
        Fn r = term();
        lhs = [lhs, r](double x) { return lhs(x) - r(x); };
      } else {
        return lhs;
      }
    }
  }
  Fn term() {
    Fn lhs = unary();
    for (;;) {
      if (eat('*')) {
        Fn r = unary();
        lhs = [lhs, r](double x) { return lhs(x) * r(x); };
      } else if (eat('/')) {
        Fn r = unary();
        lhs = [lhs, r](double x) { return lhs(x) / r(x); };
      } else {
        return lhs;
      }
    }
  }
  Fn unary() {
    if (eat('-')) {
      Fn a = unary();
      return [a](double x) { return -a(x); };
    }
    if (eat('+')) return unary();
    return power();
  }
  Fn power() {
    Fn base = primary();
    if (eat('^')) {
      Fn e = unary();  // right associative
      return [base, e](double x) { return std::pow(base(x), e(x)); };
    }
    return base;
  }
  Fn primary() {
    skip();
    if (i >= s.size()) fail("unexpected end");
    if (eat('(')) {
      Fn e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    const char c = s[i];
    if (std::isdigit((unsigned char)c) || c == '.') {
      const char* begin = s.c_str() + i;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      i += std::size_t(end - begin);
      return [v](double) { return v; };
    }
    if (std::isalpha((unsigned char)c)) {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum((unsigned char)s[j]) || s[j] == '_')) ++j;
      const std::string id = s.substr(i, j - i);
      i = j;
      if (id == "x") return [](double x) { return x; };
      if (id == "pi") return [](double) { return kPi; };
      if (id == "e") return [](double) { return std::exp(1.0); };
      double (*f)(double) = nullptr;
      if (id == "sqrt") f = [](double v) { return std::sqrt(v); };
      else if (id == "exp") f = [](double v) { return std::exp(v); };
      else if (id == "ln" || id == "log") f = [](double v) { return std::log(v); };
      else if (id == "log2") f = [](double v) { return std::log2(v); };
      else if (id == "log10") f = [](double v) { return std::log10(v); };
      else if (id == "lnln") f = [](double v) { return std::log(std::log(v)); };
      else if (id == "abs") f = [](double v) { return std::fabs(v); };
      else fail("unknown identifier '" + id + "'");
      if (!eat('(')) fail("expected '(' after " + id);
      Fn a = expr();
      if (!eat(')')) fail("expected ')'");
      return [f, a](double x) { return f(a(x)); };
    }
    fail(std::string("unexpected '") + c + "'");
  }
};

}  // namespace

std::function<double(double)> parse_schedule(const std::string& expr) {
  Parser p{expr};
  Fn f = p.expr();
  p.skip();
  if (p.i != p.s.size()) p.fail("trailing input");
  return f;
}

}  // namespace invsub
