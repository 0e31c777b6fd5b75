#pragma once

#include <functional>
#include <string>
#include <vector>

#include "invsub/bernstein.hpp"

#include "json.hpp"

namespace invsub {

inline constexpr int kSchemaVersion = 1;

// Descriptor document, strict keys:
//   kind: stable | tempered_stable | gamma | poisson | levy_density | combine | power
//   alpha, lambda, rate, jump, density{coeff,power,log_power,rate,cutoff}, rel_tol,
//   parts[...], inner{...}, drift, kill, schema_version (top level only)
// `path` prefixes key names in ConfigError messages.
BernsteinDescriptor descriptor_from_json(const nlohmann::json& doc, const std::string& path = "descriptor");
BernsteinDescriptor load_descriptor_file(const std::string& file);
// a JSON object or a string naming a descriptor file
BernsteinDescriptor descriptor_from_value(const nlohmann::json& v, const std::string& path = "descriptor");
nlohmann::json read_json_file(const std::string& file);

// "lo:hi:n", "lo:hi:n:log", "lo:hi:n:lin" or "a,b,c".  Without a suffix the
// spacing is logarithmic when lo > 0 and hi/lo >= 100, linear otherwise.
std::vector<double> parse_grid(const std::string& s, const std::string& key = "grid");
std::vector<double> grid_from_json(const nlohmann::json& v, const std::string& key);
std::pair<double, double> parse_band(const std::string& s, const std::string& key);

// t(x) from an expression in x: numbers, + - * / ^, parentheses and
// sqrt exp ln log log2 log10 lnln abs
std::function<double(double)> parse_schedule(const std::string& expr);

}  // namespace invsub
