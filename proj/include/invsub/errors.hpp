#pragma once

#include <stdexcept>
#include <string>

namespace invsub {

// Argument outside the mathematical domain (bad alpha, (x,t) outside D, z off the declared domain ...)
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// quadrature / summation did not reach the requested tolerance
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

// iterative procedure ran out of budget; carries whatever it had
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double partial, double last_term)
      : std::runtime_error(what), partial_(partial), last_term_(last_term) {}
  double partial() const { return partial_; }
  double last_term() const { return last_term_; }

 private:
  double partial_;
  double last_term_;
};

// descriptor lacks something the method needs (half-plane extension, sampler, ...)
class CapabilityError : public std::logic_error {
 public:
  explicit CapabilityError(const std::string& what) : std::logic_error(what) {}
};

class IntegrabilityError : public std::runtime_error {
 public:
  explicit IntegrabilityError(const std::string& what) : std::runtime_error(what) {}
};

// config document problem; message names the key path
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace invsub
