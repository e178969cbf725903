#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace mlock {

// Argument outside the mathematical domain of an operation (beta <= 0, g_oa <= 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested combination is well-formed but not supported by the model.
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A fixed-step integrator produced or was handed a non-finite value.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

// Moebius map hit its pole, or tanh hit one of its complex poles.
class SingularityError : public std::domain_error {
 public:
  SingularityError(const std::string& what, std::complex<double> where)
      : std::domain_error(what), where_(where) {}
  std::complex<double> where() const noexcept { return where_; }

 private:
  std::complex<double> where_;
};

// Iteration left the regime in which the model is meaningful.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Not enough samples / extrema / segments to produce an estimate.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mlock
