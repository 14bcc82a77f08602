#pragma once

#include <stdexcept>
#include <string>

namespace rdc {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A reaction term that satisfies neither the monostable nor the bistable
/// hypotheses, or violates F(1) >= 0.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation called on the wrong kind of model (e.g. theta on a monostable f).
class KindError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An integrator or solver could not reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested strategy cannot work for this configuration (length above the
/// threshold, inadmissible path, infeasible horizon).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// State not inside the capture radius required by a local steering move.
class CaptureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or schema-violating experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace rdc
