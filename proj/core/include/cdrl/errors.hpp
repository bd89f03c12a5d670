#pragma once

#include <stdexcept>
#include <string>

namespace cdrl {

// Dimension or layout mismatch between tensors, layers, or rollouts.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A scalar argument outside its admissible range (tau <= 0, bad action, ...).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Operation illegal in the current state (e.g. stepping a finished episode).
struct StateError : std::logic_error {
  using std::logic_error::logic_error;
};

// Invalid run configuration or wiring; raised before any worker starts.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed on-disk artifact (checkpoint, metrics).
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cdrl
