#pragma once

#include <stdexcept>
#include <string>

namespace vnfsim {

/// Malformed or out-of-range scenario/agent configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File could not be read or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// State enumeration would exceed the configured cap.
struct ScenarioTooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Artifact does not belong to the scenario it is used with.
struct ArtifactMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Iterative solve hit its sweep cap before reaching the tolerance.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vnfsim
