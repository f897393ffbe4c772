#pragma once

#include <stdexcept>
#include <string>

namespace vsense {

/// Bad run configuration or bad arguments in an input document.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// File could not be read, parsed, or written.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical-domain problems (evaluation at a pole, singular evolution time,
// winding on a near-zero circle) raise std::domain_error.

}  // namespace vsense
