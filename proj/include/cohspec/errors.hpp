#pragma once

#include <stdexcept>
#include <string>

namespace cohspec {

// Argument outside the domain of a map (|a| >= 1, grid touching y = 0, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Denominator of a fraction-linear map vanished.
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Matrix spectrum not strictly inside the contour / unit disk.
struct SpectralDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Eigenvalue clusters too close to resolve at the requested tolerance.
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnsupportedError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Support of a Heisenberg-group function leaks out of its sampling box.
struct BoxSizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cohspec
