#ifndef MINEDYN_ERRORS_HPP
#define MINEDYN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace minedyn {

// Malformed or inconsistent input (config files, invalid field values).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure: non-finite intermediate values, step limits,
// unsettled sweeps, complex roots where real ones are required.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Controller synthesis/validation rejected the requested design.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace minedyn

#endif
