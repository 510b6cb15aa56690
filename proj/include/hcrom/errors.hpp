#ifndef HCROM_ERRORS_HPP
#define HCROM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hcrom {

// Invalid user-facing input: bad geometry names, malformed configs,
// out-of-range parameters. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical breakdown: solver non-convergence, singular systems,
// infinite-energy norm requests. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hcrom

#endif
