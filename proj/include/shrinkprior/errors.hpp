#ifndef SHRINKPRIOR_ERRORS_HPP
#define SHRINKPRIOR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace shrinkprior {

// Invalid argument at an operation boundary (kappa outside (0,1), y = 0 for
// James-Stein, p below a named prior's range, ...).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// The requested integral does not converge for this prior configuration.
class IntegrabilityError : public std::runtime_error {
 public:
  explicit IntegrabilityError(const std::string& what) : std::runtime_error(what) {}
};

// A relaxed-mode prior (a >= 1 or b >= 1) was passed to an operation whose
// guarantees only cover the U-shaped family.
class RelaxedSpecError : public std::invalid_argument {
 public:
  explicit RelaxedSpecError(const std::string& what) : std::invalid_argument(what) {}
};

// A corollary's monotonicity hypothesis does not hold for the given family.
class CorollaryInapplicableError : public std::runtime_error {
 public:
  explicit CorollaryInapplicableError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shrinkprior

#endif
