#ifndef SHRINKPRIOR_CLI_HPP
#define SHRINKPRIOR_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace shrinkprior::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 2 validation error, 3 integrability/domain error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err);

// "lo:hi:step": inclusive of lo; hi included when (hi-lo)/step is integral
// within 1e-9.
std::vector<double> parse_grid(const std::string& text);

}  // namespace shrinkprior::cli

#endif
