#ifndef SHRINKPRIOR_MINIMAXITY_HPP
#define SHRINKPRIOR_MINIMAXITY_HPP

#include <optional>
#include <string>

#include "shrinkprior/prior_family.hpp"

namespace shrinkprior {

// NotProven is never a claim of non-minimaxity; it only says these sufficient
// conditions did not fire.
enum class MinimaxVerdict { ProvenMinimax, NotProvenByTheseConditions };

enum class MinimaxRule { Thm1, Cor1_1, Cor1_2, Cor2_1, Cor2_2, Cor3_1, Cor3_2 };

struct MinimaxReport {
  MinimaxVerdict verdict = MinimaxVerdict::NotProvenByTheseConditions;
  MinimaxRule rule = MinimaxRule::Thm1;
  double margin = 0.0;  // left-hand side of the certifying inequality
  std::optional<double> b_threshold;  // minimal b the fired rule certifies
  std::string details;
};

const char* to_string(MinimaxVerdict v);
const char* to_string(MinimaxRule r);

// Evaluates 3p/2 + a - (p+2a+2+2 max H2)/b + min{0, p/2+a+2+H1(1)} >= 0
// under -p/2 <= a < p/2-2. Margins in [-1e-9, 0) stay NotProven with a
// numerically-at-boundary note instead of being rounded up.
MinimaxReport check_theorem1(const PriorSpec& spec);

// Monotone-H specialization: b thresholds (p+2a+2)/(3p/2+a) (H non-increasing
// with H(1) >= -(p/2+a+2)) or (p+2a+2+2H(1))/(3p/2+a) (H non-decreasing with
// H(1) < (p/2-a-2)/2). Throws CorollaryInapplicableError when H is not
// monotone. The reported rule names the family-specific corollary.
MinimaxReport check_corollary1(const PriorSpec& spec);

// HyperIB entry point: classifies (d, c4, c3) into the monotone regimes and
// applies the corollary; outside both regimes falls back to check_theorem1
// with grid-based H1/H2.
MinimaxReport check_hyper_ib(const PriorSpec& spec);

// Dispatcher used by the CLI: most specific rule that fires, else the full
// inequality (rule Thm1).
MinimaxReport certify(const PriorSpec& spec);

// a_* = (-3p+4+sqrt(9p^2-8p+48))/4, the smallest a = b choice with h == 1
// certified minimax; lies in (0,1) only for p >= 7.
double a_star(int p);

enum class NamedPrior { Prior1, Prior2 };

// Prior1: a = b = a_*(p), h == 1 (p >= 7).
// Prior2: a = 0, b = (5p+4)/(6p), h = (1 + c1 log(1/k))^-2, c1 = (p-4)/16
// (p >= 5).
PriorSpec named_prior(NamedPrior name, int p);

}  // namespace shrinkprior

#endif
