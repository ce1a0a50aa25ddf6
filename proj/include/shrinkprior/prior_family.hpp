#ifndef SHRINKPRIOR_PRIOR_FAMILY_HPP
#define SHRINKPRIOR_PRIOR_FAMILY_HPP

#include <span>
#include <string>
#include <utility>

#include "shrinkprior/errors.hpp"

namespace shrinkprior {

// Slowly-varying factor h(kappa) in the prior
//   pi(kappa) = kappa^(a-1) (1-kappa)^(b-1) h(kappa).
//
// Three families:
//   Constant       h = 1
//   LogAdjusted    h = (1 + c1*log(1/kappa))^c2,        c1 > 0
//   HyperIB        h = (1 + c3*kappa)^c4 * exp(d*kappa), c3 > 0
enum class HKind { Constant, LogAdjusted, HyperIB };

struct HFamily {
  HKind kind = HKind::Constant;
  double c1 = 0.0, c2 = 0.0;            // LogAdjusted
  double c3 = 0.0, c4 = 0.0, d = 0.0;   // HyperIB

  static HFamily constant();
  static HFamily log_adjusted(double c1, double c2);
  static HFamily hyper_ib(double c3, double c4, double d);

  // log h(kappa). The caller supplies log(kappa) so the evaluation stays
  // accurate when kappa underflows toward 0 (needed deep in quadrature nodes).
  double log_h(double kappa, double log_kappa) const;
  double log_h(double kappa) const;
};

// The prior triple (a, b, h) together with the ambient dimension p.
// b >= 1 or a >= 1 gives a "relaxed" spec: representable (so flat or
// Strawderman-type baselines can be written down) but rejected by every
// minimaxity operation.
struct PriorSpec {
  int p = 1;
  double a = 0.5;
  double b = 0.5;
  HFamily h;

  PriorSpec() = default;
  PriorSpec(int p, double a, double b, HFamily h);

  bool u_shaped() const { return a < 1.0 && b > 0.0 && b < 1.0; }
};

enum class Propriety { Proper, ProperBoundary, Improper };

struct ProprietyReport {
  Propriety prior_proper = Propriety::Improper;
  Propriety marginal_finite = Propriety::Improper;  // Improper = infinite marginal
  std::string reason;
};

const char* to_string(Propriety v);

// log pi(kappa) = (a-1) log k + (b-1) log(1-k) + log h(k), unnormalized.
// Throws DomainError for kappa outside (0,1).
double log_prior_kappa(const PriorSpec& spec, double kappa);

// log h(k_new) - log h(k_old), formed without evaluating h itself so that
// large |d| in HyperIB cannot overflow.
double h_logratio(const HFamily& h, double kappa_new, double kappa_old);

// H(kappa) = kappa h'(kappa)/h(kappa) on [0,1]; H(0) = 0 for every family.
double big_H(const HFamily& h, double kappa);

// H1(kappa) = inf_{t <= kappa} H(t) (always <= 0 since H(0) = 0) and
// H2 = H - H1. Analytic for monotone H; running infimum on a uniform
// 10^4+1 grid otherwise.
std::pair<double, double> H1_H2(const HFamily& h, double kappa);

// Monotonicity of H on [0,1], decided analytically per family.
enum class HMonotonicity { NonIncreasing, NonDecreasing, Unknown };
HMonotonicity h_monotonicity(const HFamily& h);

// max_{[0,1]} H2 and H1(1), the two quantities entering the minimaxity bound.
struct HExtrema {
  double max_H2 = 0.0;
  double H1_at_1 = 0.0;
};
HExtrema h_extrema(const HFamily& h);
// Grid-only variant (no analytic fast path); exposed for cross-validation.
HExtrema h_extrema_grid(const HFamily& h);

// Does int_0^1 kappa^{-1} h(kappa) dkappa converge? (the a = 0 boundary test:
// Constant and HyperIB diverge since h(0) = 1; LogAdjusted needs c2 < -1.)
bool aux_integral_convergent(const HFamily& h);

ProprietyReport classify_propriety(const PriorSpec& spec);

// log of the prior density of beta (the kappa-mixture of normals), evaluated
// by quadrature over kappa. Returns +infinity if the integral diverges.
double log_prior_beta(const PriorSpec& spec, std::span<const double> beta);

namespace detail {
// Uniform grid used for non-monotone H fallbacks. 10^4 + 1 points.
inline constexpr int kHGridPoints = 10001;
// Clamps applied inside log() / log1p() calls only; interfaces still reject
// kappa outside (0,1).
inline constexpr double kLogClampLo = 1e-300;
inline constexpr double kLogClampHi = 1.0 - 1e-16;
}  // namespace detail

}  // namespace shrinkprior

#endif
