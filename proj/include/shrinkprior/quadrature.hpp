#ifndef SHRINKPRIOR_QUADRATURE_HPP
#define SHRINKPRIOR_QUADRATURE_HPP

#include <functional>
#include <vector>

#include "shrinkprior/prior_family.hpp"

namespace shrinkprior {

enum class QuadScheme { DoubleExponential, GaussJacobiComposite };

struct QuadConfig {
  double rel_tol = 1e-10;   // must lie in (0, 1e-4]
  double abs_tol = 1e-300;  // integrals below this count as converged outright
  int max_levels = 12;      // >= 4; deepest tanh-sinh step is 2^-max_levels
  QuadScheme scheme = QuadScheme::DoubleExponential;
};

struct IntegralResult {
  double log_value = 0.0;
  double est_rel_err = 0.0;
  bool converged = false;
};

// Both integrals of a posterior-mean ratio, evaluated on identical nodes so
// that exp(log_hi - log_lo) = E[kappa | y] lands in (0,1) by construction.
struct IntegralPair {
  double log_lo = 0.0;   // log I_s(w)
  double log_hi = 0.0;   // log I_{s+1}(w)
  double est_rel_err = 0.0;
  bool converged = false;
};

// log of I_s(w) = int_0^1 kappa^s exp(-kappa w) (1-kappa)^(b-1) h(kappa) dkappa,
// with b and h taken from the prior. Fully log-space: no underflow for w up to
// ~1e6. Requires s > -1, or s = -1 with the boundary condition
// (LogAdjusted, c2 < -1); b > 0. Violations raise IntegrabilityError.
// The boundary case always goes through the double-exponential path.
IntegralResult weighted_integral(const PriorSpec& spec, double s, double w,
                                 const QuadConfig& cfg = {});

// (log I_s(w), log I_{s+1}(w)) on shared nodes.
IntegralPair weighted_integral_pair(const PriorSpec& spec, double s, double w,
                                    const QuadConfig& cfg = {});

// log m(y) = -(p/2) log(2 pi) + log I_{p/2+a-1}(|y|^2 / 2).
double log_marginal(const PriorSpec& spec, double y_norm_sq,
                    const QuadConfig& cfg = {});

namespace detail {

// Adaptive tanh-sinh integration of kappa^s (1-kappa)^(b-1) exp(log_g(kappa))
// over (0,1), in log space with the endpoint powers folded into the node
// weights analytically (the naive product cancels catastrophically deep in
// the tails). log_g receives (kappa, log kappa, log(1-kappa)) and must itself
// be free of such cancellations; -inf marks a dead region, NaN is treated as
// -inf.
using LogIntegrand = std::function<double(double, double, double)>;
IntegralResult de_log_integrate_power(double s, double b, const LogIntegrand& log_g,
                                      const QuadConfig& cfg);

// Gauss-Jacobi rule on [-1,1] for the weight (1-x)^alpha (1+x)^beta,
// alpha, beta > -1. Golub-Welsch; log_weights holds log of the (positive)
// quadrature weights.
struct JacobiRule {
  std::vector<double> nodes;
  std::vector<double> log_weights;
};
JacobiRule gauss_jacobi_rule(int n, double alpha, double beta);

}  // namespace detail

}  // namespace shrinkprior

#endif
