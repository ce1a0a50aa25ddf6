#ifndef SHRINKPRIOR_ESTIMATOR_HPP
#define SHRINKPRIOR_ESTIMATOR_HPP

#include <span>
#include <vector>

#include "shrinkprior/quadrature.hpp"

namespace shrinkprior {

// Grid of (|y|, phi(|y|^2)) values together with the tail limit p + 2a.
struct ShrinkCurve {
  std::vector<std::pair<double, double>> points;  // (y_norm, phi)
  PriorSpec spec;
  double limit = 0.0;
};

// E[kappa | y] = I_{p/2+a}(w) / I_{p/2+a-1}(w), w = |y|^2/2. Always in (0,1):
// both integrals are evaluated on shared nodes and the high one is damped by
// kappa < 1 termwise.
double posterior_kappa_mean(const PriorSpec& spec, double y_norm_sq,
                            const QuadConfig& cfg = {});

// phi(|y|^2) = |y|^2 E[kappa | y]; phi(0) = 0 by continuity.
double shrinkage_factor(const PriorSpec& spec, double y_norm_sq, const QuadConfig& cfg = {});

// Tweedie posterior mean (1 - phi(|y|^2)/|y|^2) y; y = 0 maps to 0.
std::vector<double> bayes_estimate(const PriorSpec& spec, std::span<const double> y,
                                   const QuadConfig& cfg = {});

// Plain James-Stein (no positive part): (1 - (p-2)/|y|^2) y. Requires p >= 3
// and y != 0.
std::vector<double> james_stein(std::span<const double> y);

// lim_{|y|^2 -> inf} phi = p + 2a.
double phi_limit(const PriorSpec& spec);

}  // namespace shrinkprior

#endif
