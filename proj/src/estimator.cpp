#include "shrinkprior/estimator.hpp"

#include <cmath>

namespace shrinkprior {

double posterior_kappa_mean(const PriorSpec& spec, double y_norm_sq, const QuadConfig& cfg) {
  if (!(y_norm_sq >= 0.0)) throw DomainError("posterior_kappa_mean: |y|^2 must be >= 0");
  const double s = spec.p / 2.0 + spec.a - 1.0;
  const IntegralPair pair = weighted_integral_pair(spec, s, y_norm_sq / 2.0, cfg);
  return std::exp(pair.log_hi - pair.log_lo);
}

double shrinkage_factor(const PriorSpec& spec, double y_norm_sq, const QuadConfig& cfg) {
  if (!(y_norm_sq >= 0.0)) throw DomainError("shrinkage_factor: |y|^2 must be >= 0");
  if (y_norm_sq == 0.0) return 0.0;
  return y_norm_sq * posterior_kappa_mean(spec, y_norm_sq, cfg);
}

std::vector<double> bayes_estimate(const PriorSpec& spec, std::span<const double> y,
                                   const QuadConfig& cfg) {
  if (static_cast<int>(y.size()) != spec.p) {
    throw DomainError("bayes_estimate: y must have length p");
  }
  double norm_sq = 0.0;
  for (double v : y) norm_sq += v * v;
  std::vector<double> out(y.begin(), y.end());
  if (norm_sq == 0.0) return out;
  const double factor = 1.0 - posterior_kappa_mean(spec, norm_sq, cfg);
  for (double& v : out) v *= factor;
  return out;
}

std::vector<double> james_stein(std::span<const double> y) {
  const int p = static_cast<int>(y.size());
  if (p < 3) throw DomainError("james_stein: requires p >= 3");
  double norm_sq = 0.0;
  for (double v : y) norm_sq += v * v;
  if (norm_sq == 0.0) throw DomainError("james_stein: undefined at y = 0");
  const double factor = 1.0 - (p - 2) / norm_sq;
  std::vector<double> out(y.begin(), y.end());
  for (double& v : out) v *= factor;
  return out;
}

double phi_limit(const PriorSpec& spec) { return spec.p + 2.0 * spec.a; }

}  // namespace shrinkprior
