#ifndef SHRINKPRIOR_RISK_SIM_HPP
#define SHRINKPRIOR_RISK_SIM_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shrinkprior/estimator.hpp"

namespace shrinkprior {

struct EstimatorSpec {
  enum class Kind { Bayes, JamesStein, Identity };
  Kind kind = Kind::Identity;
  std::optional<PriorSpec> prior;  // Bayes only
  std::string name;

  static EstimatorSpec bayes(PriorSpec spec, std::string name);
  static EstimatorSpec james_stein();
  static EstimatorSpec identity();
};

struct RiskCurve {
  std::vector<double> grid;                 // |beta| values
  std::vector<std::string> estimator_names;
  std::vector<std::vector<double>> risks;   // [estimator][grid point]
  std::vector<std::vector<double>> mc_se;
  int reps = 0;
  std::uint64_t seed = 0;
};

// Monte Carlo risk E|bhat - beta|^2 over |beta| in grid, beta = r e_1 (every
// estimator here is orthogonally equivariant, so risk depends on |beta|
// alone). Common random numbers: each replication's y is shared across
// estimators. Replications run on derived streams keyed by (seed, point,
// replication) and are reduced in fixed index order, so the output is
// bit-identical for any worker count. SHRINKPRIOR_THREADS caps workers
// (0 or unset = auto).
RiskCurve risk_sweep(const std::vector<EstimatorSpec>& estimators, int p,
                     std::span<const double> grid, int reps, std::uint64_t seed,
                     const QuadConfig& cfg = {});

// Deterministic quadrature sweep of the shrinkage factor.
ShrinkCurve shrink_sweep(const PriorSpec& spec, std::span<const double> y_norm_grid,
                         const QuadConfig& cfg = {});

// Pointwise (kappa, log pi(kappa)); the grid must be interior to (0,1).
std::vector<std::pair<double, double>> prior_density_sweep(const PriorSpec& spec,
                                                           std::span<const double> kappa_grid);

// CSV emitters; all floats carry 17 significant digits.
void write_risk_csv(std::ostream& os, const RiskCurve& curve);
void write_shrink_csv(std::ostream& os, const ShrinkCurve& curve);
void write_prior_density_csv(std::ostream& os,
                             std::span<const std::pair<double, double>> rows);

// Worker cap from SHRINKPRIOR_THREADS (0 or unset = hardware concurrency).
int worker_count();

}  // namespace shrinkprior

#endif
