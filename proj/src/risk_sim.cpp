#include "shrinkprior/risk_sim.hpp"

#include <cmath>
#include <cstdlib>
#include <ostream>
#include <thread>

#include "shrinkprior/detail/fmt.hpp"
#include "shrinkprior/rng.hpp"

namespace shrinkprior {

EstimatorSpec EstimatorSpec::bayes(PriorSpec spec, std::string name) {
  EstimatorSpec e;
  e.kind = Kind::Bayes;
  e.prior = std::move(spec);
  e.name = std::move(name);
  return e;
}

EstimatorSpec EstimatorSpec::james_stein() {
  EstimatorSpec e;
  e.kind = Kind::JamesStein;
  e.name = "james_stein";
  return e;
}

EstimatorSpec EstimatorSpec::identity() {
  EstimatorSpec e;
  e.kind = Kind::Identity;
  e.name = "identity";
  return e;
}

int worker_count() {
  const char* env = std::getenv("SHRINKPRIOR_THREADS");
  const int hw = std::max(1u, std::thread::hardware_concurrency());
  if (!env || !*env) return hw;
  const long v = std::strtol(env, nullptr, 10);
  if (v <= 0) return hw;  // 0 = auto
  return static_cast<int>(std::min<long>(v, 256));
}

namespace {

// Squared-error losses of every estimator for one replication. y is drawn
// here so that all estimators see the same observation.
void replication_losses(const std::vector<EstimatorSpec>& estimators, int p, double beta_norm,
                        std::uint64_t seed, std::uint64_t point_id, std::uint64_t rep_id,
                        const QuadConfig& cfg, double* out) {
  CounterRng rng = CounterRng::stream(seed, point_id, rep_id);
  std::vector<double> y(static_cast<size_t>(p));
  double norm_sq = 0.0;
  for (int i = 0; i < p; ++i) {
    y[static_cast<size_t>(i)] = rng.next_normal();
    if (i == 0) y[0] += beta_norm;
    norm_sq += y[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
  }

  for (size_t e = 0; e < estimators.size(); ++e) {
    double factor;
    switch (estimators[e].kind) {
      case EstimatorSpec::Kind::Identity:
        factor = 1.0;
        break;
      case EstimatorSpec::Kind::JamesStein:
        if (norm_sq == 0.0) throw DomainError("james_stein: undefined at y = 0");
        factor = 1.0 - (p - 2) / norm_sq;
        break;
      case EstimatorSpec::Kind::Bayes:
        factor = 1.0 - posterior_kappa_mean(*estimators[e].prior, norm_sq, cfg);
        break;
      default:
        factor = 1.0;
    }
    double loss = 0.0;
    for (int i = 0; i < p; ++i) {
      const double target = i == 0 ? beta_norm : 0.0;
      const double diff = factor * y[static_cast<size_t>(i)] - target;
      loss += diff * diff;
    }
    out[e] = loss;
  }
}

}  // namespace

RiskCurve risk_sweep(const std::vector<EstimatorSpec>& estimators, int p,
                     std::span<const double> grid, int reps, std::uint64_t seed,
                     const QuadConfig& cfg) {
  if (estimators.empty()) throw DomainError("risk_sweep: no estimators");
  if (p < 1) throw DomainError("risk_sweep: p must be positive");
  if (reps < 100) throw DomainError("risk_sweep: reps must be >= 100");
  for (const auto& e : estimators) {
    if (e.kind == EstimatorSpec::Kind::JamesStein && p < 3) {
      throw DomainError("risk_sweep: James-Stein requires p >= 3");
    }
    if (e.kind == EstimatorSpec::Kind::Bayes && e.prior->p != p) {
      throw DomainError("risk_sweep: prior dimension differs from p");
    }
  }
  for (double g : grid) {
    if (!(g >= 0.0)) throw DomainError("risk_sweep: grid values must be >= 0");
  }

  const size_t ne = estimators.size();
  RiskCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.reps = reps;
  curve.seed = seed;
  for (const auto& e : estimators) curve.estimator_names.push_back(e.name);
  curve.risks.assign(ne, std::vector<double>(grid.size(), 0.0));
  curve.mc_se.assign(ne, std::vector<double>(grid.size(), 0.0));

  const int workers = worker_count();
  std::vector<double> losses(static_cast<size_t>(reps) * ne);

  for (size_t gi = 0; gi < grid.size(); ++gi) {
    const double beta_norm = curve.grid[gi];

    auto run_range = [&](int lo, int hi) {
      for (int r = lo; r < hi; ++r) {
        replication_losses(estimators, p, beta_norm, seed, gi, static_cast<std::uint64_t>(r),
                           cfg, losses.data() + static_cast<size_t>(r) * ne);
      }
    };

    if (workers <= 1 || reps < 2 * workers) {
      run_range(0, reps);
    } else {
      std::vector<std::thread> pool;
      const int chunk = (reps + workers - 1) / workers;
      for (int wkr = 0; wkr < workers; ++wkr) {
        const int lo = wkr * chunk;
        const int hi = std::min(reps, lo + chunk);
        if (lo < hi) pool.emplace_back(run_range, lo, hi);
      }
      for (auto& th : pool) th.join();
    }

    // Ordered reduction: identical output for serial and parallel runs.
    for (size_t e = 0; e < ne; ++e) {
      double sum = 0.0;
      for (int r = 0; r < reps; ++r) sum += losses[static_cast<size_t>(r) * ne + e];
      const double mean = sum / reps;
      double ssq = 0.0;
      for (int r = 0; r < reps; ++r) {
        const double d = losses[static_cast<size_t>(r) * ne + e] - mean;
        ssq += d * d;
      }
      curve.risks[e][gi] = mean;
      curve.mc_se[e][gi] = std::sqrt(ssq / (static_cast<double>(reps) - 1.0) / reps);
    }
  }
  return curve;
}

ShrinkCurve shrink_sweep(const PriorSpec& spec, std::span<const double> y_norm_grid,
                         const QuadConfig& cfg) {
  ShrinkCurve curve;
  curve.spec = spec;
  curve.limit = phi_limit(spec);
  curve.points.reserve(y_norm_grid.size());
  for (double y_norm : y_norm_grid) {
    if (!(y_norm >= 0.0)) throw DomainError("shrink_sweep: |y| must be >= 0");
    curve.points.emplace_back(y_norm, shrinkage_factor(spec, y_norm * y_norm, cfg));
  }
  return curve;
}

std::vector<std::pair<double, double>> prior_density_sweep(const PriorSpec& spec,
                                                           std::span<const double> kappa_grid) {
  std::vector<std::pair<double, double>> rows;
  rows.reserve(kappa_grid.size());
  for (double kappa : kappa_grid) {
    rows.emplace_back(kappa, log_prior_kappa(spec, kappa));  // rejects endpoints
  }
  return rows;
}

using detail::fmt17;

void write_risk_csv(std::ostream& os, const RiskCurve& curve) {
  os << "beta_norm";
  for (const auto& name : curve.estimator_names) os << ',' << name << ',' << name << "_se";
  os << '\n';
  for (size_t gi = 0; gi < curve.grid.size(); ++gi) {
    os << fmt17(curve.grid[gi]);
    for (size_t e = 0; e < curve.estimator_names.size(); ++e) {
      os << ',' << fmt17(curve.risks[e][gi]) << ',' << fmt17(curve.mc_se[e][gi]);
    }
    os << '\n';
  }
}

void write_shrink_csv(std::ostream& os, const ShrinkCurve& curve) {
  os << "y_norm,phi\n";
  for (const auto& [y_norm, phi] : curve.points) {
    os << fmt17(y_norm) << ',' << fmt17(phi) << '\n';
  }
}

void write_prior_density_csv(std::ostream& os,
                             std::span<const std::pair<double, double>> rows) {
  os << "kappa,log_pi\n";
  for (const auto& [kappa, log_pi] : rows) {
    os << fmt17(kappa) << ',' << fmt17(log_pi) << '\n';
  }
}

}  // namespace shrinkprior
