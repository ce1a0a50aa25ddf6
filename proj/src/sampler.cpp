#include "shrinkprior/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "shrinkprior/detail/fmt.hpp"
#include "shrinkprior/rng.hpp"

namespace shrinkprior {

namespace {

void validate_config(const SamplerConfig& cfg) {
  if (cfg.iterations == 0) throw DomainError("sampler: iterations must be positive");
  if (cfg.burn_in >= cfg.iterations) throw DomainError("sampler: burn_in < iterations required");
  if (cfg.proposal_a && !(*cfg.proposal_a > 0.0)) {
    throw DomainError("sampler: proposal_a must be positive");
  }
  if (!(cfg.proposal_b > 0.0)) throw DomainError("sampler: proposal_b must be positive");
}

}  // namespace

double resolved_proposal_a(const PriorSpec& spec, const SamplerConfig& cfg) {
  return cfg.proposal_a ? *cfg.proposal_a : std::max(spec.a, 0.5);
}

double mh_log_accept(const PriorSpec& spec, const SamplerConfig& cfg, double y_norm_sq,
                     double kappa_new, double kappa_old) {
  if (!(kappa_new > 0.0 && kappa_new < 1.0) || !(kappa_old > 0.0 && kappa_old < 1.0)) {
    throw DomainError("mh_log_accept: kappa must lie in (0,1)");
  }
  const double a_tilde = resolved_proposal_a(spec, cfg);
  const double log_ratio =
      (spec.a - a_tilde + spec.p / 2.0) * (std::log(kappa_new) - std::log(kappa_old)) +
      (spec.b - cfg.proposal_b) * (std::log1p(-kappa_new) - std::log1p(-kappa_old)) -
      y_norm_sq / 2.0 * (kappa_new - kappa_old) + h_logratio(spec.h, kappa_new, kappa_old);
  return std::min(0.0, log_ratio);
}

ChainTrace run_chain(const PriorSpec& spec, std::span<const double> y,
                     const SamplerConfig& cfg) {
  validate_config(cfg);
  if (static_cast<int>(y.size()) != spec.p) throw DomainError("run_chain: y must have length p");

  double y_norm_sq = 0.0;
  for (double v : y) y_norm_sq += v * v;

  const double a_tilde = resolved_proposal_a(spec, cfg);
  const std::uint64_t n = cfg.iterations;
  const auto p = y.size();

  ChainTrace trace;
  trace.y.assign(y.begin(), y.end());
  trace.burn_in = cfg.burn_in;
  trace.rao_blackwell = cfg.rao_blackwell;
  trace.kappa_draws.resize(n);
  trace.beta_draws.resize(n * p);
  trace.accepted.assign(n, 0);

  CounterRng rng = CounterRng::stream(cfg.seed, cfg.chain_id);

  double kappa = 0.5;
  for (std::uint64_t t = 0; t < n; ++t) {
    double* beta_t = trace.beta_draws.data() + t * p;
    const double mean_scale = 1.0 - kappa;
    if (cfg.rao_blackwell) {
      for (std::size_t i = 0; i < p; ++i) beta_t[i] = mean_scale * y[i];
    } else {
      const double sd = std::sqrt(mean_scale);
      for (std::size_t i = 0; i < p; ++i) beta_t[i] = mean_scale * y[i] + sd * rng.next_normal();
    }

    const double proposal = rng.next_beta(a_tilde, cfg.proposal_b);
    // Proposals that round onto an endpoint would blow up the log densities;
    // treat them as rejected (a measure-zero event).
    if (proposal > 0.0 && proposal < 1.0) {
      const double log_q = mh_log_accept(spec, cfg, y_norm_sq, proposal, kappa);
      if (std::log(rng.next_unit()) < log_q) {
        kappa = proposal;
        ++trace.accept_count;
        trace.accepted[t] = 1;
      }
    }
    trace.kappa_draws[t] = kappa;
  }
  return trace;
}

std::vector<double> posterior_mean(const ChainTrace& trace) {
  const std::uint64_t n = trace.iterations();
  const auto p = trace.y.size();
  if (trace.burn_in >= n) throw DomainError("posterior_mean: no post-burn-in draws");

  std::vector<double> mean(p, 0.0);
  for (std::uint64_t t = trace.burn_in; t < n; ++t) {
    const auto beta = trace.beta_at(t);
    for (std::size_t i = 0; i < p; ++i) mean[i] += beta[i];
  }
  const double inv = 1.0 / static_cast<double>(n - trace.burn_in);
  for (double& v : mean) v *= inv;
  return mean;
}

KappaSummary summarize_kappa(const ChainTrace& trace, int batches) {
  const std::uint64_t n = trace.iterations();
  if (trace.burn_in >= n) throw DomainError("summarize_kappa: no post-burn-in draws");
  const std::uint64_t m = n - trace.burn_in;
  const int nb = std::max(2, std::min<int>(batches, static_cast<int>(m / 2)));
  const std::uint64_t bsize = m / nb;

  KappaSummary s;
  s.count = m;
  double total = 0.0;
  for (std::uint64_t t = trace.burn_in; t < n; ++t) total += trace.kappa_draws[t];
  s.mean = total / static_cast<double>(m);

  double ssq = 0.0;
  for (int b = 0; b < nb; ++b) {
    double bm = 0.0;
    const std::uint64_t lo = trace.burn_in + static_cast<std::uint64_t>(b) * bsize;
    for (std::uint64_t t = lo; t < lo + bsize; ++t) bm += trace.kappa_draws[t];
    bm /= static_cast<double>(bsize);
    ssq += (bm - s.mean) * (bm - s.mean);
  }
  s.se = std::sqrt(ssq / (nb * (nb - 1.0)));
  return s;
}

void write_trace_csv(std::ostream& os, const ChainTrace& trace, bool include_beta) {
  const auto p = trace.y.size();
  os << "iter,kappa,accept";
  if (include_beta) {
    for (std::size_t i = 1; i <= p; ++i) os << ",beta_" << i;
  }
  os << '\n';
  for (std::uint64_t t = 0; t < trace.iterations(); ++t) {
    os << (t + 1) << ',' << detail::fmt17(trace.kappa_draws[t]) << ','
       << static_cast<int>(trace.accepted[t]);
    if (include_beta) {
      const auto beta = trace.beta_at(t);
      for (double v : beta) os << ',' << detail::fmt17(v);
    }
    os << '\n';
  }
}

}  // namespace shrinkprior
