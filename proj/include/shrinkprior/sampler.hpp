#ifndef SHRINKPRIOR_SAMPLER_HPP
#define SHRINKPRIOR_SAMPLER_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "shrinkprior/prior_family.hpp"

namespace shrinkprior {

struct SamplerConfig {
  std::uint64_t iterations = 100000;
  std::uint64_t burn_in = 1000;
  std::uint64_t seed = 0;
  std::uint64_t chain_id = 0;  // folded into the RNG stream key
  // Beta proposal parameters; proposal_a defaults to max(a, 0.5) when unset.
  std::optional<double> proposal_a;
  double proposal_b = 0.5;
  bool rao_blackwell = true;
};

double resolved_proposal_a(const PriorSpec& spec, const SamplerConfig& cfg);

struct ChainTrace {
  std::vector<double> kappa_draws;   // kappa_t for t = 1..iterations
  std::vector<double> beta_draws;    // row-major iterations x p; Rao-Blackwell
                                     // mode holds (1 - kappa_{t-1}) y
  std::vector<std::uint8_t> accepted;  // per-iteration MH accept indicator
  std::vector<double> y;
  std::uint64_t burn_in = 0;
  std::uint64_t accept_count = 0;
  bool rao_blackwell = true;

  std::uint64_t iterations() const { return kappa_draws.size(); }
  double accept_rate() const {
    return iterations() ? static_cast<double>(accept_count) / iterations() : 0.0;
  }
  std::span<const double> beta_at(std::uint64_t t) const {  // t is 0-based
    return {beta_draws.data() + t * y.size(), y.size()};
  }
};

// log of the Metropolis-Hastings acceptance probability for the independent
// Beta(a~, b~) proposal: min(0, log q) with
//   log q = (a - a~ + p/2)(log k~ - log k) + (b - b~)(log(1-k~) - log(1-k))
//           - |y|^2/2 (k~ - k) + log h(k~)/h(k).
double mh_log_accept(const PriorSpec& spec, const SamplerConfig& cfg, double y_norm_sq,
                     double kappa_new, double kappa_old);

// Metropolis-within-Gibbs chain: kappa_0 = 0.5; each iteration records beta_t
// (sampled, or its conditional mean in Rao-Blackwell mode) and then updates
// kappa by an independent MH step. Deterministic given (seed, chain_id).
ChainTrace run_chain(const PriorSpec& spec, std::span<const double> y,
                     const SamplerConfig& cfg);

// Average of the post-burn-in beta records.
std::vector<double> posterior_mean(const ChainTrace& trace);

// Post-burn-in mean of kappa with a batch-means standard error (the draws are
// Markov-dependent, so the naive iid error would be optimistic).
struct KappaSummary {
  double mean = 0.0;
  double se = 0.0;
  std::uint64_t count = 0;
};
KappaSummary summarize_kappa(const ChainTrace& trace, int batches = 50);

// CSV export: header `iter,kappa,accept`, optionally followed by
// beta_1..beta_p columns.
void write_trace_csv(std::ostream& os, const ChainTrace& trace, bool include_beta = false);

}  // namespace shrinkprior

#endif
