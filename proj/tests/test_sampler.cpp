#include <doctest.h>

#include <cmath>
#include <vector>

#include "shrinkprior/estimator.hpp"
#include "shrinkprior/minimaxity.hpp"
#include "shrinkprior/sampler.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace shrinkprior;

namespace {

// Geyer initial-positive-sequence estimate of the integrated autocorrelation
// time; the chain's effective sample size is n / iact.
double iact(const std::vector<double>& x) {
  const size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  const size_t max_lag = std::min<size_t>(n / 2, 2000);
  std::vector<double> acov(max_lag);
  for (size_t k = 0; k < max_lag; ++k) {
    double s = 0.0;
    for (size_t i = 0; i + k < n; ++i) s += (x[i] - mean) * (x[i + k] - mean);
    acov[k] = s / static_cast<double>(n);
  }
  double tau = acov[0];
  for (size_t k = 1; k + 1 < max_lag; k += 2) {
    const double gamma = acov[k] + acov[k + 1];
    if (gamma <= 0.0) break;
    tau += 2.0 * gamma;
  }
  return tau / acov[0];
}

std::vector<double> post_burn(const ChainTrace& trace) {
  return {trace.kappa_draws.begin() + static_cast<long>(trace.burn_in),
          trace.kappa_draws.end()};
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("mh_log_accept") {
  const PriorSpec prior2 = named_prior(NamedPrior::Prior2, 10);
  SamplerConfig cfg;

  CHECK(mh_log_accept(prior2, cfg, 25.0, 0.37, 0.37) == 0.0);

  // a = a~, b = b~, constant h, y = 0: log q = (p/2) log(k_new/k_old)
  const PriorSpec half(10, 0.5, 0.5, HFamily::constant());
  CHECK(mh_log_accept(half, cfg, 0.0, 0.5, 0.25) == 0.0);  // ratio > 1 caps at q = 1
  CHECK(mh_log_accept(half, cfg, 0.0, 0.25, 0.5) ==
        testutil::near(5.0 * std::log(0.5), 1e-12));

  // naive direct evaluation of the acceptance ratio at moderate magnitudes
  const double a_t = 0.5, b_t = 0.5;
  const double naive = std::pow(0.25 / 0.5, prior2.a - a_t + 5.0) *
                       std::pow(0.75 / 0.5, prior2.b - b_t) *
                       std::exp(-12.5 * (0.25 - 0.5)) *
                       std::pow((1.0 + 0.375 * std::log(1.0 / 0.25)) /
                                    (1.0 + 0.375 * std::log(1.0 / 0.5)),
                                -2.0);
  const double got = mh_log_accept(prior2, cfg, 25.0, 0.25, 0.5);
  CHECK(got == testutil::near(std::min(0.0, std::log(naive)), 1e-12));

  CHECK_THROWS_AS(mh_log_accept(prior2, cfg, 25.0, 0.0, 0.5), DomainError);
  CHECK_THROWS_AS(mh_log_accept(prior2, cfg, 25.0, 0.5, 1.0), DomainError);
}

TEST_CASE("conjugate case: y = 0 with matching proposal is Beta(p/2+a, b)") {
  const PriorSpec half(10, 0.5, 0.5, HFamily::constant());
  SamplerConfig cfg;
  cfg.seed = 11;
  const std::vector<double> y(10, 0.0);
  const ChainTrace trace = run_chain(half, y, cfg);

  const auto s = summarize_kappa(trace);
  CHECK(std::fabs(s.mean - 5.5 / 6.0) <= 3.0 * s.se);

  // KS against the Beta(5.5, 0.5) law; the draws are Markov-dependent, so
  // the 1e-3 critical value uses the effective sample size n / IACT.
  const auto draws = post_burn(trace);
  const double dist = oracles::ks_distance(
      draws, [](double x) { return oracles::reg_inc_beta(5.5, 0.5, x); });
  const double n_eff = static_cast<double>(draws.size()) / iact(draws);
  CHECK(dist < 1.9495 / std::sqrt(n_eff));  // K_alpha for alpha = 1e-3
}

TEST_CASE("large |y| drives kappa to zero") {
  const PriorSpec prior1 = named_prior(NamedPrior::Prior1, 10);
  SamplerConfig cfg;
  cfg.seed = 12;
  cfg.iterations = 400000;  // the proposal rarely lands in the tiny live region
  std::vector<double> y(10, 0.0);
  y[0] = std::sqrt(2e4);  // w = |y|^2/2 = 1e4
  const ChainTrace trace = run_chain(prior1, y, cfg);
  const auto s = summarize_kappa(trace);
  CHECK(s.mean < 0.01);
  const double want = posterior_kappa_mean(prior1, 2e4);
  CHECK(std::fabs(s.mean - want) <= 3.0 * s.se);
}

TEST_CASE("identical seeds give bit-identical traces") {
  const PriorSpec prior2 = named_prior(NamedPrior::Prior2, 10);
  SamplerConfig cfg;
  cfg.seed = 99;
  cfg.iterations = 20000;
  cfg.rao_blackwell = false;
  std::vector<double> y(10, 1.0);
  const ChainTrace a = run_chain(prior2, y, cfg);
  const ChainTrace b = run_chain(prior2, y, cfg);
  CHECK(a.kappa_draws == b.kappa_draws);
  CHECK(a.beta_draws == b.beta_draws);
  CHECK(a.accept_count == b.accept_count);

  SamplerConfig other = cfg;
  other.chain_id = 1;
  CHECK(run_chain(prior2, y, other).kappa_draws != a.kappa_draws);
}

TEST_CASE("posterior_mean") {
  const PriorSpec prior1 = named_prior(NamedPrior::Prior1, 10);
  SamplerConfig cfg;
  cfg.seed = 13;

  const std::vector<double> zero(10, 0.0);
  for (double v : posterior_mean(run_chain(prior1, zero, cfg))) CHECK(v == 0.0);

  ChainTrace truncated = run_chain(prior1, zero, cfg);
  truncated.burn_in = truncated.iterations();
  CHECK_THROWS_AS(posterior_mean(truncated), DomainError);

  // |y| = 5: |y|^2 E[kappa|y] reproduces the quadrature shrinkage factor
  std::vector<double> y(10, 0.0);
  y[0] = 5.0;
  const ChainTrace trace = run_chain(prior1, y, cfg);
  const auto s = summarize_kappa(trace);
  CHECK(std::fabs(25.0 * s.mean - shrinkage_factor(prior1, 25.0)) <= 3.0 * 25.0 * s.se);
  CHECK(25.0 * s.mean == testutil::near(11.8073, 25.0 * 3.0 * s.se + 0.02));

  // beta_t records (1 - kappa_{t-1}) y: the mean must reconstruct exactly
  const auto mean = posterior_mean(trace);
  double kappa_bar = 0.0;
  for (std::uint64_t t = trace.burn_in; t < trace.iterations(); ++t) {
    kappa_bar += trace.kappa_draws[t - 1];
  }
  kappa_bar /= static_cast<double>(trace.iterations() - trace.burn_in);
  CHECK(mean[0] == testutil::near((1.0 - kappa_bar) * 5.0, 1e-9));
}

TEST_CASE("Rao-Blackwell and plain modes agree") {
  const PriorSpec prior2 = named_prior(NamedPrior::Prior2, 10);
  CounterRng rng = CounterRng::stream(501);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> y(10);
    for (double& v : y) v = 2.5 * rng.next_normal();

    SamplerConfig rb;
    rb.seed = 600 + static_cast<std::uint64_t>(rep);
    ChainTrace t_rb = run_chain(prior2, y, rb);
    SamplerConfig plain = rb;
    plain.rao_blackwell = false;
    plain.seed += 5000;
    ChainTrace t_pl = run_chain(prior2, y, plain);

    const auto m_rb = posterior_mean(t_rb);
    const auto m_pl = posterior_mean(t_pl);
    const auto s_rb = summarize_kappa(t_rb);

    // per-coordinate batch-means error for the plain chain
    const std::uint64_t m = t_pl.iterations() - t_pl.burn_in;
    const int nb = 50;
    const std::uint64_t bsize = m / nb;
    for (int i = 0; i < 10; ++i) {
      double ssq = 0.0;
      for (int bidx = 0; bidx < nb; ++bidx) {
        double bm = 0.0;
        for (std::uint64_t t = 0; t < bsize; ++t) {
          bm += t_pl.beta_at(t_pl.burn_in + static_cast<std::uint64_t>(bidx) * bsize + t)
                    [static_cast<size_t>(i)];
        }
        bm /= static_cast<double>(bsize);
        ssq += (bm - m_pl[static_cast<size_t>(i)]) * (bm - m_pl[static_cast<size_t>(i)]);
      }
      const double se_pl = std::sqrt(ssq / (nb * (nb - 1.0)));
      const double se_rb = std::fabs(y[static_cast<size_t>(i)]) * s_rb.se;
      const double tol = 3.0 * std::sqrt(se_pl * se_pl + se_rb * se_rb);
      CHECK(std::fabs(m_rb[static_cast<size_t>(i)] - m_pl[static_cast<size_t>(i)]) <= tol);
    }
  }
}

TEST_CASE("chain E[kappa|y] matches quadrature across the |y| grid") {
  for (NamedPrior name : {NamedPrior::Prior1, NamedPrior::Prior2}) {
    const PriorSpec spec = named_prior(name, 10);
    for (int yn = 0; yn <= 10; ++yn) {
      SamplerConfig cfg;
      cfg.seed = 700 + static_cast<std::uint64_t>(yn);
      cfg.chain_id = name == NamedPrior::Prior1 ? 0 : 1;
      std::vector<double> y(10, 0.0);
      y[0] = yn;
      const ChainTrace trace = run_chain(spec, y, cfg);
      const auto s = summarize_kappa(trace);
      const double want = posterior_kappa_mean(spec, static_cast<double>(yn) * yn);
      CHECK(std::fabs(s.mean - want) <= 3.0 * s.se);
      CHECK(trace.accept_rate() > 0.0);
      CHECK(trace.accept_rate() < 1.0);
    }
  }
}

TEST_CASE("detailed balance on a 50-bin discretization") {
  // At stationarity a reversible kernel makes the lagged pair counts
  // C(i,j) and C(j,i) exchangeable; Bowker's symmetry statistic is
  // approximately chi-square with one df per counted pair.
  const PriorSpec prior2 = named_prior(NamedPrior::Prior2, 10);
  SamplerConfig cfg;
  cfg.seed = 77;
  cfg.iterations = 200000;
  cfg.burn_in = 2000;
  std::vector<double> y(10, 0.0);
  y[0] = 3.0;
  const ChainTrace trace = run_chain(prior2, y, cfg);

  constexpr int kBins = 50;
  std::vector<std::vector<long>> counts(kBins, std::vector<long>(kBins, 0));
  auto bin = [](double kappa) {
    return std::min(kBins - 1, static_cast<int>(kappa * kBins));
  };
  for (std::uint64_t t = cfg.burn_in + 1; t < trace.iterations(); ++t) {
    counts[static_cast<size_t>(bin(trace.kappa_draws[t - 1]))]
          [static_cast<size_t>(bin(trace.kappa_draws[t]))]++;
  }
  double stat = 0.0;
  int df = 0;
  for (int i = 0; i < kBins; ++i) {
    for (int j = i + 1; j < kBins; ++j) {
      const double nij = static_cast<double>(counts[static_cast<size_t>(i)][static_cast<size_t>(j)]);
      const double nji = static_cast<double>(counts[static_cast<size_t>(j)][static_cast<size_t>(i)]);
      if (nij + nji >= 5.0) {
        stat += (nij - nji) * (nij - nji) / (nij + nji);
        ++df;
      }
    }
  }
  REQUIRE(df > 10);
  CHECK(stat < oracles::chi2_upper_quantile(df, 3.090232306167813));  // alpha = 1e-3
}

TEST_CASE("config validation") {
  const PriorSpec prior1 = named_prior(NamedPrior::Prior1, 10);
  const std::vector<double> y(10, 0.0);
  SamplerConfig bad;
  bad.burn_in = bad.iterations;
  CHECK_THROWS_AS(run_chain(prior1, y, bad), DomainError);
  SamplerConfig neg;
  neg.proposal_a = -1.0;
  CHECK_THROWS_AS(run_chain(prior1, y, neg), DomainError);
  SamplerConfig ok;
  CHECK_THROWS_AS(run_chain(prior1, std::vector<double>(3, 0.0), ok), DomainError);
  CHECK(resolved_proposal_a(prior1, ok) == testutil::near(std::max(prior1.a, 0.5), 0.0));
  const PriorSpec neg_a(10, -2.0, 0.5, HFamily::constant());
  CHECK(resolved_proposal_a(neg_a, ok) == 0.5);
}

}  // TEST_SUITE
