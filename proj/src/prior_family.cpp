#include "shrinkprior/prior_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shrinkprior/quadrature.hpp"

namespace shrinkprior {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamped_log(double kappa) {
  return std::log(std::max(kappa, detail::kLogClampLo));
}

double clamped_log1m(double kappa) {
  return std::log1p(-std::min(kappa, detail::kLogClampHi));
}

void require_open_unit(double kappa, const char* who) {
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw DomainError(std::string(who) + ": kappa must lie in (0,1)");
  }
}

}  // namespace

HFamily HFamily::constant() { return HFamily{}; }

HFamily HFamily::log_adjusted(double c1, double c2) {
  if (!(c1 > 0.0)) throw DomainError("LogAdjusted requires c1 > 0");
  HFamily h;
  h.kind = HKind::LogAdjusted;
  h.c1 = c1;
  h.c2 = c2;
  return h;
}

HFamily HFamily::hyper_ib(double c3, double c4, double d) {
  if (!(c3 > 0.0)) throw DomainError("HyperIB requires c3 > 0");
  HFamily h;
  h.kind = HKind::HyperIB;
  h.c3 = c3;
  h.c4 = c4;
  h.d = d;
  return h;
}

double HFamily::log_h(double kappa, double log_kappa) const {
  switch (kind) {
    case HKind::Constant:
      return 0.0;
    case HKind::LogAdjusted:
      // h = (1 + c1*log(1/k))^c2; log(1/k) = -log k stays accurate near both
      // endpoints as long as the caller passes a good log k.
      return c2 * std::log1p(c1 * (-log_kappa));
    case HKind::HyperIB:
      return c4 * std::log1p(c3 * kappa) + d * kappa;
  }
  return 0.0;
}

double HFamily::log_h(double kappa) const { return log_h(kappa, clamped_log(kappa)); }

PriorSpec::PriorSpec(int p_, double a_, double b_, HFamily h_) : p(p_), a(a_), b(b_), h(h_) {
  if (p < 1) throw DomainError("PriorSpec: p must be a positive integer");
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("PriorSpec: a, b must be finite");
  if (!(b > 0.0)) throw DomainError("PriorSpec: b must be positive");
}

const char* to_string(Propriety v) {
  switch (v) {
    case Propriety::Proper: return "Proper";
    case Propriety::ProperBoundary: return "ProperBoundary";
    case Propriety::Improper: return "Improper";
  }
  return "?";
}

double log_prior_kappa(const PriorSpec& spec, double kappa) {
  require_open_unit(kappa, "log_prior_kappa");
  const double lk = clamped_log(kappa);
  const double l1k = clamped_log1m(kappa);
  return (spec.a - 1.0) * lk + (spec.b - 1.0) * l1k + spec.h.log_h(kappa, lk);
}

double h_logratio(const HFamily& h, double kappa_new, double kappa_old) {
  require_open_unit(kappa_new, "h_logratio");
  require_open_unit(kappa_old, "h_logratio");
  switch (h.kind) {
    case HKind::Constant:
      return 0.0;
    case HKind::LogAdjusted:
      return h.c2 * (std::log1p(h.c1 * (-std::log(kappa_new))) -
                     std::log1p(h.c1 * (-std::log(kappa_old))));
    case HKind::HyperIB:
      return h.c4 * (std::log1p(h.c3 * kappa_new) - std::log1p(h.c3 * kappa_old)) +
             h.d * (kappa_new - kappa_old);
  }
  return 0.0;
}

double big_H(const HFamily& h, double kappa) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw DomainError("big_H: kappa must lie in [0,1]");
  switch (h.kind) {
    case HKind::Constant:
      return 0.0;
    case HKind::LogAdjusted:
      if (kappa == 0.0) return 0.0;  // H(0) = 0: log(1/k) -> infinity
      return -h.c2 * h.c1 / (1.0 + h.c1 * (-std::log(kappa)));
    case HKind::HyperIB:
      return h.d * kappa + h.c4 * h.c3 * kappa / (1.0 + h.c3 * kappa);
  }
  return 0.0;
}

HMonotonicity h_monotonicity(const HFamily& h) {
  switch (h.kind) {
    case HKind::Constant:
      return HMonotonicity::NonIncreasing;  // H == 0
    case HKind::LogAdjusted:
      // H(k) = -c2 * c1/(1 + c1 log(1/k)) runs from 0 at k=0 to -c1*c2 at k=1.
      return h.c2 >= 0.0 ? HMonotonicity::NonIncreasing : HMonotonicity::NonDecreasing;
    case HKind::HyperIB: {
      // Regimes where H'(k) = d + c4*c3/(1+c3*k)^2 keeps one sign on [0,1].
      const double lo = -h.d / h.c3;
      const double hi = -(h.c3 + 1.0) * (h.c3 + 1.0) * h.d / h.c3;
      if (h.d >= 0.0) {
        if (h.c4 <= hi) return HMonotonicity::NonIncreasing;
        if (h.c4 >= lo) return HMonotonicity::NonDecreasing;
      } else {
        if (h.c4 <= lo) return HMonotonicity::NonIncreasing;
        if (h.c4 > hi) return HMonotonicity::NonDecreasing;
      }
      return HMonotonicity::Unknown;
    }
  }
  return HMonotonicity::Unknown;
}

namespace {

// Running infimum of H over the uniform fallback grid, inclusive of H(0) = 0.
std::vector<double> h_running_min(const HFamily& h) {
  const int n = detail::kHGridPoints;
  std::vector<double> runmin(static_cast<size_t>(n));
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    const double kappa = static_cast<double>(i) / (n - 1);
    m = std::min(m, big_H(h, kappa));
    runmin[static_cast<size_t>(i)] = m;
  }
  return runmin;
}

double grid_H1(const HFamily& h, const std::vector<double>& runmin, double kappa) {
  const int n = detail::kHGridPoints;
  const int idx = std::min(n - 1, static_cast<int>(kappa * (n - 1)));
  return std::min(runmin[static_cast<size_t>(idx)], std::min(0.0, big_H(h, kappa)));
}

}  // namespace

std::pair<double, double> H1_H2(const HFamily& h, double kappa) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw DomainError("H1_H2: kappa must lie in [0,1]");
  const double H = big_H(h, kappa);
  switch (h_monotonicity(h)) {
    case HMonotonicity::NonIncreasing:
      return {H, 0.0};
    case HMonotonicity::NonDecreasing:
      return {0.0, H};
    case HMonotonicity::Unknown: {
      const auto runmin = h_running_min(h);
      const double H1 = grid_H1(h, runmin, kappa);
      return {H1, H - H1};
    }
  }
  return {H, 0.0};
}

HExtrema h_extrema(const HFamily& h) {
  switch (h_monotonicity(h)) {
    case HMonotonicity::NonIncreasing:
      return {0.0, big_H(h, 1.0)};
    case HMonotonicity::NonDecreasing:
      return {big_H(h, 1.0), 0.0};
    case HMonotonicity::Unknown:
      return h_extrema_grid(h);
  }
  return {0.0, 0.0};
}

HExtrema h_extrema_grid(const HFamily& h) {
  const int n = detail::kHGridPoints;
  const auto runmin = h_running_min(h);

  double best = -kInf;
  int best_i = 0;
  for (int i = 0; i < n; ++i) {
    const double kappa = static_cast<double>(i) / (n - 1);
    const double H2 = big_H(h, kappa) - runmin[static_cast<size_t>(i)];
    if (H2 > best) {
      best = H2;
      best_i = i;
    }
  }

  // Local golden-section refinement around the grid argmax. Under-estimating
  // max H2 would over-claim minimaxity, so polish the bracket.
  const double step = 1.0 / (n - 1);
  double lo = std::max(0.0, (best_i - 1) * step);
  double hi = std::min(1.0, (best_i + 1) * step);
  auto g = [&](double kappa) { return big_H(h, kappa) - grid_H1(h, runmin, kappa); };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  for (int it = 0; it < 50; ++it) {
    if (g1 < g2) {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + inv_phi * (hi - lo);
      g2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - inv_phi * (hi - lo);
      g1 = g(x1);
    }
  }
  best = std::max(best, std::max(g1, g2));

  return {best, runmin[static_cast<size_t>(n - 1)]};
}

bool aux_integral_convergent(const HFamily& h) {
  // int_0^1 k^{-1} h(k) dk: with h(0) = 1 for Constant/HyperIB the integral
  // diverges; LogAdjusted gives int_1^inf (1+c1 t)^{c2} dt, finite iff c2 < -1.
  return h.kind == HKind::LogAdjusted && h.c2 < -1.0;
}

ProprietyReport classify_propriety(const PriorSpec& spec) {
  ProprietyReport rep;

  if (spec.a > 0.0) {
    rep.prior_proper = Propriety::Proper;
    rep.reason = "prior proper: a > 0";
  } else if (spec.a == 0.0 && aux_integral_convergent(spec.h)) {
    rep.prior_proper = Propriety::ProperBoundary;
    rep.reason = "prior proper at the boundary: a = 0 with int k^-1 h(k) dk finite";
  } else {
    rep.prior_proper = Propriety::Improper;
    rep.reason = spec.a == 0.0 ? "prior improper: a = 0 and int k^-1 h(k) dk diverges"
                               : "prior improper: a < 0";
  }

  const double shifted = spec.a + spec.p / 2.0;
  if (shifted > 0.0) {
    rep.marginal_finite = Propriety::Proper;
    rep.reason += "; marginal finite: a > -p/2";
  } else if (shifted == 0.0 && aux_integral_convergent(spec.h)) {
    rep.marginal_finite = Propriety::ProperBoundary;
    rep.reason += "; marginal finite at the boundary: a = -p/2 with int k^-1 h(k) dk finite";
  } else {
    rep.marginal_finite = Propriety::Improper;
    rep.reason += shifted == 0.0 ? "; marginal infinite: a = -p/2 and int k^-1 h(k) dk diverges"
                                 : "; marginal infinite: a < -p/2";
  }
  return rep;
}

double log_prior_beta(const PriorSpec& spec, std::span<const double> beta) {
  if (static_cast<int>(beta.size()) != spec.p) {
    throw DomainError("log_prior_beta: beta must have length p");
  }
  double norm_sq = 0.0;
  for (double x : beta) norm_sq += x * x;

  const double half_p = spec.p / 2.0;
  const double e0 = half_p + spec.a;  // kappa exponent + 1 at the origin end

  // Divergence at kappa = 0: integrand ~ k^{p/2+a-1} h(k).
  if (e0 < 0.0 || (e0 == 0.0 && !aux_integral_convergent(spec.h))) return kInf;
  // Divergence at kappa = 1: for beta = 0 the Gaussian factor is 1 and the
  // integrand ~ (1-k)^{b-1-p/2}.
  if (norm_sq == 0.0 && !(spec.b - half_p > 0.0)) return kInf;

  const double r = norm_sq / 2.0;
  const double c = -half_p * std::log(2.0 * std::acos(-1.0));
  const PriorSpec& sp = spec;
  auto log_g = [&sp, r](double kappa, double log_k, double log_1mk) {
    double t = 0.0;
    if (r > 0.0) {
      const double odds = std::exp(log_k - log_1mk);  // kappa/(1-kappa)
      t = -odds * r;
      if (std::isnan(t)) t = -kInf;  // odds overflowed; the tail is dead anyway
    }
    return t + sp.h.log_h(kappa, log_k);
  };

  // integrand = kappa^(p/2+a-1) (1-kappa)^(b-p/2-1) exp(log_g)
  QuadConfig cfg;
  const auto res =
      detail::de_log_integrate_power(half_p + spec.a - 1.0, spec.b - half_p, log_g, cfg);
  return c + res.log_value;
}

}  // namespace shrinkprior
