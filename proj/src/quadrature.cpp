#include "shrinkprior/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace shrinkprior {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

// Terms this far (in log) below the running maximum cannot move the sum at
// double precision; scanning stops after a few consecutive ones.
constexpr double kDropLog = 60.0;
constexpr int kDropRun = 4;
// A side truncated while still above this margin taints the convergence flag.
constexpr double kSignificantLog = 45.0;

double softplus(double x) {  // log(1 + e^x), stable both directions
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double log_cosh(double x) {
  const double ax = std::fabs(x);
  return ax - std::numbers::ln2 + std::log1p(std::exp(-2.0 * ax));
}

struct LogAccum {
  double max_log = -kInf;
  double scaled_sum = 0.0;  // sum of exp(term - max_log)

  void add(double x) {
    if (x == -kInf) return;
    if (x <= max_log) {
      scaled_sum += std::exp(x - max_log);
    } else {
      scaled_sum = scaled_sum * std::exp(max_log - x) + 1.0;
      max_log = x;
    }
  }
  double log() const {
    return scaled_sum > 0.0 ? max_log + std::log(scaled_sum) : -kInf;
  }
};

double log_add(double x, double y) {
  if (x == -kInf) return y;
  if (y == -kInf) return x;
  const double m = std::max(x, y);
  return m + std::log1p(std::exp(std::min(x, y) - m));
}

// ---------------------------------------------------------------------------
// tanh-sinh node geometry. kappa(t) = (1 + tanh((pi/2) sinh t))/2. A node at
// -t is the reflection of the node at +t, so only t >= 0 is tabulated.
// ---------------------------------------------------------------------------

struct DeNode {
  double kappa_pos;   // kappa(+t), rounds to 1 deep in the table
  double kappa_neg;   // kappa(-t) = 1 - kappa(+t)
  double log_k_pos;   // log kappa(+t)  == log(1-kappa) at -t
  double log_k_neg;   // log kappa(-t)  == log(1-kappa) at +t
  double log_jac;     // log dkappa/dt, even in t
};

DeNode make_node(double t) {
  const double u = (kPi / 2.0) * std::sinh(t);
  DeNode n;
  n.log_k_pos = -softplus(-2.0 * u);
  n.log_k_neg = -softplus(2.0 * u);
  n.kappa_pos = 1.0 / (1.0 + std::exp(-2.0 * u));
  n.kappa_neg = 1.0 / (1.0 + std::exp(2.0 * u));
  // dkappa/dt = (pi/4) cosh(t) sech^2(u)
  n.log_jac = std::log(kPi / 4.0) + log_cosh(t) - 2.0 * log_cosh(u);
  return n;
}

// Fixed tables cover |t| <= 9: endpoint exponents down to ~2e-3 keep their
// truncated tail below 1e-11 of the total. Smaller exponents take the
// adaptive path.
constexpr double kTableTmax = 9.0;
constexpr double kMinTabulatedExponent = 2e-3;

class DeTables {
 public:
  static const DeTables& instance() {
    static const DeTables tables;
    return tables;
  }

  // Level 0: t = 0, 1, ..., 9 (index j = t). Level m >= 1: t = (2j-1) 2^-m.
  const std::vector<DeNode>& level(int m) const { return levels_[static_cast<size_t>(m)]; }
  int max_level() const { return static_cast<int>(levels_.size()) - 1; }

 private:
  DeTables() {
    levels_.resize(13);
    auto& l0 = levels_[0];
    for (int j = 0; j <= static_cast<int>(kTableTmax); ++j) l0.push_back(make_node(j));
    for (int m = 1; m <= 12; ++m) {
      const double h = std::ldexp(1.0, -m);
      const int jmax = static_cast<int>(kTableTmax / (2.0 * h) + 0.5);
      auto& lv = levels_[static_cast<size_t>(m)];
      lv.reserve(static_cast<size_t>(jmax));
      for (int j = 1; j <= jmax; ++j) lv.push_back(make_node((2.0 * j - 1.0) * h));
    }
  }

  std::vector<std::vector<DeNode>> levels_;
};

void validate_config(const QuadConfig& cfg) {
  if (!(cfg.rel_tol > 0.0 && cfg.rel_tol <= 1e-4)) {
    throw DomainError("QuadConfig: rel_tol must lie in (0, 1e-4]");
  }
  if (cfg.max_levels < 4) throw DomainError("QuadConfig: max_levels must be >= 4");
}

// ---------------------------------------------------------------------------
// Fused log-integrand for the I_s(w) family, evaluated for I_s and I_{s+1}
// at once (the two differ by one factor of kappa).
// ---------------------------------------------------------------------------

struct PairAccum {
  LogAccum lo, hi;
  double peak = -kInf;  // running max of the I_s log-term, drives truncation
};

template <bool kBoth>
struct FamilyEval {
  double s, w, bm1;  // exponent, rate, b-1
  HKind kind;
  double c1, c2, c3, c4, d;

  explicit FamilyEval(const PriorSpec& spec, double s_, double w_)
      : s(s_), w(w_), bm1(spec.b - 1.0), kind(spec.h.kind), c1(spec.h.c1), c2(spec.h.c2),
        c3(spec.h.c3), c4(spec.h.c4), d(spec.h.d) {}

  // Returns the I_s log-term; accumulates into both sums.
  double eval(PairAccum& acc, double kappa, double log_k, double log_1mk,
              double log_jac) const {
    double lh = 0.0;
    if (kind == HKind::LogAdjusted) {
      lh = c2 * std::log1p(c1 * (-log_k));
    } else if (kind == HKind::HyperIB) {
      lh = c4 * std::log1p(c3 * kappa) + d * kappa;
    }
    const double base = s * log_k - kappa * w + bm1 * log_1mk + lh + log_jac;
    acc.lo.add(base);
    if constexpr (kBoth) acc.hi.add(base + log_k);
    if (base > acc.peak) acc.peak = base;
    return base;
  }
};

// Farthest |t| at which a significant term has been seen on one side, carried
// across levels: the live region of the integrand does not move as the mesh
// refines, so scanning may stop only beyond it.
struct SideState {
  double t_far = 0.0;
};

// Scan one side of a level outward from t = 0. Breaking is allowed only past
// the structural core |t| <= t_core (the exp(-kappa w) boundary layer can
// hide a narrow peak behind a >60-log valley that the run rule alone would
// mistake for the tail). Returns false if the side was cut off while terms
// were still significant (table exhausted / cap hit).
template <bool kBoth, class NodeAt>
bool scan_side(const FamilyEval<kBoth>& f, PairAccum& acc, int count, double t_core,
               SideState& st, const NodeAt& node_at) {
  int run = 0;
  double t = 0.0, last = -kInf;
  for (int j = 0; j < count; ++j) {
    double kappa, log_k, log_1mk, log_jac;
    node_at(j, t, kappa, log_k, log_1mk, log_jac);
    last = f.eval(acc, kappa, log_k, log_1mk, log_jac);
    if (last >= acc.peak - kDropLog) {
      run = 0;
      if (t > st.t_far) st.t_far = t;
    } else if (t >= 1.0 && t > t_core && t > st.t_far) {
      if (++run >= kDropRun) return true;
    } else {
      run = 0;
    }
  }
  return last < acc.peak - kSignificantLog;
}

// No-break core for the kappa -> 0 side: the exp(-kappa w) layer peaks near
// t = -asinh(log(w/s)/pi).
double left_core(double s, double w) {
  const double ratio = w / std::max(s, 0.5);
  if (!(ratio > std::numbers::e)) return 1.0;
  return std::min(3.2, std::asinh(std::log(ratio) / kPi) + 0.7);
}

struct DePairOut {
  double log_lo = -kInf, log_hi = -kInf;
  double est_rel_err = kInf;
  bool converged = false;
};

// Cached-table tanh-sinh for the I_s family. Requires s > -1 and both
// endpoint exponents above kMinTabulatedExponent.
template <bool kBoth>
DePairOut de_pair_tabulated(const PriorSpec& spec, double s, double w, const QuadConfig& cfg) {
  const auto& tables = DeTables::instance();
  const FamilyEval<kBoth> f(spec, s, w);
  PairAccum acc;
  SideState pos_state, neg_state;
  const double neg_core = left_core(s, w);
  bool clean = true;

  // Level 0, h = 1: node j = 0 is t = 0; each j > 0 contributes both signs.
  {
    const auto& nodes = tables.level(0);
    clean &= scan_side<kBoth>(f, acc, static_cast<int>(nodes.size()), 1.0, pos_state,
                              [&](int j, double& t, double& k, double& lk, double& l1k, double& lj) {
                                const DeNode& n = nodes[static_cast<size_t>(j)];
                                t = j;
                                k = n.kappa_pos, lk = n.log_k_pos, l1k = n.log_k_neg, lj = n.log_jac;
                              });
    clean &= scan_side<kBoth>(f, acc, static_cast<int>(nodes.size()) - 1, neg_core, neg_state,
                              [&](int j, double& t, double& k, double& lk, double& l1k, double& lj) {
                                const DeNode& n = nodes[static_cast<size_t>(j + 1)];
                                t = j + 1;
                                k = n.kappa_neg, lk = n.log_k_neg, l1k = n.log_k_pos, lj = n.log_jac;
                              });
  }

  double log_lo = acc.lo.log();
  double log_hi = kBoth ? acc.hi.log() : -kInf;

  DePairOut out;
  double prev_err = kInf;
  const int deepest = std::min(cfg.max_levels, tables.max_level());
  for (int m = 1; m <= deepest; ++m) {
    const double h = std::ldexp(1.0, -m);
    const auto& nodes = tables.level(m);
    PairAccum lv;
    lv.peak = acc.peak;
    clean &= scan_side<kBoth>(f, lv, static_cast<int>(nodes.size()), 1.0, pos_state,
                              [&](int j, double& t, double& k, double& lk, double& l1k, double& lj) {
                                const DeNode& n = nodes[static_cast<size_t>(j)];
                                t = (2.0 * j + 1.0) * h;
                                k = n.kappa_pos, lk = n.log_k_pos, l1k = n.log_k_neg, lj = n.log_jac;
                              });
    clean &= scan_side<kBoth>(f, lv, static_cast<int>(nodes.size()), neg_core, neg_state,
                              [&](int j, double& t, double& k, double& lk, double& l1k, double& lj) {
                                const DeNode& n = nodes[static_cast<size_t>(j)];
                                t = (2.0 * j + 1.0) * h;
                                k = n.kappa_neg, lk = n.log_k_neg, l1k = n.log_k_pos, lj = n.log_jac;
                              });
    acc.peak = lv.peak;

    // T_m = T_{m-1}/2 + h * (new-node sum), assembled in log space.
    const double new_lo = log_add(log_lo - std::numbers::ln2, std::log(h) + lv.lo.log());
    const double new_hi =
        kBoth ? log_add(log_hi - std::numbers::ln2, std::log(h) + lv.hi.log()) : -kInf;

    const double err = std::fabs(std::expm1(new_lo - log_lo));
    log_lo = new_lo;
    log_hi = new_hi;
    out.est_rel_err = err;
    if (m >= 2 && ((err <= cfg.rel_tol && prev_err <= cfg.rel_tol) ||
                   log_lo < std::log(cfg.abs_tol))) {
      out.converged = true;
      break;
    }
    prev_err = err;
  }

  out.log_lo = log_lo;
  out.log_hi = log_hi;
  out.converged = out.converged && clean;
  return out;
}

// ---------------------------------------------------------------------------
// Adaptive tanh-sinh for integrands kappa^s (1-kappa)^(b-1) exp(g(kappa)):
// node geometry computed on the fly, sides extended until the terms die out.
// Handles the s = -1 boundary case (integrand decays only single-
// exponentially in t, far past the tables) and endpoint exponents too small
// for them.
//
// Deep in a tail both the power factor and the jacobian are ~exp(+-2u) with
// 2u up to ~1e300; forming them separately and adding loses everything below
// ulp(2u). The power-and-jacobian product is therefore assembled from the
// identity softplus(2u) - 2 log cosh(u) = -log1p(e^{-2u}):
//   t < 0:  s log k + (b-1) log(1-k) + log jac
//         = -(s+1) softplus(2u) - log1p(e^{-2u}) + log pi + log cosh t
//           + (b-1) log(1-k)                       [log(1-k) ~ 0 there]
//   t > 0:  the mirror image with b in place of s+1.
// ---------------------------------------------------------------------------

constexpr double kAdaptiveTmaxCap = 690.0;  // sinh overflows shortly beyond

template <class ExtraF>
DePairOut de_adaptive(double s, double b, const ExtraF& log_g, const QuadConfig& cfg) {
  struct Acc {
    LogAccum sum;
    double peak = -kInf;
  } acc;
  SideState pos_state, neg_state;
  constexpr double kCore = 3.5;  // cold path: keep the whole layer zone
  bool clean = true;

  auto eval_at = [&](Acc& a, double t) {
    const double u = (kPi / 2.0) * std::sinh(std::fabs(t));
    const double sp2u = softplus(2.0 * u);          // = -log of the vanishing side
    const double l1pe = std::log1p(std::exp(-2.0 * u));
    const double base = std::log(kPi) + log_cosh(t) - l1pe;
    double term;
    if (t < 0.0) {
      const double log_k = -sp2u;
      const double log_1mk = -l1pe;
      const double kappa = 1.0 / (1.0 + std::exp(2.0 * u));
      term = base - (s + 1.0) * sp2u + (b - 1.0) * log_1mk + log_g(kappa, log_k, log_1mk);
    } else {
      const double log_k = -l1pe;
      const double log_1mk = -sp2u;
      const double kappa = 1.0 / (1.0 + std::exp(-2.0 * u));
      term = base - b * sp2u + s * log_k + log_g(kappa, log_k, log_1mk);
    }
    if (std::isnan(term)) term = -kInf;
    a.sum.add(term);
    if (term > a.peak) a.peak = term;
    return term;
  };

  auto scan = [&](Acc& a, double h, double start, double dir, bool odd_only, SideState& st) {
    int run = 0;
    double t = start;
    while (std::fabs(t) <= kAdaptiveTmaxCap) {
      const double term = eval_at(a, t);
      const double at = std::fabs(t);
      if (term >= a.peak - kDropLog) {
        run = 0;
        if (at > st.t_far) st.t_far = at;
      } else if (at >= kCore && at > st.t_far) {
        if (++run >= kDropRun) return true;
      } else {
        run = 0;
      }
      t += dir * (odd_only ? 2.0 * h : h);
    }
    return false;  // cap hit with live terms
  };

  // Level 0, h = 1.
  eval_at(acc, 0.0);
  clean &= scan(acc, 1.0, 1.0, +1.0, false, pos_state);
  clean &= scan(acc, 1.0, -1.0, -1.0, false, neg_state);
  double log_sum = acc.sum.log();

  DePairOut out;
  double prev_err = kInf;
  for (int m = 1; m <= cfg.max_levels; ++m) {
    const double h = std::ldexp(1.0, -m);
    Acc lv;
    lv.peak = acc.peak;
    clean &= scan(lv, h, h, +1.0, true, pos_state);
    clean &= scan(lv, h, -h, -1.0, true, neg_state);
    acc.peak = lv.peak;

    const double next = log_add(log_sum - std::numbers::ln2, std::log(h) + lv.sum.log());
    const double err = std::fabs(std::expm1(next - log_sum));
    log_sum = next;
    out.est_rel_err = err;
    if (m >= 2 && ((err <= cfg.rel_tol && prev_err <= cfg.rel_tol) ||
                   log_sum < std::log(cfg.abs_tol))) {
      out.converged = true;
      break;
    }
    prev_err = err;
  }

  out.log_lo = log_sum;
  out.converged = out.converged && clean;
  return out;
}

// ---------------------------------------------------------------------------
// Gauss-Jacobi composite cross-check scheme.
// ---------------------------------------------------------------------------

// Symmetric tridiagonal QL with implicit shifts, tracking first eigenvector
// components (Golub-Welsch). diag/offdiag are consumed.
void tridiag_eigen(std::vector<double>& diag, std::vector<double>& offdiag,
                   std::vector<double>& first_row) {
  const int n = static_cast<int>(diag.size());
  offdiag.push_back(0.0);
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::fabs(diag[m]) + std::fabs(diag[m + 1]);
        if (std::fabs(offdiag[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) throw std::runtime_error("gauss_jacobi_rule: QL failed to converge");
        double g = (diag[l + 1] - diag[l]) / (2.0 * offdiag[l]);
        double r = std::hypot(g, 1.0);
        g = diag[m] - diag[l] + offdiag[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (int i = m - 1; i >= l; --i) {
          double f = s * offdiag[i];
          const double b = c * offdiag[i];
          r = std::hypot(f, g);
          offdiag[i + 1] = r;
          if (r == 0.0) {
            diag[i + 1] -= p;
            offdiag[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = diag[i + 1] - p;
          r = (diag[i] - g) * s + 2.0 * c * b;
          p = s * r;
          diag[i + 1] = g + p;
          g = c * r - b;
          f = first_row[i + 1];
          first_row[i + 1] = s * first_row[i] + c * f;
          first_row[i] = c * first_row[i] - s * f;
        }
        if (underflow) continue;
        diag[l] -= p;
        offdiag[l] = g;
        offdiag[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

namespace detail {

JacobiRule gauss_jacobi_rule(int n, double alpha, double beta) {
  if (n < 1) throw DomainError("gauss_jacobi_rule: n must be >= 1");
  if (!(alpha > -1.0) || !(beta > -1.0)) {
    throw DomainError("gauss_jacobi_rule: alpha, beta must exceed -1");
  }
  const double ab = alpha + beta;
  std::vector<double> diag(static_cast<size_t>(n)), off;
  diag[0] = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double den = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
    diag[static_cast<size_t>(k)] = (beta * beta - alpha * alpha) / den;
  }
  off.resize(static_cast<size_t>(n - 1));
  if (n > 1) {
    off[0] = std::sqrt(4.0 * (alpha + 1.0) * (beta + 1.0) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0)));
  }
  for (int k = 2; k < n; ++k) {
    const double t = 2.0 * k + ab;
    off[static_cast<size_t>(k - 1)] =
        std::sqrt(4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (t * t * (t + 1.0) * (t - 1.0)));
  }
  std::vector<double> first(static_cast<size_t>(n), 0.0);
  first[0] = 1.0;
  tridiag_eigen(diag, off, first);

  std::vector<int> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return diag[static_cast<size_t>(i)] < diag[static_cast<size_t>(j)];
  });

  const double log_mu0 = (ab + 1.0) * std::numbers::ln2 + std::lgamma(alpha + 1.0) +
                         std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0);
  JacobiRule rule;
  rule.nodes.reserve(static_cast<size_t>(n));
  rule.log_weights.reserve(static_cast<size_t>(n));
  for (int idx : order) {
    rule.nodes.push_back(diag[static_cast<size_t>(idx)]);
    rule.log_weights.push_back(log_mu0 +
                               2.0 * std::log(std::fabs(first[static_cast<size_t>(idx)])));
  }
  return rule;
}

IntegralResult de_log_integrate_power(double s, double b, const LogIntegrand& log_g,
                                      const QuadConfig& cfg) {
  validate_config(cfg);
  const auto r = de_adaptive(s, b, log_g, cfg);
  return {r.log_lo, r.est_rel_err, r.converged};
}

}  // namespace detail

namespace {

void validate_weighted(const PriorSpec& spec, double s, double w) {
  if (!(spec.b > 0.0)) throw IntegrabilityError("weighted integral: requires b > 0");
  if (!(w >= 0.0)) throw DomainError("weighted integral: w must be >= 0");
  if (s > -1.0) return;
  if (s == -1.0 && aux_integral_convergent(spec.h)) return;  // boundary: int k^-1 h finite
  throw IntegrabilityError("weighted integral: kappa^s not integrable at 0 for s <= -1");
}

template <bool kBoth>
DePairOut de_dispatch(const PriorSpec& spec, double s, double w, const QuadConfig& cfg) {
  if (s > -1.0 && std::min(s + 1.0, spec.b) >= kMinTabulatedExponent) {
    return de_pair_tabulated<kBoth>(spec, s, w, cfg);
  }
  // Boundary / extreme-exponent cases: adaptive geometry. I_{s+1} (when
  // requested) is integrated in a second pass.
  const PriorSpec& sp = spec;
  auto g = [&sp, w](double kappa, double log_k, double) {
    return -kappa * w + sp.h.log_h(kappa, log_k);
  };
  DePairOut out = de_adaptive(s, spec.b, g, cfg);
  if constexpr (kBoth) {
    const DePairOut hi = de_adaptive(s + 1.0, spec.b, g, cfg);
    out.log_hi = hi.log_lo;
    out.est_rel_err = std::max(out.est_rel_err, hi.est_rel_err);
    out.converged = out.converged && hi.converged;
  }
  return out;
}

// Composite Gauss-Jacobi: dedicated endpoint panels with the exact algebraic
// weights, geometric panels through the kappa^s scale, then panels sized so
// exp(-kappa w) varies at most ~e^-15 per panel.
template <bool kBoth>
DePairOut gj_pair(const PriorSpec& spec, double s, double w, const QuadConfig& cfg, int n) {
  const FamilyEval<kBoth> f(spec, s, w);
  PairAccum acc;

  const double x_left = std::min(0.25, 1.0 / (1.0 + w));
  const double x_right = 0.75;

  // Left panel [0, x_left], weight (1+x)^s after kappa = x_left (1+x)/2.
  {
    const auto rule = detail::gauss_jacobi_rule(n, 0.0, s);
    const double log_half = std::log(x_left / 2.0);
    for (int i = 0; i < n; ++i) {
      const double kappa = x_left * (1.0 + rule.nodes[static_cast<size_t>(i)]) / 2.0;
      const double log_k = log_half + std::log1p(rule.nodes[static_cast<size_t>(i)]);
      const double log_1mk = std::log1p(-kappa);
      // the rule weight already carries kappa^s; add it back out of the term
      const double lw = (s + 1.0) * log_half + rule.log_weights[static_cast<size_t>(i)];
      f.eval(acc, kappa, log_k, log_1mk, lw - s * log_k);
    }
  }

  // Interior: geometric panels out of the left scale, then uniform panels
  // sized against the fastest exponential rate (exp(-kappa w) and, for
  // HyperIB, exp(d kappa)).
  {
    const auto rule = detail::gauss_jacobi_rule(n, 0.0, 0.0);
    std::vector<double> cuts{x_left};
    double x = x_left;
    const double rate = std::max(w, spec.h.kind == HKind::HyperIB ? std::fabs(spec.h.d) : 0.0);
    const double step = 15.0 / std::max(rate, 1.0);
    while (x < x_right && cuts.size() < 6000) {
      // geometric while the kappa^s scale dominates, then uniform in kappa*w
      x = std::min(x_right, std::min(2.0 * x, x + step));
      cuts.push_back(x);
    }
    for (size_t pnl = 0; pnl + 1 < cuts.size(); ++pnl) {
      const double lo = cuts[pnl], hi = cuts[pnl + 1];
      const double half = (hi - lo) / 2.0, mid = (hi + lo) / 2.0;
      const double log_half = std::log(half);
      for (int i = 0; i < n; ++i) {
        const double kappa = mid + half * rule.nodes[static_cast<size_t>(i)];
        f.eval(acc, kappa, std::log(kappa), std::log1p(-kappa),
               log_half + rule.log_weights[static_cast<size_t>(i)]);
      }
    }
  }

  // Right panel [x_right, 1], weight (1-x)^(b-1) after 1-kappa = l (1-x)/2.
  {
    const auto rule = detail::gauss_jacobi_rule(n, spec.b - 1.0, 0.0);
    const double ell = 1.0 - x_right;
    const double log_half = std::log(ell / 2.0);
    for (int i = 0; i < n; ++i) {
      const double one_m = ell * (1.0 - rule.nodes[static_cast<size_t>(i)]) / 2.0;
      const double kappa = 1.0 - one_m;
      const double log_1mk = log_half + std::log1p(-rule.nodes[static_cast<size_t>(i)]);
      const double lw = spec.b * log_half + rule.log_weights[static_cast<size_t>(i)];
      f.eval(acc, kappa, std::log(kappa), log_1mk, lw - (spec.b - 1.0) * log_1mk);
    }
  }

  DePairOut out;
  out.log_lo = acc.lo.log();
  out.log_hi = kBoth ? acc.hi.log() : -kInf;
  (void)cfg;
  return out;
}

template <bool kBoth>
DePairOut gj_dispatch(const PriorSpec& spec, double s, double w, const QuadConfig& cfg) {
  if (!(s > -1.0)) {
    // The boundary integrand is not a Jacobi weight; it always goes through
    // the double-exponential path.
    return de_dispatch<kBoth>(spec, s, w, cfg);
  }
  const DePairOut coarse = gj_pair<kBoth>(spec, s, w, cfg, 40);
  DePairOut fine = gj_pair<kBoth>(spec, s, w, cfg, 56);
  fine.est_rel_err = std::fabs(std::expm1(coarse.log_lo - fine.log_lo));
  fine.converged = fine.est_rel_err <= cfg.rel_tol;
  return fine;
}

}  // namespace

IntegralResult weighted_integral(const PriorSpec& spec, double s, double w,
                                 const QuadConfig& cfg) {
  validate_config(cfg);
  validate_weighted(spec, s, w);
  const DePairOut r = cfg.scheme == QuadScheme::GaussJacobiComposite
                          ? gj_dispatch<false>(spec, s, w, cfg)
                          : de_dispatch<false>(spec, s, w, cfg);
  return {r.log_lo, r.est_rel_err, r.converged};
}

IntegralPair weighted_integral_pair(const PriorSpec& spec, double s, double w,
                                    const QuadConfig& cfg) {
  validate_config(cfg);
  validate_weighted(spec, s, w);
  const DePairOut r = cfg.scheme == QuadScheme::GaussJacobiComposite
                          ? gj_dispatch<true>(spec, s, w, cfg)
                          : de_dispatch<true>(spec, s, w, cfg);
  return {r.log_lo, r.log_hi, r.est_rel_err, r.converged};
}

double log_marginal(const PriorSpec& spec, double y_norm_sq, const QuadConfig& cfg) {
  if (!(y_norm_sq >= 0.0)) throw DomainError("log_marginal: |y|^2 must be >= 0");
  const double s = spec.p / 2.0 + spec.a - 1.0;
  const auto res = weighted_integral(spec, s, y_norm_sq / 2.0, cfg);
  return -(spec.p / 2.0) * std::log(2.0 * kPi) + res.log_value;
}

}  // namespace shrinkprior
