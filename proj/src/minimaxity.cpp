#include "shrinkprior/minimaxity.hpp"

#include <cmath>

namespace shrinkprior {

namespace {

constexpr double kBoundaryGuard = 1e-9;

void require_certifiable(const PriorSpec& spec) {
  if (!spec.u_shaped()) {
    throw RelaxedSpecError("minimaxity checks cover only a < 1 and 0 < b < 1");
  }
}

bool a_in_range(const PriorSpec& spec) {
  return spec.a >= -spec.p / 2.0 && spec.a < spec.p / 2.0 - 2.0;
}

// Verdict from a margin, applying the never-round-up boundary rule.
void settle(MinimaxReport& rep, bool hypotheses_ok) {
  if (!hypotheses_ok) {
    rep.verdict = MinimaxVerdict::NotProvenByTheseConditions;
    return;
  }
  if (rep.margin >= 0.0) {
    rep.verdict = MinimaxVerdict::ProvenMinimax;
  } else {
    rep.verdict = MinimaxVerdict::NotProvenByTheseConditions;
    if (rep.margin >= -kBoundaryGuard) {
      rep.details += (rep.details.empty() ? "" : "; ");
      rep.details += "numerically at boundary (margin within 1e-9 of 0)";
    }
  }
}

MinimaxRule part1_rule(HKind kind) {
  switch (kind) {
    case HKind::Constant: return MinimaxRule::Cor1_1;
    case HKind::LogAdjusted: return MinimaxRule::Cor2_1;
    case HKind::HyperIB: return MinimaxRule::Cor3_1;
  }
  return MinimaxRule::Cor1_1;
}

MinimaxRule part2_rule(HKind kind) {
  switch (kind) {
    case HKind::Constant: return MinimaxRule::Cor1_2;
    case HKind::LogAdjusted: return MinimaxRule::Cor2_2;
    case HKind::HyperIB: return MinimaxRule::Cor3_2;
  }
  return MinimaxRule::Cor1_2;
}

}  // namespace

const char* to_string(MinimaxVerdict v) {
  return v == MinimaxVerdict::ProvenMinimax ? "ProvenMinimax" : "NotProvenByTheseConditions";
}

const char* to_string(MinimaxRule r) {
  switch (r) {
    case MinimaxRule::Thm1: return "Thm1";
    case MinimaxRule::Cor1_1: return "Cor1_1";
    case MinimaxRule::Cor1_2: return "Cor1_2";
    case MinimaxRule::Cor2_1: return "Cor2_1";
    case MinimaxRule::Cor2_2: return "Cor2_2";
    case MinimaxRule::Cor3_1: return "Cor3_1";
    case MinimaxRule::Cor3_2: return "Cor3_2";
  }
  return "?";
}

MinimaxReport check_theorem1(const PriorSpec& spec) {
  require_certifiable(spec);
  const double p = spec.p, a = spec.a, b = spec.b;

  const HExtrema ex = h_extrema(spec.h);
  const double penalty = std::min(0.0, p / 2.0 + a + 2.0 + ex.H1_at_1);
  const double numer = p + 2.0 * a + 2.0 + 2.0 * ex.max_H2;

  MinimaxReport rep;
  rep.rule = MinimaxRule::Thm1;
  rep.margin = 1.5 * p + a - numer / b + penalty;
  if (const double den = 1.5 * p + a + penalty; den > 0.0) {
    rep.b_threshold = numer / den;
  }

  bool ok = true;
  if (!a_in_range(spec)) {
    ok = false;
    rep.details = "requires -p/2 <= a < p/2 - 2";
  }
  settle(rep, ok);
  return rep;
}

MinimaxReport check_corollary1(const PriorSpec& spec) {
  require_certifiable(spec);
  const double p = spec.p, a = spec.a, b = spec.b;

  const HMonotonicity mono = h_monotonicity(spec.h);
  if (mono == HMonotonicity::Unknown) {
    throw CorollaryInapplicableError("corollary requires H monotone on [0,1]");
  }
  const double H_at_1 = big_H(spec.h, 1.0);

  MinimaxReport rep;
  bool ok = a_in_range(spec);
  if (!ok) rep.details = "requires -p/2 <= a < p/2 - 2";

  if (mono == HMonotonicity::NonIncreasing) {
    rep.rule = part1_rule(spec.h.kind);
    rep.b_threshold = (p + 2.0 * a + 2.0) / (1.5 * p + a);
    if (H_at_1 < -(p / 2.0 + a + 2.0)) {
      ok = false;
      rep.details = "H(1) < -(p/2+a+2); part 1 hypothesis fails";
    }
  } else {
    rep.rule = part2_rule(spec.h.kind);
    rep.b_threshold = (p + 2.0 * a + 2.0 + 2.0 * H_at_1) / (1.5 * p + a);
    if (!(H_at_1 < (p / 2.0 - a - 2.0) / 2.0)) {
      ok = false;
      rep.details = "H(1) >= (p/2-a-2)/2; part 2 hypothesis fails";
    }
  }
  rep.margin = b - *rep.b_threshold;
  settle(rep, ok);
  return rep;
}

MinimaxReport check_hyper_ib(const PriorSpec& spec) {
  if (spec.h.kind != HKind::HyperIB) {
    throw DomainError("check_hyper_ib: spec must carry a HyperIB family");
  }
  require_certifiable(spec);
  if (h_monotonicity(spec.h) == HMonotonicity::Unknown) {
    // Outside both monotone regimes of the (d, c4) classification: the grid
    // fallback inside check_theorem1 takes over.
    MinimaxReport rep = check_theorem1(spec);
    rep.details += (rep.details.empty() ? "" : "; ");
    rep.details += "H not monotone for (c3, c4, d); grid H1/H2 used";
    return rep;
  }
  return check_corollary1(spec);
}

MinimaxReport certify(const PriorSpec& spec) {
  if (spec.h.kind == HKind::HyperIB) {
    MinimaxReport rep = check_hyper_ib(spec);
    if (rep.verdict == MinimaxVerdict::ProvenMinimax) return rep;
    MinimaxReport thm = check_theorem1(spec);
    return thm.verdict == MinimaxVerdict::ProvenMinimax ? thm : rep;
  }
  const MinimaxReport cor = check_corollary1(spec);  // monotone for these families
  if (cor.verdict == MinimaxVerdict::ProvenMinimax) return cor;
  MinimaxReport thm = check_theorem1(spec);
  if (thm.verdict == MinimaxVerdict::ProvenMinimax) return thm;
  // Neither fires; the theorem report carries the margin and threshold.
  if (!cor.details.empty()) {
    thm.details += (thm.details.empty() ? "" : "; ") + cor.details;
  }
  return thm;
}

double a_star(int p) {
  if (p < 7) {
    throw DomainError("a_star: requires p >= 7 (already a_*(6) = 1, outside (0,1))");
  }
  const double pd = p;
  const double disc = std::sqrt(9.0 * pd * pd - 8.0 * pd + 48.0);
  // rationalized form of (-3p+4+sqrt(9p^2-8p+48))/4
  return 4.0 * (pd + 2.0) / (3.0 * pd - 4.0 + disc);
}

PriorSpec named_prior(NamedPrior name, int p) {
  switch (name) {
    case NamedPrior::Prior1: {
      const double a = a_star(p);  // throws for p < 7
      return PriorSpec(p, a, a, HFamily::constant());
    }
    case NamedPrior::Prior2: {
      if (p < 5) throw DomainError("prior2: requires p >= 5");
      return PriorSpec(p, 0.0, (5.0 * p + 4.0) / (6.0 * p),
                       HFamily::log_adjusted((p - 4.0) / 16.0, -2.0));
    }
  }
  throw DomainError("named_prior: unknown name");
}

}  // namespace shrinkprior
