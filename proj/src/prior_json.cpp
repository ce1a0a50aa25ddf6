#include "shrinkprior/prior_json.hpp"

namespace shrinkprior {

using nlohmann::json;

json to_json(const PriorSpec& spec) {
  json h;
  switch (spec.h.kind) {
    case HKind::Constant:
      h = {{"kind", "constant"}};
      break;
    case HKind::LogAdjusted:
      h = {{"kind", "log_adjusted"}, {"c1", spec.h.c1}, {"c2", spec.h.c2}};
      break;
    case HKind::HyperIB:
      h = {{"kind", "hyper_ib"}, {"c3", spec.h.c3}, {"c4", spec.h.c4}, {"d", spec.h.d}};
      break;
  }
  return {{"p", spec.p}, {"a", spec.a}, {"b", spec.b}, {"h", h}};
}

PriorSpec prior_from_json(const json& j, std::optional<int> p_override) {
  if (!j.is_object()) throw DomainError("prior config must be a JSON object");
  int p;
  if (p_override) {
    p = *p_override;
  } else if (j.contains("p")) {
    p = j.at("p").get<int>();
  } else {
    throw DomainError("prior config: dimension p missing (supply \"p\" or --p)");
  }
  const double a = j.at("a").get<double>();
  const double b = j.at("b").get<double>();

  HFamily h = HFamily::constant();
  if (j.contains("h")) {
    const json& hj = j.at("h");
    const std::string kind = hj.at("kind").get<std::string>();
    if (kind == "constant") {
      h = HFamily::constant();
    } else if (kind == "log_adjusted") {
      h = HFamily::log_adjusted(hj.at("c1").get<double>(), hj.at("c2").get<double>());
    } else if (kind == "hyper_ib") {
      h = HFamily::hyper_ib(hj.at("c3").get<double>(), hj.at("c4").get<double>(),
                            hj.at("d").get<double>());
    } else {
      throw DomainError("prior config: unknown h kind '" + kind + "'");
    }
  }
  return PriorSpec(p, a, b, h);
}

json to_json(const MinimaxReport& report) {
  json j = {{"verdict", to_string(report.verdict)},
            {"rule", to_string(report.rule)},
            {"margin", report.margin},
            {"details", report.details}};
  if (report.b_threshold) j["b_threshold"] = *report.b_threshold;
  return j;
}

}  // namespace shrinkprior
