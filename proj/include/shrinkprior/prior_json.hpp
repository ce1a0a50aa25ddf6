#ifndef SHRINKPRIOR_PRIOR_JSON_HPP
#define SHRINKPRIOR_PRIOR_JSON_HPP

#include <optional>

#include <json.hpp>

#include "shrinkprior/minimaxity.hpp"
#include "shrinkprior/prior_family.hpp"

namespace shrinkprior {

// Canonical config schema:
//   {"p": int, "a": num, "b": num,
//    "h": {"kind": "constant" | "log_adjusted" | "hyper_ib",
//          "c1":.., "c2":..,          (log_adjusted)
//          "c3":.., "c4":.., "d":..}} (hyper_ib)
nlohmann::json to_json(const PriorSpec& spec);

// p_override, when present, wins over the document's "p"; one of the two
// must supply it.
PriorSpec prior_from_json(const nlohmann::json& j, std::optional<int> p_override = {});

nlohmann::json to_json(const MinimaxReport& report);

}  // namespace shrinkprior

#endif
