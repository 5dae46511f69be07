#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semproto/consistency.hpp"
#include "semproto/spuriousness.hpp"

namespace semproto {

using ordered_json = nlohmann::ordered_json;

ordered_json value_json(const Value& v);

/// `{kind, queryId, path, details}`; details depend on the kind.
ordered_json mismatch_json(const Mismatch& m);
ordered_json mismatches_json(const std::vector<Mismatch>& ms);
/// Inverse of mismatch_json. Throws MalformedReportError.
Mismatch mismatch_from_json(const nlohmann::json& doc);

struct OracleCheck {
    bool reachable = false;
    bool agrees = false;
};

/// `{queryId, verdict, witness?, emptiedAt?, mode}` plus `note` and `oracle`
/// when present.
ordered_json verdict_json(const ConflictVerdict& v, const std::optional<OracleCheck>& oracle = {});
ordered_json report_json(const SpuriousnessReport& report,
                         const std::vector<std::optional<OracleCheck>>& oracle = {});

std::string mismatches_text(const std::vector<Mismatch>& ms, const OntologyGraph& server);
std::string report_text(const SpuriousnessReport& report,
                        const std::vector<std::optional<OracleCheck>>& oracle = {});

}  // namespace semproto
