#pragma once

#include <set>

#include "semproto/spuriousness.hpp"

namespace semproto::detail {

/// Verdicts for `targets` (ascending), with `conflicting` naming every query
/// that has an ontology-level conflict.
SpuriousnessReport verify_targets(const Protocol& protocol, const Database& db,
                                  const std::set<int>& conflicting, const std::set<int>& targets,
                                  VerifyContext& ctx);

}  // namespace semproto::detail
