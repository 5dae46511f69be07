#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semproto/protocol.hpp"
#include "semproto/relstore.hpp"

namespace semproto {

/// Brute-force executor used as ground truth for the spuriousness engine.
/// It reads raw tables and evaluates queries by nested loops; it shares no
/// code with the relational algebra or the dependency analysis.

struct OracleAnswer {
    int query_id = 0;
    /// New variables bound by the chosen answer; nullopt = no answer.
    std::optional<std::map<std::string, Value>> values;

    bool operator==(const OracleAnswer&) const = default;
};

struct OracleBranch {
    int branch_id = 0;
    bool taken = true;

    bool operator==(const OracleBranch&) const = default;
};

struct OracleTrace {
    std::vector<OracleAnswer> answers;
    std::vector<OracleBranch> branches;
    /// Every variable bound when the target was reached.
    std::map<std::string, Value> bindings;
};

struct OracleOptions {
    std::size_t max_steps = 1'000'000;
    std::size_t max_traces = std::numeric_limits<std::size_t>::max();
    /// Executions must bind these variables to exactly these values.
    std::map<std::string, Value> constraints;
    /// Queries whose answer is replayed as given instead of evaluated against
    /// the database. nullopt replays "no answer".
    std::map<int, std::optional<std::map<std::string, Value>>> fixed_answers;
};

struct Enumeration {
    std::vector<OracleTrace> traces;
    std::size_t steps = 0;
    bool bound_exceeded = false;
};

/// All executions (up to the bounds) that reach `target` with a value for
/// every variable it reads and with every path guard true. A query with no
/// answer, or one the server ontology cannot answer, binds its new variables
/// to Null and execution continues. Throws UnknownQueryError.
Enumeration enumerate_reaching_traces(const Protocol& protocol, const Database& db, int target,
                                      OracleOptions options = {});

/// Throws Error when the step bound runs out before a trace is found.
bool is_reachable(const Protocol& protocol, const Database& db, int target,
                  OracleOptions options = {});

}  // namespace semproto
