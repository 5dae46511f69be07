#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semproto/consistency.hpp"
#include "semproto/protocol.hpp"
#include "semproto/relstore.hpp"

namespace semproto {

using VariableSet = std::set<std::string>;

/// Constrain relation: for each query, an edge from every variable it reads
/// to every variable it instantiates.
struct DependencyInfo {
    std::set<std::pair<std::string, std::string>> constrain_edges;
    std::map<std::string, VariableSet> predecessors;
    std::map<std::string, VariableSet> successors;

    void add_edge(const std::string& from, const std::string& to);
};

DependencyInfo constrain_relation(const Protocol& protocol);

/// Variables the set transitively depends on (backward closure), minus v.
VariableSet restrict_set(const DependencyInfo& dep, const VariableSet& v);

/// Members of v and of its restrict set that occur in a guard on the path
/// to the conflicting query.
VariableSet split_set(const DependencyInfo& dep, const Protocol& protocol, const VariableSet& v,
                      int conflict_query);

/// Path guards of the conflicting query that mention a split variable, in
/// true form.
std::vector<Guard> relevant_conditions(const Protocol& protocol, const VariableSet& split,
                                       int conflict_query);

struct VariableGroup {
    int query_id = 0;
    VariableSet variables;

    bool operator==(const VariableGroup&) const = default;
};

/// Partition of v by instantiating query, in instantiation order.
/// Throws UnknownVariableError.
std::vector<VariableGroup> make_sets(const Protocol& protocol, const VariableSet& v);

/// Evaluates a query against the database given relations for the variables
/// it reads. Each class reference contributes its class extent with
/// attribute columns renamed to the bound variables; the extents and the
/// prior relations are naturally joined, the where clause applied, and the
/// result projected onto the query's variables plus every prior column (so
/// ancestors' columns are carried along).
Relation generate_assignable_set(const Query& query, std::span<const Relation> priors,
                                 const Database& db);

/// Declared type of a variable: the column tag of the attribute it is bound
/// to in its instantiating query. nullopt when that query cannot be resolved
/// against the database.
std::optional<Tag> variable_tag(const Protocol& protocol, const Database& db,
                                std::string_view variable);

/// Restricts an assignable set by the relevant conditions. Conjunction mode
/// keeps tuples satisfying every guard; Disjunction mode keeps tuples
/// satisfying any one condition. An empty condition list leaves it unchanged.
Relation split_assignable_set(const Relation& delta, const VariableSet& split,
                              std::span<const Guard> conditions, Combine mode);

struct CacheEntry {
    std::string key;
    VariableSet variables;
    int conflict_query = 0;
    /// Query evaluated to produce the relation; 0 when it is the join of
    /// several groups' relations.
    int query_id = 0;
    /// Keys of the entries joined in, in join order.
    std::vector<std::string> dependencies;
    std::vector<Guard> guards;
    Relation relation;
};

/// State of one verification run: memoized assignable sets keyed by
/// variable set (plus the guards applied to them), the keys being computed,
/// and step-mode seeds.
struct VerifyContext {
    enum class Mode { Static, Step };

    Mode mode = Mode::Static;
    Combine combine = Combine::Conjunction;
    std::map<std::string, Value> seeded;
    std::map<std::string, CacheEntry> cache;
    std::set<std::string> in_flight;
    std::optional<VariableSet> emptied_at;
};

/// Decides whether a non-empty assignable relation exists for v on the way
/// to the conflicting query; on success the relation is cached in ctx.
/// Throws DependencyCycleError when the dependency graph loops.
bool verify_conflict(const VariableSet& v, int conflict_query, VerifyContext& ctx,
                     const Protocol& protocol, const Database& db, const DependencyInfo& dep);

/// Cached relation for v as computed for the given conflicting query, if any.
const CacheEntry* find_cached(const VerifyContext& ctx, const VariableSet& v, int conflict_query,
                              const Protocol& protocol, const DependencyInfo& dep);

enum class Verdict { Spurious, Realizable };

std::string_view verdict_name(Verdict v);

struct ConflictVerdict {
    int query_id = 0;
    Verdict verdict = Verdict::Realizable;
    std::optional<std::map<std::string, Value>> witness;
    std::optional<std::vector<std::string>> emptied_at;
    Combine mode = Combine::Conjunction;
    /// Set when the verdict is conservative rather than decided.
    std::optional<std::string> note;

    bool operator==(const ConflictVerdict&) const = default;
};

using SpuriousnessReport = std::vector<ConflictVerdict>;

struct VerifyOptions {
    Combine mode = Combine::Conjunction;
};

/// The variables whose joint valuation decides reachability of a
/// conflicting query: the ones it reads plus those in its path guards.
VariableSet conflict_variables(const Protocol& protocol, int conflict_query);

/// One verdict per distinct conflicting query, ordered by query id.
SpuriousnessReport verify_all(const Protocol& protocol, const OntologyGraph& server,
                              const Database& db, const std::vector<Mismatch>& conflicts,
                              VerifyOptions options = {});

/// Same as verify_all but exposes the run's context (cache inspection).
SpuriousnessReport verify_all(const Protocol& protocol, const Database& db,
                              const std::vector<Mismatch>& conflicts, VerifyContext& ctx);

// ---------------------------------------------------------------------------
// Step mode

struct BranchDecision {
    int branch_id = 0;
    bool taken = true;
};

struct TraceEvent {
    std::optional<int> query_id;
    /// Present with query_id; nullopt inside means "no answer".
    std::optional<std::optional<std::map<std::string, Value>>> answer;
    std::optional<BranchDecision> branch;
};

using StepTrace = std::vector<TraceEvent>;

/// Reads the trace JSON format: an array of
/// `{queryId, answer: {var: value} | null, branch?: {id, taken}}`.
/// Values are typed against the database's column tags.
/// Throws InconsistentTraceError on malformed entries.
StepTrace parse_trace(const nlohmann::json& doc, const Protocol& protocol, const Database& db);

/// Re-verifies conflicts after a partial execution: conflicts on pruned
/// branches are dropped, executed variables are seeded with their concrete
/// values. Throws InconsistentTraceError.
SpuriousnessReport step_verify(const Protocol& protocol, const OntologyGraph& server,
                               const Database& db, const std::vector<Mismatch>& conflicts,
                               const StepTrace& trace, VerifyOptions options = {});

}  // namespace semproto
