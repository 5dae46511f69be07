// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "generators.hpp"
#include "semproto/consistency.hpp"
#include "semproto/error.hpp"
#include "semproto/oracle.hpp"
#include "semproto/report.hpp"
#include "semproto/spuriousness.hpp"

using namespace semproto;
using namespace semproto::testing;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Every mismatch produced anywhere in the run, with the inputs that produced
// it, for the soundness audit.
struct Emitted {
    Mismatch mismatch;
    Query query;
    OntologyGraph server;
};
std::vector<Emitted> g_emitted;

std::vector<Mismatch> checked(const Protocol& p, const OntologyGraph& server) {
    auto ms = check_consistency(p, server);
    for (const auto& m : ms) g_emitted.push_back({m, p.query(m.query_id), server});
    return ms;
}

// ---------------------------------------------------------------------------

Outcome protocol1_reproduction() {
    auto start = Clock::now();
    auto server = load_ontology("pub/server.json");
    auto protocol = load_protocol("pub/protocol1.pv");
    auto ms = checked(protocol, server);
    double elapsed = ms_since(start);
    bool ok = ms.size() == 1 && ms[0].kind == MismatchKind::SpecializationMismatch &&
              ms[0].class_name == "Proceedings" && ms[0].query_id == 3 && elapsed < 100.0;
    return {ok, std::to_string(ms.size()) + " mismatch(es), " + std::to_string(elapsed) + " ms"};
}

Outcome protocol2_reproduction() {
    auto start = Clock::now();
    auto server = load_ontology("auto/server.json");
    auto protocol = load_protocol("auto/protocol2.pv");
    auto ms = checked(protocol, server);
    double elapsed = ms_since(start);
    bool ok = ms.size() == 1 && ms[0].kind == MismatchKind::UnmatchedVariables &&
              ms[0].query_id == 2 && ms[0].unmatched.size() == 1 &&
              ms[0].unmatched[0].attribute == "Color" && elapsed < 100.0;
    return {ok, std::to_string(ms.size()) + " mismatch(es), " + std::to_string(elapsed) + " ms"};
}

bool witness_replays(const Protocol& p, const Database& db, const ConflictVerdict& v) {
    if (!v.witness) return false;
    OracleOptions options;
    options.constraints = *v.witness;
    return is_reachable(p, db, v.query_id, options);
}

Outcome spuriousness_pair() {
    std::string detail;
    bool ok = true;
    for (const auto& [dir, expected] : {std::pair{"pub/db-spurious", Verdict::Spurious},
                                        std::pair{"pub/db-realizable", Verdict::Realizable}}) {
        auto start = Clock::now();
        auto server = load_ontology("pub/server.json");
        auto protocol = load_protocol("pub/protocol1.pv");
        auto db = load_db(dir, server);
        std::size_t rows = 0;
        for (const auto& [name, t] : db.tables()) rows += t.size();
        auto report = verify_all(protocol, server, db, checked(protocol, server));
        bool reachable = is_reachable(protocol, db, 3);
        double elapsed = ms_since(start);
        bool good = rows <= 10 && report.size() == 1 && report[0].verdict == expected &&
                    reachable == (expected == Verdict::Realizable) && elapsed < 1000.0;
        if (expected == Verdict::Realizable) good = good && witness_replays(protocol, db, report[0]);
        else good = good && report[0].emptied_at.has_value();
        ok = ok && good;
        detail += std::string(dir) + ": " +
                  (report.empty() ? "no verdict" : std::string(verdict_name(report[0].verdict))) +
                  ", oracle " + (reachable ? "reachable" : "unreachable") + ", " +
                  std::to_string(rows) + " rows, " + std::to_string(elapsed) + " ms; ";
    }
    return {ok, detail};
}

Outcome oracle_equivalence() {
    auto start = Clock::now();
    Rng rng(20240601);
    int instances = 0, conflicts = 0, agree = 0, spurious = 0, noted = 0;
    std::string first_failure;
    while (instances < 300) {
        Instance inst = random_instance(rng);
        ++instances;
        auto ms = checked(inst.protocol, inst.server);
        auto report = verify_all(inst.protocol, inst.server, inst.db, ms);
        for (const auto& v : report) {
            ++conflicts;
            if (v.note) ++noted;
            bool reachable = is_reachable(inst.protocol, inst.db, v.query_id);
            bool engine = v.verdict == Verdict::Realizable;
            if (v.verdict == Verdict::Spurious) ++spurious;
            if (reachable == engine && !v.note) {
                ++agree;
            } else if (first_failure.empty()) {
                first_failure = " first disagreement: instance " + std::to_string(instances) +
                                ", query " + std::to_string(v.query_id) + "\n" +
                                inst.protocol.print();
            }
        }
    }
    double elapsed = ms_since(start);
    bool ok = conflicts > 0 && agree == conflicts && elapsed < 60000.0;
    return {ok, std::to_string(instances) + " instances, " + std::to_string(agree) + "/" +
                    std::to_string(conflicts) + " verdicts agree (" + std::to_string(spurious) +
                    " spurious, " + std::to_string(noted) + " conservative), " +
                    std::to_string(elapsed / 1000.0) + " s" + first_failure};
}

// --- mutations --------------------------------------------------------------

struct Mutation {
    std::string label;
    nlohmann::json ontology;
    int query_id;
    MismatchKind expected;
};

// Edges from `ancestor` down to `cls` along first-found superclass chain.
std::vector<std::pair<std::string, std::string>> chain(const OntologyGraph& g,
                                                       const std::string& ancestor,
                                                       const std::string& cls) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string cur = cls;
    while (cur != ancestor) {
        const auto& node = g.at(cur);
        auto next = std::find_if(node.superclasses.begin(), node.superclasses.end(),
                                 [&](const std::string& s) { return g.is_subclass(ancestor, s); });
        if (next == node.superclasses.end()) break;
        out.emplace_back(*next, cur);
        cur = *next;
    }
    return out;
}

nlohmann::json without_edge(nlohmann::json doc, const std::string& super, const std::string& sub) {
    for (auto& c : doc["classes"]) {
        if (c["name"] != sub) continue;
        auto& supers = c["superclasses"];
        supers.erase(std::remove(supers.begin(), supers.end(), super), supers.end());
    }
    return doc;
}

nlohmann::json moved_attribute(nlohmann::json doc, const std::string& attr,
                               const std::string& from, const std::string& to) {
    for (auto& c : doc["classes"]) {
        if (!c.contains("dataProperties")) c["dataProperties"] = nlohmann::json::array();
        auto& props = c["dataProperties"];
        if (c["name"] == from)
            props.erase(std::remove_if(props.begin(), props.end(),
                                       [&](const nlohmann::json& p) {
                                           return iequals(p.get<std::string>(), attr);
                                       }),
                        props.end());
        if (c["name"] == to) props.push_back(attr);
    }
    return doc;
}

std::vector<Mutation> mutations(const Protocol& p, const OntologyGraph& base) {
    std::vector<Mutation> out;
    nlohmann::json doc = base.to_json();
    std::set<std::pair<std::string, std::string>> seen_edges;
    std::set<std::tuple<std::string, std::string, int>> seen_moves;
    for (const auto& q : p.queries()) {
        for (const auto& ref : q.classes) {
            for (std::size_t i = 1; i < ref.sequence.size(); ++i)
                for (const auto& e : chain(base, base.find_match(ref.sequence[i - 1])->name,
                                           base.find_match(ref.sequence[i])->name))
                    if (seen_edges.insert(e).second)
                        out.push_back({"delete edge " + e.first + "->" + e.second,
                                       without_edge(doc, e.first, e.second), q.id,
                                       MismatchKind::SpecializationMismatch});
            const std::string terminal = base.find_match(ref.terminal())->name;
            for (const auto& b : q.bindings) {
                if (b.is_wildcard()) continue;
                std::string owner;
                for (const auto& a : base.ancestors(terminal))
                    for (const auto& prop : base.at(a).data_properties)
                        if (iequals(prop, b.attribute)) owner = a;
                if (owner.empty()) continue;
                for (const auto& e : chain(base, owner, terminal))
                    if (seen_edges.insert(e).second)
                        out.push_back({"delete edge " + e.first + "->" + e.second,
                                       without_edge(doc, e.first, e.second), q.id,
                                       MismatchKind::UnmatchedVariables});
                for (const auto& target : base.classes()) {
                    if (base.is_subclass(target.name, terminal)) continue;
                    if (std::any_of(target.data_properties.begin(), target.data_properties.end(),
                                    [&](const std::string& x) { return iequals(x, b.attribute); }))
                        continue;
                    if (!seen_moves.insert({lower(b.attribute), target.name, q.id}).second) continue;
                    out.push_back({"move " + b.attribute + " from " + owner + " to " + target.name,
                                   moved_attribute(doc, b.attribute, owner, target.name), q.id,
                                   MismatchKind::UnmatchedVariables});
                }
            }
        }
    }
    return out;
}

Outcome mutation_completeness() {
    const std::vector<std::pair<std::string, std::string>> fixtures = {
        {"pub/protocol1.pv", "pub/client.json"},
        {"auto/protocol2.pv", "auto/client.json"},
        {"store/protocol3.pv", "store/client.json"}};
    bool ok = true;
    std::string detail;
    for (const auto& [protocol_file, ontology_file] : fixtures) {
        auto p = load_protocol(protocol_file);
        auto base = load_ontology(ontology_file);
        if (!check_consistency(p, base).empty()) {
            ok = false;
            detail += protocol_file + ": base ontology already conflicts; ";
            continue;
        }
        int detected = 0;
        auto ms = mutations(p, base);
        std::string missed;
        for (const auto& m : ms) {
            auto mutated = OntologyGraph::from_json(m.ontology);
            auto found = checked(p, mutated);
            bool hit = std::any_of(found.begin(), found.end(), [&](const Mismatch& x) {
                return x.query_id == m.query_id && x.kind == m.expected;
            });
            if (hit) ++detected;
            else if (missed.empty()) missed = " missed: " + m.label;
        }
        ok = ok && ms.size() >= 20 && detected == static_cast<int>(ms.size());
        detail += protocol_file + " " + std::to_string(detected) + "/" + std::to_string(ms.size()) +
                  missed + "; ";
    }
    return {ok, detail};
}

// --- soundness audit ----------------------------------------------------------

// Independent re-derivations straight from the class list.
const ClassNode* lookup_class(const OntologyGraph& g, const std::string& name) {
    for (const auto& c : g.classes())
        if (iequals(c.name, name)) return &c;
    auto alias = std::find_if(g.aliases().begin(), g.aliases().end(),
                              [&](const auto& kv) { return iequals(kv.first, name); });
    if (alias != g.aliases().end()) return lookup_class(g, alias->second);
    return nullptr;
}

bool descends(const OntologyGraph& g, const std::string& ancestor, const std::string& cls) {
    if (iequals(ancestor, cls)) return true;
    for (const auto& s : lookup_class(g, cls)->superclasses)
        if (descends(g, ancestor, s)) return true;
    return false;
}

bool covers(const OntologyGraph& g, const std::string& cls, const std::string& attr) {
    const ClassNode* c = lookup_class(g, cls);
    for (const auto& p : c->data_properties)
        if (iequals(p, attr)) return true;
    for (const auto& s : c->superclasses)
        if (covers(g, s, attr)) return true;
    return false;
}

bool confirmed(const Emitted& e) {
    const Mismatch& m = e.mismatch;
    const OntologyGraph& g = e.server;
    switch (m.kind) {
        case MismatchKind::ClassNotFound:
            return lookup_class(g, m.class_name) == nullptr;
        case MismatchKind::SpecializationMismatch: {
            const ClassNode* c = lookup_class(g, m.class_name);
            return c == nullptr || !descends(g, m.expected_parent, c->name);
        }
        case MismatchKind::UnmatchedVariables:
            for (const auto& u : m.unmatched)
                for (const auto& ref : e.query.classes)
                    if (covers(g, lookup_class(g, ref.terminal())->name, u.attribute))
                        return false;
            return !m.unmatched.empty();
    }
    return false;
}

Outcome soundness_audit() {
    int bad = 0;
    for (const auto& e : g_emitted)
        if (!confirmed(e)) ++bad;
    return {bad == 0 && !g_emitted.empty(),
            std::to_string(g_emitted.size()) + " mismatches audited, " + std::to_string(bad) +
                " unconfirmed"};
}

// --- algebra ------------------------------------------------------------------

Outcome algebra_laws() {
    Rng rng(7);
    const std::vector<std::string> pool = {"x", "y", "z", "w"};
    int violations = 0;
    const int relations = 1000;
    for (int i = 0; i < relations / 4; ++i) {
        Relation a = random_relation(rng, pool, 6, 2);
        Relation b = random_relation(rng, pool, 6, 2);
        Relation c = random_relation(rng, pool, 6, 2);
        Relation r = random_relation(rng, pool, 8, 2);
        if (!same_content(natural_join(a, b), natural_join(b, a))) ++violations;
        if (!same_content(natural_join(natural_join(a, b), c), natural_join(a, natural_join(b, c))))
            ++violations;
        auto y = r.column_names();
        std::vector<std::string> x;
        for (const auto& col : y)
            if (std::bernoulli_distribution(0.5)(rng)) x.push_back(col);
        if (!(project(project(r, y), x) == project(r, x))) ++violations;
        if (y.size() >= 1) {
            Condition p{Operand::variable(y[0]), CompareOp::Ge, Operand::literal(Value::integer(1))};
            Condition q{Operand::variable(y.back()), CompareOp::Ne,
                        Operand::literal(Value::integer(2))};
            std::vector<Condition> pq = {p, q};
            auto fused = select(r, pq, Combine::Conjunction);
            auto nested = select(select(r, std::span(&q, 1), Combine::Conjunction),
                                 std::span(&p, 1), Combine::Conjunction);
            if (!(fused == nested)) ++violations;
        }
    }
    return {violations == 0, std::to_string(relations) + " relations, " +
                                 std::to_string(violations) + " violations"};
}

// --- step mode ----------------------------------------------------------------

Outcome step_consistency() {
    Rng rng(99);
    int equal = 0, compared = 0, pruned_ok = 0, pruned_cases = 0, tries = 0;
    while ((compared < 50 || pruned_cases < 50) && tries < 20000) {
        ++tries;
        Instance inst = random_instance(rng);
        auto ms = check_consistency(inst.protocol, inst.server);
        if (compared < 50) {
            ++compared;
            auto a = report_json(verify_all(inst.protocol, inst.server, inst.db, ms)).dump();
            auto b = report_json(step_verify(inst.protocol, inst.server, inst.db, ms, {})).dump();
            if (a == b) ++equal;
        }
        if (pruned_cases >= 50) continue;
        // Decide each conflict's outermost branch the other way.
        std::map<int, bool> away;
        bool consistent = true;
        std::set<int> ids;
        for (const auto& m : ms) ids.insert(m.query_id);
        for (int id : ids) {
            const auto& steps = inst.protocol.enclosing_branches(id);
            if (steps.empty()) {
                consistent = false;
                break;
            }
            auto [it, inserted] = away.emplace(steps.front().branch_id, !steps.front().then_side);
            if (!inserted && it->second != !steps.front().then_side) consistent = false;
        }
        if (!consistent) continue;
        StepTrace trace;
        for (const auto& [branch, taken] : away) {
            TraceEvent ev;
            ev.branch = BranchDecision{branch, taken};
            trace.push_back(ev);
        }
        ++pruned_cases;
        if (step_verify(inst.protocol, inst.server, inst.db, ms, trace).empty()) ++pruned_ok;
    }
    bool ok = compared == 50 && equal == 50 && pruned_cases == 50 && pruned_ok == 50;
    return {ok, std::to_string(equal) + "/" + std::to_string(compared) +
                    " empty-trace reports identical, " + std::to_string(pruned_ok) + "/" +
                    std::to_string(pruned_cases) + " branch-away traces give empty reports"};
}

// --- monotonicity -------------------------------------------------------------

std::vector<std::string> tables_feeding(const Query& q, const Database& db) {
    std::vector<std::string> out;
    for (const auto& ref : q.classes)
        for (const auto& t : db.extent_tables(db.ontology().find_match(ref.terminal())->name))
            if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    return out;
}

std::set<int> closure_queries(const Protocol& p, int conflict) {
    auto dep = constrain_relation(p);
    auto v = conflict_variables(p, conflict);
    auto closure = restrict_set(dep, v);
    closure.insert(v.begin(), v.end());
    std::set<int> out;
    for (const auto& x : closure) out.insert(p.instantiating_query(x));
    return out;
}

// Rows that agree with the witness on every witness variable the query binds.
Database without_witness_rows(const Database& db, const Protocol& p, int query_id,
                              const std::map<std::string, Value>& witness) {
    const Query& q = p.query(query_id);
    Database out = db;
    for (const auto& table : tables_feeding(q, db)) {
        const Relation& rel = db.table(table);
        std::vector<Row> doomed;
        for (const auto& row : rel.rows()) {
            bool supports = true;
            for (const auto& b : q.bindings) {
                if (b.is_wildcard() || !witness.count(*b.variable)) continue;
                for (std::size_t i = 0; i < rel.columns().size(); ++i)
                    if (iequals(rel.columns()[i].name, b.attribute) &&
                        !(row[i] == witness.at(*b.variable)))
                        supports = false;
            }
            if (supports) doomed.push_back(row);
        }
        out = without_rows(out, table, doomed);
    }
    return out;
}

Outcome monotonicity() {
    Rng rng(4242);
    int instances = 0, flips_up = 0, emptied_checks = 0, emptied_flipped = 0, tries = 0;
    while (instances < 50 && tries < 20000) {
        ++tries;
        Instance inst = random_instance(rng);
        auto ms = check_consistency(inst.protocol, inst.server);
        auto before = verify_all(inst.protocol, inst.server, inst.db, ms);
        const ConflictVerdict* target = nullptr;
        for (const auto& v : before)
            if (v.verdict == Verdict::Realizable && !v.note &&
                !closure_queries(inst.protocol, v.query_id).empty())
                target = &v;
        if (!target) continue;
        ++instances;

        for (int q : closure_queries(inst.protocol, target->query_id)) {
            Database fewer = without_witness_rows(inst.db, inst.protocol, q, *target->witness);
            auto after = verify_all(inst.protocol, inst.server, fewer, ms);
            for (std::size_t i = 0; i < before.size(); ++i)
                if (before[i].verdict == Verdict::Spurious && after[i].verdict == Verdict::Realizable)
                    ++flips_up;

            Database none = inst.db;
            for (const auto& t : tables_feeding(inst.protocol.query(q), inst.db))
                none = emptied(none, t);
            ++emptied_checks;
            for (const auto& v : verify_all(inst.protocol, inst.server, none, ms))
                if (v.query_id == target->query_id && v.verdict == Verdict::Spurious)
                    ++emptied_flipped;
        }
    }
    bool ok = instances == 50 && flips_up == 0 && emptied_flipped == emptied_checks;
    return {ok, std::to_string(instances) + " realizable instances, " + std::to_string(flips_up) +
                    " spurious->realizable flips, " + std::to_string(emptied_flipped) + "/" +
                    std::to_string(emptied_checks) + " emptied dependencies flip to spurious"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 protocol-1 reproduction", protocol1_reproduction},
        {"2 protocol-2 reproduction", protocol2_reproduction},
        {"3 spuriousness pair", spuriousness_pair},
        {"4 oracle equivalence", oracle_equivalence},
        {"5 mutation completeness", mutation_completeness},
        {"6 soundness audit", soundness_audit},
        {"7 algebra laws", algebra_laws},
        {"8 step-mode consistency", step_consistency},
        {"9 monotonicity", monotonicity},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s [%s] %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
