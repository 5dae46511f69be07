#include "semproto/spuriousness.hpp"

#include <algorithm>

#include "semproto/error.hpp"
#include "verify_detail.hpp"

namespace semproto {

void DependencyInfo::add_edge(const std::string& from, const std::string& to) {
    constrain_edges.emplace(from, to);
    predecessors[to].insert(from);
    successors[from].insert(to);
}

DependencyInfo constrain_relation(const Protocol& protocol) {
    DependencyInfo dep;
    for (const auto& q : protocol.queries())
        for (const auto& r : protocol.read_variables(q.id))
            for (const auto& n : protocol.new_variables(q.id)) dep.add_edge(r, n);
    return dep;
}

VariableSet restrict_set(const DependencyInfo& dep, const VariableSet& v) {
    VariableSet seen;
    std::vector<std::string> stack(v.begin(), v.end());
    while (!stack.empty()) {
        std::string x = std::move(stack.back());
        stack.pop_back();
        auto it = dep.predecessors.find(x);
        if (it == dep.predecessors.end()) continue;
        for (const auto& p : it->second)
            if (seen.insert(p).second) stack.push_back(p);
    }
    for (const auto& x : v) seen.erase(x);
    return seen;
}

VariableSet split_set(const DependencyInfo& dep, const Protocol& protocol, const VariableSet& v,
                      int conflict_query) {
    VariableSet closure = restrict_set(dep, v);
    closure.insert(v.begin(), v.end());
    VariableSet out;
    for (const auto& x : protocol.path_variables(conflict_query))
        if (closure.count(x)) out.insert(x);
    return out;
}

std::vector<Guard> relevant_conditions(const Protocol& protocol, const VariableSet& split,
                                       int conflict_query) {
    std::vector<Guard> out;
    if (split.empty()) return out;
    for (auto& g : protocol.path_conditions(conflict_query)) {
        auto vars = g.variables();
        if (std::any_of(vars.begin(), vars.end(), [&](const auto& x) { return split.count(x); }))
            out.push_back(std::move(g));
    }
    return out;
}

std::vector<VariableGroup> make_sets(const Protocol& protocol, const VariableSet& v) {
    std::map<int, VariableSet> by_query;
    for (const auto& x : v) by_query[protocol.instantiating_query(x)].insert(x);
    std::vector<VariableGroup> out;
    for (auto& [id, vars] : by_query) out.push_back({id, std::move(vars)});
    return out;
}

namespace {

// Renames the extent's attribute columns to the variables bound to them.
// A variable bound to several columns keeps only rows where they agree.
Relation bind_extent(const Relation& ext, const std::vector<Binding>& bindings) {
    std::vector<std::string> vars;
    std::vector<std::vector<std::size_t>> sources;
    for (const auto& b : bindings) {
        if (b.is_wildcard()) continue;
        std::optional<std::size_t> idx;
        for (std::size_t i = 0; i < ext.columns().size(); ++i)
            if (iequals(ext.columns()[i].name, b.attribute)) idx = i;
        if (!idx) continue;
        auto pos = std::find(vars.begin(), vars.end(), *b.variable) - vars.begin();
        if (pos == static_cast<std::ptrdiff_t>(vars.size())) {
            vars.push_back(*b.variable);
            sources.push_back({*idx});
        } else {
            sources[pos].push_back(*idx);
        }
    }
    std::vector<Column> columns;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        Tag tag = ext.columns()[sources[i][0]].tag;
        for (auto j : sources[i])
            if (ext.columns()[j].tag != tag)
                throw TagMismatchError("variable '" + vars[i] + "' is bound to columns of type " +
                                       std::string(tag_name(tag)) + " and " +
                                       std::string(tag_name(ext.columns()[j].tag)));
        columns.push_back({vars[i], tag});
    }
    Relation out(ext.name(), std::move(columns));
    for (const auto& row : ext.rows()) {
        Row bound;
        bool ok = true;
        for (const auto& src : sources) {
            const Value& first = row[src[0]];
            for (std::size_t k = 1; k < src.size() && ok; ++k)
                ok = !first.is_null() && row[src[k]] == first;
            bound.push_back(first);
        }
        if (ok) out.insert(std::move(bound));
    }
    return out;
}

std::vector<std::string> output_columns(const Query& query, std::span<const Relation> priors) {
    std::vector<std::string> cols = query.variables();
    for (const auto& p : priors)
        for (const auto& c : p.columns())
            if (std::find(cols.begin(), cols.end(), c.name) == cols.end()) cols.push_back(c.name);
    return cols;
}

}  // namespace

Relation generate_assignable_set(const Query& query, std::span<const Relation> priors,
                                 const Database& db) {
    const OntologyGraph& onto = db.ontology();
    Relation t = Relation::unit();
    bool no_extent = false;
    for (const auto& ref : query.classes) {
        const ClassNode* cls = onto.find_match(ref.terminal());
        if (!cls) throw UnknownClassError("query " + std::to_string(query.id) +
                                          ": class " + ref.terminal() + " not in server ontology");
        try {
            t = natural_join(t, bind_extent(db.class_extent(cls->name), query.bindings));
        } catch (const NoExtentError&) {
            no_extent = true;
        }
    }
    if (no_extent) {
        // A class without any instantiable descendant answers nothing.
        std::vector<Column> columns;
        for (const auto& name : output_columns(query, priors)) {
            std::optional<Tag> tag = t.column_tag(name);
            for (const auto& p : priors)
                if (!tag) tag = p.column_tag(name);
            columns.push_back({name, tag.value_or(Tag::Str)});
        }
        return Relation("q" + std::to_string(query.id), std::move(columns));
    }
    for (const auto& p : priors) t = natural_join(t, p);
    for (const auto& var : query.variables())
        if (!t.has_column(var))
            throw UnknownColumnError("query " + std::to_string(query.id) + ": variable '" + var +
                                     "' is bound to an attribute no class reference provides");
    t = select(t, query.where, Combine::Conjunction);
    Relation out = project(t, output_columns(query, priors));
    out.set_name("q" + std::to_string(query.id));
    return out;
}

std::optional<Tag> variable_tag(const Protocol& protocol, const Database& db,
                                std::string_view variable) {
    const Query& q = protocol.query(protocol.instantiating_query(variable));
    const OntologyGraph& onto = db.ontology();
    for (const auto& b : q.bindings) {
        if (b.variable != variable) continue;
        for (const auto& ref : q.classes) {
            const ClassNode* cls = onto.find_match(ref.terminal());
            if (!cls) continue;
            try {
                Relation ext = db.class_extent(cls->name);
                for (const auto& c : ext.columns())
                    if (iequals(c.name, b.attribute)) return c.tag;
            } catch (const NoExtentError&) {
            }
        }
    }
    return std::nullopt;
}

Relation split_assignable_set(const Relation& delta, const VariableSet& split,
                              std::span<const Guard> conditions, Combine mode) {
    if (conditions.empty()) return delta;
    for (const auto& g : conditions)
        for (const auto& var : g.variables())
            if (!split.count(var) && !delta.has_column(var))
                throw UnknownColumnError("condition " + g.str() + " uses '" + var +
                                         "', which is neither split nor a column");
    return select_guards(delta, conditions, mode);
}

std::string_view verdict_name(Verdict v) {
    return v == Verdict::Spurious ? "spurious" : "realizable";
}

VariableSet conflict_variables(const Protocol& protocol, int conflict_query) {
    VariableSet v = protocol.read_variables(conflict_query);
    auto path = protocol.path_variables(conflict_query);
    v.insert(path.begin(), path.end());
    return v;
}

namespace {

struct Plan {
    VariableSet restrict;
    VariableSet split;
    std::vector<Guard> guards;
    std::string key;
};

std::string join_names(const VariableSet& v) {
    std::string out;
    for (const auto& x : v) {
        if (!out.empty()) out += ",";
        out += x;
    }
    return out;
}

// `path` holds the guards that must hold on the way to the conflicting
// query. Guards are applied at the deepest level where all their variables
// are available; they are part of the key so a relation filtered for one
// conflict is never served to another.
Plan make_plan(const VariableSet& v, const std::vector<Guard>& path, const DependencyInfo& dep) {
    Plan plan;
    plan.restrict = restrict_set(dep, v);
    VariableSet closure = plan.restrict;
    closure.insert(v.begin(), v.end());
    for (const auto& g : path)
        for (const auto& x : g.variables())
            if (closure.count(x)) plan.split.insert(x);
    for (const auto& g : path) {
        auto vars = g.variables();
        bool relevant = std::any_of(vars.begin(), vars.end(),
                                    [&](const auto& x) { return plan.split.count(x); });
        bool available = std::all_of(vars.begin(), vars.end(),
                                     [&](const auto& x) { return closure.count(x); });
        if (relevant && available) plan.guards.push_back(g);
    }
    plan.key = join_names(v) + "|";
    for (const auto& g : plan.guards) plan.key += g.str() + ";";
    return plan;
}

Relation seeded_relation(const Query& query, std::span<const Relation> priors,
                         const VerifyContext& ctx, const Protocol& protocol, const Database& db) {
    std::vector<Column> columns;
    Row row;
    for (const auto& var : protocol.new_variables(query.id)) {
        const Value& value = ctx.seeded.at(var);
        Tag tag = value.is_null() ? variable_tag(protocol, db, var).value_or(Tag::Str)
                                  : value.tag();
        columns.push_back({var, tag});
        row.push_back(value);
    }
    Relation out("q" + std::to_string(query.id), std::move(columns));
    out.insert(std::move(row));
    for (const auto& p : priors) out = natural_join(out, p);
    return out;
}

bool is_seeded(const Query& query, const VerifyContext& ctx, const Protocol& protocol) {
    if (ctx.mode != VerifyContext::Mode::Step) return false;
    const auto& vars = protocol.new_variables(query.id);
    return !vars.empty() &&
           std::all_of(vars.begin(), vars.end(), [&](const auto& x) { return ctx.seeded.count(x); });
}

const CacheEntry* verify_impl(const VariableSet& v, int conflict_query,
                              const std::vector<Guard>& path, VerifyContext& ctx,
                              const Protocol& protocol, const Database& db,
                              const DependencyInfo& dep) {
    Plan plan = make_plan(v, path, dep);
    if (auto it = ctx.cache.find(plan.key); it != ctx.cache.end()) return &it->second;
    if (ctx.in_flight.count(plan.key))
        throw DependencyCycleError("dependency cycle through {" + join_names(v) + "}");
    ctx.in_flight.insert(plan.key);
    struct Release {
        VerifyContext& ctx;
        const std::string& key;
        ~Release() { ctx.in_flight.erase(key); }
    } release{ctx, plan.key};

    std::vector<Relation> tables;
    std::vector<std::string> dependencies;
    for (const auto& group : make_sets(protocol, plan.restrict)) {
        const CacheEntry* e =
            verify_impl(group.variables, conflict_query, path, ctx, protocol, db, dep);
        if (!e) return nullptr;
        if (std::find(dependencies.begin(), dependencies.end(), e->key) != dependencies.end())
            continue;
        dependencies.push_back(e->key);
        tables.push_back(e->relation);
    }

    auto groups = make_sets(protocol, v);
    Relation delta;
    int query_id = 0;
    if (groups.size() == 1) {
        const Query& q = protocol.query(groups.front().query_id);
        query_id = q.id;
        delta = is_seeded(q, ctx, protocol) ? seeded_relation(q, tables, ctx, protocol, db)
                                            : generate_assignable_set(q, tables, db);
    } else {
        delta = Relation::unit();
        for (const auto& t : tables) delta = natural_join(delta, t);
        for (const auto& group : groups) {
            const CacheEntry* e =
                verify_impl(group.variables, conflict_query, path, ctx, protocol, db, dep);
            if (!e) return nullptr;
            dependencies.push_back(e->key);
            delta = natural_join(delta, e->relation);
        }
    }
    if (!plan.guards.empty())
        delta = split_assignable_set(delta, plan.split, plan.guards, ctx.combine);
    if (delta.empty()) {
        ctx.emptied_at = v;
        return nullptr;
    }
    CacheEntry entry;
    entry.key = plan.key;
    entry.variables = v;
    entry.conflict_query = conflict_query;
    entry.query_id = query_id;
    entry.dependencies = std::move(dependencies);
    entry.guards = std::move(plan.guards);
    entry.relation = std::move(delta);
    return &ctx.cache.emplace(plan.key, std::move(entry)).first->second;
}

std::vector<std::string> to_vector(const VariableSet& v) { return {v.begin(), v.end()}; }

VariableSet guard_variables(const std::vector<Guard>& guards) {
    VariableSet out;
    for (const auto& g : guards)
        for (auto& x : g.variables()) out.insert(std::move(x));
    return out;
}

// A disjunctive guard holds when one of its conditions does, and only that
// condition's variables need values. Conjunction mode therefore tries every
// way of picking one condition per guard; each pick is a plain conjunction.
std::vector<std::vector<Guard>> guard_choices(const std::vector<Guard>& guards, Combine mode) {
    if (mode == Combine::Disjunction) return {guards};
    std::vector<std::vector<Guard>> choices = {{}};
    for (const auto& g : guards) {
        if (g.any_of.size() == 1) {
            for (auto& c : choices) c.push_back(g);
            continue;
        }
        std::vector<std::vector<Guard>> next;
        for (const auto& c : choices)
            for (const auto& cond : g.any_of) {
                auto extended = c;
                extended.push_back(Guard{{cond}});
                next.push_back(std::move(extended));
            }
        choices = std::move(next);
    }
    return choices;
}

bool constant_false(const std::vector<Guard>& guards) {
    for (const auto& g : guards)
        if (g.variables().empty() &&
            !evaluate(g, [](std::string_view) -> const Value* { return nullptr; }))
            return true;
    return false;
}

ConflictVerdict verify_one(int conflict_query, const std::set<int>& conflicting,
                           VerifyContext& ctx, const Protocol& protocol, const Database& db,
                           const DependencyInfo& dep) {
    ConflictVerdict out;
    out.query_id = conflict_query;
    out.mode = ctx.combine;
    auto realizable_with_note = [&](std::string note) {
        out.verdict = Verdict::Realizable;
        out.witness = std::map<std::string, Value>{};
        out.note = std::move(note);
        return out;
    };

    auto guards = protocol.path_conditions(conflict_query);
    for (const auto& g : guards)
        for (const auto& c : g.any_of) {
            if (!c.is_null_test() || c.op != CompareOp::Eq) continue;
            auto vars = c.variables();
            bool decided = std::all_of(vars.begin(), vars.end(),
                                       [&](const auto& x) { return ctx.seeded.count(x); });
            if (!decided)
                return realizable_with_note("guard " + g.str() +
                                            " depends on a missing answer; verdict is "
                                            "conservative");
        }

    const auto& reads = protocol.read_variables(conflict_query);
    std::optional<std::string> conservative;
    std::optional<VariableSet> first_emptied;
    for (const auto& path : guard_choices(guards, ctx.combine)) {
        if (constant_false(path)) continue;
        VariableSet v = guard_variables(path);
        v.insert(reads.begin(), reads.end());
        VariableSet closure = restrict_set(dep, v);
        closure.insert(v.begin(), v.end());
        bool blocked = false;
        for (const auto& x : closure) {
            int q = protocol.instantiating_query(x);
            if (conflicting.count(q) && !conservative)
                conservative = "depends on '" + x + "' from conflicting query " +
                               std::to_string(q) + "; verdict is conservative";
            blocked = blocked || conflicting.count(q);
        }
        if (blocked) continue;

        ctx.emptied_at.reset();
        const CacheEntry* e = verify_impl(v, conflict_query, path, ctx, protocol, db, dep);
        if (!e) {
            if (!first_emptied) first_emptied = ctx.emptied_at.value_or(v);
            continue;
        }
        // The conflicting query is only posed with values for what it reads.
        const Relation& delta = e->relation;
        for (const auto& row : delta.rows()) {
            bool defined = true;
            for (const auto& r : reads)
                if (row[*delta.column_index(r)].is_null()) defined = false;
            if (!defined) continue;
            std::map<std::string, Value> witness;
            for (std::size_t i = 0; i < row.size(); ++i) witness[delta.columns()[i].name] = row[i];
            out.verdict = Verdict::Realizable;
            out.witness = std::move(witness);
            return out;
        }
        if (!first_emptied) first_emptied = v;
    }
    if (conservative) return realizable_with_note(*conservative);
    out.verdict = Verdict::Spurious;
    // Without any candidate the guards themselves are unsatisfiable.
    out.emptied_at = to_vector(first_emptied.value_or(VariableSet{}));
    return out;
}

}  // namespace

bool verify_conflict(const VariableSet& v, int conflict_query, VerifyContext& ctx,
                     const Protocol& protocol, const Database& db, const DependencyInfo& dep) {
    return verify_impl(v, conflict_query, protocol.path_conditions(conflict_query), ctx, protocol,
                       db, dep) != nullptr;
}

const CacheEntry* find_cached(const VerifyContext& ctx, const VariableSet& v, int conflict_query,
                              const Protocol& protocol, const DependencyInfo& dep) {
    auto it = ctx.cache.find(make_plan(v, protocol.path_conditions(conflict_query), dep).key);
    return it == ctx.cache.end() ? nullptr : &it->second;
}

namespace detail {

SpuriousnessReport verify_targets(const Protocol& protocol, const Database& db,
                                  const std::set<int>& conflicting, const std::set<int>& targets,
                                  VerifyContext& ctx) {
    DependencyInfo dep = constrain_relation(protocol);
    SpuriousnessReport report;
    for (int id : targets) report.push_back(verify_one(id, conflicting, ctx, protocol, db, dep));
    return report;
}

}  // namespace detail

SpuriousnessReport verify_all(const Protocol& protocol, const Database& db,
                              const std::vector<Mismatch>& conflicts, VerifyContext& ctx) {
    std::set<int> ids;
    for (const auto& m : conflicts) ids.insert(m.query_id);
    return detail::verify_targets(protocol, db, ids, ids, ctx);
}

SpuriousnessReport verify_all(const Protocol& protocol, const OntologyGraph& server,
                              const Database& db, const std::vector<Mismatch>& conflicts,
                              VerifyOptions options) {
    (void)server;
    VerifyContext ctx;
    ctx.combine = options.mode;
    return verify_all(protocol, db, conflicts, ctx);
}

}  // namespace semproto
