#include <cmath>

#include "semproto/error.hpp"
#include "semproto/spuriousness.hpp"
#include "verify_detail.hpp"

namespace semproto {

namespace {

Value json_value(const nlohmann::json& j, std::optional<Tag> tag, const std::string& where) {
    if (j.is_null()) return Value::null();
    if (j.is_boolean()) throw InconsistentTraceError(where + ": booleans are not values");
    if (j.is_number_integer()) {
        auto n = j.get<std::int64_t>();
        if (tag == Tag::Decimal) return Value::decimal(static_cast<double>(n));
        if (!tag || tag == Tag::Int) return Value::integer(n);
    } else if (j.is_number()) {
        double d = j.get<double>();
        if (!tag || tag == Tag::Decimal) return Value::decimal(d);
        if (tag == Tag::Int && std::floor(d) == d) return Value::integer(static_cast<std::int64_t>(d));
    } else if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (tag == Tag::Date) {
            if (auto d = Date::parse(s)) return Value::date(*d);
            throw InconsistentTraceError(where + ": '" + s + "' is not a YYYY-MM-DD date");
        }
        if (!tag || tag == Tag::Str) return Value::str(s);
    }
    throw InconsistentTraceError(where + ": " + j.dump() + " does not fit type " +
                                 std::string(tag_name(*tag)));
}

int json_int(const nlohmann::json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number_integer())
        throw InconsistentTraceError(where + ": '" + key + "' must be an integer");
    return it->get<int>();
}

}  // namespace

StepTrace parse_trace(const nlohmann::json& doc, const Protocol& protocol, const Database& db) {
    if (!doc.is_array()) throw InconsistentTraceError("trace must be a JSON array");
    StepTrace trace;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& entry = doc[i];
        std::string where = "trace entry " + std::to_string(i);
        if (!entry.is_object()) throw InconsistentTraceError(where + " is not an object");
        TraceEvent ev;
        if (entry.contains("queryId")) {
            int id = json_int(entry, "queryId", where);
            if (id < 1 || id > static_cast<int>(protocol.queries().size()))
                throw InconsistentTraceError(where + ": no query " + std::to_string(id));
            if (!entry.contains("answer"))
                throw InconsistentTraceError(where + ": 'answer' is required with 'queryId'");
            const auto& answer = entry["answer"];
            ev.query_id = id;
            if (answer.is_null()) {
                ev.answer = std::optional<std::map<std::string, Value>>{};
            } else if (answer.is_object()) {
                const Query& q = protocol.query(id);
                auto vars = q.variables();
                std::map<std::string, Value> values;
                for (const auto& [name, value] : answer.items()) {
                    if (std::find(vars.begin(), vars.end(), name) == vars.end())
                        throw InconsistentTraceError(where + ": query " + std::to_string(id) +
                                                     " binds no variable '" + name + "'");
                    values[name] = json_value(value, variable_tag(protocol, db, name),
                                              where + ", variable '" + name + "'");
                }
                ev.answer = std::move(values);
            } else {
                throw InconsistentTraceError(where + ": 'answer' must be an object or null");
            }
        }
        if (entry.contains("branch")) {
            const auto& b = entry["branch"];
            if (!b.is_object()) throw InconsistentTraceError(where + ": 'branch' must be an object");
            BranchDecision d;
            d.branch_id = json_int(b, b.contains("id") ? "id" : "index", where + ", branch");
            if (d.branch_id < 1 || d.branch_id > protocol.branch_count())
                throw InconsistentTraceError(where + ": no branch " + std::to_string(d.branch_id));
            auto taken = b.find("taken");
            if (taken == b.end() || !taken->is_boolean())
                throw InconsistentTraceError(where + ": branch 'taken' must be a boolean");
            d.taken = taken->get<bool>();
            ev.branch = d;
        }
        if (!ev.query_id && !ev.branch)
            throw InconsistentTraceError(where + " has neither 'queryId' nor 'branch'");
        trace.push_back(std::move(ev));
    }
    return trace;
}

SpuriousnessReport step_verify(const Protocol& protocol, const OntologyGraph& server,
                               const Database& db, const std::vector<Mismatch>& conflicts,
                               const StepTrace& trace, VerifyOptions options) {
    (void)server;
    VerifyContext ctx;
    ctx.mode = VerifyContext::Mode::Step;
    ctx.combine = options.mode;

    std::set<int> conflicting;
    for (const auto& m : conflicts) conflicting.insert(m.query_id);

    std::map<int, bool> decisions;
    auto decide = [&](int branch, bool taken, const std::string& why) {
        auto [it, inserted] = decisions.emplace(branch, taken);
        if (!inserted && it->second != taken)
            throw InconsistentTraceError("branch " + std::to_string(branch) +
                                         " is decided both ways (" + why + ")");
    };
    auto lookup = [&](std::string_view name) -> const Value* {
        auto it = ctx.seeded.find(std::string(name));
        return it == ctx.seeded.end() ? nullptr : &it->second;
    };

    std::set<int> answered;
    for (const auto& ev : trace) {
        if (ev.query_id) {
            int id = *ev.query_id;
            std::string label = "query " + std::to_string(id);
            if (conflicting.count(id))
                throw InconsistentTraceError(label + " has an ontology conflict and cannot be answered");
            if (!answered.insert(id).second)
                throw InconsistentTraceError(label + " is answered twice");
            for (const auto& r : protocol.read_variables(id))
                if (!ctx.seeded.count(r))
                    throw InconsistentTraceError(label + " is answered before '" + r +
                                                 "' has a value");
            for (const auto& step : protocol.enclosing_branches(id))
                decide(step.branch_id, step.then_side, label + " was answered");

            const auto& fresh = protocol.new_variables(id);
            if (ev.answer && *ev.answer) {
                const auto& values = **ev.answer;
                for (const auto& var : fresh)
                    if (!values.count(var))
                        throw InconsistentTraceError("answer to " + label + " lacks '" + var + "'");
                for (const auto& [var, value] : values)
                    if (!fresh.count(var) && !(ctx.seeded.at(var) == value))
                        throw InconsistentTraceError("answer to " + label + " changes '" + var +
                                                     "' from " + ctx.seeded.at(var).literal() +
                                                     " to " + value.literal());
                auto answer_lookup = [&](std::string_view name) -> const Value* {
                    auto it = values.find(std::string(name));
                    return it != values.end() ? &it->second : lookup(name);
                };
                for (const auto& c : protocol.query(id).where)
                    if (!evaluate(c, answer_lookup))
                        throw InconsistentTraceError("answer to " + label + " violates " + c.str());
                for (const auto& var : fresh) ctx.seeded[var] = values.at(var);
            } else {
                for (const auto& var : fresh) ctx.seeded[var] = Value::null();
            }
        }
        if (ev.branch) decide(ev.branch->branch_id, ev.branch->taken, "explicit decision");
    }

    for (int b = 1; b <= protocol.branch_count(); ++b) {
        const Branch& branch = protocol.branch(b);
        bool known = true;
        for (const auto& c : branch.conditions)
            for (const auto& var : c.variables())
                if (!ctx.seeded.count(var)) known = false;
        if (!known) continue;
        bool holds = true;
        for (const auto& c : branch.conditions) holds = holds && evaluate(c, lookup);
        auto it = decisions.find(b);
        if (it != decisions.end() && it->second != holds)
            throw InconsistentTraceError("branch " + std::to_string(b) + " is decided " +
                                         (it->second ? "taken" : "not taken") +
                                         " but its condition evaluates to " +
                                         (holds ? "true" : "false"));
        decisions[b] = holds;
    }

    std::set<int> targets;
    for (int id : conflicting) {
        bool pruned = false;
        for (const auto& step : protocol.enclosing_branches(id)) {
            auto it = decisions.find(step.branch_id);
            if (it != decisions.end() && it->second != step.then_side) pruned = true;
        }
        if (!pruned) targets.insert(id);
    }
    return detail::verify_targets(protocol, db, conflicting, targets, ctx);
}

}  // namespace semproto
