#include "semproto/oracle.hpp"

#include <set>

#include "semproto/error.hpp"

namespace semproto {

namespace {

using Env = std::map<std::string, Value, std::less<>>;

// Rows of a class and all its instantiable descendants, keyed by the class's
// effective properties.
struct Extent {
    std::vector<std::string> properties;
    std::vector<std::vector<Value>> rows;
};

struct Frame {
    const std::vector<Statement>* block;
    std::size_t next;
};

class Executor {
public:
    Executor(const Protocol& p, const Database& db, int target, const OracleOptions& options)
        : protocol_(p), db_(db), target_(target), options_(options) {
        guards_ = p.path_conditions(target);
        reads_ = p.read_variables(target);
    }

    Enumeration run() {
        run_from({Frame{&protocol_.statements(), 0}}, Env{}, OracleTrace{});
        return std::move(result_);
    }

private:
    bool done() const {
        return result_.bound_exceeded || result_.traces.size() >= options_.max_traces;
    }

    bool tick() {
        if (++result_.steps > options_.max_steps) result_.bound_exceeded = true;
        return !result_.bound_exceeded;
    }

    static Lookup lookup_in(const Env& env) {
        return [&env](std::string_view name) -> const Value* {
            auto it = env.find(name);
            return it == env.end() ? nullptr : &it->second;
        };
    }

    void run_from(std::vector<Frame> stack, Env env, OracleTrace trace) {
        while (!stack.empty()) {
            if (done()) return;
            Frame& f = stack.back();
            if (f.next == f.block->size()) {
                stack.pop_back();
                continue;
            }
            const Statement& s = (*f.block)[f.next++];
            if (const auto* b = std::get_if<Branch>(&s.node)) {
                if (!tick()) return;
                bool holds = true;
                for (const auto& c : b->conditions) holds = holds && evaluate(c, lookup_in(env));
                trace.branches.push_back({b->id, holds});
                if (holds)
                    stack.push_back({&b->then_block, 0});
                else if (b->else_block)
                    stack.push_back({&*b->else_block, 0});
                continue;
            }
            const auto* q = std::get_if<Query>(&s.node);
            if (!q) continue;
            if (q->id == target_) {
                if (reached(env)) {
                    trace.bindings.insert(env.begin(), env.end());
                    result_.traces.push_back(std::move(trace));
                }
                return;
            }
            if (!tick()) return;
            std::vector<std::map<std::string, Value>> answers;
            if (auto fixed = options_.fixed_answers.find(q->id);
                fixed != options_.fixed_answers.end()) {
                if (fixed->second) answers.push_back(fresh_part(*q, *fixed->second));
            } else {
                answers = answer(*q, env);
            }
            const auto& fresh = protocol_.new_variables(q->id);
            if (answers.empty()) {
                std::map<std::string, Value> none;
                for (const auto& v : fresh) none[v] = Value::null();
                if (!allowed(none)) return;
                Env next = env;
                next.insert(none.begin(), none.end());
                OracleTrace t = trace;
                t.answers.push_back({q->id, std::nullopt});
                run_from(stack, std::move(next), std::move(t));
                return;
            }
            for (const auto& a : answers) {
                if (done()) return;
                if (!allowed(a)) continue;
                Env next = env;
                next.insert(a.begin(), a.end());
                OracleTrace t = trace;
                t.answers.push_back({q->id, a});
                run_from(stack, std::move(next), std::move(t));
            }
            return;
        }
    }

    std::map<std::string, Value> fresh_part(const Query& q,
                                            const std::map<std::string, Value>& given) const {
        std::map<std::string, Value> out;
        for (const auto& v : protocol_.new_variables(q.id)) {
            auto it = given.find(v);
            out[v] = it == given.end() ? Value::null() : it->second;
        }
        return out;
    }

    bool reached(const Env& env) const {
        for (const auto& r : reads_) {
            auto it = env.find(r);
            if (it == env.end() || it->second.is_null()) return false;
        }
        for (const auto& g : guards_)
            if (!evaluate(g, lookup_in(env))) return false;
        return true;
    }

    bool allowed(const std::map<std::string, Value>& binding) const {
        for (const auto& [var, value] : binding) {
            auto it = options_.constraints.find(var);
            if (it != options_.constraints.end() && !(it->second == value)) return false;
        }
        return true;
    }

    // nullopt when the server ontology cannot answer the query.
    std::optional<std::vector<Extent>> extents(const Query& q) {
        const OntologyGraph& onto = db_.ontology();
        std::vector<Extent> out;
        for (const auto& ref : q.classes) {
            const ClassNode* prev = nullptr;
            for (const auto& name : ref.sequence) {
                const ClassNode* c = onto.find_match(name);
                if (!c || (prev && !onto.is_subclass(prev->name, c->name))) return std::nullopt;
                prev = c;
            }
            out.push_back(extent_of(prev->name));
        }
        for (const auto& b : q.bindings) {
            if (b.is_wildcard()) continue;
            bool covered = false;
            for (const auto& e : out)
                for (const auto& p : e.properties) covered = covered || iequals(p, b.attribute);
            if (!covered) return std::nullopt;
        }
        return out;
    }

    const Extent& extent_of(const std::string& cls) {
        auto it = extent_cache_.find(cls);
        if (it != extent_cache_.end()) return it->second;
        const OntologyGraph& onto = db_.ontology();
        Extent e;
        e.properties = onto.effective_properties(cls);
        for (const auto& d : onto.descendants(cls)) {
            auto t = db_.tables().find(d);
            if (t == db_.tables().end()) continue;
            std::vector<std::size_t> idx;
            for (const auto& p : e.properties) idx.push_back(*t->second.column_index(p));
            for (const auto& row : t->second.rows()) {
                std::vector<Value> r;
                for (auto i : idx) r.push_back(row[i]);
                e.rows.push_back(std::move(r));
            }
        }
        return extent_cache_.emplace(cls, std::move(e)).first->second;
    }

    std::vector<std::map<std::string, Value>> answer(const Query& q, const Env& env) {
        auto exts = extents(q);
        if (!exts) return {};
        const auto& fresh = protocol_.new_variables(q.id);
        std::set<std::vector<Value>> seen;
        std::vector<std::map<std::string, Value>> out;
        Env local = env;
        std::set<std::string> bound_here;
        choose(q, *exts, 0, local, bound_here, [&](const Env& full) {
            for (const auto& c : q.where)
                if (!evaluate(c, lookup_in(full))) return;
            std::vector<Value> key;
            std::map<std::string, Value> a;
            for (const auto& v : fresh) {
                key.push_back(full.at(v));
                a[v] = full.at(v);
            }
            if (seen.insert(key).second) out.push_back(std::move(a));
        });
        return out;
    }

    template <class Emit>
    void choose(const Query& q, const std::vector<Extent>& exts, std::size_t i, Env& local,
                std::set<std::string>& bound_here, const Emit& emit) {
        if (i == exts.size()) {
            emit(local);
            return;
        }
        const Extent& e = exts[i];
        for (const auto& row : e.rows) {
            Env saved = local;
            auto saved_bound = bound_here;
            bool ok = true;
            for (const auto& b : q.bindings) {
                if (b.is_wildcard() || !ok) continue;
                for (std::size_t k = 0; k < e.properties.size() && ok; ++k) {
                    if (!iequals(e.properties[k], b.attribute)) continue;
                    const Value& v = row[k];
                    const std::string& var = *b.variable;
                    auto it = local.find(var);
                    bool fixed = it != local.end() &&
                                 (bound_here.count(var) || !protocol_.new_variables(q.id).count(var));
                    if (fixed) {
                        ok = !v.is_null() && !it->second.is_null() && it->second == v;
                    } else {
                        local[var] = v;
                        bound_here.insert(var);
                    }
                }
            }
            if (ok) choose(q, exts, i + 1, local, bound_here, emit);
            local = std::move(saved);
            bound_here = std::move(saved_bound);
        }
    }

    const Protocol& protocol_;
    const Database& db_;
    int target_;
    const OracleOptions& options_;
    std::vector<Guard> guards_;
    std::set<std::string> reads_;
    std::map<std::string, Extent> extent_cache_;
    Enumeration result_;
};

}  // namespace

Enumeration enumerate_reaching_traces(const Protocol& protocol, const Database& db, int target,
                                      OracleOptions options) {
    protocol.query(target);
    return Executor(protocol, db, target, options).run();
}

bool is_reachable(const Protocol& protocol, const Database& db, int target,
                  OracleOptions options) {
    options.max_traces = 1;
    Enumeration e = enumerate_reaching_traces(protocol, db, target, options);
    if (!e.traces.empty()) return true;
    if (e.bound_exceeded)
        throw Error("oracle gave up after " + std::to_string(options.max_steps) +
                    " steps without reaching query " + std::to_string(target));
    return false;
}

}  // namespace semproto
