#include <algorithm>
#include <functional>

#include "semproto/error.hpp"
#include "semproto/ontology.hpp"
#include "semproto/protocol.hpp"

namespace semproto {

std::string ClassRef::str() const {
    std::string out;
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        if (i) out += '.';
        out += sequence[i];
    }
    return out;
}

std::vector<std::string> Query::variables() const {
    std::vector<std::string> out;
    for (const auto& b : bindings)
        if (b.variable && std::find(out.begin(), out.end(), *b.variable) == out.end())
            out.push_back(*b.variable);
    return out;
}

std::string Query::classes_str() const {
    std::string out;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (i) out += ", ";
        out += classes[i].str();
    }
    return out;
}

bool Branch::operator==(const Branch& other) const {
    return id == other.id && conditions == other.conditions && then_block == other.then_block &&
           else_block == other.else_block;
}

namespace {

void renumber(std::vector<Statement>& block, int& next_query, int& next_branch) {
    for (auto& st : block) {
        if (auto* q = std::get_if<Query>(&st.node)) {
            q->id = next_query++;
        } else if (auto* b = std::get_if<Branch>(&st.node)) {
            b->id = next_branch++;
            renumber(b->then_block, next_query, next_branch);
            if (b->else_block) renumber(*b->else_block, next_query, next_branch);
        }
    }
}

}  // namespace

Protocol Protocol::from_statements(std::vector<Statement> statements) {
    int q = 1, b = 1;
    renumber(statements, q, b);
    Protocol p;
    p.statements_ = std::move(statements);
    p.index();
    return p;
}

void Protocol::index() {
    // Scopes hold the variables visible at the current point; a variable
    // introduced inside a block is not visible after the block closes.
    std::vector<std::set<std::string>> scopes(1);
    std::vector<BranchStep> path;
    auto visible = [&](const std::string& v) {
        for (const auto& s : scopes)
            if (s.count(v)) return true;
        return false;
    };
    auto require_visible = [&](const std::string& v, const std::string& where) {
        if (visible(v)) return;
        if (introduced_by_.count(v))
            throw SemanticError("variable '" + v + "' read in " + where +
                                " is instantiated on a path that does not reach it");
        throw SemanticError("variable '" + v + "' read in " + where + " before instantiation");
    };

    std::function<void(const std::vector<Statement>&)> walk =
        [&](const std::vector<Statement>& block) {
            for (const auto& st : block) {
                if (const auto* q = std::get_if<Query>(&st.node)) {
                    std::string where = "query " + std::to_string(q->id);
                    if (q->bindings.empty()) throw SemanticError(where + " binds nothing");
                    if (q->classes.empty()) throw SemanticError(where + " names no class");
                    for (const auto& ref : q->classes) {
                        if (ref.sequence.empty())
                            throw SemanticError(where + " has an empty class reference");
                        for (std::size_t i = 1; i < ref.sequence.size(); ++i)
                            if (iequals(ref.sequence[i - 1], ref.sequence[i]))
                                throw SemanticError(where + ": repeated class '" +
                                                    ref.sequence[i] + "' in " + ref.str());
                    }
                    std::set<std::string> fresh, reads;
                    for (const auto& b : q->bindings) {
                        if (!b.variable) continue;
                        const auto& v = *b.variable;
                        if (visible(v)) {
                            reads.insert(v);
                        } else if (introduced_by_.count(v) && !fresh.count(v)) {
                            throw SemanticError("variable '" + v + "' in " + where +
                                                " is already instantiated by query " +
                                                std::to_string(introduced_by_[v]) +
                                                " on another path");
                        } else {
                            fresh.insert(v);
                            introduced_by_.emplace(v, q->id);
                        }
                    }
                    for (const auto& c : q->where)
                        for (const auto& v : c.variables()) {
                            if (fresh.count(v)) continue;
                            require_visible(v, where);
                            reads.insert(v);
                        }
                    scopes.back().insert(fresh.begin(), fresh.end());
                    queries_.push_back(*q);
                    enclosing_.push_back(path);
                    new_vars_.push_back(std::move(fresh));
                    read_vars_.push_back(std::move(reads));
                } else if (const auto* br = std::get_if<Branch>(&st.node)) {
                    std::string where = "branch " + std::to_string(br->id);
                    if (br->conditions.empty()) throw SemanticError(where + " has no condition");
                    for (const auto& c : br->conditions)
                        for (const auto& v : c.variables()) require_visible(v, where);
                    Branch shallow;
                    shallow.id = br->id;
                    shallow.conditions = br->conditions;
                    branches_.push_back(std::move(shallow));
                    for (bool then_side : {true, false}) {
                        const auto* blk = then_side ? &br->then_block
                                                    : (br->else_block ? &*br->else_block : nullptr);
                        if (!blk) continue;
                        path.push_back({br->id, then_side});
                        scopes.emplace_back();
                        walk(*blk);
                        scopes.pop_back();
                        path.pop_back();
                    }
                } else {
                    const auto& a = std::get<Action>(st.node);
                    for (const auto& o : a.operands)
                        if (o.is_variable()) require_visible(o.var().name, "action " + a.name);
                }
            }
        };
    walk(statements_);
}

const Query& Protocol::query(int id) const {
    if (id < 1 || id > static_cast<int>(queries_.size()))
        throw UnknownQueryError("unknown query " + std::to_string(id));
    return queries_[id - 1];
}

const Branch& Protocol::branch(int id) const {
    if (id < 1 || id > static_cast<int>(branches_.size()))
        throw UnknownQueryError("unknown branch " + std::to_string(id));
    return branches_[id - 1];
}

const std::set<std::string>& Protocol::new_variables(int query_id) const {
    query(query_id);
    return new_vars_[query_id - 1];
}

const std::set<std::string>& Protocol::read_variables(int query_id) const {
    query(query_id);
    return read_vars_[query_id - 1];
}

std::map<std::pair<int, std::string>, Occurrence> Protocol::classify_variables() const {
    std::map<std::pair<int, std::string>, Occurrence> out;
    for (const auto& q : queries_) {
        for (const auto& v : new_vars_[q.id - 1]) out[{q.id, v}] = Occurrence::Uninstantiated;
        for (const auto& v : read_vars_[q.id - 1]) out[{q.id, v}] = Occurrence::Instantiated;
    }
    return out;
}

int Protocol::instantiating_query(std::string_view variable) const {
    auto it = introduced_by_.find(variable);
    if (it == introduced_by_.end())
        throw UnknownVariableError("variable '" + std::string(variable) +
                                   "' is never instantiated");
    return it->second;
}

bool Protocol::has_variable(std::string_view variable) const {
    return introduced_by_.find(variable) != introduced_by_.end();
}

std::vector<std::string> Protocol::all_variables() const {
    std::vector<std::string> out;
    for (const auto& [v, q] : introduced_by_) out.push_back(v);
    return out;
}

const std::vector<BranchStep>& Protocol::enclosing_branches(int query_id) const {
    query(query_id);
    return enclosing_[query_id - 1];
}

std::vector<Guard> Protocol::path_conditions(int query_id) const {
    std::vector<Guard> out;
    for (const auto& step : enclosing_branches(query_id)) {
        const auto& conds = branch(step.branch_id).conditions;
        if (step.then_side) {
            for (const auto& c : conds) out.push_back(Guard{{c}});
        } else {
            Guard g;
            for (const auto& c : conds) g.any_of.push_back(negate(c));
            out.push_back(std::move(g));
        }
    }
    return out;
}

std::set<std::string> Protocol::path_variables(int query_id) const {
    std::set<std::string> out;
    for (const auto& g : path_conditions(query_id))
        for (auto& v : g.variables()) out.insert(v);
    return out;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void print_block(const std::vector<Statement>& block, int depth, std::string& out) {
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    for (const auto& st : block) {
        if (const auto* q = std::get_if<Query>(&st.node)) {
            out += pad + "get (";
            for (std::size_t i = 0; i < q->bindings.size(); ++i) {
                if (i) out += ", ";
                const auto& b = q->bindings[i];
                out += b.attribute + ": " + (b.variable ? *b.variable : std::string("*"));
            }
            out += ") from " + q->classes_str();
            if (!q->where.empty()) {
                out += " where ";
                for (const auto& c : q->where) out += c.str();
            }
            out += ";\n";
        } else if (const auto* b = std::get_if<Branch>(&st.node)) {
            out += pad + "if ";
            for (const auto& c : b->conditions) out += c.str();
            out += " {\n";
            print_block(b->then_block, depth + 1, out);
            out += pad + "}";
            if (b->else_block) {
                out += " else {\n";
                print_block(*b->else_block, depth + 1, out);
                out += pad + "}";
            }
            out += "\n";
        } else {
            const auto& a = std::get<Action>(st.node);
            out += pad + "do " + a.name + "(";
            for (std::size_t i = 0; i < a.operands.size(); ++i) {
                if (i) out += ", ";
                out += a.operands[i].str();
            }
            out += ");\n";
        }
    }
}

nlohmann::ordered_json operand_json(const Operand& o) {
    if (o.is_variable()) {
        nlohmann::ordered_json j = {{"var", o.var().name}};
        switch (o.var().field) {
            case DateField::Year: j["field"] = "year"; break;
            case DateField::Month: j["field"] = "month"; break;
            case DateField::Day: j["field"] = "day"; break;
            case DateField::None: break;
        }
        return j;
    }
    return {{"literal", o.value().literal()}, {"tag", tag_name(o.value().tag())}};
}

nlohmann::ordered_json condition_json(const Condition& c) {
    return nlohmann::ordered_json{
        {"lhs", operand_json(c.lhs)}, {"op", op_symbol(c.op)}, {"rhs", operand_json(c.rhs)}};
}

nlohmann::ordered_json block_json(const std::vector<Statement>& block) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& st : block) {
        nlohmann::ordered_json j;
        if (const auto* q = std::get_if<Query>(&st.node)) {
            j["kind"] = "query";
            j["id"] = q->id;
            j["bindings"] = nlohmann::ordered_json::array();
            for (const auto& b : q->bindings)
                j["bindings"].push_back(nlohmann::ordered_json{
                    {"attribute", b.attribute},
                    {"variable", b.variable ? nlohmann::ordered_json(*b.variable) : nlohmann::ordered_json()}});
            j["from"] = nlohmann::ordered_json::array();
            for (const auto& c : q->classes) j["from"].push_back(c.str());
            j["where"] = nlohmann::ordered_json::array();
            for (const auto& c : q->where) j["where"].push_back(condition_json(c));
        } else if (const auto* b = std::get_if<Branch>(&st.node)) {
            j["kind"] = "branch";
            j["id"] = b->id;
            j["conditions"] = nlohmann::ordered_json::array();
            for (const auto& c : b->conditions) j["conditions"].push_back(condition_json(c));
            j["then"] = block_json(b->then_block);
            if (b->else_block) j["else"] = block_json(*b->else_block);
        } else {
            const auto& a = std::get<Action>(st.node);
            j["kind"] = "action";
            j["name"] = a.name;
            j["operands"] = nlohmann::ordered_json::array();
            for (const auto& o : a.operands) j["operands"].push_back(operand_json(o));
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace

std::string Protocol::print() const {
    std::string out;
    print_block(statements_, 0, out);
    return out;
}

nlohmann::ordered_json Protocol::to_json() const {
    return nlohmann::ordered_json{{"statements", block_json(statements_)}};
}

}  // namespace semproto
