#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "semproto/condition.hpp"

namespace semproto {

/// Specialization sequence `c1.c2...ck`; a singleton is an individual class.
struct ClassRef {
    std::vector<std::string> sequence;

    const std::string& terminal() const { return sequence.back(); }
    std::string str() const;

    bool operator==(const ClassRef&) const = default;
};

struct Binding {
    std::string attribute;
    std::optional<std::string> variable;  // nullopt = wildcard `*`

    bool is_wildcard() const { return !variable.has_value(); }
    bool operator==(const Binding&) const = default;
};

struct Query {
    int id = 0;  // 1-based, document order
    std::vector<Binding> bindings;
    std::vector<ClassRef> classes;
    std::vector<Condition> where;

    /// Distinct non-wildcard variables in binding order.
    std::vector<std::string> variables() const;
    /// `path` field of reports: class references joined by ", ".
    std::string classes_str() const;

    bool operator==(const Query&) const = default;
};

struct Action {
    std::string name;
    std::vector<Operand> operands;

    bool operator==(const Action&) const = default;
};

struct Statement;

struct Branch {
    int id = 0;  // 1-based, document order
    std::vector<Condition> conditions;  // conjunction
    std::vector<Statement> then_block;
    std::optional<std::vector<Statement>> else_block;

    bool operator==(const Branch& other) const;
};

struct Statement {
    std::variant<Query, Branch, Action> node;

    bool operator==(const Statement& other) const { return node == other.node; }
};

enum class Occurrence { Uninstantiated, Instantiated };

/// One enclosing branch of a statement: which branch and which side.
struct BranchStep {
    int branch_id = 0;
    bool then_side = true;

    bool operator==(const BranchStep&) const = default;
};

/// A parsed protocol plus the static indexes the checkers consume.
/// Immutable; cheap to share by const reference.
class Protocol {
public:
    Protocol() = default;

    /// Throws ParseError (with line/column) or SemanticError.
    static Protocol parse(std::string_view text);
    /// Validates and indexes an AST built in code. Throws SemanticError.
    static Protocol from_statements(std::vector<Statement> statements);

    const std::vector<Statement>& statements() const { return statements_; }
    const std::vector<Query>& queries() const { return queries_; }
    const Query& query(int id) const;
    const Branch& branch(int id) const;
    int branch_count() const { return static_cast<int>(branches_.size()); }

    /// Canonical source text; re-parses to an equal AST.
    std::string print() const;
    nlohmann::ordered_json to_json() const;

    std::map<std::pair<int, std::string>, Occurrence> classify_variables() const;
    /// Variables first bound by the query.
    const std::set<std::string>& new_variables(int query_id) const;
    /// Variables the query reads (previously instantiated, in bindings or where).
    const std::set<std::string>& read_variables(int query_id) const;
    /// Throws UnknownVariableError.
    int instantiating_query(std::string_view variable) const;
    bool has_variable(std::string_view variable) const;
    std::vector<std::string> all_variables() const;

    /// Enclosing branches from outermost to innermost. Throws UnknownQueryError.
    const std::vector<BranchStep>& enclosing_branches(int query_id) const;
    /// Guards that must hold on the unique path from the start to the query,
    /// outermost first. Else-sides are negated: single conditions flip their
    /// operator, multi-condition branches yield one disjunctive guard.
    std::vector<Guard> path_conditions(int query_id) const;
    /// Union of variables of path_conditions(query_id).
    std::set<std::string> path_variables(int query_id) const;

private:
    void index();

    std::vector<Statement> statements_;
    std::vector<Query> queries_;
    std::vector<Branch> branches_;  // shallow copies (blocks cleared), by id
    std::vector<std::vector<BranchStep>> enclosing_;
    std::vector<std::set<std::string>> new_vars_;
    std::vector<std::set<std::string>> read_vars_;
    std::map<std::string, int, std::less<>> introduced_by_;
};

}  // namespace semproto
