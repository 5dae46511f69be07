#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "semproto/value.hpp"

namespace semproto {

enum class CompareOp { Eq, Ne, Lt, Gt, Le, Ge };

std::string_view op_symbol(CompareOp op);
/// Logical complement under two-valued semantics: = <-> !=, < <-> >=, > <-> <=.
CompareOp complement(CompareOp op);

enum class DateField { None, Year, Month, Day };

struct VariableRef {
    std::string name;
    DateField field = DateField::None;

    bool operator==(const VariableRef&) const = default;
};

struct Operand {
    std::variant<VariableRef, Value> term;

    static Operand variable(std::string name, DateField field = DateField::None) {
        return Operand{VariableRef{std::move(name), field}};
    }
    static Operand literal(Value v) { return Operand{std::move(v)}; }

    bool is_variable() const { return std::holds_alternative<VariableRef>(term); }
    bool is_null_literal() const {
        return !is_variable() && std::get<Value>(term).is_null();
    }
    const VariableRef& var() const { return std::get<VariableRef>(term); }
    const Value& value() const { return std::get<Value>(term); }
    std::string str() const;

    bool operator==(const Operand&) const = default;
};

struct Condition {
    Operand lhs;
    CompareOp op = CompareOp::Eq;
    Operand rhs;

    /// `(lhs op rhs)` in protocol syntax.
    std::string str() const;
    /// Variable names referenced, in operand order, without duplicates.
    std::vector<std::string> variables() const;
    /// True when one side is the `null` literal.
    bool is_null_test() const { return lhs.is_null_literal() || rhs.is_null_literal(); }

    bool operator==(const Condition&) const = default;
};

Condition negate(const Condition& c);

/// A disjunction of conditions. Path guards from a then-block are single
/// conditions; the guard of an else-block over `if (a)(b)` is `!a or !b`.
struct Guard {
    std::vector<Condition> any_of;

    std::vector<std::string> variables() const;
    std::string str() const;

    bool operator==(const Guard&) const = default;
};

enum class Combine { Conjunction, Disjunction };

std::string_view combine_name(Combine mode);

/// Resolves a variable to its current value; returns nullptr when unbound.
using Lookup = std::function<const Value*(std::string_view)>;

/// Null semantics: a comparison against the `null` literal is a null test
/// (`x = null` iff x is Null, `x != null` iff it is not, ordering ops are
/// false). Any other comparison involving a Null value is false.
/// Int and Decimal compare numerically; other mixed tags throw
/// TagMismatchError. Unbound variables throw UnknownColumnError.
bool evaluate(const Condition& c, const Lookup& lookup);
bool evaluate(const Guard& g, const Lookup& lookup);

/// Static tag check of a condition against column tags; throws
/// TagMismatchError / UnknownColumnError exactly when evaluate would on a
/// non-Null row.
using TagLookup = std::function<std::optional<Tag>(std::string_view)>;
void check_condition(const Condition& c, const TagLookup& tags);

bool comparable(Tag a, Tag b);

}  // namespace semproto
