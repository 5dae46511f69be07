#include "semproto/condition.hpp"

#include <algorithm>

#include "semproto/error.hpp"

namespace semproto {

std::string_view op_symbol(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "=";
        case CompareOp::Ne: return "!=";
        case CompareOp::Lt: return "<";
        case CompareOp::Gt: return ">";
        case CompareOp::Le: return "<=";
        case CompareOp::Ge: return ">=";
    }
    return "?";
}

CompareOp complement(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return CompareOp::Ne;
        case CompareOp::Ne: return CompareOp::Eq;
        case CompareOp::Lt: return CompareOp::Ge;
        case CompareOp::Gt: return CompareOp::Le;
        case CompareOp::Le: return CompareOp::Gt;
        case CompareOp::Ge: return CompareOp::Lt;
    }
    return op;
}

std::string_view combine_name(Combine mode) {
    return mode == Combine::Conjunction ? "conjunction" : "disjunction";
}

std::string Operand::str() const {
    if (!is_variable()) return value().literal();
    const auto& v = var();
    switch (v.field) {
        case DateField::None: return v.name;
        case DateField::Year: return v.name + ".year";
        case DateField::Month: return v.name + ".month";
        case DateField::Day: return v.name + ".day";
    }
    return v.name;
}

std::string Condition::str() const {
    return "(" + lhs.str() + " " + std::string(op_symbol(op)) + " " + rhs.str() + ")";
}

std::vector<std::string> Condition::variables() const {
    std::vector<std::string> out;
    for (const Operand* o : {&lhs, &rhs}) {
        if (o->is_variable() && std::find(out.begin(), out.end(), o->var().name) == out.end())
            out.push_back(o->var().name);
    }
    return out;
}

Condition negate(const Condition& c) { return Condition{c.lhs, complement(c.op), c.rhs}; }

std::vector<std::string> Guard::variables() const {
    std::vector<std::string> out;
    for (const auto& c : any_of)
        for (auto& v : c.variables())
            if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return out;
}

std::string Guard::str() const {
    std::string out;
    for (std::size_t i = 0; i < any_of.size(); ++i) {
        if (i) out += " or ";
        out += any_of[i].str();
    }
    return out;
}

bool comparable(Tag a, Tag b) {
    auto numeric = [](Tag t) { return t == Tag::Int || t == Tag::Decimal; };
    if (a == Tag::Null || b == Tag::Null) return true;
    return a == b || (numeric(a) && numeric(b));
}

namespace {

Value resolve(const Operand& o, const Lookup& lookup) {
    if (!o.is_variable()) return o.value();
    const auto& ref = o.var();
    const Value* v = lookup(ref.name);
    if (!v) throw UnknownColumnError("unbound variable '" + ref.name + "'");
    if (ref.field == DateField::None || v->is_null()) return *v;
    if (v->tag() != Tag::Date)
        throw TagMismatchError("field access on non-date variable '" + ref.name + "'");
    const Date& d = v->as_date();
    switch (ref.field) {
        case DateField::Year: return Value::integer(d.year);
        case DateField::Month: return Value::integer(d.month);
        case DateField::Day: return Value::integer(d.day);
        case DateField::None: break;
    }
    return *v;
}

template <typename T>
bool apply(CompareOp op, const T& a, const T& b) {
    switch (op) {
        case CompareOp::Eq: return a == b;
        case CompareOp::Ne: return a != b;
        case CompareOp::Lt: return a < b;
        case CompareOp::Gt: return a > b;
        case CompareOp::Le: return a <= b;
        case CompareOp::Ge: return a >= b;
    }
    return false;
}

double numeric(const Value& v) {
    return v.tag() == Tag::Int ? static_cast<double>(v.as_int()) : v.as_decimal();
}

}  // namespace

bool evaluate(const Condition& c, const Lookup& lookup) {
    Value a = resolve(c.lhs, lookup);
    Value b = resolve(c.rhs, lookup);
    if (c.is_null_test()) {
        bool both_null = a.is_null() && b.is_null();
        if (c.op == CompareOp::Eq) return both_null;
        if (c.op == CompareOp::Ne) return !both_null;
        return false;
    }
    if (a.is_null() || b.is_null()) return false;
    if (!comparable(a.tag(), b.tag()))
        throw TagMismatchError("incomparable tags in " + c.str() + ": " +
                               std::string(tag_name(a.tag())) + " vs " +
                               std::string(tag_name(b.tag())));
    switch (a.tag()) {
        case Tag::Int:
            if (b.tag() == Tag::Int) return apply(c.op, a.as_int(), b.as_int());
            return apply(c.op, numeric(a), numeric(b));
        case Tag::Decimal: return apply(c.op, numeric(a), numeric(b));
        case Tag::Str: return apply(c.op, a.as_str(), b.as_str());
        case Tag::Date: return apply(c.op, a.as_date(), b.as_date());
        case Tag::Null: break;
    }
    return false;
}

bool evaluate(const Guard& g, const Lookup& lookup) {
    for (const auto& c : g.any_of)
        if (evaluate(c, lookup)) return true;
    return false;
}

void check_condition(const Condition& c, const TagLookup& tags) {
    auto operand_tag = [&](const Operand& o) -> Tag {
        if (!o.is_variable()) return o.value().tag();
        const auto& ref = o.var();
        auto t = tags(ref.name);
        if (!t) throw UnknownColumnError("unknown column '" + ref.name + "' in " + c.str());
        if (ref.field == DateField::None) return *t;
        if (*t != Tag::Date)
            throw TagMismatchError("field access on non-date column '" + ref.name + "'");
        return Tag::Int;
    };
    Tag a = operand_tag(c.lhs);
    Tag b = operand_tag(c.rhs);
    if (!comparable(a, b))
        throw TagMismatchError("incomparable tags in " + c.str() + ": " +
                               std::string(tag_name(a)) + " vs " + std::string(tag_name(b)));
}

}  // namespace semproto
