#include <algorithm>
#include <numeric>

#include "semproto/error.hpp"
#include "semproto/relstore.hpp"

namespace semproto {

Relation::Relation(std::string name, std::vector<Column> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {
    std::set<std::string> seen;
    for (const auto& c : columns_)
        if (!seen.insert(c.name).second)
            throw SchemaError("duplicate column '" + c.name + "' in relation " + name_);
}

Relation Relation::unit() {
    Relation r("unit", {});
    r.rows_.insert(Row{});
    return r;
}

std::vector<std::string> Relation::column_names() const {
    std::vector<std::string> out;
    for (const auto& c : columns_) out.push_back(c.name);
    return out;
}

std::optional<std::size_t> Relation::column_index(std::string_view column) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i].name == column) return i;
    return std::nullopt;
}

std::optional<Tag> Relation::column_tag(std::string_view column) const {
    if (auto i = column_index(column)) return columns_[*i].tag;
    return std::nullopt;
}

void Relation::insert(Row row) {
    if (row.size() != columns_.size())
        throw SchemaError("row arity " + std::to_string(row.size()) + " does not match " +
                          std::to_string(columns_.size()) + " columns of " + name_);
    for (std::size_t i = 0; i < row.size(); ++i)
        if (!row[i].is_null() && row[i].tag() != columns_[i].tag)
            throw TagMismatchError("value " + row[i].literal() + " does not fit column '" +
                                   columns_[i].name + "' of type " +
                                   std::string(tag_name(columns_[i].tag)));
    rows_.insert(std::move(row));
}

Relation canonical(const Relation& r) {
    auto names = r.column_names();
    std::sort(names.begin(), names.end());
    return project(r, names);
}

bool same_content(const Relation& a, const Relation& b) {
    auto an = a.column_names(), bn = b.column_names();
    std::sort(an.begin(), an.end());
    std::sort(bn.begin(), bn.end());
    if (an != bn) return false;
    return canonical(a) == canonical(b);
}

Relation natural_join(const Relation& left, const Relation& right) {
    std::vector<std::pair<std::size_t, std::size_t>> shared;
    std::vector<std::size_t> right_only;
    std::vector<Column> columns = left.columns();
    for (std::size_t j = 0; j < right.columns().size(); ++j) {
        const auto& rc = right.columns()[j];
        if (auto i = left.column_index(rc.name)) {
            if (left.columns()[*i].tag != rc.tag)
                throw TagMismatchError("join column '" + rc.name + "' has tag " +
                                       std::string(tag_name(left.columns()[*i].tag)) + " vs " +
                                       std::string(tag_name(rc.tag)));
            shared.emplace_back(*i, j);
        } else {
            right_only.push_back(j);
            columns.push_back(rc);
        }
    }
    Relation out(left.name() + "*" + right.name(), std::move(columns));
    for (const Row& l : left.rows()) {
        for (const Row& r : right.rows()) {
            bool match = std::all_of(shared.begin(), shared.end(), [&](const auto& p) {
                return !l[p.first].is_null() && l[p.first] == r[p.second];
            });
            if (!match) continue;
            Row merged = l;
            for (std::size_t j : right_only) merged.push_back(r[j]);
            out.insert(std::move(merged));
        }
    }
    return out;
}

Relation project(const Relation& r, const std::vector<std::string>& columns) {
    std::vector<std::size_t> idx;
    std::vector<Column> cols;
    for (const auto& name : columns) {
        auto i = r.column_index(name);
        if (!i) throw UnknownColumnError("unknown column '" + name + "' in " + r.name());
        idx.push_back(*i);
        cols.push_back(r.columns()[*i]);
    }
    Relation out(r.name(), std::move(cols));
    for (const Row& row : r.rows()) {
        Row p;
        p.reserve(idx.size());
        for (std::size_t i : idx) p.push_back(row[i]);
        out.insert(std::move(p));
    }
    return out;
}

namespace {

TagLookup tags_of(const Relation& r) {
    return [&r](std::string_view name) { return r.column_tag(name); };
}

Lookup row_lookup(const Relation& r, const Row& row) {
    return [&r, &row](std::string_view name) -> const Value* {
        auto i = r.column_index(name);
        return i ? &row[*i] : nullptr;
    };
}

}  // namespace

Relation select(const Relation& r, std::span<const Condition> conditions, Combine mode) {
    for (const auto& c : conditions) check_condition(c, tags_of(r));
    Relation out(r.name(), r.columns());
    for (const Row& row : r.rows()) {
        auto lookup = row_lookup(r, row);
        bool keep;
        if (mode == Combine::Conjunction) {
            keep = std::all_of(conditions.begin(), conditions.end(),
                               [&](const Condition& c) { return evaluate(c, lookup); });
        } else {
            keep = std::any_of(conditions.begin(), conditions.end(),
                               [&](const Condition& c) { return evaluate(c, lookup); });
        }
        if (keep) out.insert(row);
    }
    return out;
}

Relation select_guards(const Relation& r, std::span<const Guard> guards, Combine mode) {
    if (mode == Combine::Disjunction) {
        std::vector<Condition> flat;
        for (const auto& g : guards) flat.insert(flat.end(), g.any_of.begin(), g.any_of.end());
        return select(r, flat, Combine::Disjunction);
    }
    for (const auto& g : guards)
        for (const auto& c : g.any_of) check_condition(c, tags_of(r));
    Relation out(r.name(), r.columns());
    for (const Row& row : r.rows()) {
        auto lookup = row_lookup(r, row);
        if (std::all_of(guards.begin(), guards.end(),
                        [&](const Guard& g) { return evaluate(g, lookup); }))
            out.insert(row);
    }
    return out;
}

Relation set_union(const Relation& a, const Relation& b) {
    if (a.columns() != b.columns())
        throw SchemaError("union of relations with different schemas: " + a.name() + ", " +
                          b.name());
    Relation out = a;
    for (const Row& row : b.rows()) out.insert(row);
    return out;
}

}  // namespace semproto
