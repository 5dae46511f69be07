#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "semproto/condition.hpp"
#include "semproto/ontology.hpp"
#include "semproto/value.hpp"

namespace semproto {

struct Column {
    std::string name;
    Tag tag = Tag::Str;

    bool operator==(const Column&) const = default;
};

using Row = std::vector<Value>;

/// Named schema plus a set of rows. Rows are kept ordered so iteration,
/// printing and witness selection are deterministic.
class Relation {
public:
    Relation() = default;
    /// Throws SchemaError on duplicate column names.
    Relation(std::string name, std::vector<Column> columns);

    /// Zero columns, one empty row: the identity of natural join.
    static Relation unit();

    const std::string& name() const { return name_; }
    const std::vector<Column>& columns() const { return columns_; }
    std::vector<std::string> column_names() const;
    const std::set<Row>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }

    std::optional<std::size_t> column_index(std::string_view column) const;
    bool has_column(std::string_view column) const { return column_index(column).has_value(); }
    std::optional<Tag> column_tag(std::string_view column) const;

    /// Throws SchemaError on arity mismatch and TagMismatchError when a
    /// non-Null value disagrees with its column tag.
    void insert(Row row);
    void set_name(std::string name) { name_ = std::move(name); }

    /// Same columns in the same order and the same rows.
    bool operator==(const Relation& other) const {
        return columns_ == other.columns_ && rows_ == other.rows_;
    }

private:
    std::string name_;
    std::vector<Column> columns_;
    std::set<Row> rows_;
};

/// Same column set (any order) and the same rows after aligning columns.
bool same_content(const Relation& a, const Relation& b);
/// Copy with columns sorted by name.
Relation canonical(const Relation& r);

/// Rows agreeing on all shared columns; Null never matches. Without shared
/// columns this is the Cartesian product. Throws TagMismatchError when a
/// shared column has different tags.
Relation natural_join(const Relation& left, const Relation& right);

/// Restriction to `columns` with duplicate elimination. Throws UnknownColumnError.
Relation project(const Relation& r, const std::vector<std::string>& columns);

/// Rows satisfying all (Conjunction) or any (Disjunction) of the conditions.
/// Throws UnknownColumnError / TagMismatchError, even on empty input.
Relation select(const Relation& r, std::span<const Condition> conditions, Combine mode);

/// Guards are disjunctions. Conjunction mode keeps rows satisfying every
/// guard; Disjunction mode keeps rows satisfying any condition of any guard.
Relation select_guards(const Relation& r, std::span<const Guard> guards, Combine mode);

/// Set union of two relations over the same schema.
Relation set_union(const Relation& a, const Relation& b);

/// One table per non-abstract class of the server ontology.
class Database {
public:
    Database() = default;

    /// Reads `<Class>.csv` files and `manifest.json` from a directory.
    /// Throws SchemaError, ParseError (with file/row/column).
    static Database load(const std::filesystem::path& dir, const OntologyGraph& server);
    /// Validates tables against the ontology. Columns may be given in any
    /// order; they are stored in effective-property order.
    static Database from_tables(const OntologyGraph& server, std::vector<Relation> tables);

    /// Writes the directory format read by load().
    void save(const std::filesystem::path& dir) const;

    const OntologyGraph& ontology() const { return ontology_; }
    const std::map<std::string, Relation>& tables() const { return tables_; }
    /// Throws UnknownClassError / NoExtentError.
    const Relation& table(std::string_view class_name) const;

    /// The class's table unioned with every non-abstract descendant's table,
    /// projected to the class's effective properties. Throws NoExtentError.
    Relation class_extent(std::string_view class_name) const;
    /// Non-abstract classes whose tables feed class_extent(class_name).
    std::vector<std::string> extent_tables(std::string_view class_name) const;

private:
    OntologyGraph ontology_;
    std::map<std::string, Relation> tables_;  // canonical class name -> table
};

}  // namespace semproto
