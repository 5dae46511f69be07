#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace semproto {

struct ClassNode {
    std::string name;
    bool abstract = false;
    std::vector<std::string> superclasses;
    std::vector<std::string> data_properties;
    std::map<std::string, std::string> object_properties;

    bool operator==(const ClassNode&) const = default;
};

/// Graph model of an ontology: class nodes with data-property lists,
/// inheritance edges (a DAG, multiple inheritance allowed) and object-property
/// edges. Immutable after construction.
class OntologyGraph {
public:
    OntologyGraph() = default;

    /// Builds and validates a graph. Throws ParseError, CycleError or
    /// DanglingReferenceError.
    static OntologyGraph from_json(const nlohmann::json& doc);
    static OntologyGraph parse(std::string_view text);
    static OntologyGraph load(const std::filesystem::path& path);

    nlohmann::json to_json() const;

    const std::vector<ClassNode>& classes() const { return classes_; }
    const std::map<std::string, std::string>& aliases() const { return aliases_; }
    std::size_t size() const { return classes_.size(); }

    /// (superclass, subclass) pairs in document order.
    std::vector<std::pair<std::string, std::string>> inheritance_edges() const;
    /// (owner, property, target) triples.
    std::vector<std::tuple<std::string, std::string, std::string>> property_edges() const;

    /// Case-insensitive name match, then alias lookup. nullptr when absent.
    const ClassNode* find_match(std::string_view name) const;

    /// Reflexive-transitive subclass test. Throws UnknownClassError.
    bool is_subclass(std::string_view ancestor, std::string_view descendant) const;

    /// Own data properties plus those of every ancestor, base classes first.
    std::vector<std::string> effective_properties(std::string_view name) const;
    bool has_property(std::string_view name, std::string_view property) const;

    /// Reflexive closures, in document order.
    std::vector<std::string> ancestors(std::string_view name) const;
    std::vector<std::string> descendants(std::string_view name) const;

    const ClassNode& at(std::string_view name) const;

private:
    std::size_t index_of(std::string_view name) const;
    void build_index();

    std::vector<ClassNode> classes_;
    std::map<std::string, std::string> aliases_;
    std::map<std::string, std::size_t> by_name_;   // lower-cased canonical names
    std::map<std::string, std::size_t> by_alias_;  // lower-cased aliases
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<bool>> reach_;  // reach_[a][d]: d is a subclass of a
};

std::string lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

}  // namespace semproto
