#include "semproto/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "semproto/error.hpp"

namespace semproto {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && lower(a) == lower(b);
}

namespace {

using nlohmann::json;

std::vector<std::string> string_array(const json& node, const std::string& what) {
    if (!node.is_array()) throw ParseError(what + " must be an array");
    std::vector<std::string> out;
    for (const auto& item : node) {
        if (!item.is_string() || item.get<std::string>().empty())
            throw ParseError(what + " entries must be non-empty strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

}  // namespace

OntologyGraph OntologyGraph::from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("ontology document must be a JSON object");
    OntologyGraph g;
    if (doc.contains("classes")) {
        const auto& classes = doc.at("classes");
        if (!classes.is_array()) throw ParseError("'classes' must be an array");
        for (const auto& c : classes) {
            if (!c.is_object()) throw ParseError("class entries must be objects");
            ClassNode node;
            if (!c.contains("name") || !c["name"].is_string() ||
                c["name"].get<std::string>().empty())
                throw ParseError("class entry without a non-empty 'name'");
            node.name = c["name"].get<std::string>();
            if (c.contains("abstract")) {
                if (!c["abstract"].is_boolean())
                    throw ParseError("'abstract' of " + node.name + " must be boolean");
                node.abstract = c["abstract"].get<bool>();
            }
            if (c.contains("superclasses"))
                node.superclasses = string_array(c["superclasses"], node.name + ".superclasses");
            if (c.contains("dataProperties"))
                node.data_properties =
                    string_array(c["dataProperties"], node.name + ".dataProperties");
            if (c.contains("objectProperties")) {
                const auto& op = c["objectProperties"];
                if (!op.is_object())
                    throw ParseError(node.name + ".objectProperties must be an object");
                for (const auto& [k, v] : op.items()) {
                    if (!v.is_string()) throw ParseError("object property target must be a string");
                    node.object_properties[k] = v.get<std::string>();
                }
            }
            std::set<std::string> seen;
            for (const auto& p : node.data_properties)
                if (!seen.insert(lower(p)).second)
                    throw ParseError("duplicate data property '" + p + "' on " + node.name);
            g.classes_.push_back(std::move(node));
        }
    }
    if (doc.contains("aliases")) {
        const auto& al = doc.at("aliases");
        if (!al.is_object()) throw ParseError("'aliases' must be an object");
        for (const auto& [k, v] : al.items()) {
            if (!v.is_string()) throw ParseError("alias target must be a string");
            g.aliases_[k] = v.get<std::string>();
        }
    }
    g.build_index();
    return g;
}

OntologyGraph OntologyGraph::parse(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed ontology JSON: ") + e.what());
    }
    return from_json(doc);
}

OntologyGraph OntologyGraph::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open ontology file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void OntologyGraph::build_index() {
    for (std::size_t i = 0; i < classes_.size(); ++i)
        if (!by_name_.emplace(lower(classes_[i].name), i).second)
            throw ParseError("duplicate class name '" + classes_[i].name + "'");

    for (const auto& [alias, target] : aliases_) {
        if (by_name_.count(lower(alias)))
            throw ParseError("alias '" + alias + "' shadows a class name");
        auto it = by_name_.find(lower(target));
        if (it == by_name_.end())
            throw DanglingReferenceError("alias '" + alias + "' targets unknown class '" +
                                         target + "'");
        if (!by_alias_.emplace(lower(alias), it->second).second)
            throw ParseError("duplicate alias '" + alias + "'");
    }

    parents_.assign(classes_.size(), {});
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        const auto& node = classes_[i];
        for (const auto& sup : node.superclasses) {
            auto it = by_name_.find(lower(sup));
            if (it == by_name_.end())
                throw DanglingReferenceError(node.name + " names unknown superclass '" + sup +
                                             "'");
            parents_[i].push_back(it->second);
        }
        for (const auto& [prop, target] : node.object_properties)
            if (!by_name_.count(lower(target)))
                throw DanglingReferenceError(node.name + "." + prop +
                                             " targets unknown class '" + target + "'");
    }

    // Cycle check: white/grey/black DFS along superclass edges.
    std::vector<int> color(classes_.size(), 0);
    std::vector<std::size_t> stack;
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
        color[i] = 1;
        stack.push_back(i);
        for (std::size_t p : parents_[i]) {
            if (color[p] == 1) {
                std::string cycle;
                auto from = std::find(stack.begin(), stack.end(), p);
                for (auto it = from; it != stack.end(); ++it) cycle += classes_[*it].name + " -> ";
                cycle += classes_[p].name;
                throw CycleError("inheritance cycle: " + cycle);
            }
            if (color[p] == 0) visit(p);
        }
        stack.pop_back();
        color[i] = 2;
    };
    for (std::size_t i = 0; i < classes_.size(); ++i)
        if (color[i] == 0) visit(i);

    reach_.assign(classes_.size(), std::vector<bool>(classes_.size(), false));
    std::function<void(std::size_t, std::size_t)> mark = [&](std::size_t anc, std::size_t d) {
        if (reach_[anc][d]) return;
        reach_[anc][d] = true;
        for (std::size_t p : parents_[anc]) mark(p, d);
    };
    for (std::size_t d = 0; d < classes_.size(); ++d) mark(d, d);
}

nlohmann::json OntologyGraph::to_json() const {
    json classes = json::array();
    for (const auto& c : classes_) {
        json node = {{"name", c.name},
                     {"abstract", c.abstract},
                     {"superclasses", c.superclasses},
                     {"dataProperties", c.data_properties}};
        if (!c.object_properties.empty()) node["objectProperties"] = c.object_properties;
        classes.push_back(std::move(node));
    }
    json doc = {{"classes", classes}};
    if (!aliases_.empty()) doc["aliases"] = aliases_;
    return doc;
}

std::vector<std::pair<std::string, std::string>> OntologyGraph::inheritance_edges() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < classes_.size(); ++i)
        for (std::size_t p : parents_[i]) out.emplace_back(classes_[p].name, classes_[i].name);
    return out;
}

std::vector<std::tuple<std::string, std::string, std::string>> OntologyGraph::property_edges()
    const {
    std::vector<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& c : classes_)
        for (const auto& [prop, target] : c.object_properties)
            out.emplace_back(c.name, prop, at(target).name);
    return out;
}

const ClassNode* OntologyGraph::find_match(std::string_view name) const {
    auto key = lower(name);
    if (auto it = by_name_.find(key); it != by_name_.end()) return &classes_[it->second];
    if (auto it = by_alias_.find(key); it != by_alias_.end()) return &classes_[it->second];
    return nullptr;
}

std::size_t OntologyGraph::index_of(std::string_view name) const {
    const ClassNode* node = find_match(name);
    if (!node) throw UnknownClassError("unknown class '" + std::string(name) + "'");
    return static_cast<std::size_t>(node - classes_.data());
}

const ClassNode& OntologyGraph::at(std::string_view name) const {
    return classes_[index_of(name)];
}

bool OntologyGraph::is_subclass(std::string_view ancestor, std::string_view descendant) const {
    return reach_[index_of(ancestor)][index_of(descendant)];
}

std::vector<std::string> OntologyGraph::effective_properties(std::string_view name) const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    std::vector<bool> visited(classes_.size(), false);
    std::function<void(std::size_t)> collect = [&](std::size_t i) {
        if (visited[i]) return;
        visited[i] = true;
        for (std::size_t p : parents_[i]) collect(p);
        for (const auto& prop : classes_[i].data_properties)
            if (seen.insert(lower(prop)).second) out.push_back(prop);
    };
    collect(index_of(name));
    return out;
}

bool OntologyGraph::has_property(std::string_view name, std::string_view property) const {
    for (const auto& p : effective_properties(name))
        if (iequals(p, property)) return true;
    return false;
}

std::vector<std::string> OntologyGraph::ancestors(std::string_view name) const {
    std::size_t d = index_of(name);
    std::vector<std::string> out;
    for (std::size_t a = 0; a < classes_.size(); ++a)
        if (reach_[a][d]) out.push_back(classes_[a].name);
    return out;
}

std::vector<std::string> OntologyGraph::descendants(std::string_view name) const {
    std::size_t a = index_of(name);
    std::vector<std::string> out;
    for (std::size_t d = 0; d < classes_.size(); ++d)
        if (reach_[a][d]) out.push_back(classes_[d].name);
    return out;
}

}  // namespace semproto
