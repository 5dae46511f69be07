#include <algorithm>
#include <fstream>
#include <sstream>

#include "semproto/error.hpp"
#include "semproto/relstore.hpp"

namespace semproto {
namespace {

struct Cell {
    std::string text;
    bool quoted = false;
};

// RFC-4180 minimal profile: comma separator, double-quote quoting with ""
// escapes, CRLF or LF line ends. A blank final line is ignored.
std::vector<std::vector<Cell>> read_csv(const std::string& text, const std::string& file) {
    std::vector<std::vector<Cell>> rows;
    std::vector<Cell> row;
    Cell cell;
    bool in_quotes = false;
    bool cell_started = false;
    int line = 1;
    auto end_cell = [&] {
        row.push_back(std::move(cell));
        cell = Cell{};
        cell_started = false;
    };
    auto end_row = [&] {
        end_cell();
        if (!(row.size() == 1 && row[0].text.empty() && !row[0].quoted)) rows.push_back(row);
        row.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell.text += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                cell.text += c;
            }
            continue;
        }
        if (c == '"') {
            if (cell_started)
                throw ParseError(file + ": stray quote inside unquoted field", line);
            in_quotes = true;
            cell.quoted = true;
            cell_started = true;
        } else if (c == ',') {
            end_cell();
        } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            continue;
        } else if (c == '\n') {
            end_row();
            ++line;
        } else {
            if (cell.quoted) throw ParseError(file + ": text after closing quote", line);
            cell.text += c;
            cell_started = true;
        }
    }
    if (in_quotes) throw ParseError(file + ": unterminated quoted field", line);
    if (cell_started || !row.empty()) end_row();
    return rows;
}

std::string csv_escape(const std::string& s) {
    if (s.empty() || s.find_first_of(",\"\n\r") != std::string::npos) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        return out + "\"";
    }
    return s;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

Database Database::load(const std::filesystem::path& dir, const OntologyGraph& server) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error("database directory not found: " + dir.string());
    auto manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path)) throw SchemaError("missing manifest.json in " + dir.string());
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(slurp(manifest_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed manifest.json: ") + e.what());
    }
    if (!manifest.is_object()) throw ParseError("manifest.json must be an object");

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<Relation> tables;
    for (const auto& path : files) {
        std::string cls_name = path.stem().string();
        std::string file = path.filename().string();
        const ClassNode* cls = server.find_match(cls_name);
        if (!cls) throw SchemaError(file + ": no class '" + cls_name + "' in the ontology");
        if (cls->abstract)
            throw SchemaError(file + ": abstract class '" + cls->name + "' cannot own a table");

        const nlohmann::json* tags = nullptr;
        for (const auto& [k, v] : manifest.items())
            if (iequals(k, cls->name)) tags = &v;
        if (!tags || !tags->is_object())
            throw SchemaError("manifest.json has no column types for " + cls->name);

        auto rows = read_csv(slurp(path), file);
        if (rows.empty()) throw SchemaError(file + ": missing header row");
        std::vector<Column> columns;
        for (const auto& h : rows.front()) {
            std::optional<Tag> tag;
            for (const auto& [k, v] : tags->items())
                if (k == h.text && v.is_string()) tag = parse_tag(v.get<std::string>());
            if (!tag)
                throw SchemaError(file + ": column '" + h.text +
                                  "' has no valid type (int|decimal|str|date) in manifest.json");
            columns.push_back({h.text, *tag});
        }
        Relation rel(cls->name, columns);
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& cells = rows[r];
            if (cells.size() != columns.size())
                throw ParseError(file + ": row " + std::to_string(r) + " has " +
                                 std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(columns.size()));
            Row row;
            for (std::size_t c = 0; c < cells.size(); ++c) {
                const Cell& cell = cells[c];
                if (cell.text.empty() && !(cell.quoted && columns[c].tag == Tag::Str)) {
                    row.push_back(Value::null());
                    continue;
                }
                try {
                    row.push_back(parse_cell(cell.text, columns[c].tag));
                } catch (const ParseError& e) {
                    throw ParseError(file + ": row " + std::to_string(r) + ", column '" +
                                     columns[c].name + "': " + e.what());
                }
            }
            rel.insert(std::move(row));
        }
        tables.push_back(std::move(rel));
    }
    return from_tables(server, std::move(tables));
}

Database Database::from_tables(const OntologyGraph& server, std::vector<Relation> tables) {
    Database db;
    db.ontology_ = server;
    for (auto& t : tables) {
        const ClassNode* cls = server.find_match(t.name());
        if (!cls) throw SchemaError("table '" + t.name() + "' names no ontology class");
        if (cls->abstract)
            throw SchemaError("abstract class '" + cls->name + "' cannot own a table");
        if (db.tables_.count(cls->name)) throw SchemaError("two tables for " + cls->name);

        auto props = server.effective_properties(cls->name);
        for (const auto& c : t.columns()) {
            bool known = std::any_of(props.begin(), props.end(),
                                     [&](const std::string& p) { return p == c.name; });
            if (!known)
                throw SchemaError("table " + cls->name + " has column '" + c.name +
                                  "' that is not a property of the class");
        }
        for (const auto& p : props)
            if (!t.has_column(p))
                throw SchemaError("table " + cls->name + " is missing column '" + p + "'");
        Relation ordered = project(t, props);
        ordered.set_name(cls->name);
        db.tables_.emplace(cls->name, std::move(ordered));
    }
    for (const auto& c : server.classes())
        if (!c.abstract && !db.tables_.count(c.name))
            throw SchemaError("no table for non-abstract class " + c.name);

    // A property must carry one tag across every table that inherits it.
    for (const auto& c : server.classes()) {
        for (const auto& p : server.effective_properties(c.name)) {
            std::optional<Tag> seen;
            for (const auto& d : server.descendants(c.name)) {
                auto it = db.tables_.find(d);
                if (it == db.tables_.end()) continue;
                Tag t = *it->second.column_tag(p);
                if (seen && *seen != t)
                    throw SchemaError("property " + c.name + "." + p +
                                      " has different types across subclass tables");
                seen = t;
            }
        }
    }
    return db;
}

void Database::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json manifest = nlohmann::ordered_json::object();
    for (const auto& [name, rel] : tables_) {
        nlohmann::ordered_json cols = nlohmann::ordered_json::object();
        for (const auto& c : rel.columns()) cols[c.name] = tag_name(c.tag);
        manifest[name] = cols;
        std::ofstream out(dir / (name + ".csv"), std::ios::binary);
        for (std::size_t i = 0; i < rel.columns().size(); ++i)
            out << (i ? "," : "") << csv_escape(rel.columns()[i].name);
        out << "\n";
        for (const Row& row : rel.rows()) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out << ",";
                if (!row[i].is_null()) out << csv_escape(row[i].plain());
            }
            out << "\n";
        }
    }
    std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
}

const Relation& Database::table(std::string_view class_name) const {
    const ClassNode& cls = ontology_.at(class_name);
    auto it = tables_.find(cls.name);
    if (it == tables_.end()) throw NoExtentError("class " + cls.name + " owns no table");
    return it->second;
}

std::vector<std::string> Database::extent_tables(std::string_view class_name) const {
    std::vector<std::string> out;
    for (const auto& d : ontology_.descendants(class_name))
        if (tables_.count(d)) out.push_back(d);
    return out;
}

Relation Database::class_extent(std::string_view class_name) const {
    const ClassNode& cls = ontology_.at(class_name);
    auto sources = extent_tables(cls.name);
    if (sources.empty())
        throw NoExtentError("class " + cls.name + " has no table and no instantiable subclass");
    auto props = ontology_.effective_properties(cls.name);
    Relation out;
    bool first = true;
    for (const auto& s : sources) {
        Relation part = project(tables_.at(s), props);
        if (first) {
            out = std::move(part);
            first = false;
        } else {
            out = set_union(out, part);
        }
    }
    out.set_name(cls.name);
    return out;
}

}  // namespace semproto
