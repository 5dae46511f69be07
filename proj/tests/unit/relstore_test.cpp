#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "semproto/error.hpp"
#include "semproto/relstore.hpp"

using namespace semproto;
using semproto::testing::load_db;
using semproto::testing::load_ontology;

namespace {

Relation rel(std::string name, std::vector<std::string> cols, std::vector<Row> rows) {
    std::vector<Column> columns;
    for (auto& c : cols) columns.push_back({c, Tag::Int});
    Relation r(std::move(name), std::move(columns));
    for (auto& row : rows) r.insert(std::move(row));
    return r;
}

Value I(std::int64_t v) { return Value::integer(v); }

Condition cmp(const char* var, CompareOp op, Value v) {
    return {Operand::variable(var), op, Operand::literal(std::move(v))};
}

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("semproto-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    const std::filesystem::path& path() const { return path_; }
    void write(const std::string& name, const std::string& text) const {
        std::ofstream(path_ / name) << text;
    }

private:
    std::filesystem::path path_;
};

const char* kOne = R"({"classes": [{"name": "Item", "dataProperties": ["name", "qty"]}]})";
const char* kManifest = R"({"Item": {"name": "str", "qty": "int"}})";

}  // namespace

TEST(Relation, NaturalJoinOnSharedColumns) {
    auto r = rel("R", {"a", "b"}, {{I(1), I(2)}});
    auto s = rel("S", {"b", "c"}, {{I(2), I(9)}, {I(3), I(9)}});
    auto j = natural_join(r, s);
    EXPECT_EQ(j.column_names(), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(j.rows(), (std::set<Row>{{I(1), I(2), I(9)}}));
}

TEST(Relation, JoinWithoutSharedColumnsIsAProduct) {
    auto r = rel("R", {"a"}, {{I(1)}, {I(2)}});
    auto s = rel("S", {"b"}, {{I(7)}, {I(8)}, {I(9)}});
    EXPECT_EQ(natural_join(r, s).size(), 6u);
    EXPECT_EQ(natural_join(r, Relation::unit()).rows(), r.rows());
}

TEST(Relation, NullNeverJoins) {
    auto r = rel("R", {"a", "b"}, {{I(1), Value::null()}});
    auto s = rel("S", {"b", "c"}, {{Value::null(), I(9)}});
    EXPECT_TRUE(natural_join(r, s).empty());
}

TEST(Relation, JoinRejectsTagClashes) {
    Relation r("R", {{"a", Tag::Int}});
    Relation s("S", {{"a", Tag::Str}});
    EXPECT_THROW(natural_join(r, s), TagMismatchError);
}

TEST(Relation, ProjectionCollapsesDuplicates) {
    auto r = rel("R", {"a", "b"}, {{I(1), I(2)}, {I(1), I(3)}});
    auto p = project(r, {"a"});
    EXPECT_EQ(p.size(), 1u);
    EXPECT_THROW(project(r, {"z"}), UnknownColumnError);
}

TEST(Relation, SelectionTreatsNullAsUnknown) {
    auto r = rel("R", {"x"}, {{I(5)}, {Value::null()}, {I(6)}});
    std::vector<Condition> eq{cmp("x", CompareOp::Eq, I(5))};
    EXPECT_EQ(select(r, eq, Combine::Conjunction).size(), 1u);
    std::vector<Condition> ne{cmp("x", CompareOp::Ne, I(5))};
    EXPECT_EQ(select(r, ne, Combine::Conjunction).size(), 1u);
    std::vector<Condition> isnull{cmp("x", CompareOp::Eq, Value::null())};
    EXPECT_EQ(select(r, isnull, Combine::Conjunction).size(), 1u);
}

TEST(Relation, SelectionCombineModes) {
    auto r = rel("R", {"x"}, {{I(1)}, {I(2)}, {I(3)}});
    std::vector<Condition> cs{cmp("x", CompareOp::Lt, I(2)), cmp("x", CompareOp::Gt, I(2))};
    EXPECT_TRUE(select(r, cs, Combine::Conjunction).empty());
    EXPECT_EQ(select(r, cs, Combine::Disjunction).size(), 2u);
    EXPECT_EQ(select(r, {}, Combine::Conjunction).size(), 3u);
}

TEST(Relation, InsertValidatesRows) {
    Relation r("R", {{"a", Tag::Int}});
    EXPECT_THROW(r.insert({I(1), I(2)}), SchemaError);
    EXPECT_THROW(r.insert({Value::str("x")}), TagMismatchError);
    EXPECT_NO_THROW(r.insert({Value::null()}));
    EXPECT_THROW(Relation("R", {{"a", Tag::Int}, {"a", Tag::Int}}), SchemaError);
}

TEST(Relation, UnionNeedsMatchingSchemas) {
    auto a = rel("A", {"x"}, {{I(1)}});
    auto b = rel("B", {"x"}, {{I(2)}});
    EXPECT_EQ(set_union(a, b).size(), 2u);
    EXPECT_THROW(set_union(a, rel("C", {"y"}, {})), SchemaError);
}

TEST(Database, ClassExtentUnionsSubclassTables) {
    auto server = load_ontology("pub/server.json");
    auto db = load_db("pub/db-spurious", server);
    EXPECT_EQ(db.table("Book").size(), 3u);
    auto book = db.class_extent("Book");
    EXPECT_EQ(book.size(), 4u);  // three books plus one monograph
    EXPECT_EQ(project(db.table("Book"), {"author"}).size(), 2u);
    auto entry = db.class_extent("Entry");
    EXPECT_EQ(entry.size(), 7u);
    EXPECT_EQ(db.extent_tables("Informal"), (std::vector<std::string>{"Manual"}));
    EXPECT_THROW(db.class_extent("Article"), UnknownClassError);
}

TEST(Database, MissingExtentIsReported) {
    auto g = OntologyGraph::parse(R"({"classes": [
        {"name": "Top", "abstract": true, "dataProperties": ["k"]}]})");
    auto db = Database::from_tables(g, {});
    EXPECT_THROW(db.class_extent("Top"), NoExtentError);
}

TEST(Database, LoadsCsvWithQuotesAndEmptyCells) {
    TempDir dir;
    dir.write("manifest.json", kManifest);
    dir.write("Item.csv", "name,qty\n\"bolt, small\",3\n\"say \"\"hi\"\"\",\nnut,4\n");
    auto db = Database::load(dir.path(), OntologyGraph::parse(kOne));
    const auto& t = db.table("Item");
    EXPECT_EQ(t.size(), 3u);
    EXPECT_TRUE(t.rows().count({Value::str("bolt, small"), I(3)}));
    EXPECT_TRUE(t.rows().count({Value::str("say \"hi\""), Value::null()}));
}

TEST(Database, SaveThenLoadRoundTrips) {
    auto server = load_ontology("pub/server.json");
    auto db = load_db("pub/db-spurious", server);
    TempDir dir;
    db.save(dir.path());
    auto again = Database::load(dir.path(), server);
    for (const auto& [name, t] : db.tables()) EXPECT_EQ(again.table(name), t) << name;
}

TEST(Database, LoadErrors) {
    auto g = OntologyGraph::parse(kOne);
    {
        TempDir dir;
        dir.write("Item.csv", "name,qty\n");
        EXPECT_THROW(Database::load(dir.path(), g), SchemaError);  // no manifest
    }
    {
        TempDir dir;
        dir.write("manifest.json", kManifest);
        dir.write("Item.csv", "name,qty\nbolt,three\n");
        EXPECT_THROW(Database::load(dir.path(), g), ParseError);
    }
    {
        TempDir dir;
        dir.write("manifest.json", kManifest);
        dir.write("Item.csv", "name,qty\nbolt\n");
        EXPECT_THROW(Database::load(dir.path(), g), ParseError);
    }
    {
        TempDir dir;
        dir.write("manifest.json", kManifest);
        dir.write("Item.csv", "name,weight\nbolt,3\n");
        EXPECT_THROW(Database::load(dir.path(), g), SchemaError);
    }
    {
        TempDir dir;
        dir.write("manifest.json", kManifest);
        dir.write("Item.csv", "name,qty\n\"bolt,3\n");
        EXPECT_THROW(Database::load(dir.path(), g), ParseError);
    }
    {
        TempDir dir;
        dir.write("manifest.json", kManifest);
        EXPECT_ANY_THROW(Database::load(dir.path(), g));  // table file missing
    }
    EXPECT_THROW(Database::load("/nonexistent/semproto", g), Error);
}
