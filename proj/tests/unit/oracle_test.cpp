#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "semproto/error.hpp"
#include "semproto/oracle.hpp"

using namespace semproto;
using semproto::testing::load_db;
using semproto::testing::load_ontology;
using semproto::testing::load_protocol;

namespace {

Database small_db(std::vector<std::pair<int, int>> rows) {
    auto server = OntologyGraph::parse(
        R"({"classes": [{"name": "A", "dataProperties": ["x", "y"]}]})");
    Relation a("A", {{"x", Tag::Int}, {"y", Tag::Int}});
    for (auto [x, y] : rows) a.insert({Value::integer(x), Value::integer(y)});
    return Database::from_tables(server, {a});
}

}  // namespace

TEST(Oracle, LibraryProtocolReachability) {
    auto p = load_protocol("pub/protocol1.pv");
    auto server = load_ontology("pub/server.json");
    EXPECT_FALSE(is_reachable(p, load_db("pub/db-spurious", server), 3));
    EXPECT_TRUE(is_reachable(p, load_db("pub/db-realizable", server), 3));
    EXPECT_TRUE(is_reachable(p, load_db("pub/db-spurious", server), 2));
}

TEST(Oracle, TracesRecordAnswersAndDecisions) {
    auto p = load_protocol("pub/protocol1.pv");
    auto db = load_db("pub/db-realizable", load_ontology("pub/server.json"));
    auto e = enumerate_reaching_traces(p, db, 3);
    ASSERT_EQ(e.traces.size(), 1u);
    const auto& t = e.traces[0];
    ASSERT_EQ(t.answers.size(), 2u);
    EXPECT_EQ(t.answers[0].query_id, 1);
    EXPECT_EQ(t.branches, (std::vector<OracleBranch>{{1, true}}));
    EXPECT_EQ(t.bindings.at("a"), Value::str("Knuth"));
    EXPECT_EQ(t.bindings.at("t2"), Value::str("The Art of Computer Programming"));
    EXPECT_FALSE(e.bound_exceeded);
    EXPECT_GT(e.steps, 0u);
}

TEST(Oracle, ConstantFalseGuardIsUnreachable) {
    auto db = small_db({{1, 1}});
    auto p = Protocol::parse("get (x: x) from A;\nif (1 = 0) { get (k: k, x: x) from Ghost; }");
    EXPECT_FALSE(is_reachable(p, db, 2));
    auto q = Protocol::parse("get (x: x) from A;\nif (1 = 1) { get (k: k, x: x) from Ghost; }");
    EXPECT_TRUE(is_reachable(q, db, 2));
}

TEST(Oracle, UnevaluableQueriesBindNull) {
    auto db = small_db({{1, 1}});
    auto p = Protocol::parse("get (k: k) from Ghost;\n"
                             "get (x: x) from A;\n"
                             "if (k = null) { get (z: z, x: x) from Phantom; }");
    EXPECT_TRUE(is_reachable(p, db, 3));
    auto e = enumerate_reaching_traces(p, db, 3);
    ASSERT_FALSE(e.traces.empty());
    EXPECT_EQ(e.traces[0].bindings.at("k"), Value::null());
    EXPECT_FALSE(e.traces[0].answers[0].values);
}

TEST(Oracle, TargetNeedsDefinedReads) {
    auto p = Protocol::parse("get (x: x, y: y) from A where (x = 9);\n"
                             "get (k: k, x: x) from Ghost;");
    EXPECT_FALSE(is_reachable(p, small_db({{1, 1}}), 2));
    EXPECT_TRUE(is_reachable(p, small_db({{9, 1}}), 2));
}

TEST(Oracle, EveryAnswerIsAChoice) {
    auto p = Protocol::parse("get (x: x) from A;\nif (x > 1) { get (k: k, x: x) from Ghost; }");
    auto e = enumerate_reaching_traces(p, small_db({{1, 0}, {2, 0}, {3, 0}}), 2);
    EXPECT_EQ(e.traces.size(), 2u);
}

TEST(Oracle, ConstraintsPinAnswers) {
    auto p = load_protocol("pub/protocol1.pv");
    auto db = load_db("pub/db-realizable", load_ontology("pub/server.json"));
    OracleOptions pinned;
    pinned.constraints["a"] = Value::str("Lamport");
    EXPECT_FALSE(is_reachable(p, db, 3, pinned));
    pinned.constraints["a"] = Value::str("Knuth");
    EXPECT_TRUE(is_reachable(p, db, 3, pinned));
}

TEST(Oracle, StepBoundIsReported) {
    auto p = Protocol::parse("get (x: x) from A;\nif (x > 100) { get (k: k, x: x) from Ghost; }");
    std::vector<std::pair<int, int>> rows;
    for (int i = 0; i < 50; ++i) rows.push_back({i, i});
    auto db = small_db(rows);
    OracleOptions tight;
    tight.max_steps = 3;
    EXPECT_TRUE(enumerate_reaching_traces(p, db, 2, tight).bound_exceeded);
    EXPECT_THROW(is_reachable(p, db, 2, tight), Error);
    EXPECT_FALSE(is_reachable(p, db, 2));
}

TEST(Oracle, UnknownTarget) {
    auto p = Protocol::parse("get (x: x) from A;");
    EXPECT_THROW(is_reachable(p, small_db({}), 5), UnknownQueryError);
}

TEST(Oracle, FixedAnswersReplayValuesOutsideTheDatabase) {
    auto p = load_protocol("pub/protocol1.pv");
    auto db = load_db("pub/db-spurious", load_ontology("pub/server.json"));
    OracleOptions replay;
    replay.fixed_answers[2] = std::map<std::string, Value>{
        {"t2", Value::str("Not In The Database")}, {"a", Value::str("Knuth")}};
    EXPECT_TRUE(is_reachable(p, db, 3, replay));
    replay.fixed_answers[2] = std::nullopt;
    EXPECT_FALSE(is_reachable(p, db, 3, replay));
}
