#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "semproto/consistency.hpp"
#include "semproto/error.hpp"
#include "semproto/oracle.hpp"
#include "semproto/report.hpp"
#include "semproto/spuriousness.hpp"

namespace py = pybind11;
using namespace semproto;

// Every entry point takes document text (ontology JSON, protocol source,
// trace JSON) plus a database directory, and returns JSON text. The Python
// package turns that into dicts and lists.

namespace {

Combine combine(bool paper_disjunction) {
    return paper_disjunction ? Combine::Disjunction : Combine::Conjunction;
}

std::string check(const std::string& server, const std::string& protocol, bool fail_fast) {
    auto p = Protocol::parse(protocol);
    return mismatches_json(check_consistency(p, OntologyGraph::parse(server), {fail_fast})).dump();
}

std::string explain(const std::string& server, const std::string& protocol) {
    auto g = OntologyGraph::parse(server);
    return mismatches_text(check_consistency(Protocol::parse(protocol), g), g);
}

std::string verify_db(const std::string& server, const std::string& protocol,
                      const std::string& db_dir, bool paper_disjunction, bool oracle) {
    auto g = OntologyGraph::parse(server);
    auto p = Protocol::parse(protocol);
    auto db = Database::load(db_dir, g);
    auto report = verify_all(p, g, db, check_consistency(p, g), {combine(paper_disjunction)});
    std::vector<std::optional<OracleCheck>> checks;
    if (oracle)
        for (const auto& v : report) {
            bool reachable = is_reachable(p, db, v.query_id);
            checks.push_back(OracleCheck{reachable, reachable == (v.verdict == Verdict::Realizable)});
        }
    return report_json(report, checks).dump();
}

std::string step(const std::string& server, const std::string& protocol, const std::string& db_dir,
                 const std::string& trace, bool paper_disjunction) {
    auto g = OntologyGraph::parse(server);
    auto p = Protocol::parse(protocol);
    auto db = Database::load(db_dir, g);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(trace);
    } catch (const nlohmann::json::parse_error& e) {
        throw InconsistentTraceError(std::string("trace is not valid JSON: ") + e.what());
    }
    auto report = step_verify(p, g, db, check_consistency(p, g), parse_trace(doc, p, db),
                              {combine(paper_disjunction)});
    return report_json(report).dump();
}

bool reachable(const std::string& server, const std::string& protocol, const std::string& db_dir,
               int query_id) {
    auto g = OntologyGraph::parse(server);
    return is_reachable(Protocol::parse(protocol), Database::load(db_dir, g), query_id);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of the semproto protocol checker";

    static py::exception<Error> base(m, "Error");
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<SemanticError>(m, "SemanticError", base.ptr());
    py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
    py::register_exception<InconsistentTraceError>(m, "InconsistentTraceError", base.ptr());

    m.def("check", &check, py::arg("server"), py::arg("protocol"), py::arg("fail_fast") = false);
    m.def("explain", &explain, py::arg("server"), py::arg("protocol"));
    m.def("verify_db", &verify_db, py::arg("server"), py::arg("protocol"), py::arg("db"),
          py::arg("paper_disjunction") = false, py::arg("oracle") = false);
    m.def("step", &step, py::arg("server"), py::arg("protocol"), py::arg("db"), py::arg("trace"),
          py::arg("paper_disjunction") = false);
    m.def("reachable", &reachable, py::arg("server"), py::arg("protocol"), py::arg("db"),
          py::arg("query_id"));
    m.def("canonical", [](const std::string& text) { return Protocol::parse(text).print(); },
          py::arg("protocol"));
    m.def("protocol_json",
          [](const std::string& text) { return Protocol::parse(text).to_json().dump(); },
          py::arg("protocol"));
}
