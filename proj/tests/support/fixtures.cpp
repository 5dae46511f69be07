#include "fixtures.hpp"

#include <fstream>
#include <sstream>

#include "semproto/error.hpp"

namespace semproto::testing {

std::filesystem::path fixture_path(const std::string& relative) {
    return std::filesystem::path(SEMPROTO_FIXTURES_DIR) / relative;
}

std::string read_fixture(const std::string& relative) {
    std::ifstream in(fixture_path(relative), std::ios::binary);
    if (!in) throw Error("missing fixture " + relative);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

OntologyGraph load_ontology(const std::string& relative) {
    return OntologyGraph::load(fixture_path(relative));
}

Protocol load_protocol(const std::string& relative) {
    return Protocol::parse(read_fixture(relative));
}

Database load_db(const std::string& relative, const OntologyGraph& server) {
    return Database::load(fixture_path(relative), server);
}

}  // namespace semproto::testing
