#pragma once

#include <filesystem>
#include <string>

#include "semproto/ontology.hpp"
#include "semproto/protocol.hpp"
#include "semproto/relstore.hpp"

namespace semproto::testing {

std::filesystem::path fixture_path(const std::string& relative);
std::string read_fixture(const std::string& relative);

OntologyGraph load_ontology(const std::string& relative);
Protocol load_protocol(const std::string& relative);
Database load_db(const std::string& relative, const OntologyGraph& server);

}  // namespace semproto::testing
