#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "semproto/ontology.hpp"
#include "semproto/protocol.hpp"

namespace semproto {

enum class MismatchKind { ClassNotFound, SpecializationMismatch, UnmatchedVariables };

std::string_view kind_name(MismatchKind kind);

struct UnmatchedBinding {
    std::string attribute;
    std::string variable;

    bool operator==(const UnmatchedBinding&) const = default;
};

/// An ontology-level conflict between a protocol query and the server.
struct Mismatch {
    MismatchKind kind = MismatchKind::ClassNotFound;
    int query_id = 0;
    /// Position of the offending class reference in the query's from-list;
    /// -1 for UnmatchedVariables.
    int class_ref_index = -1;
    /// The class reference text, or every class reference for UnmatchedVariables.
    std::string path;
    /// Failing element for ClassNotFound / SpecializationMismatch.
    std::string class_name;
    /// Index within the sequence where resolution or descent failed.
    int sequence_index = -1;
    /// Server class the failing element had to descend from (SpecializationMismatch).
    std::string expected_parent;
    std::vector<UnmatchedBinding> unmatched;

    bool operator==(const Mismatch&) const = default;
};

struct CheckOptions {
    /// Stop at the first mismatch instead of collecting all of them.
    bool fail_fast = false;
};

/// Structural check of every query against the server ontology. Results are
/// ordered by (query id, class reference position); an empty result means the
/// protocol cannot reach an ontology-level conflict.
std::vector<Mismatch> check_consistency(const Protocol& protocol, const OntologyGraph& server,
                                        CheckOptions options = {});

struct MismatchExplanation {
    std::string summary;
    std::vector<std::string> details;
};

/// Human-readable account of a mismatch. Throws MalformedReportError when the
/// mismatch is missing the fields its kind requires.
MismatchExplanation explain_mismatch(const Mismatch& m, const OntologyGraph& server);

}  // namespace semproto
