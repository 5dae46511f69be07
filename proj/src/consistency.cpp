#include "semproto/consistency.hpp"

#include <algorithm>

#include "semproto/error.hpp"

namespace semproto {

std::string_view kind_name(MismatchKind kind) {
    switch (kind) {
        case MismatchKind::ClassNotFound: return "ClassNotFound";
        case MismatchKind::SpecializationMismatch: return "SpecializationMismatch";
        case MismatchKind::UnmatchedVariables: return "UnmatchedVariables";
    }
    return "?";
}

namespace {

// Resolves one from-list element. Returns the terminal server class, or
// nullptr after appending the mismatch that stopped resolution.
const ClassNode* resolve(const Query& q, int ref_index, const OntologyGraph& server,
                         std::vector<Mismatch>& out) {
    const ClassRef& ref = q.classes[static_cast<std::size_t>(ref_index)];
    const ClassNode* current = server.find_match(ref.sequence.front());
    if (!current) {
        Mismatch m;
        m.kind = MismatchKind::ClassNotFound;
        m.query_id = q.id;
        m.class_ref_index = ref_index;
        m.path = ref.str();
        m.class_name = ref.sequence.front();
        m.sequence_index = 0;
        out.push_back(std::move(m));
        return nullptr;
    }
    for (std::size_t i = 1; i < ref.sequence.size(); ++i) {
        const ClassNode* next = server.find_match(ref.sequence[i]);
        if (!next || !server.is_subclass(current->name, next->name)) {
            Mismatch m;
            m.kind = MismatchKind::SpecializationMismatch;
            m.query_id = q.id;
            m.class_ref_index = ref_index;
            m.path = ref.str();
            m.class_name = ref.sequence[i];
            m.sequence_index = static_cast<int>(i);
            m.expected_parent = current->name;
            out.push_back(std::move(m));
            return nullptr;
        }
        current = next;
    }
    return current;
}

}  // namespace

std::vector<Mismatch> check_consistency(const Protocol& protocol, const OntologyGraph& server,
                                        CheckOptions options) {
    std::vector<Mismatch> out;
    for (const Query& q : protocol.queries()) {
        std::vector<const ClassNode*> terminals;
        bool all_resolved = true;
        for (int i = 0; i < static_cast<int>(q.classes.size()); ++i) {
            const ClassNode* t = resolve(q, i, server, out);
            if (!t) {
                all_resolved = false;
                if (options.fail_fast) return out;
                continue;
            }
            terminals.push_back(t);
        }
        // The attribute check needs every class matched; a query that already
        // failed structurally is reported once.
        if (!all_resolved) continue;

        std::vector<std::string> answerable;
        for (const ClassNode* t : terminals)
            for (auto& p : server.effective_properties(t->name)) answerable.push_back(lower(p));

        Mismatch m;
        m.kind = MismatchKind::UnmatchedVariables;
        m.query_id = q.id;
        m.path = q.classes_str();
        for (const auto& b : q.bindings) {
            if (b.is_wildcard()) continue;
            if (std::find(answerable.begin(), answerable.end(), lower(b.attribute)) !=
                answerable.end())
                continue;
            UnmatchedBinding u{b.attribute, *b.variable};
            if (std::find(m.unmatched.begin(), m.unmatched.end(), u) == m.unmatched.end())
                m.unmatched.push_back(std::move(u));
        }
        if (!m.unmatched.empty()) {
            out.push_back(std::move(m));
            if (options.fail_fast) return out;
        }
    }
    return out;
}

MismatchExplanation explain_mismatch(const Mismatch& m, const OntologyGraph& server) {
    if (m.query_id < 1) throw MalformedReportError("mismatch without a query id");
    std::string where = "query " + std::to_string(m.query_id);
    MismatchExplanation out;
    switch (m.kind) {
        case MismatchKind::ClassNotFound: {
            if (m.class_name.empty()) throw MalformedReportError("ClassNotFound without a class");
            out.summary = where + ": class '" + m.class_name + "' in " + m.path +
                          " is not defined by the server ontology";
            break;
        }
        case MismatchKind::SpecializationMismatch: {
            if (m.class_name.empty() || m.expected_parent.empty() || m.sequence_index < 1)
                throw MalformedReportError("SpecializationMismatch without a failing element");
            out.summary = where + ": '" + m.class_name + "' is not a subclass of '" +
                          m.expected_parent + "' in " + m.path;
            if (const ClassNode* node = server.find_match(m.class_name)) {
                std::string chain;
                for (const auto& a : server.ancestors(node->name)) {
                    if (iequals(a, node->name)) continue;
                    if (!chain.empty()) chain += ", ";
                    chain += a;
                }
                out.details.push_back("server superclasses of " + node->name + ": " +
                                      (chain.empty() ? std::string("(none)") : chain));
            } else {
                out.details.push_back("'" + m.class_name + "' is not defined by the server");
            }
            break;
        }
        case MismatchKind::UnmatchedVariables: {
            if (m.unmatched.empty())
                throw MalformedReportError("UnmatchedVariables with an empty variable set");
            std::string list;
            for (const auto& u : m.unmatched) {
                if (!list.empty()) list += ", ";
                list += u.attribute + " (" + u.variable + ")";
            }
            out.summary = where + ": attributes not answerable on " + m.path + ": " + list;
            for (const auto& u : m.unmatched) {
                std::string owners;
                for (const auto& c : server.classes()) {
                    bool own = std::any_of(c.data_properties.begin(), c.data_properties.end(),
                                           [&](const std::string& p) {
                                               return iequals(p, u.attribute);
                                           });
                    if (!own) continue;
                    if (!owners.empty()) owners += ", ";
                    owners += c.name;
                }
                out.details.push_back("server classes defining " + u.attribute + ": " +
                                      (owners.empty() ? std::string("(none)") : owners));
            }
            break;
        }
    }
    return out;
}

}  // namespace semproto
