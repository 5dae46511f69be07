#include "semproto/report.hpp"

#include "semproto/error.hpp"

namespace semproto {

ordered_json value_json(const Value& v) {
    switch (v.tag()) {
        case Tag::Null: return nullptr;
        case Tag::Int: return v.as_int();
        case Tag::Decimal: return v.as_decimal();
        case Tag::Str: return v.as_str();
        case Tag::Date: return v.as_date().str();
    }
    return nullptr;
}

ordered_json mismatch_json(const Mismatch& m) {
    ordered_json details = ordered_json::object();
    switch (m.kind) {
        case MismatchKind::ClassNotFound:
        case MismatchKind::SpecializationMismatch:
            details["class"] = m.class_name;
            details["classRef"] = m.class_ref_index;
            details["position"] = m.sequence_index;
            if (m.kind == MismatchKind::SpecializationMismatch)
                details["expectedParent"] = m.expected_parent;
            break;
        case MismatchKind::UnmatchedVariables: {
            ordered_json list = ordered_json::array();
            for (const auto& u : m.unmatched)
                list.push_back({{"attribute", u.attribute}, {"variable", u.variable}});
            details["unmatched"] = std::move(list);
            break;
        }
    }
    ordered_json out;
    out["kind"] = kind_name(m.kind);
    out["queryId"] = m.query_id;
    out["path"] = m.path;
    out["details"] = std::move(details);
    return out;
}

ordered_json mismatches_json(const std::vector<Mismatch>& ms) {
    ordered_json out = ordered_json::array();
    for (const auto& m : ms) out.push_back(mismatch_json(m));
    return out;
}

namespace {

template <class T>
T field(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw MalformedReportError(std::string("mismatch lacks '") + key + "'");
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw MalformedReportError(std::string("mismatch field '") + key + "' has the wrong type");
    }
}

}  // namespace

Mismatch mismatch_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw MalformedReportError("mismatch is not an object");
    Mismatch m;
    auto kind = field<std::string>(doc, "kind");
    if (kind == "ClassNotFound") m.kind = MismatchKind::ClassNotFound;
    else if (kind == "SpecializationMismatch") m.kind = MismatchKind::SpecializationMismatch;
    else if (kind == "UnmatchedVariables") m.kind = MismatchKind::UnmatchedVariables;
    else throw MalformedReportError("unknown mismatch kind '" + kind + "'");
    m.query_id = field<int>(doc, "queryId");
    m.path = field<std::string>(doc, "path");
    auto details = field<nlohmann::json>(doc, "details");
    if (m.kind == MismatchKind::UnmatchedVariables) {
        for (const auto& u : field<nlohmann::json>(details, "unmatched"))
            m.unmatched.push_back({field<std::string>(u, "attribute"),
                                   field<std::string>(u, "variable")});
    } else {
        m.class_name = field<std::string>(details, "class");
        m.class_ref_index = field<int>(details, "classRef");
        m.sequence_index = field<int>(details, "position");
        if (m.kind == MismatchKind::SpecializationMismatch)
            m.expected_parent = field<std::string>(details, "expectedParent");
    }
    return m;
}

ordered_json verdict_json(const ConflictVerdict& v, const std::optional<OracleCheck>& oracle) {
    ordered_json out;
    out["queryId"] = v.query_id;
    out["verdict"] = verdict_name(v.verdict);
    if (v.witness) {
        ordered_json w = ordered_json::object();
        for (const auto& [name, value] : *v.witness) w[name] = value_json(value);
        out["witness"] = std::move(w);
    }
    if (v.emptied_at) out["emptiedAt"] = *v.emptied_at;
    out["mode"] = combine_name(v.mode);
    if (v.note) out["note"] = *v.note;
    if (oracle) out["oracle"] = {{"reachable", oracle->reachable}, {"agrees", oracle->agrees}};
    return out;
}

ordered_json report_json(const SpuriousnessReport& report,
                         const std::vector<std::optional<OracleCheck>>& oracle) {
    ordered_json out = ordered_json::array();
    for (std::size_t i = 0; i < report.size(); ++i)
        out.push_back(verdict_json(report[i], i < oracle.size() ? oracle[i] : std::nullopt));
    return out;
}

std::string mismatches_text(const std::vector<Mismatch>& ms, const OntologyGraph& server) {
    if (ms.empty()) return "no conflicts\n";
    std::string out;
    for (const auto& m : ms) {
        auto e = explain_mismatch(m, server);
        out += std::string(kind_name(m.kind)) + " " + e.summary + "\n";
        for (const auto& d : e.details) out += "  " + d + "\n";
    }
    return out;
}

std::string report_text(const SpuriousnessReport& report,
                        const std::vector<std::optional<OracleCheck>>& oracle) {
    if (report.empty()) return "no conflicts to verify\n";
    std::string out;
    for (std::size_t i = 0; i < report.size(); ++i) {
        const auto& v = report[i];
        out += "query " + std::to_string(v.query_id) + ": " + std::string(verdict_name(v.verdict)) +
               " (" + std::string(combine_name(v.mode)) + ")\n";
        if (v.witness && !v.witness->empty()) {
            out += "  witness:";
            for (const auto& [name, value] : *v.witness) out += " " + name + "=" + value.literal();
            out += "\n";
        }
        if (v.emptied_at) {
            out += "  emptied at {";
            for (std::size_t k = 0; k < v.emptied_at->size(); ++k)
                out += (k ? ", " : "") + (*v.emptied_at)[k];
            out += "}\n";
        }
        if (v.note) out += "  note: " + *v.note + "\n";
        if (i < oracle.size() && oracle[i])
            out += std::string("  oracle: ") + (oracle[i]->reachable ? "reachable" : "unreachable") +
                   (oracle[i]->agrees ? ", agrees" : ", DISAGREES") + "\n";
    }
    return out;
}

}  // namespace semproto
