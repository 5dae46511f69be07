#include "semproto/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "semproto/error.hpp"
#include "semproto/oracle.hpp"
#include "semproto/report.hpp"

namespace semproto {

namespace {

std::string read_text(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool text_format(const RunConfig& config) { return config.format == "text"; }

struct Inputs {
    OntologyGraph server;
    Protocol protocol;
    std::vector<Mismatch> conflicts;
};

Inputs load_inputs(const RunConfig& config) {
    if (config.server.empty()) throw Error("--server is required");
    if (config.protocol.empty()) throw Error("--protocol is required");
    Inputs in;
    in.server = OntologyGraph::load(config.server);
    if (!config.client.empty()) OntologyGraph::load(config.client);
    in.protocol = Protocol::parse(read_text(config.protocol));
    in.conflicts = check_consistency(in.protocol, in.server, {config.fail_fast});
    return in;
}

std::string client_line(const RunConfig& config) {
    return config.client.empty() ? std::string() : "client ontology: " + config.client + "\n";
}

CommandResult verdicts(const RunConfig& config, const Inputs& in, const Database& db,
                       const SpuriousnessReport& report, const OracleOptions& oracle_options) {
    std::vector<std::optional<OracleCheck>> checks;
    if (config.oracle)
        for (const auto& v : report) {
            bool reachable = is_reachable(in.protocol, db, v.query_id, oracle_options);
            checks.push_back(OracleCheck{reachable, reachable == (v.verdict == Verdict::Realizable)});
        }
    CommandResult r;
    for (const auto& v : report)
        if (v.verdict == Verdict::Realizable) r.exit_code = 1;
    if (text_format(config))
        r.output = client_line(config) + mismatches_text(in.conflicts, in.server) +
                   report_text(report, checks);
    else
        r.output = report_json(report, checks).dump(2) + "\n";
    return r;
}

VerifyOptions verify_options(const RunConfig& config) {
    return {config.paper_disjunction ? Combine::Disjunction : Combine::Conjunction};
}

}  // namespace

CommandResult cmd_check(const RunConfig& config) {
    Inputs in = load_inputs(config);
    CommandResult r;
    r.exit_code = in.conflicts.empty() ? 0 : 1;
    r.output = text_format(config) ? client_line(config) + mismatches_text(in.conflicts, in.server)
                                   : mismatches_json(in.conflicts).dump(2) + "\n";
    return r;
}

CommandResult cmd_verify_db(const RunConfig& config) {
    if (config.db.empty()) throw Error("verify-db requires --db");
    Inputs in = load_inputs(config);
    Database db = Database::load(config.db, in.server);
    auto report = verify_all(in.protocol, in.server, db, in.conflicts, verify_options(config));
    return verdicts(config, in, db, report, {});
}

CommandResult cmd_step(const RunConfig& config) {
    if (config.db.empty()) throw Error("step requires --db");
    if (config.trace.empty()) throw Error("step requires --trace");
    Inputs in = load_inputs(config);
    Database db = Database::load(config.db, in.server);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text(config.trace));
    } catch (const nlohmann::json::parse_error& e) {
        throw InconsistentTraceError(std::string("trace is not valid JSON: ") + e.what());
    }
    StepTrace trace = parse_trace(doc, in.protocol, db);
    auto report = step_verify(in.protocol, in.server, db, in.conflicts, trace,
                              verify_options(config));
    // The oracle replays the executed prefix: answered queries return exactly
    // what the trace says, even when the database would not produce it.
    OracleOptions oracle_options;
    for (const auto& ev : trace)
        if (ev.query_id) oracle_options.fixed_answers[*ev.query_id] = *ev.answer;
    return verdicts(config, in, db, report, oracle_options);
}

CommandResult cmd_parse(const RunConfig& config) {
    if (config.protocol.empty()) throw Error("--protocol is required");
    Protocol p = Protocol::parse(read_text(config.protocol));
    return {0, text_format(config) ? p.print() : p.to_json().dump(2) + "\n"};
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig config;
    CLI::App app{"Static checker for query protocols between peers with different ontologies"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub, bool needs_server) {
        sub->add_option("--protocol", config.protocol, "Protocol file, or - for stdin")->required();
        if (!needs_server) return;
        sub->add_option("--server", config.server, "Server ontology (JSON)")->required();
        sub->add_option("--client", config.client, "Client ontology (JSON), validated only");
        sub->add_flag("--fail-fast", config.fail_fast, "Stop at the first mismatch");
    };
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", config.format, "Output format")
            ->check(CLI::IsMember({"json", "text"}));
    };
    auto add_db = [&](CLI::App* sub) {
        sub->add_option("--db", config.db, "Database directory")->required();
        sub->add_flag("--paper-disjunction", config.paper_disjunction,
                      "Combine path conditions with OR instead of AND");
        sub->add_flag("--oracle", config.oracle, "Cross-check each verdict by enumeration");
    };

    auto* check = app.add_subcommand("check", "Report ontology-level conflicts");
    add_common(check, true);
    add_format(check);
    auto* verify = app.add_subcommand("verify-db", "Decide which conflicts the database can reach");
    add_common(verify, true);
    add_db(verify);
    add_format(verify);
    auto* step = app.add_subcommand("step", "Re-verify conflicts after a partial execution");
    add_common(step, true);
    add_db(step);
    step->add_option("--trace", config.trace, "Trace file (JSON)")->required();
    add_format(step);
    auto* parse = app.add_subcommand("parse", "Print a protocol in canonical form");
    add_common(parse, false);
    add_format(parse);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        CommandResult r;
        if (check->parsed()) r = cmd_check(config);
        else if (verify->parsed()) r = cmd_verify_db(config);
        else if (step->parsed()) r = cmd_step(config);
        else r = cmd_parse(config);
        out << r.output;
        return r.exit_code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace semproto
