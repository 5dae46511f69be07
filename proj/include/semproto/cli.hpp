#pragma once

#include <ostream>
#include <string>

namespace semproto {

struct RunConfig {
    std::string command;
    std::string server;
    std::string client;
    std::string protocol;  // path, or "-" for standard input
    std::string db;
    std::string trace;
    bool fail_fast = false;
    bool paper_disjunction = false;
    bool oracle = false;
    std::string format = "json";
};

/// Exit status plus what goes to standard output.
struct CommandResult {
    int exit_code = 0;
    std::string output;
};

// Exit codes: 0 clean, 1 findings, 2 input error (thrown as semproto::Error
// or std::exception and mapped by run_cli).
CommandResult cmd_check(const RunConfig& config);
CommandResult cmd_verify_db(const RunConfig& config);
CommandResult cmd_step(const RunConfig& config);
CommandResult cmd_parse(const RunConfig& config);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace semproto
