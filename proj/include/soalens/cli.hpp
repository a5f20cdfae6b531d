#pragma once

#include <iosfwd>

namespace soalens {

// Exit codes of the soalens executable.
enum ExitCode : int {
    kExitOk = 0,
    kExitDiagnostics = 1,   // lex, parse or semantic errors
    kExitVerification = 2,  // differential check failed
    kExitIo = 3,            // I/O or toolchain errors
    kExitUsage = 64,
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace soalens
