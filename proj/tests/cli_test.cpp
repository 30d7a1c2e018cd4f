#include <array>
#include <cstdio>
#include <string>

#include "doctest.h"
#include "testutil.hpp"

#ifndef NLAM_CLI_PATH
#define NLAM_CLI_PATH "./nlam"
#endif

namespace {

struct CliResult {
    int exit_code;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    std::string command = std::string(NLAM_CLI_PATH) + " " + args + " 2>/dev/null";
    std::FILE* proc = popen(command.c_str(), "r");
    REQUIRE(proc != nullptr);
    std::string output;
    std::array<char, 512> buf;
    while (std::fgets(buf.data(), buf.size(), proc)) output += buf.data();
    int status = pclose(proc);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

}  // namespace

TEST_CASE("coloring demos print the expected verdicts") {
    auto eq2 = run_cli("--theory equality --demo equivariant-coloring --k 2");
    CHECK(eq2.exit_code == 0);
    CHECK(eq2.output == "false\n");

    auto ord2 = run_cli("--theory ordered --demo equivariant-coloring --k 2");
    CHECK(ord2.exit_code == 0);
    CHECK(ord2.output == "true\n");
}

TEST_CASE("constructor demo output") {
    auto r = run_cli("--theory equality --demo atom-pairs");
    CHECK(r.exit_code == 0);
    CHECK(r.output == "{(x, y) : ⊤ for x, y}\n");
}

TEST_CASE("odd cycle demo is false over both theories") {
    CHECK(run_cli("--theory equality --demo odd-cycle").output == "false\n");
    CHECK(run_cli("--theory ordered --demo odd-cycle").output == "false\n");
}

TEST_CASE("demo reruns are byte-identical") {
    for (const char* demo :
         {"atom-pairs", "orbits", "hull", "size-demo", "transitive-closure"}) {
        std::string args = std::string("--theory equality --demo ") + demo;
        auto first = run_cli(args);
        auto second = run_cli(args);
        CAPTURE(demo);
        CHECK(first.exit_code == 0);
        CHECK(first.output == second.output);
    }
}

TEST_CASE("exit codes") {
    CHECK(run_cli("--demo no-such-demo").exit_code == 1);
    CHECK(run_cli("--demo atom-pairs --no-such-flag").exit_code == 1);
    CHECK(run_cli("").exit_code == 1);  // --demo is required

    // A step bound that cannot accommodate the closure chain.
    CHECK(run_cli("--theory equality --demo transitive-closure --step-bound 1")
              .exit_code == 3);

    // Solver subprocess failure is reported distinctly.
    CHECK(run_cli("--theory equality --demo odd-cycle --backend smtlib "
                  "--solver-path /nonexistent/solver")
              .exit_code == 2);
}

TEST_CASE("internal and smtlib backends agree on demo verdicts" *
          doctest::skip(!nlamtest::smt_solver_available())) {
    const std::string solver = " --backend smtlib --solver-path " +
                               nlamtest::smt_solver_command();
    for (const char* theory : {"equality", "ordered"}) {
        for (const char* demo : {"odd-cycle", "has-cycle", "equivariant-coloring"}) {
            std::string base =
                std::string("--theory ") + theory + " --demo " + demo;
            auto internal = run_cli(base);
            auto smtlib = run_cli(base + solver);
            CAPTURE(base);
            CHECK(internal.exit_code == 0);
            CHECK(smtlib.exit_code == 0);
            CHECK(internal.output == smtlib.output);
        }
    }
}
