#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <vector>

#include "nlam/smtlib_detail.hpp"
#include "nlam/theory.hpp"

namespace nlam {

namespace {

using Kind = Formula::Kind;
using Rel = Formula::Rel;

void emit(const Formula& f, std::string& out) {
    switch (f.kind()) {
        case Kind::truth:
            out += "true";
            return;
        case Kind::falsity:
            out += "false";
            return;
        case Kind::relation:
            out += f.rel() == Rel::eq ? "(= " : "(<= ";
            out += f.lhs().name;
            out += ' ';
            out += f.rhs().name;
            out += ')';
            return;
        case Kind::negation:
            out += "(not ";
            emit(f.operands()[0], out);
            out += ')';
            return;
        case Kind::conjunction:
        case Kind::disjunction:
            out += f.kind() == Kind::conjunction ? "(and" : "(or";
            for (const auto& k : f.operands()) {
                out += ' ';
                emit(k, out);
            }
            out += ')';
            return;
        case Kind::exists:
        case Kind::forall:
            throw std::invalid_argument(
                "smtlib_script: formula must be quantifier-free");
    }
}

std::string first_token(const std::string& text) {
    std::size_t b = 0;
    while (b < text.size() && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    std::size_t e = b;
    while (e < text.size() && !std::isspace(static_cast<unsigned char>(text[e]))) ++e;
    return text.substr(b, e - b);
}

SmtResult parse_result(const std::string& text, const std::string& diagnostics) {
    const std::string token = first_token(text);
    if (token == "sat") return SmtResult::sat;
    if (token == "unsat") return SmtResult::unsat;
    std::string detail = text;
    while (!detail.empty() && (detail.back() == '\n' || detail.back() == '\r'))
        detail.pop_back();
    throw BackendError("solver returned '" + detail + "' instead of sat/unsat" +
                       (diagnostics.empty() ? "" : ("; " + diagnostics)));
}

}  // namespace

std::string smtlib_script(const Formula& phi, AtomTheory theory) {
    std::string out = "(set-logic ";
    out += smt_logic(theory);
    out += ")\n";
    const char* sort = theory == AtomTheory::equality_atoms ? "Int" : "Real";
    for (const auto& v : phi.free_variables()) {
        out += "(declare-const ";
        out += v.name;
        out += ' ';
        out += sort;
        out += ")\n";
    }
    out += "(assert ";
    emit(phi, out);
    out += ")\n(check-sat)\n";
    return out;
}

SmtResult smt_check_sat(const Formula& phi, AtomTheory theory,
                        const std::string& solver_command) {
    if (!phi.quantifier_free())
        throw std::invalid_argument("smt_check_sat: formula must be quantifier-free");
    const std::string script = smtlib_script(phi, theory);

    char path[] = "/tmp/nlam-XXXXXX.smt2";
    int fd = mkstemps(path, 5);
    if (fd < 0) throw BackendError("cannot create temporary script file");
    if (write(fd, script.data(), script.size()) != static_cast<ssize_t>(script.size())) {
        close(fd);
        unlink(path);
        throw BackendError("cannot write temporary script file");
    }
    close(fd);

    std::string command = solver_command + " " + path + " 2>&1";
    std::FILE* proc = popen(command.c_str(), "r");
    if (!proc) {
        unlink(path);
        throw BackendError("cannot start solver: " + solver_command);
    }
    std::string output;
    std::array<char, 512> buf;
    while (std::fgets(buf.data(), buf.size(), proc)) output += buf.data();
    int status = pclose(proc);
    unlink(path);

    const std::string token = first_token(output);
    if (token == "sat" || token == "unsat") return parse_result(output, "");
    if (status != 0)
        throw BackendError("solver failed (exit status " + std::to_string(status) +
                           "): " + output);
    return parse_result(output, "");
}

namespace detail {

SmtPipe::SmtPipe(const std::string& command) {
    // Writing to a solver that died must surface as a BackendError, not kill
    // the process with SIGPIPE.
    struct sigaction current {};
    if (sigaction(SIGPIPE, nullptr, &current) == 0 &&
        current.sa_handler == SIG_DFL) {
        current.sa_handler = SIG_IGN;
        sigaction(SIGPIPE, &current, nullptr);
    }

    std::vector<std::string> args;
    std::istringstream split(command);
    for (std::string word; split >> word;) args.push_back(word);
    if (args.empty()) throw BackendError("empty solver command");

    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0)
        throw BackendError("cannot create solver pipes");

    pid_ = fork();
    if (pid_ < 0) throw BackendError("cannot fork solver process");
    if (pid_ == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        dup2(from_child[1], STDERR_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        std::vector<char*> argv;
        argv.reserve(args.size() + 1);
        for (auto& a : args) argv.push_back(a.data());
        argv.push_back(nullptr);
        execvp(argv[0], argv.data());
        std::perror("nlam: cannot exec solver");
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    to_solver_ = fdopen(to_child[1], "w");
    from_solver_ = fdopen(from_child[0], "r");
    if (!to_solver_ || !from_solver_) throw BackendError("cannot open solver pipes");
}

SmtPipe::~SmtPipe() {
    if (to_solver_) std::fclose(to_solver_);
    if (from_solver_) std::fclose(from_solver_);
    if (pid_ > 0) waitpid(pid_, nullptr, 0);
}

SmtResult SmtPipe::check_sat(const std::string& script) {
    if (std::fwrite(script.data(), 1, script.size(), to_solver_) != script.size() ||
        std::fflush(to_solver_) != 0)
        throw BackendError("cannot write to solver process");

    std::string line;
    std::array<char, 512> buf;
    if (!std::fgets(buf.data(), buf.size(), from_solver_))
        throw BackendError("solver process terminated unexpectedly");
    line = buf.data();

    if (std::fputs("(reset)\n", to_solver_) == EOF || std::fflush(to_solver_) != 0)
        throw BackendError("cannot write to solver process");

    return parse_result(line, "");
}

}  // namespace detail

}  // namespace nlam
