#pragma once

#include <cstdio>
#include <string>

#include "nlam/theory.hpp"

namespace nlam::detail {

/// A persistent SMT-LIB solver subprocess. Scripts are written to its stdin,
/// exactly one result token is read back per (check-sat), and (reset) is sent
/// between queries. Not thread-safe; the owning Solver serializes access.
class SmtPipe {
public:
    explicit SmtPipe(const std::string& command);
    ~SmtPipe();

    SmtPipe(const SmtPipe&) = delete;
    SmtPipe& operator=(const SmtPipe&) = delete;

    SmtResult check_sat(const std::string& script);

private:
    std::FILE* to_solver_ = nullptr;
    std::FILE* from_solver_ = nullptr;
    int pid_ = -1;
};

}  // namespace nlam::detail
