#pragma once

#include <atomic>
#include <ostream>
#include <string>
#include <vector>

namespace itrace::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // processing failed
inline constexpr int kExitUsage = 2;    // bad arguments or inputs

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. `stop` lets a caller end `serve` without a signal.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::atomic<bool>* stop = nullptr);

}  // namespace itrace::cli
