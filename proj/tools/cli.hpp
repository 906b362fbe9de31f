#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tokext::cli {

// Exit-code contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitIncompatible = 3;
inline constexpr int kExitJoin = 4;
inline constexpr int kExitDuplicateSeries = 5;

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tokext::cli
