#pragma once

#include <iosfwd>

namespace explore {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

// Entry point of the `explore` tool: pretrain | finetune | eval | compare.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace explore
