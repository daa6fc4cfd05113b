#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fuzzyalign {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitSearchError = 3;

/// Entry point of the `fuzzyalign` tool; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fuzzyalign
