#pragma once

#include <string>
#include <vector>

namespace markerforge {

// Exit codes: 0 success, 1 usage error, 2 I/O or malformed input,
// 3 completed with nothing decoded (or study pattern unmet).
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args); // args without program name

} // namespace markerforge
