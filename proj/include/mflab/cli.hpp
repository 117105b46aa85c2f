#ifndef MFLAB_CLI_HPP
#define MFLAB_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace mflab {

// Full command-line entry point, separated from main() so tests can drive it.
// Exit codes: 0 completed analysis (whatever the verdicts), 2 input error,
// 3 image-SFT (A2) violation.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mflab

#endif  // MFLAB_CLI_HPP
