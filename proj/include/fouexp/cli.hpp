#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fouexp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitNumerical = 3;

/// (H, T) of a reproducible figure; theta = 2, sigma = 1, x0 = 0 throughout.
struct FigureSpec {
    int id;
    double hurst;
    double horizon;
};

/// Figure IDs 1..8:
///   1 (0.55, 50)   2 (0.55, 100)   3 (0.625, 50)   4 (0.625, 100)
///   5 (0.7, 100)   6 (0.7, 400)    7 (0.55, 400)   8 (0.625, 400)
FigureSpec figure_spec(int id);

/// Entry point. args[0] is the program name, args[1] the subcommand.
/// `--config file.json` loads a flat JSON object whose keys are long option names; its
/// values are applied first, so command-line flags override them.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

}  // namespace fouexp::cli
