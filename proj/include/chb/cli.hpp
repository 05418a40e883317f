#pragma once

// Batch front end: run configuration, its key=value text form, and the
// subcommand dispatcher used by the chb executable.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chb/params.hpp"

namespace chb {

inline constexpr const char* tool_version = "chb 1.0.0";

/// Bad key, value or range in a configuration; maps to exit code 1.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Command { constants, reduced, certify, path, saddle, gamma };

std::string to_string(Command c);
Command parse_command(const std::string& name);

struct RunConfig {
    Command command = Command::constants;
    int dim = 2;
    double phi = 0.1;
    std::optional<double> length;
    std::optional<double> xi;    ///< may be +inf for the reduced model
    int grid = 256;
    int images = 32;
    std::optional<double> R;     ///< default: clamp width derived from phi
    double kappa = 0.2;
    int samples = 1000;
    unsigned threads = 0;        ///< 0: CHB_THREADS or hardware cores
    std::string out;
    std::string input;           ///< CHF1 field for certify
    double step = 0.0;           ///< 0: 0.9 of the stable explicit step
    int max_iter = 20000;
    double tol = 1e-5;
    double radius = 1.0;
    std::vector<double> phis{0.2, 0.1, 0.05};
    double eps0 = 0.05;
    double resolution = 0.25;

    bool operator==(const RunConfig&) const = default;

    /// One key=value per line; parse_config(to_text()) reproduces *this exactly.
    std::string to_text() const;

    /// Torus parameters from phi and either length or xi (length wins).
    ModelParams model_params() const;
};

/// Flat key=value lines, '#' comments, blank lines ignored. Unknown keys,
/// malformed values and out-of-range values throw ConfigError.
RunConfig parse_config(const std::string& text);

/// Range checks shared by the config parser and command-line flags.
void validate(const RunConfig& config);

/// Runs argv (argv[0] is the program name). Prints a one-line JSON summary to
/// out. Returns 0 on success, 2 on domain errors, 1 on usage errors.
int dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace chb
