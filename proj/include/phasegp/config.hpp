#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "phasegp/alps.hpp"
#include "phasegp/fitness.hpp"

namespace phasegp {

// Everything a fit run needs. Absent keys keep these defaults.
struct RunConfig {
    std::vector<std::filesystem::path> datasets;
    double train_fraction { 1.0 };  // leading fraction of each trajectory used for fitting

    AlpsConfig alps;
    TreeLimits limits;
    std::vector<Symbol> functions { kAllFunctions.begin(), kAllFunctions.end() };
    double param_min { -10.0 };
    double param_max { 10.0 };

    Tolerances tolerances;
    LmOptions memetic;  // max_iters = 0 disables local optimization

    std::filesystem::path model_path { "best.model" };
    std::filesystem::path history_path { "history.csv" };
    std::filesystem::path report_path { "report.txt" };

    Grammar grammar() const;

    friend bool operator==(RunConfig const&, RunConfig const&) = default;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, std::string const& message);
    std::string const& key() const noexcept { return key_; }

private:
    std::string key_;
};

// INI text with sections [data], [alps], [tree], [ode], [memetic], [output].
// Unknown sections/keys and out-of-range values raise ConfigError.
RunConfig parse_config(std::string_view text);
std::string format_config(RunConfig const& config);

// Parses the file, resolves relative paths against its directory and checks
// that every dataset exists.
RunConfig load_config(std::filesystem::path const& path);
void save_config(std::filesystem::path const& path, RunConfig const& config);

void validate(RunConfig const& config);

}  // namespace phasegp
