#pragma once

// Command layer behind the mcorr executable. Each command returns a JSON
// record that echoes its resolved configuration.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "mcorr/linalg.hpp"
#include "mcorr/samc.hpp"

namespace mcorr {

using Record = nlohmann::ordered_json;

struct RunConfig {
    std::string command;  // estimate | ci | test | samc | simulate
    std::string input;
    bool header = true;
    std::string format = "json";  // json | csv | table
    std::string output;           // empty: stdout
    std::uint64_t seed = 0;
    std::string method;  // empty: command default
    double level = 0.95;
    std::size_t reps = 1000;
    bool zero_mean = false;
    int threads = 0;  // 0: all available

    SamcConfig samc{};
    std::size_t chains = 1;

    std::string covariance_case = "1";
    double psi = 0.6;
    std::optional<std::size_t> p;
    std::optional<double> q;
    std::size_t n = 500;
    std::string dist = "normal";
};

std::string resolved_method(const RunConfig& config);
Record config_record(const RunConfig& config);

Record cmd_estimate(const DataMatrix& data, const RunConfig& config);
Record cmd_ci(const DataMatrix& data, const RunConfig& config);
Record cmd_test(const DataMatrix& data, const RunConfig& config);
Record cmd_samc(const DataMatrix& data, const RunConfig& config);
Record cmd_simulate(const RunConfig& config);

/// Reads the input (for data commands) and dispatches on config.command.
Record run_command(const RunConfig& config);

/// json: pretty printed; csv: header line plus one value line with nested
/// keys joined by '.'; table: one "key  value" line per scalar.
std::string render(const Record& record, const std::string& format);

/// Full command-line entry point. Returns the process exit code:
/// 0 success, 1 usage error, 2 data error, 3 numeric degeneracy.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mcorr
