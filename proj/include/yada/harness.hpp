#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "yada/ingest.hpp"
#include "yada/twinsync.hpp"

namespace yada {

enum ExitCode : int { kOk = 0, kParseError = 1, kConfigError = 2, kUnderRun = 3 };

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ReplayOrder { Interleaved, Sequential };

struct HarnessConfig {
    std::string schema_file;
    std::string selection_file;  // empty: built-in air quality KPI
    std::vector<Source> sources;
    SimConfig sim;               // schema, selection, schedule, mode and num_nodes filled per cell
    Timestamp reading_gap = 10'000;
    double replay_jitter = 0.25;
    ReplayOrder replay_order = ReplayOrder::Interleaved;
    std::vector<int> sweep_nodes;
    std::string output_dir;
    std::uint64_t seed = 1;
};

/// Command-line overrides, applied on top of the file.
struct Overrides {
    std::vector<std::string> set;  // dotted.key=value, value parsed as YAML
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

/// Reads the YAML config. Relative input paths resolve against the config's
/// directory; output.dir resolves against the working directory.
/// Throws ConfigError.
HarnessConfig load_config(const std::string& file, const Overrides& overrides = {});

/// Constitutes the configured sources and lays them out in time, honouring
/// replayOrder. Throws IngestError.
ReplaySchedule build_replay(const HarnessConfig& config, const SchemaModule& schema,
                            std::vector<LoadReport>* reports = nullptr);

int cmd_compile(const std::string& schema_file, std::ostream& out, std::ostream& err);
int cmd_validate(const std::string& schema_file, const std::string& data_file, std::ostream& out,
                 std::ostream& err);
int cmd_query(const std::string& schema_file, const std::string& data_file, const std::string& path,
              std::ostream& out, std::ostream& err);
int cmd_ingest(const std::string& config_file, const Overrides& overrides, std::ostream& out, std::ostream& err);
int cmd_simulate(const std::string& config_file, const Overrides& overrides, std::ostream& out,
                 std::ostream& err);
/// Prints comparison.csv from output.dir as an aligned table.
int cmd_report(const std::string& config_file, const Overrides& overrides, std::ostream& out, std::ostream& err);

}  // namespace yada
