#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "yada/datatree.hpp"
#include "yada/ingest.hpp"
#include "yada/pathsel.hpp"
#include "yada/schema.hpp"
#include "yada/value.hpp"

namespace yada {

struct TwinEntity {
    std::string id;
    std::map<std::string, Value> properties;
    std::vector<std::string> telemetry;
    std::vector<std::pair<std::string, std::string>> relationships;  // (target id, label)
    std::vector<std::string> components;
};

struct TwinGraph {
    std::vector<TwinEntity> entities;

    const TwinEntity* find(const std::string& id) const;
    /// Throws TwinError{InvalidGraph} on duplicate ids or dangling targets.
    void check() const;
};

struct LeafState {
    Value value;
    Timestamp ts = 0;
};

struct PhysicalNode {
    std::string id;
    std::vector<LeafPath> bound_leaves;          // schema leaves, no list keys
    std::map<LeafPath, LeafState> local_state;   // concrete path -> latest reading
};

class TwinError : public std::runtime_error {
public:
    enum class Kind { NoLeaves, InvalidGraph, ConfigInvalid, ConfigMismatch };
    TwinError(Kind kind, std::string message);
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct Topology {
    std::vector<PhysicalNode> nodes;
    TwinGraph graph;
};

/// Seeded shuffle of the schema leaves, dealt round-robin to `num_nodes`.
Topology build_topology(const SchemaModule& schema, int num_nodes, std::uint64_t seed);

/// Channel parameters, all in milliseconds.
struct NetworkModel {
    Decimal base_latency_ms = Decimal::from_micros(5 * Decimal::kScale);
    Decimal jitter_ms = Decimal::from_micros(2 * Decimal::kScale);
    Decimal per_byte_ms = Decimal::from_micros(Decimal::kScale / 100);

    friend bool operator==(const NetworkModel&, const NetworkModel&) = default;
};

enum class Mode { WithYada, WithoutYada };

std::string_view to_string(Mode mode);

struct SimConfig {
    int num_nodes = 4;
    Mode mode = Mode::WithYada;
    SchemaPtr schema;
    SelectionSet selection;  // filters responses in WithYada mode, scores both modes
    std::shared_ptr<const ReplaySchedule> schedule;
    int gateway_batch_size = 16;
    int gateway_flush_ms = 50;
    int monitor_poll_ms = 100;
    int staleness_window_ms = 1000;
    Decimal processing_cost_per_leaf_ms = Decimal::from_micros(Decimal::kScale / 5);
    NetworkModel network;
    std::uint64_t seed = 1;

    /// Throws TwinError{ConfigInvalid}.
    void check() const;
};

struct SyncSample {
    Timestamp t = 0;
    double score = 0;
};

struct MetricsRecord {
    Mode mode = Mode::WithYada;
    int num_nodes = 0;
    std::vector<Timestamp> rtt;               // per poll, response order
    std::vector<std::size_t> payload_bytes;   // per poll
    std::vector<Timestamp> e2e;               // per applied reading, apply order
    std::vector<SyncSample> sync;

    std::size_t scheduled = 0;
    std::size_t applied = 0;
    std::size_t dropped = 0;

    double mean_rtt_ms() const;
    double mean_payload_bytes() const;
    double mean_e2e_ms() const;
    /// Time average of the sync series; polls are evenly spaced.
    double final_sync() const;
};

struct LogEvent {
    Timestamp ts = 0;
    std::string kind;
    std::string node;
    std::string path;
    std::size_t bytes = 0;
};

using EventLog = std::vector<LogEvent>;

struct RunResult {
    MetricsRecord metrics;
    EventLog log;
};

RunResult run(const SimConfig& config);

/// Fraction of selected, physically written leaves whose twin value matches
/// and was updated no earlier than now - window. 1.0 when nothing qualifies.
double sync_score(std::span<const PhysicalNode> physical, const DataTree& twin,
                  std::span<const BoundPath> selection, Timestamp window, Timestamp now);

struct ComparisonRow {
    int num_nodes = 0;
    double sync_with = 0;
    double sync_without = 0;
    double rtt_with_ms = 0;
    double rtt_without_ms = 0;
    double e2e_with_ms = 0;
    double e2e_without_ms = 0;
    double payload_with = 0;
    double payload_without = 0;
};

struct Comparison {
    ComparisonRow row;
    RunResult with;
    RunResult without;
};

/// Runs both configs; they must differ in mode only.
Comparison compare(const SimConfig& with, const SimConfig& without);

std::string metrics_csv(const MetricsRecord& m, bool header = true);
std::string event_log_csv(const EventLog& log);
std::string comparison_csv(std::span<const ComparisonRow> rows);

/// Microseconds rendered as decimal milliseconds.
std::string format_ms(Timestamp us);

}  // namespace yada
