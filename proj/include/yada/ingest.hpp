#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "yada/datatree.hpp"
#include "yada/schema.hpp"
#include "yada/value.hpp"

namespace yada {

struct DatasetSpec {
    std::string name;
    int feature_count = 1;
    std::size_t total_samples = 0;
    std::size_t used_samples = 0;

    /// Throws IngestError{BadSpec} unless 0 < used <= total and features >= 1.
    void check() const;
};

/// One CSV column routed to a leaf. `target` may hold `{column}` placeholders,
/// replaced per row by that column's cell, e.g.
/// `/AirParticleURI/value[key='{pm2_5}']/pm10-data`.
struct ColumnRule {
    std::string csv_column;
    std::string target;
    ValueKind kind = ValueKind::Num;
    std::optional<Decimal> scale;
    std::map<std::string, Decimal> codes;  // categorical cell text -> number (Num only)

    friend bool operator==(const ColumnRule&, const ColumnRule&) = default;
};

enum class EmitMode {
    All,     // one reading per mapped cell
    Rotate,  // one reading per row, cycling through the mapped columns
};

struct ColumnMapping {
    std::vector<ColumnRule> columns;
    EmitMode emit = EmitMode::All;
    std::string sensor_column;  // optional; appended to the source name

    /// Every target must name a leaf of `schema` whose type matches the rule.
    /// Throws IngestError{BadMapping}.
    void check(const SchemaModule& schema) const;
};

struct SensorReading {
    std::string sensor_id;
    LeafPath path;
    Value value;
    Timestamp ts = 0;
    std::size_t row = 0;  // data row of the source file, 0-based

    friend bool operator==(const SensorReading&, const SensorReading&) = default;
};

struct ReplaySchedule {
    std::vector<SensorReading> events;
    Timestamp horizon = 0;  // ts of the last event
};

struct LoadReport {
    std::string source;
    std::size_t rows = 0;      // data rows seen
    std::size_t retained = 0;  // rows that produced readings
    std::size_t skipped = 0;   // rows dropped for unparseable mapped cells
    std::size_t used = 0;      // rows kept by constitute
};

class IngestError : public std::runtime_error {
public:
    enum class Kind { MissingColumn, EmptyFile, InsufficientRows, BadMapping, BadSpec };
    IngestError(Kind kind, std::string message);
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct LoadedSource {
    std::vector<SensorReading> readings;  // grouped by row, rows ascending
    LoadReport report;
};

LoadedSource parse_csv(std::string_view text, const ColumnMapping& mapping, const DatasetSpec& spec,
                       const SchemaModule& schema);
LoadedSource load_csv(const std::string& file, const ColumnMapping& mapping, const DatasetSpec& spec,
                      const SchemaModule& schema);

struct Source {
    std::string file;
    ColumnMapping mapping;
    DatasetSpec spec;
};

/// Samples spec.used_samples retained rows from every source (uniform,
/// without replacement, original order kept) and concatenates the readings
/// in source order. Throws IngestError{InsufficientRows}.
std::vector<SensorReading> constitute(std::span<const Source> sources, const SchemaModule& schema,
                                      std::uint64_t seed, std::vector<LoadReport>* reports = nullptr);

/// constitute() before concatenation: one reading list per source.
std::vector<std::vector<SensorReading>> constitute_sources(std::span<const Source> sources,
                                                           const SchemaModule& schema, std::uint64_t seed,
                                                           std::vector<LoadReport>* reports = nullptr);

/// Row subset picked for one source; exposed for tests.
std::vector<std::size_t> sample_rows(std::size_t available, std::size_t wanted, std::uint64_t seed);

/// ts = index * gap + jitter, jitter uniform in [0, gap * jitter_fraction],
/// then a stable sort by ts.
ReplaySchedule schedule(std::vector<SensorReading> readings, Timestamp gap, std::uint64_t seed,
                        double jitter_fraction = 0.25);

/// Replays every source concurrently: source i, holding n_i of the N readings,
/// gets gap_i = gap * N / n_i and jitter in [0, gap_i * jitter_fraction], so all
/// sources span about N * gap. Merged by (ts, source order, input order).
ReplaySchedule schedule_interleaved(const std::vector<std::vector<SensorReading>>& per_source, Timestamp gap,
                                    std::uint64_t seed, double jitter_fraction = 0.25);

/// `ts_ms,sensor_id,path,value` with a header row.
std::string replay_csv(const ReplaySchedule& s);

}  // namespace yada
