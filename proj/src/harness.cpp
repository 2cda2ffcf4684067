#include "yada/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "yada/io.hpp"
#include "yada/pathsel.hpp"

namespace yada {

namespace fs = std::filesystem;

namespace {

// ---- YAML helpers -----------------------------------------------------------

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

bool is_index(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

void set_key(YAML::Node node, const std::vector<std::string>& keys, std::size_t i, const YAML::Node& value) {
    const std::string& k = keys[i];
    const bool last = i + 1 == keys.size();
    if (node.IsSequence() && is_index(k)) {
        const std::size_t idx = std::stoul(k);
        if (idx >= node.size()) throw ConfigError("--set: index " + k + " out of range");
        if (last) {
            node[idx] = value;
        } else {
            set_key(node[idx], keys, i + 1, value);
        }
        return;
    }
    if (last) {
        node[k] = value;
        return;
    }
    if (!node[k] || !(node[k].IsMap() || node[k].IsSequence())) node[k] = YAML::Node(YAML::NodeType::Map);
    set_key(node[k], keys, i + 1, value);
}

void apply_set(YAML::Node& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
    const auto keys = split(assignment.substr(0, eq), '.');
    YAML::Node value;
    try {
        value = YAML::Load(assignment.substr(eq + 1));
    } catch (const YAML::Exception& e) {
        throw ConfigError("--set " + assignment + ": " + e.what());
    }
    if (!root.IsMap()) root = YAML::Node(YAML::NodeType::Map);
    set_key(root, keys, 0, value);
}

template <typename T>
T scalar(const YAML::Node& n, const std::string& where) {
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(where + ": bad value");
    }
}

Decimal decimal(const YAML::Node& n, const std::string& where) {
    const auto d = Decimal::parse(scalar<std::string>(n, where));
    if (!d) throw ConfigError(where + ": expected a decimal number");
    return *d;
}

void only_keys(const YAML::Node& map, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!map) return;
    if (!map.IsMap()) throw ConfigError(where + ": expected a mapping");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

ValueKind parse_kind(const std::string& s, const std::string& where) {
    if (s == "num" || s == "decimal") return ValueKind::Num;
    if (s == "str" || s == "string") return ValueKind::Str;
    if (s == "bool" || s == "boolean") return ValueKind::Bool;
    throw ConfigError(where + ": unknown kind '" + s + "'");
}

std::string resolve_input(const fs::path& base, const std::string& file, const std::string& where) {
    if (file.empty()) throw ConfigError(where + ": missing file name");
    fs::path p(file);
    if (p.is_relative()) p = base / p;
    if (!fs::exists(p)) throw ConfigError(where + ": file not found: " + p.string());
    return p.lexically_normal().string();
}

Source parse_source(const YAML::Node& n, const fs::path& base, std::size_t index) {
    const std::string where = fmt::format("ingest.sources[{}]", index);
    only_keys(n, where,
              {"file", "name", "used_samples", "total_samples", "features", "emit", "sensor_column", "columns"});
    Source s;
    s.file = resolve_input(base, n["file"] ? scalar<std::string>(n["file"], where + ".file") : "", where + ".file");
    s.spec.name = n["name"] ? scalar<std::string>(n["name"], where + ".name") : fs::path(s.file).stem().string();
    if (!n["used_samples"]) throw ConfigError(where + ": used_samples is required");
    s.spec.used_samples = scalar<std::size_t>(n["used_samples"], where + ".used_samples");
    s.spec.total_samples =
        n["total_samples"] ? scalar<std::size_t>(n["total_samples"], where + ".total_samples") : s.spec.used_samples;
    s.spec.feature_count = n["features"] ? scalar<int>(n["features"], where + ".features") : 1;
    if (n["emit"]) {
        const auto emit = scalar<std::string>(n["emit"], where + ".emit");
        if (emit == "all") {
            s.mapping.emit = EmitMode::All;
        } else if (emit == "rotate") {
            s.mapping.emit = EmitMode::Rotate;
        } else {
            throw ConfigError(where + ".emit: expected all or rotate");
        }
    }
    if (n["sensor_column"]) s.mapping.sensor_column = scalar<std::string>(n["sensor_column"], where + ".sensor_column");
    const YAML::Node cols = n["columns"];
    if (!cols || !cols.IsMap() || cols.size() == 0) throw ConfigError(where + ".columns: expected a non-empty mapping");
    for (const auto& kv : cols) {
        ColumnRule rule;
        rule.csv_column = kv.first.as<std::string>();
        const std::string cw = where + ".columns." + rule.csv_column;
        const YAML::Node& c = kv.second;
        if (c.IsScalar()) {
            rule.target = c.as<std::string>();
        } else {
            only_keys(c, cw, {"path", "kind", "scale", "codes"});
            if (!c["path"]) throw ConfigError(cw + ": path is required");
            rule.target = scalar<std::string>(c["path"], cw + ".path");
            if (c["kind"]) rule.kind = parse_kind(scalar<std::string>(c["kind"], cw + ".kind"), cw + ".kind");
            if (c["scale"]) rule.scale = decimal(c["scale"], cw + ".scale");
            if (c["codes"]) {
                if (!c["codes"].IsMap()) throw ConfigError(cw + ".codes: expected a mapping");
                for (const auto& code : c["codes"]) {
                    rule.codes.emplace(code.first.as<std::string>(), decimal(code.second, cw + ".codes"));
                }
            }
        }
        s.mapping.columns.push_back(std::move(rule));
    }
    return s;
}

// ---- shared command plumbing ---------------------------------------------------

struct Experiment {
    HarnessConfig cfg;
    SchemaPtr schema;
    SelectionSet selection;
};

Experiment prepare(const std::string& config_file, const Overrides& overrides) {
    Experiment e;
    e.cfg = load_config(config_file, overrides);
    e.schema = std::make_shared<const SchemaModule>(load_schema_file(e.cfg.schema_file));
    e.selection = e.cfg.selection_file.empty() ? kpi_airquality() : load_selection_file(e.cfg.selection_file);
    bind_all(e.selection, e.schema);
    return e;
}

// Runs `body`, mapping library exceptions onto the exit-code contract.
template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const IngestError& e) {
        err << "ingest error: " << e.what() << '\n';
        switch (e.kind()) {
            case IngestError::Kind::InsufficientRows: return kUnderRun;
            case IngestError::Kind::BadMapping:
            case IngestError::Kind::BadSpec: return kConfigError;
            default: return kParseError;
        }
    } catch (const TwinError& e) {
        err << "simulation error: " << e.what() << '\n';
        return kConfigError;
    } catch (const FileError& e) {
        err << e.what() << '\n';
        return kParseError;
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << '\n';
        return kParseError;
    } catch (const PathSyntaxError& e) {
        err << "path error: " << e.what() << '\n';
        return kParseError;
    } catch (const BindError& e) {
        err << "path error: " << e.what() << '\n';
        return kParseError;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kParseError;
    }
}

std::string render_leaf(const DataNode& n) {
    if (n.kind == NodeKind::Leaf) return n.value.to_string();
    std::string out = "[";
    for (std::size_t i = 0; i < n.values.size(); ++i) out += (i ? ", " : "") + n.values[i].to_string();
    return out + "]";
}

std::string series_name(const MetricsRecord& m) { return fmt::format("{}/{}", to_string(m.mode), m.num_nodes); }

void write_out(const fs::path& dir, const std::string& name, const std::string& text) {
    write_file((dir / name).string(), text);
}

}  // namespace

HarnessConfig load_config(const std::string& file, const Overrides& overrides) {
    YAML::Node root;
    try {
        root = YAML::Load(read_file(file));
    } catch (const FileError& e) {
        throw ConfigError(e.what());
    } catch (const YAML::Exception& e) {
        throw ConfigError(file + ": " + e.what());
    }
    if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    for (const auto& s : overrides.set) apply_set(root, s);
    if (overrides.seed) root["seed"] = *overrides.seed;
    if (overrides.out) root["output"]["dir"] = *overrides.out;

    only_keys(root, "config", {"schemaFile", "selectionFile", "ingest", "sim", "sweep", "output", "seed"});
    const fs::path base = fs::path(file).parent_path();
    HarnessConfig c;
    c.schema_file = resolve_input(base, root["schemaFile"] ? scalar<std::string>(root["schemaFile"], "schemaFile") : "",
                                  "schemaFile");
    if (root["selectionFile"]) {
        c.selection_file = resolve_input(base, scalar<std::string>(root["selectionFile"], "selectionFile"), "selectionFile");
    }
    c.seed = root["seed"] ? scalar<std::uint64_t>(root["seed"], "seed") : 1;

    only_keys(root["ingest"], "ingest", {"sources"});
    const YAML::Node sources = root["ingest"]["sources"];
    if (sources) {
        if (!sources.IsSequence()) throw ConfigError("ingest.sources: expected a list");
        for (std::size_t i = 0; i < sources.size(); ++i) c.sources.push_back(parse_source(sources[i], base, i));
    }

    const YAML::Node sim = root["sim"];
    only_keys(sim, "sim",
              {"gatewayBatchSize", "gatewayFlushMs", "monitorPollMs", "stalenessWindowMs", "processingCostPerLeafMs",
               "network", "interReadingGapMs", "replayJitter", "replayOrder"});
    if (sim) {
        auto& s = c.sim;
        if (sim["gatewayBatchSize"]) s.gateway_batch_size = scalar<int>(sim["gatewayBatchSize"], "sim.gatewayBatchSize");
        if (sim["gatewayFlushMs"]) s.gateway_flush_ms = scalar<int>(sim["gatewayFlushMs"], "sim.gatewayFlushMs");
        if (sim["monitorPollMs"]) s.monitor_poll_ms = scalar<int>(sim["monitorPollMs"], "sim.monitorPollMs");
        if (sim["stalenessWindowMs"]) {
            s.staleness_window_ms = scalar<int>(sim["stalenessWindowMs"], "sim.stalenessWindowMs");
        }
        if (sim["processingCostPerLeafMs"]) {
            s.processing_cost_per_leaf_ms = decimal(sim["processingCostPerLeafMs"], "sim.processingCostPerLeafMs");
        }
        const YAML::Node net = sim["network"];
        only_keys(net, "sim.network", {"baseLatencyMs", "jitterMs", "perByteMs"});
        if (net) {
            if (net["baseLatencyMs"]) s.network.base_latency_ms = decimal(net["baseLatencyMs"], "sim.network.baseLatencyMs");
            if (net["jitterMs"]) s.network.jitter_ms = decimal(net["jitterMs"], "sim.network.jitterMs");
            if (net["perByteMs"]) s.network.per_byte_ms = decimal(net["perByteMs"], "sim.network.perByteMs");
        }
        if (sim["interReadingGapMs"]) {
            const Decimal gap = decimal(sim["interReadingGapMs"], "sim.interReadingGapMs");
            c.reading_gap = gap.micros() / 1000;
            if (c.reading_gap <= 0) throw ConfigError("sim.interReadingGapMs: must be positive");
        }
        if (sim["replayJitter"]) {
            c.replay_jitter = decimal(sim["replayJitter"], "sim.replayJitter").to_double();
            if (c.replay_jitter < 0 || c.replay_jitter >= 1) throw ConfigError("sim.replayJitter: must be in [0, 1)");
        }
        if (sim["replayOrder"]) {
            const auto order = scalar<std::string>(sim["replayOrder"], "sim.replayOrder");
            if (order == "interleaved") {
                c.replay_order = ReplayOrder::Interleaved;
            } else if (order == "sequential") {
                c.replay_order = ReplayOrder::Sequential;
            } else {
                throw ConfigError("sim.replayOrder: expected interleaved or sequential");
            }
        }
    }
    c.sim.seed = c.seed;

    only_keys(root["sweep"], "sweep", {"numNodes"});
    const YAML::Node nodes = root["sweep"]["numNodes"];
    if (nodes) {
        if (nodes.IsScalar()) {
            c.sweep_nodes.push_back(scalar<int>(nodes, "sweep.numNodes"));
        } else if (nodes.IsSequence()) {
            for (const auto& n : nodes) c.sweep_nodes.push_back(scalar<int>(n, "sweep.numNodes"));
        } else {
            throw ConfigError("sweep.numNodes: expected a list of integers");
        }
    }
    for (int n : c.sweep_nodes) {
        if (n < 1) throw ConfigError("sweep.numNodes: node counts must be at least 1");
    }

    only_keys(root["output"], "output", {"dir"});
    c.output_dir = root["output"]["dir"] ? scalar<std::string>(root["output"]["dir"], "output.dir") : "out";
    return c;
}

ReplaySchedule build_replay(const HarnessConfig& c, const SchemaModule& schema, std::vector<LoadReport>* reports) {
    if (c.replay_order == ReplayOrder::Sequential) {
        return schedule(constitute(c.sources, schema, c.seed, reports), c.reading_gap, c.seed, c.replay_jitter);
    }
    return schedule_interleaved(constitute_sources(c.sources, schema, c.seed, reports), c.reading_gap, c.seed,
                                c.replay_jitter);
}

int cmd_compile(const std::string& schema_file, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        out << print_schema(load_schema_file(schema_file));
        return kOk;
    });
}

int cmd_validate(const std::string& schema_file, const std::string& data_file, std::ostream& out,
                 std::ostream& err) {
    return guarded(err, [&] {
        auto schema = std::make_shared<const SchemaModule>(load_schema_file(schema_file));
        const DataTree tree = load_instance_file(schema, data_file);
        const ValidationReport report = validate(tree);
        for (const auto& v : report.violations) {
            err << to_string(v.kind) << ' ' << v.locator << ": " << v.message << '\n';
        }
        if (!report.ok()) return kParseError;
        out << "ok: " << tree.leaf_count() << " leaves\n";
        return kOk;
    });
}

int cmd_query(const std::string& schema_file, const std::string& data_file, const std::string& path,
              std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto schema = std::make_shared<const SchemaModule>(load_schema_file(schema_file));
        const DataTree tree = load_instance_file(schema, data_file);
        const ValidationReport report = validate(tree);
        if (!report.ok()) {
            err << data_file << ": " << report.violations.size() << " violation(s), first: "
                << report.violations.front().locator << ": " << report.violations.front().message << '\n';
            return kParseError;
        }
        for (const auto& leaf : evaluate(tree, bind_path(parse_path(path), schema))) {
            out << leaf.to_string() << " = " << render_leaf(*tree.find(leaf)) << '\n';
        }
        return kOk;
    });
}

int cmd_ingest(const std::string& config_file, const Overrides& overrides, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Experiment e = prepare(config_file, overrides);
        if (e.cfg.sources.empty()) throw ConfigError("ingest.sources: no sources configured");
        std::vector<LoadReport> reports;
        const ReplaySchedule s = build_replay(e.cfg, *e.schema, &reports);
        const fs::path dir(e.cfg.output_dir);
        fs::create_directories(dir);
        write_out(dir, "replay.csv", replay_csv(s));
        std::string report = "source,rows,retained,skipped,used\n";
        for (const auto& r : reports) {
            report += fmt::format("\"{}\",{},{},{},{}\n", r.source, r.rows, r.retained, r.skipped, r.used);
        }
        write_out(dir, "ingest_report.csv", report);
        out << fmt::format("{} readings over {} ms -> {}\n", s.events.size(), format_ms(s.horizon),
                           (dir / "replay.csv").string());
        return kOk;
    });
}

int cmd_simulate(const std::string& config_file, const Overrides& overrides, std::ostream& out,
                 std::ostream& err) {
    return guarded(err, [&] {
        const Experiment e = prepare(config_file, overrides);
        if (e.cfg.sources.empty()) throw ConfigError("ingest.sources: no sources configured");
        if (e.cfg.sweep_nodes.empty()) throw ConfigError("sweep.numNodes: empty sweep");
        auto sched = std::make_shared<const ReplaySchedule>(build_replay(e.cfg, *e.schema));

        std::vector<Comparison> cells;
        for (int n : e.cfg.sweep_nodes) {
            SimConfig with = e.cfg.sim;
            with.num_nodes = n;
            with.schema = e.schema;
            with.selection = e.selection;
            with.schedule = sched;
            with.mode = Mode::WithYada;
            SimConfig without = with;
            without.mode = Mode::WithoutYada;
            cells.push_back(compare(with, without));
        }

        std::vector<ComparisonRow> rows;
        std::string metrics;
        std::string rtt = "series,poll,rtt_ms\n";
        std::string e2e = "series,e2e_ms,cdf\n";
        std::string sync = "series,t_ms,score\n";
        std::string summary;
        const fs::path dir(e.cfg.output_dir);
        fs::create_directories(dir / "events");
        for (const auto& c : cells) {
            rows.push_back(c.row);
            for (const RunResult* r : {&c.with, &c.without}) {
                const MetricsRecord& m = r->metrics;
                const std::string series = series_name(m);
                metrics += metrics_csv(m, metrics.empty());
                for (std::size_t i = 0; i < m.rtt.size(); ++i) rtt += fmt::format("{},{},{}\n", series, i, format_ms(m.rtt[i]));
                std::vector<Timestamp> sorted = m.e2e;
                std::sort(sorted.begin(), sorted.end());
                for (std::size_t i = 0; i < sorted.size(); ++i) {
                    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
                    e2e += fmt::format("{},{},{:.6f}\n", series, format_ms(sorted[i]),
                                       static_cast<double>(i + 1) / static_cast<double>(sorted.size()));
                }
                for (const auto& s : m.sync) sync += fmt::format("{},{},{:.6f}\n", series, format_ms(s.t), s.score);
                summary += fmt::format(
                    "num_nodes={} mode={} mean_rtt_ms={:.3f} mean_e2e_ms={:.3f} mean_payload_bytes={:.1f} "
                    "final_sync={:.4f} applied={} dropped={} scheduled={}\n",
                    m.num_nodes, to_string(m.mode), m.mean_rtt_ms(), m.mean_e2e_ms(), m.mean_payload_bytes(),
                    m.final_sync(), m.applied, m.dropped, m.scheduled);
                write_out(dir / "events", fmt::format("{}-{}.csv", to_string(m.mode), m.num_nodes), event_log_csv(r->log));
            }
        }
        write_out(dir, "comparison.csv", comparison_csv(rows));
        write_out(dir, "metrics.csv", metrics);
        write_out(dir, "rtt.csv", rtt);
        write_out(dir, "e2e.csv", e2e);
        write_out(dir, "sync.csv", sync);
        write_out(dir, "summary.txt", summary);
        out << comparison_csv(rows);
        return kOk;
    });
}

int cmd_report(const std::string& config_file, const Overrides& overrides, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const HarnessConfig cfg = load_config(config_file, overrides);
        const fs::path file = fs::path(cfg.output_dir) / "comparison.csv";
        if (!fs::exists(file)) throw ConfigError("no results in " + cfg.output_dir + "; run simulate first");
        std::istringstream in(read_file(file.string()));
        std::string line;
        std::getline(in, line);
        out << fmt::format("{:>5} | {:>17} | {:>17} | {:>17} | {:>17}\n", "nodes", "sync with/without",
                           "rtt ms", "e2e ms", "payload bytes");
        while (std::getline(in, line)) {
            const auto f = split(line, ',');
            if (f.size() != 9) throw ConfigError(file.string() + ": unexpected column count");
            out << fmt::format("{:>5} | {:>8}/{:<8} | {:>8}/{:<8} | {:>8}/{:<8} | {:>8}/{:<8}\n", f[0], f[1], f[2],
                               f[3], f[4], f[5], f[6], f[7], f[8]);
        }
        return kOk;
    });
}

}  // namespace yada
