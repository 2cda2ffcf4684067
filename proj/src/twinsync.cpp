#include "yada/twinsync.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <queue>
#include <random>
#include <set>

#include <fmt/format.h>

namespace yada {

namespace {

// Decimal milliseconds -> integer microseconds, rounded half up.
Timestamp to_us(Decimal ms) { return (ms.micros() + 500) / 1000; }

// Cost of `count` units at `ms_each`, in microseconds.
Timestamp cost_us(Decimal ms_each, std::size_t count) {
    const std::int64_t ns = ms_each.micros() * static_cast<std::int64_t>(count);
    return (ns + 500) / 1000;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (std::uint64_t{words[0]} << 32) | words[1];
}

class Jitter {
public:
    Jitter(std::uint64_t seed, Timestamp max_us) : rng_(seed), dist_(0, std::max<Timestamp>(max_us, 0)) {}
    Timestamp operator()() { return dist_(rng_); }

private:
    std::mt19937_64 rng_;
    std::uniform_int_distribution<Timestamp> dist_;
};

enum class EventKind { Emit, GatewayArrive, FlushTimer, TwinArrive, PollAtTwin, PollResponse };

struct Event {
    Timestamp t;
    std::uint64_t seq;
    EventKind kind;
    std::size_t index;  // reading, batch or poll id depending on kind

    bool operator>(const Event& o) const { return t != o.t ? t > o.t : seq > o.seq; }
};

struct Batch {
    std::vector<std::size_t> readings;
    std::size_t bytes = 0;
};

struct Poll {
    Timestamp issued = 0;
    Timestamp rtt = 0;
    std::size_t bytes = 0;
    DataTree snapshot;
};

std::size_t message_bytes(const std::string& node, const SensorReading& r) {
    return fmt::formatted_size(R"({{"node":"{}","path":"{}","value":{},"ts":{}}})", node,
                               r.path.to_string(), r.value.to_string(), r.ts);
}

}  // namespace

TwinError::TwinError(Kind kind, std::string message)
    : std::runtime_error(std::move(message)), kind_(kind) {}

const TwinEntity* TwinGraph::find(const std::string& id) const {
    for (const auto& e : entities) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

void TwinGraph::check() const {
    std::set<std::string> ids;
    for (const auto& e : entities) {
        if (!ids.insert(e.id).second) {
            throw TwinError(TwinError::Kind::InvalidGraph, "duplicate twin id '" + e.id + "'");
        }
    }
    for (const auto& e : entities) {
        for (const auto& [target, label] : e.relationships) {
            if (!ids.count(target)) {
                throw TwinError(TwinError::Kind::InvalidGraph,
                                e.id + " -" + label + "-> unknown twin '" + target + "'");
            }
        }
    }
}

Topology build_topology(const SchemaModule& schema, int num_nodes, std::uint64_t seed) {
    if (num_nodes < 1) throw TwinError(TwinError::Kind::ConfigInvalid, "need at least one node");
    std::vector<LeafPath> leaves;
    for (const auto& names : leaf_name_paths(schema)) {
        std::vector<PathSegment> segs;
        for (const auto& n : names) segs.push_back({n, std::nullopt});
        leaves.emplace_back(std::move(segs));
    }
    if (leaves.empty()) throw TwinError(TwinError::Kind::NoLeaves, "schema '" + schema.name + "' has no leaves");

    std::mt19937_64 rng(seed);
    std::shuffle(leaves.begin(), leaves.end(), rng);

    Topology topo;
    topo.nodes.resize(static_cast<std::size_t>(num_nodes));
    for (int i = 0; i < num_nodes; ++i) topo.nodes[static_cast<std::size_t>(i)].id = fmt::format("node-{}", i + 1);
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        topo.nodes[i % topo.nodes.size()].bound_leaves.push_back(leaves[i]);
    }
    for (auto& n : topo.nodes) std::sort(n.bound_leaves.begin(), n.bound_leaves.end());

    for (const auto& n : topo.nodes) {
        TwinEntity e;
        e.id = n.id;
        e.properties.emplace("boundLeaves", Value(Decimal::from_micros(
                                                static_cast<std::int64_t>(n.bound_leaves.size()) * Decimal::kScale)));
        for (const auto& l : n.bound_leaves) e.telemetry.push_back(l.to_string());
        e.relationships.emplace_back("gateway", "feeds");
        e.components.push_back(schema.name);
        topo.graph.entities.push_back(std::move(e));
    }
    TwinEntity gw;
    gw.id = "gateway";
    gw.properties.emplace("nodes", Value(Decimal::from_micros(num_nodes * Decimal::kScale)));
    topo.graph.entities.push_back(std::move(gw));
    topo.graph.check();
    return topo;
}

std::string_view to_string(Mode mode) { return mode == Mode::WithYada ? "with-yada" : "without-yada"; }

void SimConfig::check() const {
    auto bad = [](const std::string& why) { throw TwinError(TwinError::Kind::ConfigInvalid, why); };
    if (num_nodes < 1) bad("numNodes must be at least 1");
    if (!schema) bad("no schema");
    if (!schedule || schedule->events.empty()) bad("empty replay schedule");
    if (gateway_batch_size < 1) bad("gatewayBatchSize must be at least 1");
    if (gateway_flush_ms <= 0 || monitor_poll_ms <= 0) bad("poll and flush intervals must be positive");
    if (staleness_window_ms < 0) bad("stalenessWindowMs must be non-negative");
    const Decimal zero;
    if (processing_cost_per_leaf_ms < zero || network.base_latency_ms < zero || network.jitter_ms < zero ||
        network.per_byte_ms < zero) {
        bad("network and processing costs must be non-negative");
    }
    try {
        bind_all(selection, schema);
    } catch (const BindError& e) {
        bad(std::string("selection: ") + e.what());
    }
}

double sync_score(std::span<const PhysicalNode> physical, const DataTree& twin,
                  std::span<const BoundPath> selection, Timestamp window, Timestamp now) {
    std::size_t total = 0;
    std::size_t good = 0;
    for (const auto& node : physical) {
        for (const auto& [path, state] : node.local_state) {
            const bool selected =
                std::any_of(selection.begin(), selection.end(), [&](const BoundPath& b) { return b.matches(path); });
            if (!selected) continue;
            ++total;
            const DataNode* leaf = twin.find(path);
            if (leaf && leaf->value == state.value && leaf->last_updated >= now - window) ++good;
        }
    }
    return total == 0 ? 1.0 : static_cast<double>(good) / static_cast<double>(total);
}

double MetricsRecord::mean_rtt_ms() const {
    if (rtt.empty()) return 0;
    return static_cast<double>(std::accumulate(rtt.begin(), rtt.end(), Timestamp{0})) / 1000.0 /
           static_cast<double>(rtt.size());
}

double MetricsRecord::mean_payload_bytes() const {
    if (payload_bytes.empty()) return 0;
    return static_cast<double>(std::accumulate(payload_bytes.begin(), payload_bytes.end(), std::size_t{0})) /
           static_cast<double>(payload_bytes.size());
}

double MetricsRecord::mean_e2e_ms() const {
    if (e2e.empty()) return 0;
    return static_cast<double>(std::accumulate(e2e.begin(), e2e.end(), Timestamp{0})) / 1000.0 /
           static_cast<double>(e2e.size());
}

double MetricsRecord::final_sync() const {
    if (sync.empty()) return 1.0;
    double sum = 0;
    for (const auto& s : sync) sum += s.score;
    return sum / static_cast<double>(sync.size());
}

RunResult run(const SimConfig& cfg) {
    cfg.check();
    const ReplaySchedule& sched = *cfg.schedule;
    const auto bound = bind_all(cfg.selection, cfg.schema);
    Topology topo = build_topology(*cfg.schema, cfg.num_nodes, stream_seed(cfg.seed, 0, 0));

    std::map<LeafPath, std::size_t> owner;
    for (std::size_t n = 0; n < topo.nodes.size(); ++n) {
        for (const auto& l : topo.nodes[n].bound_leaves) owner.emplace(l, n);
    }
    std::vector<std::size_t> reading_node(sched.events.size());
    for (std::size_t i = 0; i < sched.events.size(); ++i) {
        auto it = owner.find(sched.events[i].path.schema_path());
        if (it == owner.end()) {
            throw TwinError(TwinError::Kind::ConfigInvalid,
                            "reading for unbound leaf " + sched.events[i].path.to_string());
        }
        reading_node[i] = it->second;
    }

    const Timestamp base = to_us(cfg.network.base_latency_ms);
    const Timestamp jitter_max = to_us(cfg.network.jitter_ms);
    std::vector<Jitter> uplink;
    for (std::size_t n = 0; n < topo.nodes.size(); ++n) uplink.emplace_back(stream_seed(cfg.seed, 1, n), jitter_max);
    Jitter downlink(stream_seed(cfg.seed, 2, 0), jitter_max);
    Jitter monitor(stream_seed(cfg.seed, 3, 0), jitter_max);

    RunResult out;
    MetricsRecord& m = out.metrics;
    m.mode = cfg.mode;
    m.num_nodes = cfg.num_nodes;
    m.scheduled = sched.events.size();
    auto log = [&](Timestamp t, const char* kind, const std::string& node, std::string path, std::size_t bytes) {
        out.log.push_back({t, kind, node, std::move(path), bytes});
    };

    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
    std::uint64_t seq = 0;
    auto push = [&](Timestamp t, EventKind k, std::size_t index) { queue.push({t, seq++, k, index}); };

    for (std::size_t i = 0; i < sched.events.size(); ++i) push(sched.events[i].ts, EventKind::Emit, i);
    const Timestamp poll_every = Timestamp{cfg.monitor_poll_ms} * 1000;
    std::vector<Poll> polls;
    for (Timestamp t = poll_every; t <= sched.horizon; t += poll_every) {
        polls.push_back({t, 0, 0, DataTree(cfg.schema)});
        push(t + base + monitor(), EventKind::PollAtTwin, polls.size() - 1);
    }

    std::vector<std::size_t> message_size(sched.events.size());
    std::vector<Timestamp> link_free(topo.nodes.size(), 0);  // per-node FIFO uplink
    std::vector<Batch> batches;
    Batch open;
    std::size_t open_generation = 0;
    std::deque<std::size_t> twin_inbox;
    Timestamp twin_busy_until = 0;
    bool drain_scheduled = false;
    DataTree twin(cfg.schema);
    const Timestamp window = Timestamp{cfg.staleness_window_ms} * 1000;

    auto flush = [&](Timestamp t) {
        if (open.readings.empty()) return;
        batches.push_back(std::move(open));
        open = Batch{};
        ++open_generation;
        const Batch& b = batches.back();
        log(t, "flush", "gateway", "", b.bytes);
        push(t + base + downlink() + cost_us(cfg.network.per_byte_ms, b.bytes), EventKind::TwinArrive,
             batches.size() - 1);
    };

    auto apply_batch = [&](Timestamp t, const Batch& b) {
        for (std::size_t i : b.readings) {
            const SensorReading& r = sched.events[i];
            const std::string& node = topo.nodes[reading_node[i]].id;
            if (twin.apply_update(r.path, r.value, r.ts) == UpdateOutcome::Applied) {
                ++m.applied;
                m.e2e.push_back(t - r.ts);
                log(t, "apply", node, r.path.to_string(), message_size[i]);
            } else {
                ++m.dropped;
                log(t, "drop", node, r.path.to_string(), message_size[i]);
            }
        }
    };

    // Batches wait while the twin is serving a poll.
    auto drain = [&](Timestamp t) {
        if (t < twin_busy_until) {
            if (!drain_scheduled) {
                drain_scheduled = true;
                push(twin_busy_until, EventKind::TwinArrive, SIZE_MAX);
            }
            return;
        }
        while (!twin_inbox.empty()) {
            apply_batch(t, batches[twin_inbox.front()]);
            twin_inbox.pop_front();
        }
    };

    while (!queue.empty()) {
        const Event ev = queue.top();
        queue.pop();
        switch (ev.kind) {
            case EventKind::Emit: {
                const SensorReading& r = sched.events[ev.index];
                const std::size_t n = reading_node[ev.index];
                PhysicalNode& node = topo.nodes[n];
                auto& st = node.local_state[r.path];
                if (r.ts >= st.ts) st = {r.value, r.ts};
                message_size[ev.index] = message_bytes(node.id, r);
                const Timestamp sent = ev.t + base + uplink[n]() + cost_us(cfg.network.per_byte_ms, message_size[ev.index]);
                link_free[n] = std::max(link_free[n], sent);
                log(ev.t, "emit", node.id, r.path.to_string(), message_size[ev.index]);
                push(link_free[n], EventKind::GatewayArrive, ev.index);
                break;
            }
            case EventKind::GatewayArrive: {
                if (open.readings.empty()) push(ev.t + Timestamp{cfg.gateway_flush_ms} * 1000, EventKind::FlushTimer, open_generation);
                open.readings.push_back(ev.index);
                open.bytes += message_size[ev.index];
                if (open.readings.size() >= static_cast<std::size_t>(cfg.gateway_batch_size)) flush(ev.t);
                break;
            }
            case EventKind::FlushTimer:
                if (ev.index == open_generation) flush(ev.t);
                break;
            case EventKind::TwinArrive:
                if (ev.index == SIZE_MAX) {
                    drain_scheduled = false;
                } else {
                    twin_inbox.push_back(ev.index);
                }
                drain(ev.t);
                break;
            case EventKind::PollAtTwin: {
                Poll& p = polls[ev.index];
                const bool filtered = cfg.mode == Mode::WithYada;
                p.snapshot = filtered ? project(twin, bound) : twin;
                p.bytes = serialize(p.snapshot).size();
                const std::size_t leaves = p.snapshot.leaf_count();
                const Timestamp one_way = ev.t - p.issued;
                const Timestamp processing = cost_us(cfg.processing_cost_per_leaf_ms, leaves);
                p.rtt = 2 * one_way + cost_us(cfg.network.per_byte_ms, p.bytes) + processing;
                twin_busy_until = std::max(twin_busy_until, ev.t) + processing;
                log(ev.t, "poll", "monitor", "", p.bytes);
                push(p.issued + p.rtt, EventKind::PollResponse, ev.index);
                break;
            }
            case EventKind::PollResponse: {
                Poll& p = polls[ev.index];
                m.rtt.push_back(p.rtt);
                m.payload_bytes.push_back(p.bytes);
                m.sync.push_back({ev.t, sync_score(topo.nodes, p.snapshot, bound, window, ev.t)});
                log(ev.t, "response", "monitor", "", p.bytes);
                p.snapshot = DataTree(cfg.schema);
                break;
            }
        }
    }
    return out;
}

namespace {

bool same_except_mode(const SimConfig& a, const SimConfig& b) {
    const bool same_schedule = a.schedule == b.schedule ||
                               (a.schedule && b.schedule && a.schedule->events == b.schedule->events &&
                                a.schedule->horizon == b.schedule->horizon);
    const bool same_schema = a.schema == b.schema || (a.schema && b.schema && *a.schema == *b.schema);
    return a.num_nodes == b.num_nodes && same_schema && a.selection.exprs == b.selection.exprs &&
           same_schedule && a.gateway_batch_size == b.gateway_batch_size &&
           a.gateway_flush_ms == b.gateway_flush_ms && a.monitor_poll_ms == b.monitor_poll_ms &&
           a.staleness_window_ms == b.staleness_window_ms &&
           a.processing_cost_per_leaf_ms == b.processing_cost_per_leaf_ms && a.network == b.network &&
           a.seed == b.seed;
}

}  // namespace

Comparison compare(const SimConfig& with, const SimConfig& without) {
    if (with.mode != Mode::WithYada || without.mode != Mode::WithoutYada) {
        throw TwinError(TwinError::Kind::ConfigMismatch, "compare expects a with-yada and a without-yada config");
    }
    if (!same_except_mode(with, without)) {
        throw TwinError(TwinError::Kind::ConfigMismatch, "configs differ in more than the mode");
    }
    Comparison c{{}, run(with), run(without)};
    const auto& a = c.with.metrics;
    const auto& b = c.without.metrics;
    c.row = {with.num_nodes,     a.final_sync(),         b.final_sync(),        a.mean_rtt_ms(),
             b.mean_rtt_ms(),    a.mean_e2e_ms(),        b.mean_e2e_ms(),       a.mean_payload_bytes(),
             b.mean_payload_bytes()};
    return c;
}

std::string format_ms(Timestamp us) { return Decimal::from_micros(us * 1000).to_string(); }

std::string metrics_csv(const MetricsRecord& m, bool header) {
    std::string out = header ? "metric,mode,num_nodes,value\n" : "";
    const auto mode = to_string(m.mode);
    auto row = [&](std::string_view metric, const std::string& value) {
        out += fmt::format("{},{},{},{}\n", metric, mode, m.num_nodes, value);
    };
    for (Timestamp r : m.rtt) row("rtt_ms", format_ms(r));
    for (std::size_t b : m.payload_bytes) row("payload_bytes", std::to_string(b));
    for (Timestamp e : m.e2e) row("e2e_ms", format_ms(e));
    for (const auto& s : m.sync) row("sync", fmt::format("{}:{:.6f}", format_ms(s.t), s.score));
    row("scheduled", std::to_string(m.scheduled));
    row("applied", std::to_string(m.applied));
    row("dropped", std::to_string(m.dropped));
    row("mean_rtt_ms", fmt::format("{:.6f}", m.mean_rtt_ms()));
    row("mean_payload_bytes", fmt::format("{:.6f}", m.mean_payload_bytes()));
    row("mean_e2e_ms", fmt::format("{:.6f}", m.mean_e2e_ms()));
    row("final_sync", fmt::format("{:.6f}", m.final_sync()));
    return out;
}

std::string event_log_csv(const EventLog& log) {
    std::string out = "ts_us,kind,node,path,bytes\n";
    for (const auto& e : log) {
        out += fmt::format("{},{},{},{},{}\n", e.ts, e.kind, e.node,
                           e.path.empty() ? std::string() : "\"" + e.path + "\"", e.bytes);
    }
    return out;
}

std::string comparison_csv(std::span<const ComparisonRow> rows) {
    std::string out =
        "num_nodes,sync_with_yada,sync_without_yada,rtt_with_ms,rtt_without_ms,e2e_with_ms,e2e_without_ms,"
        "payload_with_bytes,payload_without_bytes\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{:.4f},{:.4f},{:.3f},{:.3f},{:.3f},{:.3f},{:.1f},{:.1f}\n", r.num_nodes, r.sync_with,
                           r.sync_without, r.rtt_with_ms, r.rtt_without_ms, r.e2e_with_ms, r.e2e_without_ms,
                           r.payload_with, r.payload_without);
    }
    return out;
}

}  // namespace yada
