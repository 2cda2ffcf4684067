#include "yada/ingest.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <random>

#include <boost/tokenizer.hpp>
#include <fmt/format.h>

#include "yada/io.hpp"
#include "yada/path_syntax.hpp"

namespace yada {

namespace {

using Row = std::vector<std::string>;
__extension__ using Wide = __int128;

Row split_csv(std::string_view line) {
    using Sep = boost::escaped_list_separator<char>;
    const std::string owned(line);
    boost::tokenizer<Sep> tok(owned, Sep('\\', ',', '"'));
    Row out;
    try {
        for (const auto& cell : tok) out.push_back(cell);
    } catch (const boost::escaped_list_error&) {
        return {};  // malformed quoting: treated as a row with no cells
    }
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// Placeholder names in `{...}` inside a target template.
std::vector<std::string> placeholders(std::string_view target) {
    std::vector<std::string> out;
    for (std::size_t i = target.find('{'); i != std::string_view::npos; i = target.find('{', i + 1)) {
        const auto close = target.find('}', i);
        if (close == std::string_view::npos) break;
        out.emplace_back(target.substr(i + 1, close - i - 1));
    }
    return out;
}

std::optional<Value> parse_cell(const ColumnRule& rule, const std::string& raw) {
    const auto& scale = rule.scale;
    switch (rule.kind) {
        case ValueKind::Num: {
            std::optional<Decimal> d;
            if (rule.codes.empty()) {
                d = Decimal::parse_lenient(raw);
            } else if (auto it = rule.codes.find(trim(raw)); it != rule.codes.end()) {
                d = it->second;
            }
            if (!d) return std::nullopt;
            if (scale) {
                const Wide p = static_cast<Wide>(d->micros()) * scale->micros();
                const Wide half = p >= 0 ? Decimal::kScale / 2 : -Decimal::kScale / 2;
                d = Decimal::from_micros(static_cast<std::int64_t>((p + half) / Decimal::kScale));
            }
            return Value(*d);
        }
        case ValueKind::Str: {
            std::string s = trim(raw);
            if (s.empty() || s.size() > kMaxStringBytes) return std::nullopt;
            return Value(std::move(s));
        }
        case ValueKind::Bool: {
            std::string s = trim(raw);
            std::transform(s.begin(), s.end(), s.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (s == "true" || s == "1") return Value(true);
            if (s == "false" || s == "0") return Value(false);
            return std::nullopt;
        }
    }
    return std::nullopt;
}

// Cell text substituted into key predicates: numbers in canonical form.
std::string key_text(const std::string& raw) {
    if (auto d = Decimal::parse_lenient(raw)) return d->to_string();
    return trim(raw);
}

struct CompiledRule {
    const ColumnRule* rule;
    std::size_t column;
    std::vector<std::pair<std::string, std::size_t>> slots;  // placeholder -> column
};

}  // namespace

IngestError::IngestError(Kind kind, std::string message)
    : std::runtime_error(std::move(message)), kind_(kind) {}

void DatasetSpec::check() const {
    if (feature_count < 1) {
        throw IngestError(IngestError::Kind::BadSpec, name + ": feature count must be at least 1");
    }
    if (used_samples == 0 || used_samples > total_samples) {
        throw IngestError(IngestError::Kind::BadSpec,
                          fmt::format("{}: used samples {} outside (0, {}]", name, used_samples,
                                      total_samples));
    }
}

void ColumnMapping::check(const SchemaModule& schema) const {
    if (columns.empty()) throw IngestError(IngestError::Kind::BadMapping, "mapping has no columns");
    for (const auto& rule : columns) {
        auto fail = [&](const std::string& why) {
            throw IngestError(IngestError::Kind::BadMapping,
                              fmt::format("column {} -> {}: {}", rule.csv_column, rule.target, why));
        };
        std::string probe = rule.target;
        for (const auto& ph : placeholders(rule.target)) {
            const std::string from = "{" + ph + "}";
            probe.replace(probe.find(from), from.size(), "x");
        }
        std::vector<RawSegment> segs;
        try {
            segs = lex_path(probe);
        } catch (const PathSyntaxError& e) {
            fail(e.what());
        }
        const std::vector<SchemaNode>* level = &schema.roots;
        const SchemaNode* sn = nullptr;
        for (const auto& seg : segs) {
            if (!level || seg.name == "*") fail("not a concrete leaf path");
            sn = nullptr;
            for (const auto& c : *level) {
                if (c.name == seg.name) sn = &c;
            }
            if (!sn) fail("no schema node '" + seg.name + "'");
            if ((sn->kind == NodeKind::List) != seg.key_literal.has_value()) {
                fail("list segments need a key predicate and only lists take one");
            }
            level = sn->is_leafy() ? nullptr : &sn->children;
        }
        if (!sn || !sn->is_leafy()) fail("does not end at a leaf");
        if (!rule.codes.empty() && rule.kind != ValueKind::Num) fail("codes need a numeric leaf");
        if (sn->leaf_type()->value_kind != rule.kind) {
            fail(fmt::format("leaf holds {} values, rule says {}", to_string(sn->leaf_type()->value_kind),
                             to_string(rule.kind)));
        }
    }
}

LoadedSource parse_csv(std::string_view text, const ColumnMapping& mapping, const DatasetSpec& spec,
                       const SchemaModule& schema) {
    mapping.check(schema);

    std::vector<std::string_view> lines;
    for (std::size_t start = 0; start < text.size();) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.size() < 2) {
        throw IngestError(IngestError::Kind::EmptyFile, spec.name + ": no data rows");
    }

    std::map<std::string, std::size_t> header;
    {
        const Row names = split_csv(lines[0]);
        for (std::size_t i = 0; i < names.size(); ++i) header.emplace(trim(names[i]), i);
    }
    auto column = [&](const std::string& name) {
        auto it = header.find(name);
        if (it == header.end()) {
            throw IngestError(IngestError::Kind::MissingColumn,
                              spec.name + ": missing column '" + name + "'");
        }
        return it->second;
    };

    std::vector<CompiledRule> rules;
    for (const auto& r : mapping.columns) {
        CompiledRule c{&r, column(r.csv_column), {}};
        for (const auto& ph : placeholders(r.target)) c.slots.emplace_back(ph, column(ph));
        rules.push_back(std::move(c));
    }
    const std::optional<std::size_t> sensor_col =
        mapping.sensor_column.empty() ? std::nullopt : std::optional(column(mapping.sensor_column));

    LoadedSource out;
    out.report.source = spec.name;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::size_t row = li - 1;
        ++out.report.rows;
        const Row cells = split_csv(lines[li]);
        auto cell = [&](std::size_t i) -> const std::string* {
            return i < cells.size() ? &cells[i] : nullptr;
        };

        std::vector<const CompiledRule*> active;
        if (mapping.emit == EmitMode::Rotate) {
            active.push_back(&rules[row % rules.size()]);
        } else {
            for (const auto& r : rules) active.push_back(&r);
        }

        std::vector<SensorReading> got;
        bool ok = true;
        for (const CompiledRule* r : active) {
            const std::string* raw = cell(r->column);
            auto v = raw ? parse_cell(*r->rule, *raw) : std::nullopt;
            if (!v) {
                ok = false;
                break;
            }
            std::string target = r->rule->target;
            for (const auto& [ph, col] : r->slots) {
                const std::string* k = cell(col);
                const std::string from = "{" + ph + "}";
                const std::string to = k ? key_text(*k) : std::string();
                if (to.empty() || to.find('\'') != std::string::npos) {
                    ok = false;
                    break;
                }
                target.replace(target.find(from), from.size(), to);
            }
            if (!ok) break;
            SensorReading rd;
            try {
                rd.path = LeafPath::parse(schema, target);
            } catch (const DataError&) {
                ok = false;
                break;
            }
            rd.sensor_id = spec.name;
            if (sensor_col) {
                if (const std::string* s = cell(*sensor_col)) rd.sensor_id += "/" + trim(*s);
            }
            rd.value = std::move(*v);
            rd.row = row;
            got.push_back(std::move(rd));
        }
        if (!ok) {
            ++out.report.skipped;
            continue;
        }
        ++out.report.retained;
        for (auto& r : got) out.readings.push_back(std::move(r));
    }
    return out;
}

LoadedSource load_csv(const std::string& file, const ColumnMapping& mapping, const DatasetSpec& spec,
                      const SchemaModule& schema) {
    return parse_csv(read_file(file), mapping, spec, schema);
}

std::vector<std::size_t> sample_rows(std::size_t available, std::size_t wanted, std::uint64_t seed) {
    std::vector<std::size_t> all(available);
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (wanted >= available) return all;
    std::vector<std::size_t> out;
    out.reserve(wanted);
    std::mt19937_64 rng(seed);
    std::sample(all.begin(), all.end(), std::back_inserter(out), wanted, rng);
    return out;
}

std::vector<std::vector<SensorReading>> constitute_sources(std::span<const Source> sources,
                                                           const SchemaModule& schema, std::uint64_t seed,
                                                           std::vector<LoadReport>* reports) {
    std::vector<std::vector<SensorReading>> all;
    for (std::size_t si = 0; si < sources.size(); ++si) {
        const Source& src = sources[si];
        src.spec.check();
        LoadedSource loaded = load_csv(src.file, src.mapping, src.spec, schema);
        if (src.spec.used_samples > loaded.report.retained) {
            throw IngestError(IngestError::Kind::InsufficientRows,
                              fmt::format("{}: {} samples requested, {} rows loaded", src.spec.name,
                                          src.spec.used_samples, loaded.report.retained));
        }
        // Retained rows in file order; readings of one row are contiguous.
        std::vector<std::size_t> row_start;
        for (std::size_t i = 0; i < loaded.readings.size(); ++i) {
            if (i == 0 || loaded.readings[i].row != loaded.readings[i - 1].row) row_start.push_back(i);
        }
        row_start.push_back(loaded.readings.size());

        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(si)};
        std::uint64_t source_seed = 0;
        {
            std::array<std::uint32_t, 2> words{};
            seq.generate(words.begin(), words.end());
            source_seed = (std::uint64_t{words[0]} << 32) | words[1];
        }
        std::vector<SensorReading> out;
        for (std::size_t r : sample_rows(row_start.size() - 1, src.spec.used_samples, source_seed)) {
            for (std::size_t i = row_start[r]; i < row_start[r + 1]; ++i) out.push_back(loaded.readings[i]);
        }
        all.push_back(std::move(out));
        loaded.report.used = src.spec.used_samples;
        if (reports) reports->push_back(loaded.report);
    }
    return all;
}

std::vector<SensorReading> constitute(std::span<const Source> sources, const SchemaModule& schema,
                                      std::uint64_t seed, std::vector<LoadReport>* reports) {
    std::vector<SensorReading> out;
    for (auto& part : constitute_sources(sources, schema, seed, reports)) {
        std::move(part.begin(), part.end(), std::back_inserter(out));
    }
    return out;
}

ReplaySchedule schedule(std::vector<SensorReading> readings, Timestamp gap, std::uint64_t seed,
                        double jitter_fraction) {
    if (gap <= 0) throw std::invalid_argument("schedule gap must be positive");
    std::mt19937_64 rng(seed);
    const auto max_jitter = static_cast<Timestamp>(static_cast<double>(gap) * jitter_fraction);
    std::uniform_int_distribution<Timestamp> jitter(0, std::max<Timestamp>(max_jitter, 0));
    for (std::size_t i = 0; i < readings.size(); ++i) {
        readings[i].ts = static_cast<Timestamp>(i) * gap + (max_jitter > 0 ? jitter(rng) : 0);
    }
    std::stable_sort(readings.begin(), readings.end(),
                     [](const SensorReading& a, const SensorReading& b) { return a.ts < b.ts; });
    ReplaySchedule s;
    s.horizon = readings.empty() ? 0 : readings.back().ts;
    s.events = std::move(readings);
    return s;
}

ReplaySchedule schedule_interleaved(const std::vector<std::vector<SensorReading>>& per_source, Timestamp gap,
                                    std::uint64_t seed, double jitter_fraction) {
    if (gap <= 0) throw std::invalid_argument("schedule gap must be positive");
    std::size_t total = 0;
    for (const auto& part : per_source) total += part.size();

    struct Slot {
        Timestamp ts;
        std::size_t source;
        std::size_t index;
    };
    std::vector<Slot> slots;
    slots.reserve(total);
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < per_source.size(); ++s) {
        const std::size_t n = per_source[s].size();
        if (n == 0) continue;
        // Integer arithmetic keeps the spacing exact: ts_i = i * gap * N / n.
        const Timestamp span = gap * static_cast<Timestamp>(total);
        const auto max_jitter =
            static_cast<Timestamp>(static_cast<double>(span) / static_cast<double>(n) * jitter_fraction);
        std::uniform_int_distribution<Timestamp> jitter(0, std::max<Timestamp>(max_jitter, 0));
        for (std::size_t i = 0; i < n; ++i) {
            const Timestamp at = static_cast<Timestamp>(i) * span / static_cast<Timestamp>(n);
            slots.push_back({at + (max_jitter > 0 ? jitter(rng) : 0), s, i});
        }
    }
    std::stable_sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
        return a.ts != b.ts ? a.ts < b.ts : a.source < b.source;
    });
    ReplaySchedule out;
    out.events.reserve(total);
    for (const auto& slot : slots) {
        SensorReading r = per_source[slot.source][slot.index];
        r.ts = slot.ts;
        out.events.push_back(std::move(r));
    }
    out.horizon = out.events.empty() ? 0 : out.events.back().ts;
    return out;
}

std::string replay_csv(const ReplaySchedule& s) {
    std::string out = "ts_ms,sensor_id,path,value\n";
    for (const auto& e : s.events) {
        out += fmt::format("{},{},\"{}\",{}\n", Decimal::from_micros(e.ts * 1000).to_string(),
                           e.sensor_id, e.path.to_string(), e.value.to_string());
    }
    return out;
}

}  // namespace yada
