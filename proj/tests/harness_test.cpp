#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "yada/harness.hpp"
#include "yada/io.hpp"
#include "yada/pathsel.hpp"

using namespace yada;
namespace fs = std::filesystem;

namespace {

std::string fixture(const std::string& f) { return std::string(YADA_FIXTURE_DIR) + "/" + f; }

std::string scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("yada_harness_" + name);
    fs::remove_all(p);
    return p.string();
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

struct Captured {
    int rc;
    std::string out;
    std::string err;
};

template <typename F>
Captured capture(F&& f) {
    std::ostringstream out, err;
    const int rc = f(out, err);
    return {rc, out.str(), err.str()};
}

}  // namespace

TEST(Config, LoadsFixtureAndResolvesPaths) {
    const HarnessConfig c = load_config(fixture("experiment.yaml"));
    EXPECT_EQ(c.sources.size(), 7u);
    EXPECT_EQ(c.sweep_nodes, (std::vector<int>{4, 6, 16}));
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.sim.seed, 42u);
    EXPECT_EQ(c.reading_gap, 10'000);
    EXPECT_TRUE(fs::exists(c.schema_file));
    std::size_t used = 0;
    for (const auto& s : c.sources) {
        EXPECT_TRUE(fs::exists(s.file)) << s.file;
        used += s.spec.used_samples;
    }
    EXPECT_EQ(used, 10000u);
    // column order follows the document
    EXPECT_EQ(c.sources[3].mapping.columns[0].csv_column, "FC1_Read_Input_Register");
    EXPECT_EQ(c.sources[1].mapping.columns[0].codes.at("open").to_string(), "1");
    EXPECT_EQ(c.sources[6].mapping.emit, EmitMode::Rotate);
    EXPECT_EQ(c.sources[6].mapping.sensor_column, "ID");
}

TEST(Config, Overrides) {
    Overrides ov;
    ov.set = {"sim.monitorPollMs=250", "sweep.numNodes=[1, 2]", "ingest.sources.0.used_samples=10",
              "sim.network.perByteMs=0.5"};
    ov.seed = 9;
    ov.out = "/tmp/x";
    const HarnessConfig c = load_config(fixture("experiment.yaml"), ov);
    EXPECT_EQ(c.sim.monitor_poll_ms, 250);
    EXPECT_EQ(c.sweep_nodes, (std::vector<int>{1, 2}));
    EXPECT_EQ(c.sources[0].spec.used_samples, 10u);
    EXPECT_EQ(c.sim.network.per_byte_ms.to_string(), "0.5");
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.output_dir, "/tmp/x");
}

TEST(Config, Rejections) {
    const auto bad = [](std::vector<std::string> set) {
        Overrides ov;
        ov.set = std::move(set);
        EXPECT_THROW(load_config(fixture("experiment.yaml"), ov), ConfigError) << ov.set.front();
    };
    bad({"sim.gatewayFlushMs=soon"});
    bad({"sim.typo=1"});
    bad({"schemaFile=missing.yada"});
    bad({"ingest.sources.0.file=missing.csv"});
    bad({"ingest.sources.0.emit=sometimes"});
    bad({"sim.replayOrder=random"});
    bad({"sweep.numNodes=[0]"});
    bad({"no-equals-sign"});
    bad({"ingest.sources.9.used_samples=1"});
    EXPECT_THROW(load_config(fixture("nope.yaml")), ConfigError);
}

TEST(Compile, PrintsCanonicalSchema) {
    const auto r = capture([](auto& o, auto& e) { return cmd_compile(fixture("air-quality.yada"), o, e); });
    EXPECT_EQ(r.rc, kOk);
    EXPECT_EQ(r.out, print_schema(load_schema_file(fixture("air-quality.yada"))));
}

TEST(Compile, MissingFileAndBadKey) {
    auto r = capture([](auto& o, auto& e) { return cmd_compile(fixture("no-such.yada"), o, e); });
    EXPECT_EQ(r.rc, kParseError);
    EXPECT_NE(r.err.find("file not found"), std::string::npos);

    const std::string file = scratch("badkey.yada");
    write_file(file, "module m {\n  container c {\n    list l {\n      key \"k\";\n      leaf x {type string;}\n    }\n  }\n}\n");
    r = capture([&](auto& o, auto& e) { return cmd_compile(file, o, e); });
    EXPECT_EQ(r.rc, kParseError);
    EXPECT_NE(r.err.find("/c/l"), std::string::npos) << r.err;
}

TEST(Validate, FixtureInstance) {
    auto r = capture([](auto& o, auto& e) {
        return cmd_validate(fixture("air-quality.yada"), fixture("air-quality-instance.json"), o, e);
    });
    EXPECT_EQ(r.rc, kOk) << r.err;
    EXPECT_EQ(r.out, "ok: 17 leaves\n");

    const std::string file = scratch("bad.json");
    write_file(file, R"({"AirHumidityURI":{"value":"wet"}})");
    r = capture([&](auto& o, auto& e) { return cmd_validate(fixture("air-quality.yada"), file, o, e); });
    EXPECT_EQ(r.rc, kParseError);
}

TEST(Query, PrintsSelectedLeavesInDocumentOrder) {
    const auto q = [](const std::string& path) {
        return capture([&](auto& o, auto& e) {
            return cmd_query(fixture("air-quality.yada"), fixture("air-quality-instance.json"), path, o, e);
        });
    };
    auto r = q("/AirHumidityURI/value");
    EXPECT_EQ(r.rc, kOk);
    EXPECT_EQ(r.out, "/AirHumidityURI/value = 40\n");

    r = q("/AirGasesURI");
    EXPECT_EQ(r.rc, kOk);
    EXPECT_EQ(lines(r.out), 9u);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "/AirGasesURI/value/carbon-monoxide-data = 0.41");

    // Same leaves, same order as the library evaluator.
    auto schema = std::make_shared<const SchemaModule>(load_schema_file(fixture("air-quality.yada")));
    const DataTree tree = load_instance_file(schema, fixture("air-quality-instance.json"));
    r = q("/AirParticleURI/value/*");
    std::string expect;
    for (const auto& p : evaluate(tree, bind_path(parse_path("/AirParticleURI/value/*"), schema))) {
        expect += p.to_string() + " = " + tree.find(p)->value.to_string() + "\n";
    }
    EXPECT_EQ(r.out, expect);
    EXPECT_EQ(lines(r.out), 6u);

    r = q("/AirParticleURI/value[key='99']/pm1-data");
    EXPECT_EQ(r.rc, kOk);
    EXPECT_EQ(r.out, "");

    r = q("/AirGasesURI/value/radon");
    EXPECT_EQ(r.rc, kParseError);
    r = q("AirGasesURI");
    EXPECT_EQ(r.rc, kParseError);
}

TEST(Ingest, TenThousandRowsReproducibly) {
    const auto go = [](const std::string& dir) {
        Overrides ov;
        ov.out = dir;
        return capture([&](auto& o, auto& e) { return cmd_ingest(fixture("experiment.yaml"), ov, o, e); });
    };
    const std::string a = scratch("ingest_a");
    const std::string b = scratch("ingest_b");
    ASSERT_EQ(go(a).rc, kOk);
    ASSERT_EQ(go(b).rc, kOk);
    const std::string ra = read_file(a + "/replay.csv");
    EXPECT_EQ(lines(ra), 10001u);
    EXPECT_EQ(ra, read_file(b + "/replay.csv"));
    EXPECT_EQ(std::hash<std::string>{}(ra), std::hash<std::string>{}(read_file(b + "/replay.csv")));
}

TEST(Ingest, UnderRunExitsThree) {
    Overrides ov;
    ov.out = scratch("ingest_short");
    ov.set = {"ingest.sources.0.used_samples=5000"};
    const auto r = capture([&](auto& o, auto& e) { return cmd_ingest(fixture("experiment.yaml"), ov, o, e); });
    EXPECT_EQ(r.rc, kUnderRun);
    EXPECT_NE(r.err.find("Fridge"), std::string::npos);
}

TEST(Ingest, SingleSourceUsingEveryRowKeepsFileOrder) {
    const std::string dir = scratch("ingest_one");
    fs::create_directories(dir);
    write_file(dir + "/t.csv", "temp\n4\n2\n7\n");
    write_file(dir + "/c.yaml", "schemaFile: " + fixture("air-quality.yada") +
                                    "\ningest:\n  sources:\n    - file: t.csv\n      used_samples: 3\n"
                                    "      columns:\n        temp: /AirTemperatureURI/value\n"
                                    "sim:\n  replayJitter: 0\n  replayOrder: sequential\n"
                                    "output:\n  dir: " + dir + "/out\n");
    const auto r = capture([&](auto& o, auto& e) { return cmd_ingest(dir + "/c.yaml", {}, o, e); });
    ASSERT_EQ(r.rc, kOk) << r.err;
    EXPECT_EQ(read_file(dir + "/out/replay.csv"),
              "ts_ms,sensor_id,path,value\n"
              "0,t,\"/AirTemperatureURI/value\",4\n"
              "10,t,\"/AirTemperatureURI/value\",2\n"
              "20,t,\"/AirTemperatureURI/value\",7\n");
}

TEST(Simulate, WritesSweepReproducibly) {
    const auto go = [](const std::string& dir) {
        Overrides ov;
        ov.out = dir;
        return capture([&](auto& o, auto& e) { return cmd_simulate(fixture("experiment.yaml"), ov, o, e); });
    };
    const std::string a = scratch("sim_a");
    const std::string b = scratch("sim_b");
    const auto ra = go(a);
    ASSERT_EQ(ra.rc, kOk) << ra.err;
    ASSERT_EQ(go(b).rc, kOk);
    const std::string cmp = read_file(a + "/comparison.csv");
    EXPECT_EQ(lines(cmp), 4u);
    EXPECT_EQ(cmp, ra.out);
    for (const char* f : {"comparison.csv", "metrics.csv", "rtt.csv", "e2e.csv", "sync.csv", "summary.txt",
                          "events/with-yada-4.csv", "events/without-yada-16.csv"}) {
        EXPECT_EQ(read_file(a + "/" + f), read_file(b + "/" + f)) << f;
    }

    Overrides ov;
    ov.out = a;
    const auto rep = capture([&](auto& o, auto& e) { return cmd_report(fixture("experiment.yaml"), ov, o, e); });
    EXPECT_EQ(rep.rc, kOk);
    EXPECT_EQ(lines(rep.out), 4u);
}

TEST(Simulate, AllLeavesSelectionMakesModesAgree) {
    Overrides ov;
    ov.out = scratch("sim_all");
    ov.set = {"sweep.numNodes=[1]", "selectionFile=all-leaves.ypath"};
    const auto r = capture([&](auto& o, auto& e) { return cmd_simulate(fixture("experiment.yaml"), ov, o, e); });
    ASSERT_EQ(r.rc, kOk) << r.err;
    std::istringstream in(r.out);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    std::vector<std::string> f;
    std::istringstream cells(row);
    for (std::string c; std::getline(cells, c, ',');) f.push_back(c);
    ASSERT_EQ(f.size(), 9u);
    EXPECT_EQ(f[1], f[2]);
    EXPECT_EQ(f[3], f[4]);
    EXPECT_EQ(f[5], f[6]);
    EXPECT_EQ(f[7], f[8]);
}

TEST(Simulate, BadConfigExitsTwo) {
    Overrides ov;
    ov.out = scratch("sim_bad");
    ov.set = {"sim.gatewayBatchSize=0"};
    auto r = capture([&](auto& o, auto& e) { return cmd_simulate(fixture("experiment.yaml"), ov, o, e); });
    EXPECT_EQ(r.rc, kConfigError) << r.err;
    ov.set = {"sweep.numNodes=[]"};
    r = capture([&](auto& o, auto& e) { return cmd_simulate(fixture("experiment.yaml"), ov, o, e); });
    EXPECT_EQ(r.rc, kConfigError) << r.err;
}

TEST(Report, NeedsResults) {
    Overrides ov;
    ov.out = scratch("report_empty");
    const auto r = capture([&](auto& o, auto& e) { return cmd_report(fixture("experiment.yaml"), ov, o, e); });
    EXPECT_EQ(r.rc, kConfigError);
}
