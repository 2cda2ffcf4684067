#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "yada/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Schema-driven data selection for digital twin synchronisation"};
    app.require_subcommand(1);

    std::string config = "experiment.yaml";
    yada::Overrides ov;
    std::uint64_t seed = 0;
    std::string out;
    app.add_option("--config", config, "Experiment config (YAML)");
    auto* seed_opt = app.add_option("--seed", seed, "Override the master seed");
    auto* out_opt = app.add_option("--out", out, "Override output.dir");
    app.add_option("--set", ov.set, "Override a config key, e.g. --set sim.monitorPollMs=50");

    std::string schema, data, path;
    auto* compile = app.add_subcommand("compile", "Parse a schema and print its canonical form");
    compile->add_option("schema", schema)->required();
    auto* validate = app.add_subcommand("validate", "Check an instance document against a schema");
    validate->add_option("schema", schema)->required();
    validate->add_option("data", data)->required();
    auto* query = app.add_subcommand("query", "Print the leaves a path selects");
    query->add_option("schema", schema)->required();
    query->add_option("data", data)->required();
    query->add_option("path", path)->required();
    auto* ingest = app.add_subcommand("ingest", "Build the replay schedule from the configured datasets");
    auto* simulate = app.add_subcommand("simulate", "Run the node sweep in both modes");
    auto* report = app.add_subcommand("report", "Print the comparison table from the last simulate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : yada::kConfigError;
    }
    if (*seed_opt) ov.seed = seed;
    if (*out_opt) ov.out = out;

    if (*compile) return yada::cmd_compile(schema, std::cout, std::cerr);
    if (*validate) return yada::cmd_validate(schema, data, std::cout, std::cerr);
    if (*query) return yada::cmd_query(schema, data, path, std::cout, std::cerr);
    if (*ingest) return yada::cmd_ingest(config, ov, std::cout, std::cerr);
    if (*simulate) return yada::cmd_simulate(config, ov, std::cout, std::cerr);
    if (*report) return yada::cmd_report(config, ov, std::cout, std::cerr);
    return yada::kConfigError;
}
