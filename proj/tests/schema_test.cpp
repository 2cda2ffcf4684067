#include <gtest/gtest.h>

#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "support/generators.hpp"
#include "yada/io.hpp"
#include "yada/schema.hpp"

namespace yada {
namespace {

std::string fixture(const std::string& name) { return std::string(YADA_FIXTURE_DIR) + "/" + name; }

SchemaError parse_error(const std::string& text) {
    try {
        parse_schema(text);
    } catch (const SchemaError& e) {
        return e;
    }
    ADD_FAILURE() << "expected SchemaError for: " << text;
    return SchemaError(SchemaError::Kind::Syntax, "none");
}

TEST(ParseSchema, AirQualityFixtureShape) {
    const SchemaModule m = load_schema_file(fixture("air-quality.yada"));
    EXPECT_EQ(m.name, "air-quality");
    ASSERT_EQ(m.roots.size(), 4u);
    EXPECT_EQ(m.roots[0].name, "AirParticleURI");
    EXPECT_EQ(m.roots[1].name, "AirTemperatureURI");
    EXPECT_EQ(m.roots[2].name, "AirHumidityURI");
    EXPECT_EQ(m.roots[3].name, "AirGasesURI");
    for (const auto& r : m.roots) EXPECT_EQ(r.kind, NodeKind::Container);
    EXPECT_EQ(m.roots[0].description, "Air Monitoring Particle Sensor");

    const SchemaNode& particles = m.roots[0].children.at(0);
    EXPECT_EQ(particles.kind, NodeKind::List);
    EXPECT_EQ(particles.name, "value");
    EXPECT_EQ(particles.key_leaf, "pm2.5-data");
    ASSERT_EQ(particles.children.size(), 3u);
    EXPECT_EQ(particles.children[0].name, "pm1-data");
    EXPECT_EQ(particles.children[1].name, "pm2.5-data");
    EXPECT_EQ(particles.children[2].name, "pm10-data");

    EXPECT_EQ(m.roots[1].children.at(0).kind, NodeKind::Leaf);
    EXPECT_EQ(m.roots[2].children.at(0).kind, NodeKind::Leaf);

    const SchemaNode& gases = m.roots[3].children.at(0);
    EXPECT_EQ(gases.kind, NodeKind::Container);
    const std::vector<std::string> gas_names{
        "carbon-monoxide-data", "nitric-oxide", "nitrogen-dioxide", "sulphur-dioxide", "ethanol",
        "hydrogen", "ammonia", "methane", "ozone"};
    ASSERT_EQ(gases.children.size(), gas_names.size());
    for (std::size_t i = 0; i < gas_names.size(); ++i) {
        EXPECT_EQ(gases.children[i].name, gas_names[i]);
        EXPECT_EQ(gases.children[i].type_name, "air-sensor");
    }
    EXPECT_EQ(leaf_name_paths(m).size(), 14u);
}

TEST(ParseSchema, EmptyModule) {
    const SchemaModule m = parse_schema("module m { }");
    EXPECT_EQ(m.name, "m");
    EXPECT_TRUE(m.roots.empty());
}

TEST(ParseSchema, BadKeyNamesListPath) {
    const auto e = parse_error(
        R"(module m { container c { list l { key "missing"; leaf present {type air-sensor;} } } })");
    EXPECT_EQ(e.kind(), SchemaError::Kind::BadKey);
    EXPECT_EQ(e.path(), "m/c/l");
}

TEST(ParseSchema, ListWithoutKeyIsBadKey) {
    const auto e = parse_error("module m { container c { list l { leaf x {type decimal;} } } }");
    EXPECT_EQ(e.kind(), SchemaError::Kind::BadKey);
}

TEST(ParseSchema, KeyMustNameLeafNotContainer) {
    const auto e = parse_error(
        R"(module m { container c { list l { key "x"; container x { } } } })");
    EXPECT_EQ(e.kind(), SchemaError::Kind::BadKey);
}

TEST(ParseSchema, DuplicateSiblingName) {
    const auto e = parse_error(
        "module m { container c { leaf a {type string;} leaf a {type string;} } }");
    EXPECT_EQ(e.kind(), SchemaError::Kind::DuplicateName);
    EXPECT_EQ(e.path(), "m/c/a");

    const auto roots = parse_error("module m { container c { } container c { } }");
    EXPECT_EQ(roots.kind(), SchemaError::Kind::DuplicateName);
}

TEST(ParseSchema, UnknownType) {
    const auto e = parse_error("module m { container c { leaf a {type float64;} } }");
    EXPECT_EQ(e.kind(), SchemaError::Kind::UnknownType);
    EXPECT_NE(std::string(e.what()).find("float64"), std::string::npos);
}

TEST(ParseSchema, SyntaxErrorsCarryOffsets) {
    const std::string text = "module m { container c { leaf a {type string} } }";
    const auto e = parse_error(text);
    EXPECT_EQ(e.kind(), SchemaError::Kind::Syntax);
    EXPECT_EQ(e.offset(), text.find("} } }"));
    EXPECT_NE(std::string(e.what()).find("';'"), std::string::npos);

    EXPECT_EQ(parse_error("module m { container c { description 'single'; } }").kind(),
              SchemaError::Kind::Syntax);
    EXPECT_EQ(parse_error("module m { leaf a {type string;} }").kind(), SchemaError::Kind::Syntax);
    EXPECT_EQ(parse_error("module m { container c { leaf a { } } }").kind(),
              SchemaError::Kind::Syntax);
    EXPECT_EQ(parse_error("module m { } trailing").kind(), SchemaError::Kind::Syntax);
    EXPECT_EQ(parse_error("module m { container c { ").kind(), SchemaError::Kind::Syntax);
    EXPECT_EQ(parse_error("module m { container c { leaf a {type string; key \"a\";} } }").kind(),
              SchemaError::Kind::Syntax);
}

TEST(PrintSchema, EmptyModuleCanonical) {
    EXPECT_EQ(print_schema(parse_schema("module m { }")), "module m {\n}\n");
}

TEST(PrintSchema, CanonicalLayout) {
    const auto m = parse_schema(
        R"(module m { container c { description "d \"q\""; list l { key "k"; leaf k {type string;} } leaf-list t {type boolean;} } })");
    EXPECT_EQ(print_schema(m),
              "module m {\n"
              "  container c {\n"
              "    description \"d \\\"q\\\"\";\n"
              "    list l {\n"
              "      key \"k\";\n"
              "      leaf k {\n"
              "        type string;\n"
              "      }\n"
              "    }\n"
              "    leaf-list t {\n"
              "      type boolean;\n"
              "    }\n"
              "  }\n"
              "}\n");
}

TEST(PrintSchema, FixtureRoundTripsAndIsFixedPoint) {
    const SchemaModule m = load_schema_file(fixture("air-quality.yada"));
    const std::string once = print_schema(m);
    const SchemaModule again = parse_schema(once);
    EXPECT_EQ(again, m);
    EXPECT_EQ(print_schema(again), once);
}

TEST(PrintSchema, RandomSchemasRoundTrip) {
    testing::Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        const SchemaModule m = testing::random_schema(rng);
        const std::string text = print_schema(m);
        const SchemaModule back = parse_schema(text);
        ASSERT_EQ(back, m) << text;
        ASSERT_EQ(print_schema(back), text);
    }
}

// Replacing any keyword occurrence with an unknown word must be rejected.
TEST(ParseSchema, KeywordMutationIsRejected) {
    const std::string src = read_file(fixture("air-quality.yada"));
    const std::vector<std::string> keywords{"module", "container", "list", "key",
                                            "leaf",   "type",      "description"};
    int mutations = 0;
    for (const auto& kw : keywords) {
        for (auto pos = src.find(kw); pos != std::string::npos; pos = src.find(kw, pos + 1)) {
            const bool word_start = pos == 0 || std::isspace(static_cast<unsigned char>(src[pos - 1])) ||
                                    src[pos - 1] == '{';
            const char after = pos + kw.size() < src.size() ? src[pos + kw.size()] : ' ';
            if (!word_start || !std::isspace(static_cast<unsigned char>(after))) continue;
            std::string mutated = src;
            mutated.replace(pos, kw.size(), kw + "zz");
            try {
                parse_schema(mutated);
                ADD_FAILURE() << "mutation of '" << kw << "' at " << pos << " accepted";
            } catch (const SchemaError& e) {
                EXPECT_EQ(e.kind(), SchemaError::Kind::Syntax) << kw << " at " << pos;
            }
            ++mutations;
        }
    }
    EXPECT_GT(mutations, 20);
}

TEST(Resolve, FindsFixtureNodes) {
    const SchemaModule m = load_schema_file(fixture("air-quality.yada"));
    const std::vector<std::string> pm10{"AirParticleURI", "value", "pm10-data"};
    const SchemaNode& leaf = resolve(m, pm10);
    EXPECT_EQ(leaf.kind, NodeKind::Leaf);
    EXPECT_EQ(leaf.name, "pm10-data");

    const std::vector<std::string> temp{"AirTemperatureURI"};
    EXPECT_EQ(resolve(m, temp).kind, NodeKind::Container);
}

TEST(Resolve, ReportsFirstMissingSegment) {
    const SchemaModule m = load_schema_file(fixture("air-quality.yada"));
    try {
        const std::vector<std::string> bad{"NoSuch"};
        resolve(m, bad);
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.kind(), SchemaError::Kind::NotFound);
        EXPECT_EQ(e.segment(), 0u);
    }
    try {
        const std::vector<std::string> bad{"AirGasesURI", "value", "xenon"};
        resolve(m, bad);
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.segment(), 2u);
    }
}

namespace {
void walk_paths(const std::vector<SchemaNode>& nodes, std::vector<std::string>& prefix,
                std::set<std::vector<std::string>>& out) {
    for (const auto& n : nodes) {
        prefix.push_back(n.name);
        out.insert(prefix);
        walk_paths(n.children, prefix, out);
        prefix.pop_back();
    }
}
}  // namespace

// resolve succeeds exactly on the name paths an exhaustive walk produces.
TEST(Resolve, TotalOverEnumeratedPaths) {
    testing::Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        const SchemaModule m = testing::random_schema(rng);
        std::set<std::vector<std::string>> all;
        std::vector<std::string> prefix;
        walk_paths(m.roots, prefix, all);
        for (const auto& p : all) {
            EXPECT_EQ(resolve(m, p).name, p.back());
        }
        // Candidate paths built from the name pool, up to length 3.
        const auto& pool = testing::name_pool();
        for (int k = 0; k < 200; ++k) {
            std::vector<std::string> cand(1 + testing::pick(rng, 3));
            for (auto& s : cand) s = pool[testing::pick(rng, pool.size())];
            bool ok = true;
            try {
                resolve(m, cand);
            } catch (const SchemaError&) {
                ok = false;
            }
            EXPECT_EQ(ok, all.count(cand) == 1);
        }
    }
}

}  // namespace
}  // namespace yada
