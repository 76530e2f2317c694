#include <cstdlib>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include <weyllab/io.hpp>

#include "schema.hpp"

using namespace weyllab;

namespace {

std::string source(const std::string& rel) { return std::string(WEYLLAB_SOURCE_DIR) + "/" + rel; }

json schema_file(const std::string& name) { return read_json_file(source("schemas/" + name + ".schema.json")); }

} // namespace

TEST(Presets, ModelsValidateAndLoad)
{
    const json sch = schema_file("model");
    for (const char* f : {"torus_unit.json", "torus_unit3.json", "sphere2.json", "sphere3.json"}) {
        const json j = read_json_file(source(std::string("presets/") + f));
        EXPECT_TRUE(schema::check(j, sch).empty()) << f;
        const ManifoldModel m = parse_model(j);
        EXPECT_EQ(model_to_json(m), j) << f;
    }
}

TEST(Presets, GroupsValidateAndMatchBuiltIns)
{
    const json sch = schema_file("group");
    for (const auto& [file, G] : {std::pair{"octagon.json", octagon_group()}, std::pair{"schottky.json", schottky_group()}}) {
        const json j = read_json_file(source(std::string("presets/") + file));
        EXPECT_TRUE(schema::check(j, sch).empty()) << file;
        const GroupPresentation L = parse_group(j);
        ASSERT_EQ(L.rank(), G.rank());
        for (int i = 0; i < G.rank(); ++i) EXPECT_LT(max_abs_difference(L.generators[i], G.generators[i]), 1e-15);
        EXPECT_EQ(L.min_translation, G.min_translation);
        EXPECT_EQ(L.relation.has_value(), G.relation.has_value());
    }
}

TEST(Presets, DefaultConfig)
{
    const json j = read_json_file(source("config/default.json"));
    EXPECT_TRUE(schema::check(j, schema_file("config")).empty());
    const Settings s = Settings::from_json(j);
    EXPECT_EQ(s.Q.at(2), 0.39894223595288708);
    EXPECT_EQ(s.Q.at(3), 0.15915494829378113);
    // The finite-lambda fits sit within 5e-8 of the closed forms.
    EXPECT_NEAR(s.Q.at(2), 1.0 / std::sqrt(two_pi), 5e-8);
    EXPECT_NEAR(s.Q.at(3), 1.0 / two_pi, 5e-8);
    EXPECT_EQ(*s.psi_s_max, 0.0);
}

TEST(Parsing, ModelErrors)
{
    EXPECT_THROW(parse_model(json::parse(R"({"type":"torus","basis":[[1,2],[2,4]]})")), ConfigError);
    EXPECT_THROW(parse_model(json::parse(R"({"type":"torus","basis":[[1,0,0],[0,1]]})")), ConfigError);
    EXPECT_THROW(parse_model(json::parse(R"({"type":"klein bottle"})")), ConfigError);
    EXPECT_THROW(parse_model(json::parse(R"({"basis":[[1,0],[0,1]]})")), ConfigError);
    EXPECT_THROW(read_json_file(source("no/such/file.json")), ConfigError);
}

TEST(Parsing, TorusBasisColumnsAreLatticeVectors)
{
    const ManifoldModel m = parse_model(json::parse(R"({"type":"torus","basis":[[1,0],[0.5,2]]})"));
    EXPECT_EQ(m.torus().basis(0, 1), 0.5);
    EXPECT_EQ(m.torus().basis(1, 1), 2.0);
    EXPECT_EQ(m.torus().basis(1, 0), 0.0);
}

TEST(Parsing, GroupErrors)
{
    json j = group_to_json(schottky_group());
    j["generators"][0] = {{2.0, 0.0}, {0.0, 2.0}};
    EXPECT_THROW(parse_group(j), ConfigError);
    j = group_to_json(octagon_group());
    j["relation"] = {1, 2, 9};
    EXPECT_THROW(parse_group(j), ConfigError);
    j = group_to_json(octagon_group());
    j["kind"] = "orbifold";
    EXPECT_THROW(parse_group(j), ConfigError);
}

TEST(Parsing, Lists)
{
    EXPECT_EQ(parse_list("1, 2.5,3e-1"), (std::vector<double>{1.0, 2.5, 0.3}));
    EXPECT_EQ(parse_list("0.1 0.2"), (std::vector<double>{0.1, 0.2}));
    EXPECT_THROW(parse_list("1,x"), ConfigError);
    EXPECT_THROW(parse_list("1.5.2"), ConfigError);
}

TEST(Format, SeventeenDigitsRoundTrip)
{
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double v = U(rng) * std::pow(10.0, 40.0 * U(rng));
        EXPECT_EQ(std::strtod(fmt17(v).c_str(), nullptr), v);
    }
}

TEST(Format, CsvWriter)
{
    std::ostringstream out;
    CsvWriter w(out, {"a", "b"});
    w.row({0.1, 2.0});
    EXPECT_EQ(out.str(), "a,b\n0.10000000000000001,2\n");
    EXPECT_THROW(w.row({1.0}), DomainError);
}

TEST(Settings, Validation)
{
    EXPECT_THROW(Settings::from_json(json::parse(R"({"quad":{"tol":-1}})")), ConfigError);
    EXPECT_THROW(Settings::from_json(json::parse(R"({"Q":{"x2":1}})")), ConfigError);
    EXPECT_THROW(Settings::from_json(json::parse("[1]")), ConfigError);
}
