#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>

#include "vislip/config.hpp"
#include "vislip/io.hpp"

using namespace vislip;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("vislip_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_SUITE("config_io") {

TEST_CASE("profiles") {
    const auto full = profile_config("full");
    CHECK(full.materials.size() == 5);
    CHECK(full.trials_per_material == 100);
    CHECK(full.methods.size() == 6);
    const auto demo = profile_config("demo");
    CHECK(demo.materials.size() == 2);
    CHECK(demo.trials_per_material == 10);
    CHECK_THROWS_AS(profile_config("huge"), ConfigError);
}

TEST_CASE("json round trip, overrides and strictness") {
    const auto demo = profile_config("demo");
    const auto back = ExperimentConfig::from_json(demo.to_json(), profile_config("full"));
    CHECK(back.to_json() == demo.to_json());
    CHECK(back.hash() == demo.hash());

    const auto tweaked = ExperimentConfig::from_json(json{{"seed", 7}, {"methods", "injection,E1"}}, demo);
    CHECK(tweaked.seed == 7);
    CHECK(tweaked.methods.size() == 2);
    CHECK(tweaked.hash() != demo.hash());
    CHECK(tweaked.trials_per_material == 10);

    CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"seeed", 1}}, demo), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"trials_per_material", 0}}, demo).validate(), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"methods", json::array()}}, demo).validate(), ConfigError);
}

TEST_CASE("config files") {
    const auto dir = scratch("config");
    fs::create_directories(dir);
    io::write_json(dir / "c.json", json{{"profile", "demo"}, {"seed", 5}});
    const auto cfg = load_config((dir / "c.json").string());
    CHECK(cfg.profile == "demo");
    CHECK(cfg.seed == 5);
    CHECK_THROWS_AS(load_config((dir / "missing.json").string()), IoError);
    std::ofstream(dir / "bad.json") << "{ not json";
    CHECK_THROWS(load_config((dir / "bad.json").string()));
}

TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, -2.5, 0.0, std::numeric_limits<double>::max()})
        CHECK(std::stod(io::format_double(v)) == v);
    CHECK(io::format_double(0.5) == "0.5");
}

TEST_CASE("csv parse/join") {
    const auto line = io::join_csv({"a", "b c", "d"});
    const auto t = io::parse_csv("x,y,z\n" + line, "t");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][1] == "b c");
    CHECK_THROWS_AS(io::join_csv({"a,b"}), IoError);
    CHECK_THROWS_AS(io::parse_csv("x,y\n1,2,3\n", "t"), IoError);
    CHECK(t.column("z") == 2);
    CHECK_THROWS_AS(t.column("w"), IoError);
}

TEST_CASE("dataset csv round trip") {
    Dataset ds;
    ds.method = Method::e4;
    for (int i = 0; i < 3; ++i) {
        ds.features.append_row(std::vector<double>{0.1 * i, 1.0, 2.0, 3.5});
        ds.labels.push_back(1.0 - 0.25 * i);
        ds.trial_ids.push_back(4);
        ds.materials.push_back("petg");
        ds.f_n.push_back(2.3);
        ds.steps.push_back(i);
        ds.s_true.push_back(0.9);
    }
    const auto names = io::feature_names(Method::e4, 4, 10.0, 10.0);
    CHECK(names.front() == "e0");
    CHECK(io::feature_names(Method::injection, 109, 10.0, 10.0).front() == "b10");
    const auto back = io::parse_dataset_csv(io::dataset_csv(ds, names), Method::e4, "mem");
    CHECK(back.size() == 3);
    CHECK(back.labels == ds.labels);
    CHECK(back.trial_ids == ds.trial_ids);
    CHECK(back.materials == ds.materials);
    CHECK(back.features.cols() == 4);
    CHECK(back.features(2, 0) == doctest::Approx(0.2));
}

TEST_CASE("manifest detects missing and stale files") {
    const auto dir = scratch("manifest");
    io::write_text(dir / "a.txt", "one");
    auto m = io::Manifest::load_or_new(dir);
    m.record("collect", "abc", {"a.txt"});
    m.save();
    const auto loaded = io::Manifest::load_or_new(dir);
    CHECK(loaded.contains("a.txt"));
    CHECK_NOTHROW(loaded.verify("a.txt"));
    CHECK(loaded.json().at("tool_version") == kToolVersion);
    CHECK(loaded.json().at("timestamps").contains("collect"));
    io::write_text(dir / "a.txt", "two");
    CHECK_THROWS_AS(loaded.verify("a.txt"), IoError);
    CHECK_THROWS_AS(loaded.verify("b.txt"), IoError);
}

}
