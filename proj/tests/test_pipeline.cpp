#include <doctest.h>

#include <filesystem>

#include "vislip/io.hpp"
#include "vislip/pipeline.hpp"

using namespace vislip;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("vislip_pipe_" + name);
    fs::remove_all(p);
    return p;
}

SvrParams point(double c, double gamma) {
    SvrParams p;
    p.kernel = KernelType::rbf;
    p.c = c;
    p.epsilon = 0.01;
    p.gamma = gamma;
    return p;
}

// Small enough to run in seconds: one material, four trials, tiny grid.
ExperimentConfig tiny(const std::string& name, std::vector<Method> methods) {
    auto cfg = profile_config("demo");
    cfg.materials = {material_preset("pla")};
    cfg.trials_per_material = 4;
    cfg.methods = std::move(methods);
    cfg.grid = {point(1.0, 0.01), point(10.0, 0.05)};
    cfg.selection.folds = 2;
    cfg.selection.max_train_samples = 200;
    cfg.selection.test_fraction = 0.25;
    cfg.stabilization.trials = 2;
    cfg.output_dir = scratch(name).string();
    return cfg;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("collect writes 450 rows per trial and per method") {
    auto cfg = tiny("count", {Method::injection, Method::e1});
    cfg.trials_per_material = 2;
    cmd_collect(cfg);
    const fs::path run = cfg.output_dir;
    for (auto m : cfg.methods) {
        const auto t = io::parse_csv(io::read_text(run / artifacts::dataset(m)));
        CHECK(t.rows.size() == 900);
        CHECK(fs::exists(run / artifacts::dataset_sidecar(m)));
    }
    CHECK_FALSE(fs::exists(run / artifacts::dataset(Method::e19)));
    const auto first = io::read_text(run / artifacts::dataset(Method::injection));
    cmd_collect(cfg);
    CHECK(io::read_text(run / artifacts::dataset(Method::injection)) == first);
    const auto manifest = io::Manifest::load_or_new(run);
    CHECK(manifest.contains(artifacts::dataset(Method::e1)));
    CHECK(manifest.contains(artifacts::kTrajectories));
}

TEST_CASE("default config collects five materials x 100 trials") {
    const auto cfg = profile_config("full");
    CHECK(cfg.materials.size() == 5);
    CHECK(cfg.trials_per_material == 100);
    const auto plan = plan_labeled_trials(cfg.materials, cfg.trials_per_material, cfg.setup.rig, cfg.seed);
    CHECK(plan.specs.size() == 500);
}

TEST_CASE("unwritable output directory") {
    auto cfg = tiny("unwritable", {Method::e1});
    const auto file = scratch("blocker");
    io::write_text(file, "x");
    cfg.output_dir = (file / "sub").string();
    CHECK_THROWS_AS(cmd_collect(cfg), IoError);
}

TEST_CASE("missing inputs name what is missing") {
    auto cfg = tiny("missing", {Method::e10});
    try {
        cmd_train_eval(cfg);
        FAIL("expected an error");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("E10") != std::string::npos);
    }
    try {
        cmd_stabilize(cfg);
        FAIL("expected an error");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("model for method E10") != std::string::npos);
    }
    const auto empty = scratch("empty_run");
    fs::create_directories(empty);
    try {
        cmd_report(empty);
        FAIL("expected an error");
    } catch (const IoError& e) {
        const std::string msg = e.what();
        for (const auto& rel : expected_run_artifacts({std::begin(kAllMethods), std::end(kAllMethods)}))
            CHECK(msg.find(rel) != std::string::npos);
    }
}

TEST_CASE("stale dataset is rejected") {
    auto cfg = tiny("stale", {Method::e1});
    cmd_collect(cfg);
    const fs::path run = cfg.output_dir;
    io::write_text(run / artifacts::dataset(Method::e1), io::read_text(run / artifacts::dataset(Method::e1)) + "\n");
    CHECK_THROWS_AS(cmd_train_eval(cfg), IoError);
}

TEST_CASE("single method end to end, report purity") {
    auto cfg = tiny("single", {Method::injection});
    const auto res = cmd_demo(cfg);
    const fs::path run = res.run_dir;
    const auto summary = io::read_json(run / artifacts::kEstimation);
    CHECK(summary.at("reports").size() == 1);
    CHECK(summary.at("t_tests").empty());
    const auto stab = io::read_json(run / artifacts::kStabilization);
    CHECK(stab.at("controllers").size() == 2);

    std::vector<std::string> first;
    for (const auto& rel : artifacts::report_files()) {
        REQUIRE(fs::exists(run / rel));
        first.push_back(io::read_text(run / rel));
    }
    cmd_report(run);
    for (std::size_t i = 0; i < first.size(); ++i) CHECK(io::read_text(run / artifacts::report_files()[i]) == first[i]);

    const auto model = io::read_json(run / artifacts::model(Method::injection));
    CHECK(model.at("method") == "injection");
    CHECK(model.at("config_hash") == cfg.hash());
}

}
