#include <CLI11.hpp>
#include <omp.h>

#include <iostream>
#include <json.hpp>
#include <optional>

#include "vislip/common.hpp"
#include "vislip/config.hpp"
#include "vislip/pipeline.hpp"

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string methods;
    std::string out;
    std::string profile;
    int jobs = 0;
    bool quiet = false;
};

vislip::ExperimentConfig resolve(const Options& o, std::string_view default_profile) {
    const std::string_view profile = o.profile.empty() ? default_profile : std::string_view(o.profile);
    auto cfg = o.config.empty() ? vislip::profile_config(profile) : vislip::load_config(o.config, profile);
    if (o.seed) cfg.seed = *o.seed;
    if (!o.methods.empty()) cfg.methods = vislip::parse_method_list(o.methods);
    if (!o.out.empty()) cfg.output_dir = o.out;
    cfg.validate();
    return cfg;
}

int fail(const std::string& kind, const std::string& message, const std::string& command) {
    nlohmann::json j = {{"error", {{"kind", kind}, {"message", message}, {"command", command}}}};
    std::cerr << j.dump() << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vibration-injection incipient-slip workbench"};
    app.set_version_flag("--version", std::string(vislip::kToolVersion));
    app.require_subcommand(1);

    Options o;
    auto add_common = [&](CLI::App* sub, bool run_flags) {
        sub->add_option("--out", o.out, "Run directory");
        sub->add_option("--jobs", o.jobs, "Worker threads (0 = default)")->check(CLI::NonNegativeNumber);
        sub->add_flag("--quiet", o.quiet, "Suppress warnings");
        if (!run_flags) return;
        sub->add_option("--config", o.config, "Experiment config (JSON)");
        sub->add_option("--seed", o.seed, "Master seed");
        sub->add_option("--methods", o.methods, "Comma-separated methods");
        sub->add_option("--profile", o.profile, "Base profile: full or demo");
    };
    auto* collect = app.add_subcommand("collect", "Simulate trials and write per-method datasets");
    auto* train = app.add_subcommand("train-eval", "Grid-search, train and evaluate estimators");
    auto* stab = app.add_subcommand("stabilize", "Run closed-loop grip stabilization trials");
    auto* report = app.add_subcommand("report", "Write plot-ready series and a text summary");
    auto* demo = app.add_subcommand("demo", "Run the whole pipeline on the demo profile");
    for (auto* s : {collect, train, stab, demo}) add_common(s, true);
    add_common(report, false);

    std::string command = "vislip";
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), command);
    }

    try {
        if (o.jobs > 0) omp_set_num_threads(o.jobs);
        if (o.quiet) vislip::set_warnings_enabled(false);
        vislip::CommandResult res;
        if (collect->parsed()) {
            command = "collect";
            res = vislip::cmd_collect(resolve(o, "full"));
        } else if (train->parsed()) {
            command = "train-eval";
            res = vislip::cmd_train_eval(resolve(o, "full"));
        } else if (stab->parsed()) {
            command = "stabilize";
            res = vislip::cmd_stabilize(resolve(o, "full"));
        } else if (report->parsed()) {
            command = "report";
            res = vislip::cmd_report(o.out.empty() ? vislip::profile_config("full").output_dir : o.out);
        } else {
            command = "demo";
            res = vislip::cmd_demo(resolve(o, "demo"));
        }
        nlohmann::json j = {{"command", command}, {"run_dir", res.run_dir.string()}, {"written", res.written}};
        std::cout << j.dump() << "\n";
        return 0;
    } catch (const vislip::Error& e) {
        return fail(e.kind(), e.what(), command);
    } catch (const nlohmann::json::exception& e) {
        return fail("config", e.what(), command);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), command);
    }
}
