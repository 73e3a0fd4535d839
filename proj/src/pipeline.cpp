#include "vislip/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "vislip/io.hpp"
#include "vislip/metrics.hpp"
#include "vislip/model_select.hpp"

namespace vislip {

namespace fs = std::filesystem;
using nlohmann::json;

namespace artifacts {

std::string dataset(Method m) { return "datasets/" + std::string(method_name(m)) + ".csv"; }
std::string dataset_sidecar(Method m) { return "datasets/" + std::string(method_name(m)) + ".json"; }
std::string model(Method m) { return "models/" + std::string(method_name(m)) + ".json"; }
std::string metrics(Method m) { return "metrics/" + std::string(method_name(m)) + ".json"; }
std::string predictions(Method m) { return "metrics/" + std::string(method_name(m)) + "_predictions.csv"; }
std::string cv_table(Method m) { return "metrics/" + std::string(method_name(m)) + "_cv.csv"; }
std::string outcomes(const std::string& controller) { return "stabilize/" + controller + "_outcomes.csv"; }
std::string traces(const std::string& controller) { return "stabilize/" + controller + "_traces.csv"; }

std::vector<std::string> report_files() {
    return {"report/estimation_scatter.csv", "report/rmse_bars.csv", "report/score_bars.csv",
            "report/control_traces.csv", "report/summary.txt"};
}

}  // namespace artifacts

namespace {

using io::format_double;

void write(const fs::path& run_dir, const std::string& rel, std::string_view content, CommandResult& res) {
    io::write_text(run_dir / rel, content);
    res.written.push_back(rel);
}

void write_json(const fs::path& run_dir, const std::string& rel, const json& j, CommandResult& res) {
    io::write_json(run_dir / rel, j);
    res.written.push_back(rel);
}

void finish(const ExperimentConfig& cfg, const std::string& command, CommandResult& res) {
    auto manifest = io::Manifest::load_or_new(res.run_dir);
    manifest.record(command, cfg.hash(), res.written);
    manifest.save();
}

fs::path prepare_run_dir(const ExperimentConfig& cfg) {
    cfg.validate();
    const fs::path dir = cfg.output_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
    return dir;
}

std::string controller_name(Method m) { return std::string(method_name(m)); }

}  // namespace

CommandResult cmd_collect(const ExperimentConfig& cfg) {
    CommandResult res;
    res.run_dir = prepare_run_dir(cfg);
    write_json(res.run_dir, "config.json", cfg.to_json(), res);

    const auto plan = plan_labeled_trials(cfg.materials, cfg.trials_per_material, cfg.setup.rig, cfg.seed,
                                          cfg.max_attempts_factor);
    const auto trials = simulate_trials(plan.specs, cfg.setup);

    std::string trials_csv = io::join_csv({"trial_id", "material", "f_n", "seed", "gross_slip_step", "f_t_slip",
                                           "placement_x", "placement_y"});
    std::string traj_csv = io::join_csv({"trial_id", "material", "step", "t", "f_n", "f_t", "stick_ratio_true", "y"});
    int usable = 0;
    for (const auto& t : trials) {
        usable += t.gross_slip_step ? 1 : 0;
        trials_csv += io::join_csv({std::to_string(t.spec.trial_id), t.spec.material.name, format_double(t.spec.f_n),
                                    std::to_string(t.spec.seed),
                                    t.gross_slip_step ? std::to_string(*t.gross_slip_step) : "",
                                    format_double(t.f_t_slip), format_double(t.placement.x),
                                    format_double(t.placement.y)});
        for (const auto& s : t.trajectory.states)
            traj_csv += io::join_csv({std::to_string(t.spec.trial_id), t.spec.material.name, std::to_string(s.step),
                                      format_double(s.t), format_double(s.f_n), format_double(s.f_t),
                                      format_double(s.stick_ratio_true), format_double(s.y)});
    }
    write(res.run_dir, artifacts::kTrials, trials_csv, res);
    write(res.run_dir, artifacts::kTrajectories, traj_csv, res);
    write_json(res.run_dir, artifacts::kCollection,
               {{"config_hash", cfg.hash()},
                {"seed", cfg.seed},
                {"materials", cfg.materials.size()},
                {"trials_per_material", cfg.trials_per_material},
                {"grips_drawn", plan.attempts},
                {"grips_without_gross_slip", plan.rejected},
                {"trials", trials.size()},
                {"labeled_trials", usable}},
               res);

    for (auto m : cfg.methods) {
        const auto ds = build_dataset(trials, m);
        const auto names = io::feature_names(m, ds.features.cols(), cfg.setup.window.band_lo, cfg.setup.window.band_width);
        write(res.run_dir, artifacts::dataset(m), io::dataset_csv(ds, names), res);
        const auto& w = cfg.setup.window;
        write_json(res.run_dir, artifacts::dataset_sidecar(m),
                   {{"method", method_name(m)},
                    {"rows", ds.size()},
                    {"feature_dim", ds.features.cols()},
                    {"feature_columns", names},
                    {"window",
                     {{"window_T", w.window_T}, {"label_interval", w.label_interval}, {"hop", w.hop},
                      {"band_width", w.band_width}, {"band_lo", w.band_lo}, {"band_hi", w.band_hi}}},
                    {"seed", cfg.seed},
                    {"config_hash", cfg.hash()}},
                   res);
    }
    finish(cfg, "collect", res);
    return res;
}

namespace {

Dataset load_dataset(const fs::path& run_dir, const io::Manifest& manifest, Method m) {
    const auto rel = artifacts::dataset(m);
    if (!fs::exists(run_dir / rel))
        throw IoError("dataset for method " + std::string(method_name(m)) + " not found at " + (run_dir / rel).string() +
                      " (run collect first)");
    manifest.verify(rel);
    return io::parse_dataset_csv(io::read_text(run_dir / rel), m, rel);
}

json welch_json(const WelchResult& w, const std::string& a, const std::string& b, const std::string& statistic) {
    return {{"a", a}, {"b", b}, {"test", "welch_unpaired"}, {"statistic", statistic},
            {"t", w.t}, {"df", w.df}, {"p", w.p}};
}

}  // namespace

CommandResult cmd_train_eval(const ExperimentConfig& cfg) {
    CommandResult res;
    res.run_dir = prepare_run_dir(cfg);
    const auto manifest = io::Manifest::load_or_new(res.run_dir);

    std::map<Method, Evaluation> evals;
    json reports = json::array();
    json best = json::object();
    std::vector<int> test_trials;
    for (auto m : cfg.methods) {
        const auto ds = load_dataset(res.run_dir, manifest, m);
        if (ds.size() == 0) throw LengthError("dataset for " + std::string(method_name(m)) + " is empty");
        const auto split = train_test_split(ds, cfg.selection.test_fraction, derive_seed(cfg.seed, {0x5350}));
        if (split.test.empty() || split.train.empty())
            throw LengthError("train/test split of " + std::string(method_name(m)) + " left an empty side");
        test_trials = split.test_trials;
        const auto train = ds.subset(split.train);

        GridSearchOptions opts;
        opts.folds = cfg.selection.folds;
        opts.seed = derive_seed(cfg.seed, {0x4753});
        opts.max_train_samples = cfg.selection.max_train_samples;
        const auto grid = cfg.grid_for(ds.features.cols());
        const auto gs = grid_search(train.features, train.labels, train.trial_ids, grid, opts);
        const auto model = fit_model(ds, split.train, gs.best, opts);

        auto model_doc = model.to_json();
        model_doc["method"] = method_name(m);
        model_doc["config_hash"] = cfg.hash();
        model_doc["dataset_checksum"] = manifest.json().at("files").at(artifacts::dataset(m)).at("checksum");
        model_doc["cv_rmse"] = gs.best_rmse;
        write_json(res.run_dir, artifacts::model(m), model_doc, res);

        std::string cv = io::join_csv({"kernel", "c", "epsilon", "gamma", "cv_rmse"});
        for (const auto& row : gs.table)
            cv += io::join_csv({std::string(kernel_name(row.params.kernel)), format_double(row.params.c),
                                format_double(row.params.epsilon),
                                row.params.kernel == KernelType::rbf ? format_double(row.params.gamma) : "",
                                format_double(row.cv_rmse)});
        write(res.run_dir, artifacts::cv_table(m), cv, res);

        const auto test = ds.subset(split.test);
        auto ev = evaluate(model, test);
        std::string pred = io::join_csv({"trial_id", "material", "f_n", "step", "label_s", "prediction", "abs_error"});
        for (std::size_t i = 0; i < test.size(); ++i)
            pred += io::join_csv({std::to_string(test.trial_ids[i]), test.materials[i], format_double(test.f_n[i]),
                                  std::to_string(test.steps[i]), format_double(test.labels[i]),
                                  format_double(ev.predictions[i]), format_double(ev.abs_errors[i])});
        write(res.run_dir, artifacts::predictions(m), pred, res);
        best[std::string(method_name(m))] = {{"params", gs.best.label()}, {"cv_rmse", gs.best_rmse}};
        evals.emplace(m, std::move(ev));
    }

    json tests = json::array();
    if (evals.count(Method::injection)) {
        const auto& ref = evals.at(Method::injection);
        for (auto& [m, ev] : evals) {
            if (m == Method::injection) continue;
            compare_errors(ev, ref, "injection");
            const auto w = welch_t_test(ref.abs_errors, ev.abs_errors);
            tests.push_back(welch_json(w, "injection", std::string(method_name(m)), "abs_error"));
        }
    }
    json rmse_table = json::object(), worst_table = json::object();
    for (auto m : cfg.methods) {
        const auto& rep = evals.at(m).report;
        write_json(res.run_dir, artifacts::metrics(m), rep.to_json(), res);
        reports.push_back(rep.to_json());
        rmse_table[rep.method] = rep.rmse;
        worst_table[rep.method] = rep.worst10_rmse;
    }
    write_json(res.run_dir, artifacts::kEstimation,
               {{"config_hash", cfg.hash()},
                {"test_trials", test_trials},
                {"rmse", rmse_table},
                {"worst10_rmse", worst_table},
                {"t_tests", tests},
                {"t_test_note", "unpaired Welch test on per-sample absolute errors, injection vs each baseline"},
                {"selected", best},
                {"reports", reports}},
               res);
    finish(cfg, "train-eval", res);
    return res;
}

namespace {

struct Controller {
    std::string name;
    Method method;
    Estimator estimator;
    Policy policy;
    std::optional<SvrModel> model;
};

}  // namespace

CommandResult cmd_stabilize(const ExperimentConfig& cfg) {
    CommandResult res;
    res.run_dir = prepare_run_dir(cfg);
    const auto manifest = io::Manifest::load_or_new(res.run_dir);

    std::vector<Controller> controllers;
    for (auto m : cfg.methods) {
        const auto rel = artifacts::model(m);
        if (!fs::exists(res.run_dir / rel))
            throw IoError("model for method " + std::string(method_name(m)) + " not found at " +
                          (res.run_dir / rel).string() + " (run train-eval first)");
        manifest.verify(rel);
        controllers.push_back({controller_name(m), m, Estimator::model, Policy::proportional,
                               SvrModel::from_json(io::read_json(res.run_dir / rel))});
    }
    controllers.push_back({artifacts::kNoAction, Method::injection, Estimator::oracle, Policy::no_action, std::nullopt});

    std::vector<MaterialSpec> mats;
    if (cfg.stabilization.materials.empty()) {
        mats = cfg.materials;
    } else {
        for (const auto& name : cfg.stabilization.materials)
            for (const auto& m : cfg.materials)
                if (m.name == name) mats.push_back(m);
    }
    const int n = cfg.stabilization.trials;
    std::vector<std::uint64_t> seeds;
    for (int t = 0; t < n; ++t) seeds.push_back(derive_seed(cfg.seed, {0x5354, static_cast<std::uint64_t>(t)}));

    json rows = json::array();
    std::map<std::string, std::vector<double>> per_trial;
    for (const auto& c : controllers) {
        std::vector<TrialOutcome> outs(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < n; ++t) {
            StabilizationSetup st;
            st.collection = &cfg.setup;
            st.material = mats[static_cast<std::size_t>(t) % mats.size()];
            st.method = c.method;
            st.estimator = c.estimator;
            st.model = c.model ? &*c.model : nullptr;
            st.policy = c.policy;
            outs[static_cast<std::size_t>(t)] = run_stabilization(st, cfg.controller, seeds[static_cast<std::size_t>(t)]);
        }
        assign_scores(outs, cfg.weights);
        const auto sc = score(outs, cfg.weights);

        std::string oc = io::join_csv({"trial", "seed", "material", "success", "final_y", "final_f_n", "steps", "score"});
        std::string tr = io::join_csv({"trial", "step", "s_est", "s_true", "f_n", "y"});
        double steps = 0.0;
        for (int t = 0; t < n; ++t) {
            const auto& o = outs[static_cast<std::size_t>(t)];
            steps += o.steps;
            oc += io::join_csv({std::to_string(t), std::to_string(o.seed), mats[static_cast<std::size_t>(t) % mats.size()].name,
                                o.success ? "1" : "0", format_double(o.final_y), format_double(o.final_f_n),
                                std::to_string(o.steps), format_double(o.score)});
            for (std::size_t k = 0; k < o.s_trace.size(); ++k)
                tr += io::join_csv({std::to_string(t), std::to_string(k + 1), format_double(o.s_trace[k]),
                                    format_double(o.s_true_trace[k]), format_double(o.f_n_trace[k]),
                                    format_double(o.y_trace[k])});
        }
        write(res.run_dir, artifacts::outcomes(c.name), oc, res);
        write(res.run_dir, artifacts::traces(c.name), tr, res);
        per_trial[c.name] = sc.per_trial;
        rows.push_back({{"controller", c.name},
                        {"success_rate", sc.success_rate},
                        {"mean_y", sc.mean_y},
                        {"mean_f_n", sc.mean_f_n},
                        {"mean_steps", steps / n},
                        {"score", sc.score},
                        {"per_trial_scores", sc.per_trial}});
    }

    json tests = json::array();
    if (per_trial.count("injection")) {
        for (const auto& [name, scores] : per_trial) {
            if (name == "injection") continue;
            try {
                tests.push_back(welch_json(welch_t_test(per_trial.at("injection"), scores), "injection", name, "trial_score"));
            } catch (const Error& e) {
                tests.push_back({{"a", "injection"}, {"b", name}, {"test", "welch_unpaired"}, {"error", e.what()}});
            }
        }
    }
    const auto& w = cfg.weights;
    write_json(res.run_dir, artifacts::kStabilization,
               {{"config_hash", cfg.hash()},
                {"trials_per_controller", n},
                {"seeds", seeds},
                {"s_d", cfg.controller.s_d},
                {"weights", {{"w1", w.w1}, {"w2", w.w2}, {"w3", w.w3}}},
                {"controllers", rows},
                {"t_tests", tests}},
               res);
    finish(cfg, "stabilize", res);
    return res;
}

std::vector<std::string> expected_run_artifacts(const std::vector<Method>& methods) {
    std::vector<std::string> out{"config.json", "manifest.json", artifacts::kEstimation, artifacts::kStabilization};
    for (auto m : methods) {
        out.push_back(artifacts::metrics(m));
        out.push_back(artifacts::predictions(m));
        out.push_back(artifacts::outcomes(controller_name(m)));
        out.push_back(artifacts::traces(controller_name(m)));
    }
    out.push_back(artifacts::outcomes(artifacts::kNoAction));
    out.push_back(artifacts::traces(artifacts::kNoAction));
    return out;
}

namespace {

std::string cell(const json& v) {
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_number()) return v.dump();
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

}  // namespace

CommandResult cmd_report(const fs::path& run_dir) {
    CommandResult res;
    res.run_dir = run_dir;
    std::vector<Method> methods(std::begin(kAllMethods), std::end(kAllMethods));
    const auto cfg_path = run_dir / "config.json";
    std::optional<ExperimentConfig> cfg;
    if (fs::exists(cfg_path)) {
        cfg = ExperimentConfig::from_json(io::read_json(cfg_path), profile_config("full"));
        methods = cfg->methods;
    }
    std::vector<std::string> missing;
    for (const auto& rel : expected_run_artifacts(methods))
        if (!fs::exists(run_dir / rel)) missing.push_back(rel);
    if (!missing.empty()) {
        std::string msg = "run directory " + run_dir.string() + " is incomplete; missing:";
        for (const auto& m : missing) msg += " " + m;
        throw IoError(msg);
    }
    const auto manifest = io::Manifest::load_or_new(run_dir);
    for (const auto& rel : expected_run_artifacts(methods))
        if (rel != "manifest.json" && rel != "config.json") manifest.verify(rel);

    // Estimation scatter.
    std::string scatter = io::join_csv({"method", "trial_id", "material", "step", "label_s", "prediction"});
    for (auto m : methods) {
        const auto t = io::parse_csv(io::read_text(run_dir / artifacts::predictions(m)), artifacts::predictions(m));
        const auto ti = t.column("trial_id"), mi = t.column("material"), si = t.column("step"),
                   li = t.column("label_s"), pi = t.column("prediction");
        for (const auto& r : t.rows)
            scatter += io::join_csv({std::string(method_name(m)), r[ti], r[mi], r[si], r[li], r[pi]});
    }

    // RMSE bars.
    const auto est = io::read_json(run_dir / artifacts::kEstimation);
    std::string bars = io::join_csv({"method", "material", "rmse", "worst10_rmse", "p_vs_injection"});
    std::map<std::string, double> pvals;
    for (const auto& t : est.at("t_tests")) pvals[t.at("b").get<std::string>()] = t.at("p").get<double>();
    std::ostringstream summary;
    summary << "vislip run report\n";
    if (cfg) summary << "config hash " << cfg->hash() << ", seed " << cfg->seed << ", profile " << cfg->profile << "\n";
    summary << "\nStick-ratio estimation (test split)\n";
    summary << "  method        rmse    worst10  p(vs injection)\n";
    for (const auto& rep : est.at("reports")) {
        const auto name = rep.at("method").get<std::string>();
        const std::string p = pvals.count(name) ? format_double(pvals[name]) : "";
        bars += io::join_csv({name, "all", cell(rep.at("rmse")), cell(rep.at("worst10_rmse")), p});
        for (const auto& [mat, v] : rep.at("per_material_rmse").items())
            bars += io::join_csv({name, mat, cell(v), "", ""});
        char line[160];
        std::snprintf(line, sizeof line, "  %-12s %7.4f  %7.4f  %s\n", name.c_str(), rep.at("rmse").get<double>(),
                      rep.at("worst10_rmse").get<double>(), p.empty() ? "-" : p.c_str());
        summary << line;
    }

    // Score bars and control traces.
    const auto stab = io::read_json(run_dir / artifacts::kStabilization);
    std::map<std::string, double> spvals;
    for (const auto& t : stab.at("t_tests"))
        if (t.contains("p")) spvals[t.at("b").get<std::string>()] = t.at("p").get<double>();
    std::string scores = io::join_csv({"controller", "success_rate", "mean_y", "mean_f_n", "mean_steps", "score", "p_vs_injection"});
    std::string traces = io::join_csv({"controller", "trial", "step", "s_est", "s_true", "f_n", "y"});
    summary << "\nStabilization (s_d = " << cell(stab.at("s_d")) << ", " << stab.at("trials_per_controller").get<int>()
            << " trials each)\n";
    summary << "  controller    succ.   y [mm]  F_N [kPa]  steps    score\n";
    for (const auto& row : stab.at("controllers")) {
        const auto name = row.at("controller").get<std::string>();
        scores += io::join_csv({name, cell(row.at("success_rate")), cell(row.at("mean_y")), cell(row.at("mean_f_n")),
                                cell(row.at("mean_steps")), cell(row.at("score")),
                                spvals.count(name) ? format_double(spvals[name]) : ""});
        char line[160];
        std::snprintf(line, sizeof line, "  %-12s %5.2f  %7.3f  %9.3f  %5.1f  %7.3f\n", name.c_str(),
                      row.at("success_rate").get<double>(), row.at("mean_y").get<double>(),
                      row.at("mean_f_n").get<double>(), row.at("mean_steps").get<double>(), row.at("score").get<double>());
        summary << line;
        const auto rel = artifacts::traces(name);
        const auto t = io::parse_csv(io::read_text(run_dir / rel), rel);
        for (const auto& r : t.rows) {
            std::vector<std::string> cells{name};
            cells.insert(cells.end(), r.begin(), r.end());
            traces += io::join_csv(cells);
        }
    }
    summary << "\nEstimation t-tests: unpaired Welch on per-sample absolute errors.\n"
            << "Score t-tests: unpaired Welch on per-trial scores.\n";

    const auto files = artifacts::report_files();
    write(run_dir, files[0], scatter, res);
    write(run_dir, files[1], bars, res);
    write(run_dir, files[2], scores, res);
    write(run_dir, files[3], traces, res);
    write(run_dir, files[4], summary.str(), res);
    auto m = io::Manifest::load_or_new(run_dir);
    m.record("report", cfg ? cfg->hash() : "", res.written);
    m.save();
    return res;
}

CommandResult cmd_demo(const ExperimentConfig& cfg) {
    CommandResult res;
    for (auto* step : {&cmd_collect, &cmd_train_eval, &cmd_stabilize}) {
        auto r = (*step)(cfg);
        res.run_dir = r.run_dir;
        res.written.insert(res.written.end(), r.written.begin(), r.written.end());
    }
    auto r = cmd_report(res.run_dir);
    res.written.insert(res.written.end(), r.written.begin(), r.written.end());
    return res;
}

}  // namespace vislip
