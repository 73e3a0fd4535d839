#include "vislip/control.hpp"

#include <algorithm>
#include <cmath>

namespace vislip {

void ControllerConfig::validate() const {
    if (!(k >= 0.0)) throw ConfigError("controller gain k must be >= 0");
    if (!(s_d > 0.0 && s_d < 1.0)) throw ConfigError("target stick ratio s_d must be in (0,1)");
    if (!(f_n_init > 0.0 && f_n_safety > f_n_init)) throw ConfigError("need f_n_safety > f_n_init > 0");
    if (!(f_n_floor > 0.0 && f_n_floor <= f_n_init)) throw ConfigError("need 0 < f_n_floor <= f_n_init");
    if (!(y_fail > 0.0)) throw ConfigError("y_fail must be > 0");
    if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
}

void ScoreWeights::validate() const {
    if (!(w1 > 0.0 && w2 > 0.0 && w3 > 0.0)) throw ConfigError("score weights must be positive");
    if (!(floor > 0.0)) throw ConfigError("score denominator floor must be positive");
}

double control_action(double s_est, const ControllerConfig& cfg) { return cfg.k * (s_est - cfg.s_d); }

double apply_action(double f_n, double action, const ControllerConfig& cfg) {
    return std::clamp(f_n - action, cfg.f_n_floor, cfg.f_n_safety);
}

TrialOutcome run_stabilization(const StabilizationSetup& setup, const ControllerConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    if (!setup.collection) throw ConfigError("stabilization needs a collection setup");
    const auto& cs = *setup.collection;
    if (cfg.max_steps > cs.rig.total_steps)
        throw ConfigError("max_steps exceeds the loading schedule length");
    const bool inject = setup.method != Method::vibrotactile;
    if (setup.estimator == Estimator::model) {
        if (!setup.model) throw ConfigError("model estimator selected but no model given");
        const std::size_t expect = is_electrode_method(setup.method)
                                       ? static_cast<std::size_t>(electrode_count(setup.method))
                                       : band_count(cs.window);
        if (setup.model->input_dim() != expect)
            throw ConfigError("model for " + std::string(method_name(setup.method)) + " expects " +
                              std::to_string(setup.model->input_dim()) + " features, the sensor provides " +
                              std::to_string(expect));
    }

    TrialOutcome out;
    out.seed = seed;
    Rng rig_rng(derive_seed(seed, {0x52}));
    const auto place = draw_placement(cs.sensor.electrodes, placement_seed(seed));
    const double frame_s = cs.rig.sample_window_T;
    FeatureWindow window(cs, inject);
    auto state = initial_state(cfg.f_n_init, cs.rig, setup.material);
    const int preroll = cs.frames_per_window() - 1;
    for (int p = 0; p < preroll; ++p)
        window.push(synthesize_frame(state, setup.material, cs.sensor, frame_s, inject, frame_seed(seed, p), place));

    double f_n = cfg.f_n_init;
    for (int k = 0; k < cfg.max_steps; ++k) {
        state.f_n = f_n;
        state = step_rig(state, cs.rig, setup.material, rig_rng);
        window.push(synthesize_frame(state, setup.material, cs.sensor, frame_s, inject,
                                     frame_seed(seed, preroll + k), place));
        const double s_est = setup.estimator == Estimator::oracle
                                 ? state.stick_ratio_true
                                 : setup.model->predict(window.feature(setup.method));
        out.s_trace.push_back(s_est);
        out.s_true_trace.push_back(state.stick_ratio_true);
        out.f_n_trace.push_back(f_n);
        out.y_trace.push_back(state.y);
        out.steps = k + 1;
        if (state.y > cfg.y_fail || f_n > cfg.f_n_safety) break;
        if (setup.policy == Policy::proportional) f_n = apply_action(f_n, control_action(s_est, cfg), cfg);
    }
    out.final_y = state.y;
    out.final_f_n = out.f_n_trace.back();
    out.success = out.final_y <= cfg.y_fail && out.final_f_n <= cfg.f_n_safety;
    return out;
}

double score_value(double success_rate, double mean_y, double mean_f_n, const ScoreWeights& w) {
    return (w.w1 + success_rate) * (w.w2 / std::max(mean_y, w.floor) + w.w3 / std::max(mean_f_n, w.floor));
}

ScoreResult score(std::span<const TrialOutcome> outcomes, const ScoreWeights& w) {
    w.validate();
    if (outcomes.empty()) throw LengthError("score needs at least one outcome");
    ScoreResult r;
    for (const auto& o : outcomes) {
        r.success_rate += o.success ? 1.0 : 0.0;
        r.mean_y += o.final_y;
        r.mean_f_n += o.final_f_n;
        r.per_trial.push_back(score_value(o.success ? 1.0 : 0.0, o.final_y, o.final_f_n, w));
    }
    const double n = static_cast<double>(outcomes.size());
    r.success_rate /= n;
    r.mean_y /= n;
    r.mean_f_n /= n;
    r.score = score_value(r.success_rate, r.mean_y, r.mean_f_n, w);
    return r;
}

void assign_scores(std::span<TrialOutcome> outcomes, const ScoreWeights& w) {
    for (auto& o : outcomes) o.score = score_value(o.success ? 1.0 : 0.0, o.final_y, o.final_f_n, w);
}

}  // namespace vislip
