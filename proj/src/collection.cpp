#include "vislip/collection.hpp"

#include <cmath>

namespace vislip {

int CollectionSetup::frames_per_window() const {
    return static_cast<int>(std::llround(window.window_T / rig.sample_window_T));
}

void CollectionSetup::validate() const {
    rig.validate();
    sensor.validate();
    window.validate(sensor.injection.sample_rate);
    const double ratio = window.window_T / rig.sample_window_T;
    if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-9)
        throw ConfigError("window_T must be a whole number of actuator step periods");
    if (std::abs(window.label_interval - rig.sample_window_T) > 1e-12)
        throw ConfigError("label_interval must equal the actuator step period");
    const double frame = rig.sample_window_T * sensor.injection.sample_rate;
    if (std::abs(frame - std::round(frame)) > 1e-6)
        throw ConfigError("step period x sample_rate must be an integer sample count");
}

std::vector<double> TrialRecord::labels() const {
    if (!gross_slip_step) return {};
    std::vector<double> out(static_cast<std::size_t>(steps()));
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double f_t = trajectory.states[i + 1].f_t;
        out[i] = i < *gross_slip_step ? label_pseudo_stick_ratio(f_t, f_t_slip) : 0.0;
    }
    return out;
}

std::vector<double> TrialRecord::feature(Method m, std::size_t step) const {
    switch (m) {
        case Method::injection: {
            auto r = injection_bands.row(step);
            return {r.begin(), r.end()};
        }
        case Method::vibrotactile: {
            auto r = vibrotactile_bands.row(step);
            return {r.begin(), r.end()};
        }
        default: {
            auto r = electrodes.row(step);
            std::vector<double> out;
            for (int idx : electrode_subset(electrode_count(m))) out.push_back(r[idx]);
            return out;
        }
    }
}

FeatureWindow::FeatureWindow(const CollectionSetup& setup, bool inject)
    : setup_(&setup), inject_(inject), capacity_(setup.frames_per_window()) {}

void FeatureWindow::push(SensorFrame frame) {
    if (full()) frames_.erase(frames_.begin());
    frames_.push_back(std::move(frame));
}

std::vector<double> FeatureWindow::bands() const {
    if (!full()) throw LengthError("feature window not yet filled");
    std::vector<double> joined;
    for (const auto& f : frames_) joined.insert(joined.end(), f.p_ac.begin(), f.p_ac.end());
    const auto spec = spectrum(joined, setup_->window, setup_->sensor.injection.sample_rate,
                               frames_.back().frame_index);
    return band_features(spec, setup_->window);
}

std::vector<double> FeatureWindow::electrodes(int subset) const {
    return time_average_electrodes(frames_, subset);
}

std::vector<double> FeatureWindow::feature(Method m) const {
    if (is_electrode_method(m)) return electrodes(electrode_count(m));
    if ((m == Method::injection) != inject_)
        throw ConfigError("feature window channel does not match method");
    return bands();
}

std::uint64_t frame_seed(std::uint64_t trial_seed, int position) {
    return derive_seed(trial_seed, {0x46, static_cast<std::uint64_t>(position)});
}

std::uint64_t placement_seed(std::uint64_t trial_seed) { return derive_seed(trial_seed, {0x504c}); }

TrialRecord simulate_trial(const TrialSpec& spec, const CollectionSetup& setup) {
    TrialRecord rec;
    rec.spec = spec;
    rec.trajectory = run_loading_trial(spec.f_n, setup.rig, spec.material, derive_seed(spec.seed, {0x52}));
    rec.placement = draw_placement(setup.sensor.electrodes, placement_seed(spec.seed));
    const auto place = rec.placement;

    const int preroll = setup.frames_per_window() - 1;
    const double frame_s = setup.rig.sample_window_T;
    FeatureWindow injected(setup, true);
    FeatureWindow passive(setup, false);
    const auto& rest = rec.trajectory.states.front();
    // Pre-roll frames at the rest state so the first step already has a full window.
    for (int p = 0; p < preroll; ++p) {
        const auto seed = frame_seed(spec.seed, p);
        injected.push(synthesize_frame(rest, spec.material, setup.sensor, frame_s, true, seed, place));
        passive.push(synthesize_frame(rest, spec.material, setup.sensor, frame_s, false, seed, place));
    }

    const auto bands = band_count(setup.window);
    const auto steps = static_cast<std::size_t>(setup.rig.total_steps);
    rec.injection_bands = Matrix(steps, bands);
    rec.vibrotactile_bands = Matrix(steps, bands);
    rec.electrodes = Matrix(steps, 19);
    for (std::size_t k = 0; k < steps; ++k) {
        const auto& state = rec.trajectory.states[k + 1];
        const auto seed = frame_seed(spec.seed, preroll + static_cast<int>(k));
        injected.push(synthesize_frame(state, spec.material, setup.sensor, frame_s, true, seed, place));
        passive.push(synthesize_frame(state, spec.material, setup.sensor, frame_s, false, seed, place));
        const auto inj = injected.bands();
        const auto vib = passive.bands();
        const auto el = injected.electrodes(19);
        std::copy(inj.begin(), inj.end(), rec.injection_bands.row(k).begin());
        std::copy(vib.begin(), vib.end(), rec.vibrotactile_bands.row(k).begin());
        std::copy(el.begin(), el.end(), rec.electrodes.row(k).begin());
    }

    const auto y = rec.trajectory.y_trace();
    rec.gross_slip_step = detect_gross_slip(y, setup.rig);
    if (rec.gross_slip_step) rec.f_t_slip = rec.trajectory.states[*rec.gross_slip_step + 1].f_t_peak;
    return rec;
}

std::vector<TrialRecord> simulate_trials(std::span<const TrialSpec> specs, const CollectionSetup& setup) {
    std::vector<TrialRecord> out(specs.size());
    const auto n = static_cast<long>(specs.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = simulate_trial(specs[static_cast<std::size_t>(i)], setup);
    return out;
}

std::vector<TrialRecord> simulate_trials_reference(std::span<const TrialSpec> specs,
                                                   const CollectionSetup& setup) {
    std::vector<TrialRecord> out;
    out.reserve(specs.size());
    for (const auto& s : specs) out.push_back(simulate_trial(s, setup));
    return out;
}

std::vector<TrialSpec> plan_trials(std::span<const MaterialSpec> materials, int trials_per_material,
                                   const RigConfig& rig, std::uint64_t master_seed) {
    if (trials_per_material < 1) throw ConfigError("trials_per_material must be >= 1");
    std::vector<TrialSpec> out;
    int id = 0;
    for (const auto& m : materials) {
        m.validate();
        for (int t = 0; t < trials_per_material; ++t, ++id) {
            TrialSpec s;
            s.trial_id = id;
            s.material = m;
            s.seed = derive_seed(master_seed, {0x7472, static_cast<std::uint64_t>(id)});
            s.f_n = randomize_f_n(rig, derive_seed(s.seed, {0x666e}));
            out.push_back(std::move(s));
        }
    }
    return out;
}

LabeledPlan plan_labeled_trials(std::span<const MaterialSpec> materials, int trials_per_material,
                                const RigConfig& rig, std::uint64_t master_seed, int max_attempts_factor) {
    if (trials_per_material < 1) throw ConfigError("trials_per_material must be >= 1");
    if (max_attempts_factor < 1) throw ConfigError("max_attempts_factor must be >= 1");
    LabeledPlan plan;
    int id = 0;
    for (std::size_t mi = 0; mi < materials.size(); ++mi) {
        const auto& m = materials[mi];
        m.validate();
        int accepted = 0;
        const int cap = max_attempts_factor * trials_per_material;
        for (int a = 0; a < cap && accepted < trials_per_material; ++a) {
            ++plan.attempts;
            TrialSpec s;
            s.material = m;
            s.seed = derive_seed(master_seed, {0x7472, mi, static_cast<std::uint64_t>(a)});
            s.f_n = randomize_f_n(rig, derive_seed(s.seed, {0x666e}));
            const auto traj = run_loading_trial(s.f_n, rig, m, derive_seed(s.seed, {0x52}));
            if (!detect_gross_slip(traj.y_trace(), rig)) {
                ++plan.rejected;
                continue;
            }
            s.trial_id = id++;
            plan.specs.push_back(std::move(s));
            ++accepted;
        }
        if (accepted < trials_per_material)
            warn("material " + m.name + ": only " + std::to_string(accepted) + " of " +
                 std::to_string(trials_per_material) + " trials reached gross slip within " +
                 std::to_string(cap) + " draws");
    }
    if (plan.rejected > 0)
        warn(std::to_string(plan.rejected) + " of " + std::to_string(plan.attempts) +
             " drawn grips never reached gross slip and were not collected");
    return plan;
}

Dataset build_dataset(std::span<const TrialRecord> trials, Method method) {
    Dataset ds;
    ds.method = method;
    for (const auto& t : trials) {
        if (!t.gross_slip_step) {
            warn("trial " + std::to_string(t.spec.trial_id) + " never reached gross slip; skipped");
            continue;
        }
        const auto labels = t.labels();
        for (std::size_t k = 0; k < labels.size(); ++k) {
            ds.features.append_row(t.feature(method, k));
            ds.labels.push_back(labels[k]);
            ds.trial_ids.push_back(t.spec.trial_id);
            ds.materials.push_back(t.spec.material.name);
            ds.f_n.push_back(t.spec.f_n);
            ds.steps.push_back(static_cast<int>(k));
            ds.s_true.push_back(t.trajectory.states[k + 1].stick_ratio_true);
        }
    }
    return ds;
}

}  // namespace vislip
