#include "vislip/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace vislip {

using nlohmann::json;

namespace {

// Reads known keys into fields, leaving absent ones untouched; finish() rejects leftovers.
class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
    }

    template <class T>
    Reader& opt(const char* key, T& value) {
        used_.insert(key);
        if (j_.contains(key)) {
            try {
                value = j_.at(key).get<T>();
            } catch (const json::exception& e) {
                throw ConfigError(where_ + "." + key + ": " + e.what());
            }
        }
        return *this;
    }

    const json* sub(const char* key) {
        used_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    std::string path(const char* key) const { return where_ + "." + key; }

    void finish() const {
        for (const auto& item : j_.items())
            if (!used_.count(item.key())) throw ConfigError("unknown config key " + where_ + "." + item.key());
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> used_;
};

json rig_json(const RigConfig& r) {
    return {{"spring_constant", r.spring_constant}, {"actuator_step", r.actuator_step},
            {"total_steps", r.total_steps},         {"f_n_grid_lo", r.f_n_grid_lo},
            {"f_n_grid_hi", r.f_n_grid_hi},         {"f_n_grid_step", r.f_n_grid_step},
            {"gross_slip_disp", r.gross_slip_disp}, {"gross_slip_window", r.gross_slip_window},
            {"sample_window_T", r.sample_window_T}, {"force_per_kpa", r.force_per_kpa},
            {"kinetic_ratio", r.kinetic_ratio},     {"slip_jump_lo", r.slip_jump_lo},
            {"slip_jump_hi", r.slip_jump_hi}};
}

void read_rig(const json& j, RigConfig& r) {
    Reader(j, "rig")
        .opt("spring_constant", r.spring_constant)
        .opt("actuator_step", r.actuator_step)
        .opt("total_steps", r.total_steps)
        .opt("f_n_grid_lo", r.f_n_grid_lo)
        .opt("f_n_grid_hi", r.f_n_grid_hi)
        .opt("f_n_grid_step", r.f_n_grid_step)
        .opt("gross_slip_disp", r.gross_slip_disp)
        .opt("gross_slip_window", r.gross_slip_window)
        .opt("sample_window_T", r.sample_window_T)
        .opt("force_per_kpa", r.force_per_kpa)
        .opt("kinetic_ratio", r.kinetic_ratio)
        .opt("slip_jump_lo", r.slip_jump_lo)
        .opt("slip_jump_hi", r.slip_jump_hi)
        .finish();
}

json sensor_json(const SensorModel& s) {
    const auto& i = s.injection;
    const auto& t = s.transfer;
    const auto& v = s.vibrotactile;
    const auto& e = s.electrodes;
    return {
        {"injection",
         {{"intensity_db", i.intensity_db}, {"band_lo", i.band_lo}, {"band_hi", i.band_hi},
          {"sample_rate", i.sample_rate}, {"enabled", i.enabled}}},
        {"transfer",
         {{"base_gain", t.base_gain}, {"base_rolloff_hz", t.base_rolloff_hz}, {"slip_peak", t.slip_peak},
          {"slip_center_hz", t.slip_center_hz}, {"slip_width_octaves", t.slip_width_octaves},
          {"fn_damping", t.fn_damping}, {"fn_ref_kpa", t.fn_ref_kpa}, {"hf_damping", t.hf_damping},
          {"noise_floor_db", t.noise_floor_db}, {"measurement_noise", t.measurement_noise}}},
        {"vibrotactile",
         {{"noise_floor_db", v.noise_floor_db}, {"burst_gain", v.burst_gain}, {"burst_decay_s", v.burst_decay_s},
          {"micro_rate", v.micro_rate}, {"micro_magnitude", v.micro_magnitude}}},
        {"electrodes",
         {{"patch_radius_ref", e.patch_radius_ref}, {"f_ref_kpa", e.f_ref_kpa}, {"shear_skew", e.shear_skew},
          {"shear_exponent", e.shear_exponent}, {"noise_std", e.noise_std}, {"dc_noise_std", e.dc_noise_std},
          {"placement_jitter", e.placement_jitter}}},
    };
}

void read_sensor(const json& j, SensorModel& s) {
    Reader r(j, "sensor");
    if (auto* x = r.sub("injection")) {
        auto& i = s.injection;
        Reader(*x, r.path("injection"))
            .opt("intensity_db", i.intensity_db)
            .opt("band_lo", i.band_lo)
            .opt("band_hi", i.band_hi)
            .opt("sample_rate", i.sample_rate)
            .opt("enabled", i.enabled)
            .finish();
    }
    if (auto* x = r.sub("transfer")) {
        auto& t = s.transfer;
        Reader(*x, r.path("transfer"))
            .opt("base_gain", t.base_gain)
            .opt("base_rolloff_hz", t.base_rolloff_hz)
            .opt("slip_peak", t.slip_peak)
            .opt("slip_center_hz", t.slip_center_hz)
            .opt("slip_width_octaves", t.slip_width_octaves)
            .opt("fn_damping", t.fn_damping)
            .opt("fn_ref_kpa", t.fn_ref_kpa)
            .opt("hf_damping", t.hf_damping)
            .opt("noise_floor_db", t.noise_floor_db)
            .opt("measurement_noise", t.measurement_noise)
            .finish();
    }
    if (auto* x = r.sub("vibrotactile")) {
        auto& v = s.vibrotactile;
        Reader(*x, r.path("vibrotactile"))
            .opt("noise_floor_db", v.noise_floor_db)
            .opt("burst_gain", v.burst_gain)
            .opt("burst_decay_s", v.burst_decay_s)
            .opt("micro_rate", v.micro_rate)
            .opt("micro_magnitude", v.micro_magnitude)
            .finish();
    }
    if (auto* x = r.sub("electrodes")) {
        auto& e = s.electrodes;
        Reader(*x, r.path("electrodes"))
            .opt("patch_radius_ref", e.patch_radius_ref)
            .opt("f_ref_kpa", e.f_ref_kpa)
            .opt("shear_skew", e.shear_skew)
            .opt("shear_exponent", e.shear_exponent)
            .opt("noise_std", e.noise_std)
            .opt("dc_noise_std", e.dc_noise_std)
            .opt("placement_jitter", e.placement_jitter)
            .finish();
    }
    r.finish();
}

json window_json(const WindowSpec& w) {
    return {{"window_T", w.window_T},     {"label_interval", w.label_interval}, {"hop", w.hop},
            {"band_width", w.band_width}, {"band_lo", w.band_lo},               {"band_hi", w.band_hi}};
}

void read_window(const json& j, WindowSpec& w) {
    Reader(j, "window")
        .opt("window_T", w.window_T)
        .opt("label_interval", w.label_interval)
        .opt("hop", w.hop)
        .opt("band_width", w.band_width)
        .opt("band_lo", w.band_lo)
        .opt("band_hi", w.band_hi)
        .finish();
}

json material_json(const MaterialSpec& m) {
    return {{"name", m.name}, {"mu", m.mu}, {"shear_stiffness", m.shear_stiffness}, {"damping_scale", m.damping_scale}};
}

MaterialSpec read_material(const json& j) {
    if (j.is_string()) return material_preset(j.get<std::string>());
    MaterialSpec m;
    if (j.is_object() && j.contains("name") && j.at("name").is_string()) {
        // Presets can be partially overridden by name.
        try {
            m = material_preset(j.at("name").get<std::string>());
        } catch (const ConfigError&) {
            m.name = j.at("name").get<std::string>();
        }
    }
    Reader(j, "materials[]")
        .opt("name", m.name)
        .opt("mu", m.mu)
        .opt("shear_stiffness", m.shear_stiffness)
        .opt("damping_scale", m.damping_scale)
        .finish();
    m.validate();
    return m;
}

json params_json(const SvrParams& p) {
    json j = {{"kernel", kernel_name(p.kernel)}, {"c", p.c}, {"epsilon", p.epsilon}};
    if (p.kernel == KernelType::rbf) j["gamma"] = p.gamma;
    return j;
}

SvrParams read_params(const json& j) {
    SvrParams p;
    std::string kernel = "rbf";
    Reader(j, "grid[]").opt("kernel", kernel).opt("c", p.c).opt("epsilon", p.epsilon).opt("gamma", p.gamma).finish();
    p.kernel = parse_kernel(kernel);
    return p;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (materials.empty()) throw ConfigError("at least one material is required");
    if (trials_per_material < 1) throw ConfigError("trials_per_material must be >= 1");
    if (max_attempts_factor < 1) throw ConfigError("max_attempts_factor must be >= 1");
    if (methods.empty()) throw ConfigError("at least one method is required");
    for (const auto& m : materials) m.validate();
    setup.validate();
    for (const auto& p : grid) p.validate();
    if (selection.folds < 2) throw ConfigError("model_selection.folds must be >= 2");
    if (!(selection.test_fraction > 0.0 && selection.test_fraction < 1.0))
        throw ConfigError("model_selection.test_fraction must be in (0,1)");
    controller.validate();
    if (controller.max_steps > setup.rig.total_steps)
        throw ConfigError("controller.max_steps exceeds rig.total_steps");
    weights.validate();
    if (stabilization.trials < 1) throw ConfigError("stabilization.trials must be >= 1");
    for (const auto& name : stabilization.materials) {
        bool found = false;
        for (const auto& m : materials) found = found || m.name == name;
        if (!found) throw ConfigError("stabilization material " + name + " is not an experiment material");
    }
}

std::vector<SvrParams> ExperimentConfig::grid_for(std::size_t dim) const {
    return grid.empty() ? default_grid(dim) : grid;
}

json ExperimentConfig::to_json() const {
    json mats = json::array();
    for (const auto& m : materials) mats.push_back(material_json(m));
    json methods_j = json::array();
    for (auto m : methods) methods_j.push_back(std::string(method_name(m)));
    json grid_j = json::array();
    for (const auto& p : grid) grid_j.push_back(params_json(p));
    const auto& c = controller;
    return {
        {"profile", profile},
        {"seed", seed},
        {"materials", mats},
        {"trials_per_material", trials_per_material},
        {"max_attempts_factor", max_attempts_factor},
        {"methods", methods_j},
        {"rig", rig_json(setup.rig)},
        {"sensor", sensor_json(setup.sensor)},
        {"window", window_json(setup.window)},
        {"grid", grid.empty() ? json("default") : grid_j},
        {"model_selection",
         {{"folds", selection.folds},
          {"max_train_samples", selection.max_train_samples},
          {"test_fraction", selection.test_fraction}}},
        {"controller",
         {{"k", c.k}, {"s_d", c.s_d}, {"f_n_init", c.f_n_init}, {"f_n_safety", c.f_n_safety},
          {"f_n_floor", c.f_n_floor}, {"y_fail", c.y_fail}, {"max_steps", c.max_steps}}},
        {"weights", {{"w1", weights.w1}, {"w2", weights.w2}, {"w3", weights.w3}, {"floor", weights.floor}}},
        {"stabilization", {{"trials", stabilization.trials}, {"materials", stabilization.materials}}},
        {"output_dir", output_dir},
    };
}

ExperimentConfig ExperimentConfig::from_json(const json& j, const ExperimentConfig& base) {
    ExperimentConfig cfg = base;
    Reader r(j, "config");
    r.opt("seed", cfg.seed)
        .opt("trials_per_material", cfg.trials_per_material)
        .opt("max_attempts_factor", cfg.max_attempts_factor)
        .opt("output_dir", cfg.output_dir);
    if (auto* p = r.sub("profile")) {
        // A profile key switches the base before anything else is applied.
        const auto name = p->get<std::string>();
        if (name != cfg.profile) return from_json(j, profile_config(name));
    }
    if (auto* x = r.sub("materials")) {
        if (!x->is_array()) throw ConfigError("materials must be an array");
        cfg.materials.clear();
        for (const auto& m : *x) cfg.materials.push_back(read_material(m));
    }
    if (auto* x = r.sub("methods")) {
        cfg.methods.clear();
        if (x->is_string()) {
            cfg.methods = parse_method_list(x->get<std::string>());
        } else {
            for (const auto& m : *x) cfg.methods.push_back(parse_method(m.get<std::string>()));
        }
    }
    if (auto* x = r.sub("rig")) read_rig(*x, cfg.setup.rig);
    if (auto* x = r.sub("sensor")) read_sensor(*x, cfg.setup.sensor);
    if (auto* x = r.sub("window")) read_window(*x, cfg.setup.window);
    if (auto* x = r.sub("grid")) {
        cfg.grid.clear();
        if (x->is_string()) {
            if (x->get<std::string>() != "default") throw ConfigError("grid must be \"default\" or a list");
        } else {
            for (const auto& p : *x) cfg.grid.push_back(read_params(p));
        }
    }
    if (auto* x = r.sub("model_selection"))
        Reader(*x, "model_selection")
            .opt("folds", cfg.selection.folds)
            .opt("max_train_samples", cfg.selection.max_train_samples)
            .opt("test_fraction", cfg.selection.test_fraction)
            .finish();
    if (auto* x = r.sub("controller")) {
        auto& c = cfg.controller;
        Reader(*x, "controller")
            .opt("k", c.k)
            .opt("s_d", c.s_d)
            .opt("f_n_init", c.f_n_init)
            .opt("f_n_safety", c.f_n_safety)
            .opt("f_n_floor", c.f_n_floor)
            .opt("y_fail", c.y_fail)
            .opt("max_steps", c.max_steps)
            .finish();
    }
    if (auto* x = r.sub("weights"))
        Reader(*x, "weights")
            .opt("w1", cfg.weights.w1)
            .opt("w2", cfg.weights.w2)
            .opt("w3", cfg.weights.w3)
            .opt("floor", cfg.weights.floor)
            .finish();
    if (auto* x = r.sub("stabilization"))
        Reader(*x, "stabilization")
            .opt("trials", cfg.stabilization.trials)
            .opt("materials", cfg.stabilization.materials)
            .finish();
    r.finish();
    cfg.validate();
    return cfg;
}

std::string ExperimentConfig::hash() const {
    // Where a run is written does not change what it computes.
    auto j = to_json();
    j.erase("output_dir");
    return hex64(fnv1a64(j.dump()));
}

ExperimentConfig profile_config(std::string_view name) {
    ExperimentConfig cfg;
    if (name == "full") {
        cfg.profile = "full";
        cfg.materials.assign(material_presets().begin(), material_presets().end());
        cfg.trials_per_material = 100;
        cfg.output_dir = "runs/full";
    } else if (name == "demo") {
        cfg.profile = "demo";
        cfg.materials = {material_preset("pla"), material_preset("tpu")};
        cfg.trials_per_material = 10;
        cfg.output_dir = "runs/demo";
    } else {
        throw ConfigError("unknown profile '" + std::string(name) + "' (expected demo or full)");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path, std::string_view default_profile) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return ExperimentConfig::from_json(j, profile_config(default_profile));
}

}  // namespace vislip
