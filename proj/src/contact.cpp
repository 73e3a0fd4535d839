#include "vislip/contact.hpp"

#include <algorithm>
#include <cmath>

namespace vislip {

void MaterialSpec::validate() const {
    if (!(mu > 0.0)) throw ConfigError("material '" + name + "': mu must be > 0");
    if (!(shear_stiffness > 0.0))
        throw ConfigError("material '" + name + "': shear_stiffness must be > 0");
    if (!(damping_scale > 0.0))
        throw ConfigError("material '" + name + "': damping_scale must be > 0");
}

const std::array<MaterialSpec, 5>& material_presets() {
    static const std::array<MaterialSpec, 5> presets{{
        {"pla", 0.80, 1.60, 1.00},
        {"abs", 0.72, 1.80, 0.90},
        {"petg", 0.85, 1.50, 1.10},
        {"tpu", 0.95, 1.45, 1.60},
        {"nylon", 0.70, 2.00, 0.80},
    }};
    return presets;
}

const MaterialSpec& material_preset(std::string_view name) {
    for (const auto& m : material_presets())
        if (m.name == name) return m;
    throw ConfigError("unknown material preset '" + std::string(name) + "'");
}

std::vector<double> RigConfig::f_n_grid() const {
    std::vector<double> grid;
    if (!(f_n_grid_step > 0.0) || f_n_grid_hi < f_n_grid_lo) return grid;
    const auto count = static_cast<int>(std::floor((f_n_grid_hi - f_n_grid_lo) / f_n_grid_step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) grid.push_back(f_n_grid_lo + f_n_grid_step * i);
    return grid;
}

void RigConfig::validate() const {
    if (!(spring_constant > 0.0)) throw ConfigError("rig.spring_constant must be > 0");
    if (!(actuator_step >= 0.0)) throw ConfigError("rig.actuator_step must be >= 0");
    if (total_steps < 1) throw ConfigError("rig.total_steps must be >= 1");
    if (!(f_n_grid_lo > 0.0)) throw ConfigError("rig.f_n_grid_lo must be > 0");
    if (f_n_grid().empty()) throw ConfigError("rig: empty f_n grid");
    if (!(gross_slip_disp > 0.0) || !(gross_slip_window > 0.0))
        throw ConfigError("rig: gross-slip threshold must be positive");
    if (!(sample_window_T > 0.0)) throw ConfigError("rig.sample_window_T must be > 0");
    if (!(force_per_kpa > 0.0)) throw ConfigError("rig.force_per_kpa must be > 0");
    if (!(kinetic_ratio > 0.0 && kinetic_ratio < 1.0))
        throw ConfigError("rig.kinetic_ratio must lie in (0,1)");
    if (!(slip_jump_lo > 0.0 && slip_jump_hi >= slip_jump_lo))
        throw ConfigError("rig: slip jump range invalid");
}

double stick_ratio_partial_slip(double f_t, double f_n, double mu) {
    if (!(f_n > 0.0)) throw DomainError("stick ratio undefined without contact (f_n <= 0)");
    if (!(mu > 0.0)) throw DomainError("stick ratio requires mu > 0");
    if (f_t < 0.0) throw DomainError("tangential force must be non-negative");
    const double limit = mu * f_n;
    if (f_t >= limit) return 0.0;
    return std::cbrt(std::pow(1.0 - f_t / limit, 2.0));
}

double normal_force(double f_n_kpa, const RigConfig& rig) { return f_n_kpa * rig.force_per_kpa; }

ContactState initial_state(double f_n_kpa, const RigConfig&, const MaterialSpec&) {
    ContactState s;
    s.f_n = f_n_kpa;
    return s;
}

ContactState step_rig(const ContactState& state, const RigConfig& rig,
                      const MaterialSpec& material, Rng& rng, double actuator_delta) {
    ContactState next = state;
    next.step = state.step + 1;
    next.t = state.t + rig.sample_window_T;
    next.gross_slip_event = false;
    next.slip_jump = 0.0;

    const double delta = std::clamp(actuator_delta, 0.0, std::max(0.0, rig.travel() - state.actuator_x));
    next.actuator_x = state.actuator_x + delta;

    // Spring in series with the fingertip's shear compliance: the actuator motion
    // splits into spring stretch and elastic micro-displacement of the object.
    const double k_s = rig.spring_constant;
    const double k_sh = material.shear_stiffness;
    const double k_series = k_s * k_sh / (k_s + k_sh);
    const double f_load = state.f_t + k_series * delta;
    const double f_static = material.mu * normal_force(state.f_n, rig);

    if (f_load >= f_static) {
        const double f_kinetic = rig.kinetic_ratio * f_static;
        std::uniform_real_distribution<double> u(rig.slip_jump_lo, rig.slip_jump_hi);
        const double jump = (f_static - f_kinetic) / k_s * u(rng);
        next.f_t_peak = std::max(f_static, std::min(state.f_t, f_load));
        next.f_t = f_kinetic;
        next.slip_travel = state.slip_travel + jump;
        next.gross_slip_event = true;
        next.slip_jump = jump;
    } else {
        next.f_t = f_load;
        next.f_t_peak = f_load;
    }
    next.y = next.slip_travel + next.f_t / k_sh;
    next.stick_ratio_true =
        stick_ratio_partial_slip(next.f_t, normal_force(next.f_n, rig), material.mu);
    return next;
}

ContactState step_rig(const ContactState& state, const RigConfig& rig,
                      const MaterialSpec& material, Rng& rng) {
    return step_rig(state, rig, material, rng, rig.actuator_step);
}

double randomize_f_n(const RigConfig& rig, std::uint64_t seed) {
    const auto grid = rig.f_n_grid();
    if (grid.empty()) throw ConfigError("empty f_n candidate grid");
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
    return grid[pick(rng)];
}

std::vector<double> Trajectory::y_trace() const {
    std::vector<double> y;
    if (states.size() > 1) y.reserve(states.size() - 1);
    for (std::size_t i = 1; i < states.size(); ++i) y.push_back(states[i].y);
    return y;
}

Trajectory run_loading_trial(double f_n_kpa, const RigConfig& rig, const MaterialSpec& material,
                             std::uint64_t seed) {
    Rng rng(seed);
    Trajectory traj;
    traj.states.reserve(static_cast<std::size_t>(rig.total_steps) + 1);
    traj.states.push_back(initial_state(f_n_kpa, rig, material));
    for (int k = 0; k < rig.total_steps; ++k)
        traj.states.push_back(step_rig(traj.states.back(), rig, material, rng));
    return traj;
}

}  // namespace vislip
