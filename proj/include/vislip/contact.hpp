#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vislip/common.hpp"

namespace vislip {

/// Object material. `shear_stiffness` is the fingertip's tangential compliance
/// constant against this surface; `damping_scale` multiplies spectral damping.
struct MaterialSpec {
    std::string name;
    double mu = 0.8;
    double shear_stiffness = 1.6;  // N/mm
    double damping_scale = 1.0;

    void validate() const;
};

/// The five built-in specimens (identical convex geometry, different surfaces).
const std::array<MaterialSpec, 5>& material_presets();
const MaterialSpec& material_preset(std::string_view name);

struct RigConfig {
    double spring_constant = 0.085;        // N/mm, tension spring between actuator and object
    double actuator_step = 23.0 / 450.0;   // mm per control step
    int total_steps = 450;
    double f_n_grid_lo = 1.1;              // kPa
    double f_n_grid_hi = 5.9;
    double f_n_grid_step = 0.4;
    double gross_slip_disp = 0.02;         // mm
    double gross_slip_window = 0.5;        // s
    double sample_window_T = 0.5;          // s per actuator step
    double force_per_kpa = 0.62;           // N of normal load per kPa of DC pressure
    double kinetic_ratio = 0.9;            // kinetic / static friction
    double slip_jump_lo = 0.5;             // gross-slip jump, in units of (F_s - F_k)/spring_constant
    double slip_jump_hi = 1.0;

    double travel() const { return actuator_step * total_steps; }
    std::vector<double> f_n_grid() const;
    void validate() const;
};

struct ContactState {
    double f_n = 0.0;               // kPa
    double f_t = 0.0;               // N
    double stick_ratio_true = 1.0;
    double y = 0.0;                 // mm, object position (elastic + gross slip travel)
    double t = 0.0;                 // s
    int step = 0;                   // actuator steps taken
    double actuator_x = 0.0;        // mm
    double slip_travel = 0.0;       // mm accumulated by gross-slip jumps
    double f_t_peak = 0.0;          // highest tangential load reached during the last step
    bool gross_slip_event = false;  // a gross-slip jump happened during the last step
    double slip_jump = 0.0;         // size of that jump
};

/// Cattaneo-Mindlin stick-area ratio (1 - f_t/(mu f_n))^(2/3); exactly 0 once
/// f_t reaches the sliding boundary. Forces in N.
double stick_ratio_partial_slip(double f_t, double f_n, double mu);

double normal_force(double f_n_kpa, const RigConfig& rig);

ContactState initial_state(double f_n_kpa, const RigConfig& rig, const MaterialSpec& material);

/// Advances the rig by one actuator step of `actuator_delta` mm (clipped to the
/// remaining travel). Uses `state.f_n` as the grip for this step.
ContactState step_rig(const ContactState& state, const RigConfig& rig,
                      const MaterialSpec& material, Rng& rng, double actuator_delta);
ContactState step_rig(const ContactState& state, const RigConfig& rig,
                      const MaterialSpec& material, Rng& rng);

/// Uniform draw from the DC-pressure candidate grid.
double randomize_f_n(const RigConfig& rig, std::uint64_t seed);

/// Full open-loop loading schedule at a fixed grip.
/// `states[0]` is the rest state; `states[k]` the state after actuator step k.
struct Trajectory {
    std::vector<ContactState> states;

    std::vector<double> y_trace() const;  // per step, excluding the rest state
};

Trajectory run_loading_trial(double f_n_kpa, const RigConfig& rig, const MaterialSpec& material,
                             std::uint64_t seed);

}  // namespace vislip
