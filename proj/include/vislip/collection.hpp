#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vislip/contact.hpp"
#include "vislip/features.hpp"
#include "vislip/medium.hpp"

namespace vislip {

/// Everything needed to turn a rig trajectory into sensor features.
struct CollectionSetup {
    RigConfig rig;
    SensorModel sensor;
    WindowSpec window;

    int frames_per_window() const;
    void validate() const;
};

struct TrialSpec {
    int trial_id = 0;
    MaterialSpec material;
    double f_n = 0.0;  // kPa
    std::uint64_t seed = 0;
};

/// One simulated loading trial with per-step features for every method.
struct TrialRecord {
    TrialSpec spec;
    Trajectory trajectory;
    ElectrodePoint placement{0.0, 0.0};
    Matrix injection_bands;     // steps x bands
    Matrix vibrotactile_bands;  // steps x bands
    Matrix electrodes;          // steps x 19, window-averaged
    std::optional<std::size_t> gross_slip_step;
    double f_t_slip = 0.0;

    int steps() const { return static_cast<int>(injection_bands.rows()); }
    std::vector<double> labels() const;  // pseudo stick ratio per step; empty if no gross slip
    std::vector<double> feature(Method m, std::size_t step) const;
};

/// Rolling window of frames feeding one feature vector; shared with the control loop.
class FeatureWindow {
public:
    FeatureWindow(const CollectionSetup& setup, bool inject);

    void push(SensorFrame frame);
    bool full() const { return static_cast<int>(frames_.size()) == capacity_; }
    std::vector<double> bands() const;
    std::vector<double> electrodes(int subset) const;
    std::vector<double> feature(Method m) const;

private:
    const CollectionSetup* setup_;
    bool inject_;
    int capacity_;
    std::vector<SensorFrame> frames_;
};

std::uint64_t frame_seed(std::uint64_t trial_seed, int position);
std::uint64_t placement_seed(std::uint64_t trial_seed);

TrialRecord simulate_trial(const TrialSpec& spec, const CollectionSetup& setup);

/// Trial-parallel kernel (OpenMP) and its serial reference. Identical output.
std::vector<TrialRecord> simulate_trials(std::span<const TrialSpec> specs, const CollectionSetup& setup);
std::vector<TrialRecord> simulate_trials_reference(std::span<const TrialSpec> specs,
                                                   const CollectionSetup& setup);

/// Trial plan: `trials_per_material` trials for each material, grip drawn per trial.
std::vector<TrialSpec> plan_trials(std::span<const MaterialSpec> materials, int trials_per_material,
                                   const RigConfig& rig, std::uint64_t master_seed);

struct LabeledPlan {
    std::vector<TrialSpec> specs;
    int attempts = 0;  // grips drawn, including those that never reached gross slip
    int rejected = 0;
};

/// Draws grips per material until `trials_per_material` of them reach gross
/// slip (only those can be labeled). Screening runs the contact model only.
/// Gives up on a material after `max_attempts_factor` x trials_per_material draws.
LabeledPlan plan_labeled_trials(std::span<const MaterialSpec> materials, int trials_per_material,
                                const RigConfig& rig, std::uint64_t master_seed, int max_attempts_factor = 20);

/// One sample per label interval for every trial that reached gross slip.
Dataset build_dataset(std::span<const TrialRecord> trials, Method method);

}  // namespace vislip
