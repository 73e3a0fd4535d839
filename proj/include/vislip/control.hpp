#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "vislip/collection.hpp"
#include "vislip/svr.hpp"

namespace vislip {

struct ControllerConfig {
    double k = 0.6;           // kPa per unit stick-ratio error
    double s_d = 0.3;
    double f_n_init = 2.0;    // kPa
    double f_n_safety = 6.0;  // kPa
    double f_n_floor = 0.5;   // kPa, keeps the finger in contact
    double y_fail = 1.5;      // mm
    int max_steps = 450;

    void validate() const;
};

struct ScoreWeights {
    double w1 = 0.1;
    double w2 = 10.0;
    double w3 = 1.0;
    double floor = 1e-3;  // guards the y and F_N denominators

    void validate() const;
};

/// a = k (s_est - s_d).
double control_action(double s_est, const ControllerConfig& cfg);
/// f_n - a, clamped to [f_n_floor, f_n_safety].
double apply_action(double f_n, double action, const ControllerConfig& cfg);

enum class Policy { proportional, no_action };
enum class Estimator { model, oracle };

struct StabilizationSetup {
    const CollectionSetup* collection = nullptr;
    MaterialSpec material;
    Method method = Method::injection;
    Estimator estimator = Estimator::model;
    const SvrModel* model = nullptr;  // required for Estimator::model
    Policy policy = Policy::proportional;
};

struct TrialOutcome {
    bool success = false;
    double final_y = 0.0;
    double final_f_n = 0.0;
    int steps = 0;
    std::vector<double> s_trace;       // estimate used by the controller
    std::vector<double> s_true_trace;
    std::vector<double> f_n_trace;     // grip applied during each step
    std::vector<double> y_trace;
    double score = 0.0;                // per-trial score, filled by score()
    std::uint64_t seed = 0;
};

/// Closed-loop run under the data-collection loading schedule. Stops early on
/// failure (y > y_fail or f_n > f_n_safety).
TrialOutcome run_stabilization(const StabilizationSetup& setup, const ControllerConfig& cfg, std::uint64_t seed);

struct ScoreResult {
    double score = 0.0;
    double success_rate = 0.0;
    double mean_y = 0.0;
    double mean_f_n = 0.0;
    std::vector<double> per_trial;
};

/// (w1 + success_rate) (w2 / mean_y + w3 / mean_f_n).
double score_value(double success_rate, double mean_y, double mean_f_n, const ScoreWeights& w);
ScoreResult score(std::span<const TrialOutcome> outcomes, const ScoreWeights& w);

/// Fills each outcome's per-trial score.
void assign_scores(std::span<TrialOutcome> outcomes, const ScoreWeights& w);

}  // namespace vislip
