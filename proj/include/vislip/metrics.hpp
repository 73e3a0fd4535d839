#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vislip/features.hpp"
#include "vislip/svr.hpp"

namespace vislip {

struct WelchResult {
    double t = 0.0;
    double p = 1.0;
    double df = 0.0;
};

/// Unpaired Welch t-test, two-sided p from Student's t with Welch-Satterthwaite df.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

double rmse(std::span<const double> errors);
/// RMSE over the ceil(10%) largest absolute errors.
double worst10_rmse(std::span<const double> errors);

struct MetricsReport {
    std::string method;
    double rmse = 0.0;
    double worst10_rmse = 0.0;
    std::map<std::string, double> per_material_rmse;
    double t_stat = 0.0;   // vs. the reference method's absolute errors, when compared
    double p_value = 1.0;
    std::string compared_to;
    std::size_t n_test = 0;
    double max_err_high_s = 0.0;  // label s in [0.7, 1.0]
    double max_err_low_s = 0.0;   // label s in [0, 0.7)

    nlohmann::json to_json() const;
};

struct Evaluation {
    MetricsReport report;
    std::vector<double> predictions;
    std::vector<double> abs_errors;
};

Evaluation evaluate(const SvrModel& model, const Dataset& test_set);

/// Fill t_stat/p_value of `target` from per-sample absolute errors.
void compare_errors(Evaluation& target, const Evaluation& reference, const std::string& reference_name);

}  // namespace vislip
