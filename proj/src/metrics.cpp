#include "vislip/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <boost/math/distributions/students_t.hpp>

namespace vislip {

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw LengthError("Welch t-test needs at least 2 samples per group");
    const double va = sample_variance(a), vb = sample_variance(b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    if (va == 0.0 && vb == 0.0) throw DegenerateError("both samples have zero variance");
    const double sa = va / na, sb = vb / nb;
    WelchResult r;
    r.t = (mean(a) - mean(b)) / std::sqrt(sa + sb);
    r.df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    if (r.t == 0.0) {
        r.p = 1.0;
        return r;
    }
    const boost::math::students_t dist(r.df);
    r.p = std::clamp(2.0 * boost::math::cdf(dist, -std::abs(r.t)), 0.0, 1.0);
    return r;
}

double rmse(std::span<const double> errors) {
    if (errors.empty()) throw LengthError("RMSE of an empty error set");
    double acc = 0.0;
    for (double e : errors) acc += e * e;
    return std::sqrt(acc / static_cast<double>(errors.size()));
}

double worst10_rmse(std::span<const double> errors) {
    if (errors.empty()) throw LengthError("RMSE of an empty error set");
    std::vector<double> a;
    a.reserve(errors.size());
    for (double e : errors) a.push_back(std::abs(e));
    const auto k = static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(a.size())));
    std::partial_sort(a.begin(), a.begin() + static_cast<long>(k), a.end(), std::greater<>());
    return rmse(std::span<const double>(a.data(), k));
}

nlohmann::json MetricsReport::to_json() const {
    nlohmann::json j = {
        {"method", method},
        {"rmse", rmse},
        {"worst10_rmse", worst10_rmse},
        {"per_material_rmse", per_material_rmse},
        {"n_test", n_test},
        {"max_err_high_s", max_err_high_s},
        {"max_err_low_s", max_err_low_s},
    };
    if (!compared_to.empty())
        j["t_test"] = {{"test", "welch_unpaired"}, {"against", compared_to}, {"t", t_stat}, {"p", p_value}};
    return j;
}

Evaluation evaluate(const SvrModel& model, const Dataset& test_set) {
    if (test_set.size() == 0) throw LengthError("evaluation needs a non-empty test set");
    Evaluation ev;
    ev.predictions = predict_batch(model, test_set.features);
    std::vector<double> err(test_set.size());
    std::map<std::string, std::vector<double>> by_material;
    auto& rep = ev.report;
    rep.method = std::string(method_name(test_set.method));
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        err[i] = ev.predictions[i] - test_set.labels[i];
        ev.abs_errors.push_back(std::abs(err[i]));
        by_material[test_set.materials[i]].push_back(err[i]);
        double& slot = test_set.labels[i] >= 0.7 ? rep.max_err_high_s : rep.max_err_low_s;
        slot = std::max(slot, std::abs(err[i]));
    }
    rep.rmse = rmse(err);
    rep.worst10_rmse = worst10_rmse(err);
    for (const auto& [m, e] : by_material) rep.per_material_rmse[m] = rmse(e);
    rep.n_test = test_set.size();
    return ev;
}

void compare_errors(Evaluation& target, const Evaluation& reference, const std::string& reference_name) {
    const auto w = welch_t_test(target.abs_errors, reference.abs_errors);
    target.report.t_stat = w.t;
    target.report.p_value = w.p;
    target.report.compared_to = reference_name;
}

}  // namespace vislip
