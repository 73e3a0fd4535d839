#include <doctest.h>

#include "vislip/control.hpp"

using namespace vislip;

namespace {

StabilizationSetup oracle_setup(const CollectionSetup& c, const char* material, Policy policy) {
    StabilizationSetup s;
    s.collection = &c;
    s.material = material_preset(material);
    s.estimator = Estimator::oracle;
    s.policy = policy;
    return s;
}

}  // namespace

TEST_SUITE("control") {

TEST_CASE("proportional action") {
    ControllerConfig cfg;
    CHECK(control_action(cfg.s_d, cfg) == 0.0);
    CHECK(apply_action(3.0, control_action(cfg.s_d, cfg), cfg) == 3.0);
    cfg.k = 2.0;
    CHECK(control_action(0.0, cfg) == doctest::Approx(-0.6));
    CHECK(apply_action(3.0, control_action(0.0, cfg), cfg) == doctest::Approx(3.6));
    CHECK(apply_action(cfg.f_n_safety, -0.5, cfg) == cfg.f_n_safety);
    CHECK(apply_action(cfg.f_n_floor, 0.5, cfg) == cfg.f_n_floor);
    ControllerConfig bad;
    bad.s_d = 1.2;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("score arithmetic") {
    const ScoreWeights w;
    CHECK(score_value(1.0, 1.38, 4.50, w) == doctest::Approx(8.216).epsilon(1e-4));
    CHECK(score_value(0.0, 2.48, 2.94, w) == doctest::Approx(0.437).epsilon(1e-3));
    std::vector<TrialOutcome> outs(2);
    outs[0].success = true;
    outs[0].final_y = 1.0;
    outs[0].final_f_n = 4.0;
    outs[1].final_y = 2.0;
    outs[1].final_f_n = 2.0;
    const auto r = score(outs, w);
    CHECK(r.success_rate == 0.5);
    CHECK(r.mean_y == 1.5);
    CHECK(r.mean_f_n == 3.0);
    CHECK(r.score == doctest::Approx(score_value(0.5, 1.5, 3.0, w)));
    REQUIRE(r.per_trial.size() == 2);
    CHECK(r.per_trial[0] == doctest::Approx(score_value(1.0, 1.0, 4.0, w)));
    ScoreWeights doubled{2 * w.w1, 2 * w.w2, 2 * w.w3, w.floor};
    CHECK(score_value(1.0, 1.38, 4.5, doubled) > score_value(0.0, 2.48, 2.94, doubled));
    CHECK_THROWS_AS(score(std::vector<TrialOutcome>{}, w), LengthError);
}

TEST_CASE("oracle controller holds the target on every material") {
    const CollectionSetup c;
    const ControllerConfig cfg;
    for (const auto& mat : material_presets()) {
        const auto out = run_stabilization(oracle_setup(c, mat.name.c_str(), Policy::proportional), cfg, 17);
        CHECK(out.success);
        bool reached = false;
        for (std::size_t k = 0; k < out.s_true_trace.size() && k < 100; ++k)
            reached |= std::abs(out.s_true_trace[k] - cfg.s_d) < 0.05;
        CHECK(reached);
        for (double f : out.f_n_trace) CHECK(f <= cfg.f_n_safety);
    }
}

TEST_CASE("no action lets the object slip away") {
    const CollectionSetup c;
    const ControllerConfig cfg;
    const auto out = run_stabilization(oracle_setup(c, "pla", Policy::no_action), cfg, 3);
    CHECK_FALSE(out.success);
    CHECK(out.final_y > cfg.y_fail);
    CHECK(out.final_f_n == cfg.f_n_init);
}

TEST_CASE("zero gain reproduces the no-action run exactly") {
    const CollectionSetup c;
    ControllerConfig cfg;
    cfg.k = 0.0;
    const auto a = run_stabilization(oracle_setup(c, "abs", Policy::proportional), cfg, 8);
    const auto b = run_stabilization(oracle_setup(c, "abs", Policy::no_action), cfg, 8);
    CHECK(a.y_trace == b.y_trace);
    CHECK(a.f_n_trace == b.f_n_trace);
    CHECK(a.final_y == b.final_y);
    CHECK(a.steps == b.steps);
}

TEST_CASE("model estimator requires a model of the right width") {
    const CollectionSetup c;
    auto s = oracle_setup(c, "pla", Policy::proportional);
    s.estimator = Estimator::model;
    CHECK_THROWS_AS(run_stabilization(s, ControllerConfig{}, 1), ConfigError);
}

}
