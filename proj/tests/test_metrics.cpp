#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "vislip/metrics.hpp"

using namespace vislip;

TEST_SUITE("metrics") {

TEST_CASE("rmse and worst-10% by hand") {
    const std::vector<double> zero(10, 0.0);
    CHECK(rmse(zero) == 0.0);
    CHECK(worst10_rmse(zero) == 0.0);
    const std::vector<double> e{0, 0, 0, 0, 0, 0, 0, 0, 0, 1};
    CHECK(rmse(e) == doctest::Approx(std::sqrt(0.1)));
    CHECK(rmse(e) == doctest::Approx(0.316).epsilon(1e-3));
    CHECK(worst10_rmse(e) == 1.0);
    CHECK_THROWS_AS(rmse(std::vector<double>{}), LengthError);
}

TEST_CASE("worst-10% never undercuts the overall rmse") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        Rng rng(seed);
        std::normal_distribution<double> d;
        std::vector<double> e(1 + seed % 57);
        for (double& v : e) v = d(rng);
        CHECK(worst10_rmse(e) >= rmse(e) - 1e-15);
    }
}

TEST_CASE("Welch test") {
    const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 3, 4, 5, 6};
    const auto w = welch_t_test(a, b);
    CHECK(std::abs(w.t) == doctest::Approx(1.0));
    CHECK(w.df == doctest::Approx(8.0));
    CHECK(w.p == doctest::Approx(0.347).epsilon(1e-3));
    CHECK(w.p == doctest::Approx(oracle::t_two_sided_p(w.t, w.df)).epsilon(1e-7));

    const std::vector<double> c{0.3, 1.1, 2.9, 0.4}, d{5.0, 2.2, 7.1, 3.3, 4.0, 6.5};
    const auto u = welch_t_test(c, d);
    CHECK(u.p == doctest::Approx(oracle::t_two_sided_p(u.t, u.df)).epsilon(1e-7));

    const auto same = welch_t_test(a, a);
    CHECK(same.t == 0.0);
    CHECK(same.p == 1.0);

    std::vector<double> shifted = a;
    const double sigma = std::sqrt(2.5);
    for (double& v : shifted) v += 1000.0 * sigma;
    CHECK(welch_t_test(a, shifted).p < 1e-6);

    CHECK_THROWS_AS(welch_t_test(std::vector<double>{1.0}, b), LengthError);
    CHECK_THROWS_AS(welch_t_test(std::vector<double>{1, 1}, std::vector<double>{2, 2}), DegenerateError);
}

}
