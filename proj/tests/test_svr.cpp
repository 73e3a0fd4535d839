#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "vislip/kernels.hpp"
#include "vislip/svr.hpp"

using namespace vislip;

namespace {

Matrix random_points(std::size_t n, std::size_t d, Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix x(n, d);
    for (auto& v : x.data()) v = u(rng);
    return x;
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

double decision(const Matrix& cross_row_source, std::size_t row, const std::vector<double>& beta, double b) {
    double f = b;
    for (std::size_t j = 0; j < beta.size(); ++j) f += beta[j] * cross_row_source(row, j);
    return f;
}

}  // namespace

TEST_SUITE("svr") {

TEST_CASE("dual matches a dense interior-point QP on small problems") {
    Rng rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 3 + static_cast<std::size_t>(trial % 8);
        const auto x = random_points(n, 2, rng);
        std::vector<double> y(n);
        std::normal_distribution<double> noise(0.0, 0.1);
        for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(2.0 * x(i, 0)) + x(i, 1) + noise(rng);
        const KernelSpec k{KernelType::rbf, 0.7};
        const double c = trial % 2 ? 10.0 : 1.0, eps = 0.05;
        const auto gram = gram_matrix(x, k);
        const auto sol = solve_svr_dual(gram, y, c, eps);
        CHECK(sol.converged);
        const auto ref = oracle::svr_qp(to_eigen(gram), Eigen::Map<const Eigen::VectorXd>(y.data(), n), c, eps);

        double dev = 0.0, sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dev = std::max(dev, std::abs(sol.beta[i] - ref.beta[i]));
            CHECK(std::abs(sol.beta[i]) <= c + 1e-12);
            sum += sol.beta[i];
        }
        CHECK(dev <= 1e-4);
        CHECK(std::abs(sum) < 1e-9);

        const auto probe = random_points(20, 2, rng);
        const auto cross = cross_kernel(probe, x, k);
        for (std::size_t r = 0; r < probe.rows(); ++r)
            CHECK(std::abs(decision(cross, r, sol.beta, sol.bias) - decision(cross, r, ref.beta, ref.bias)) <= 1e-4);
    }
}

TEST_CASE("five-point linear problem agrees with the QP oracle") {
    // A 1-D linear kernel has a rank-one Gram matrix, so the dual coefficients
    // are not unique; the objective, weight and predictions are.
    Matrix x(5, 1);
    const std::vector<double> y{0.1, 0.35, 0.4, 0.8, 0.9};
    for (int i = 0; i < 5; ++i) x(static_cast<std::size_t>(i), 0) = i - 2.0;
    const auto gram = gram_matrix(x, {KernelType::linear, 0.0});
    const auto sol = solve_svr_dual(gram, y, 1.0, 0.01);
    const auto ref = oracle::svr_qp(to_eigen(gram), Eigen::Map<const Eigen::VectorXd>(y.data(), 5), 1.0, 0.01);
    CHECK(svr_dual_objective(gram, y, sol.beta, 0.01) ==
          doctest::Approx(svr_dual_objective(gram, y, ref.beta, 0.01)).epsilon(1e-6));
    double w = 0, w_ref = 0;
    for (int i = 0; i < 5; ++i) {
        w += sol.beta[static_cast<std::size_t>(i)] * x(static_cast<std::size_t>(i), 0);
        w_ref += ref.beta[static_cast<std::size_t>(i)] * x(static_cast<std::size_t>(i), 0);
    }
    CHECK(w == doctest::Approx(w_ref).epsilon(1e-4));
    CHECK(sol.bias == doctest::Approx(ref.bias).epsilon(1e-4));
}

TEST_CASE("constant target inside the tube") {
    Rng rng(3);
    const auto x = random_points(30, 3, rng);
    const std::vector<double> y(30, 0.7);
    SvrParams p;
    p.epsilon = 0.1;
    const auto model = train_svr(x, y, p);
    CHECK(model.support_vectors.rows() == 0);
    const auto probe = random_points(10, 3, rng);
    for (std::size_t r = 0; r < probe.rows(); ++r) CHECK(model.predict(probe.row(r)) == doctest::Approx(0.7));
}

TEST_CASE("realizable linear target is fitted exactly") {
    Rng rng(4);
    const auto x = random_points(40, 3, rng);
    std::vector<double> y(40);
    for (std::size_t i = 0; i < 40; ++i) y[i] = 0.5 + 0.1 * x(i, 0) - 0.05 * x(i, 1) + 0.02 * x(i, 2);
    SvrParams p;
    p.kernel = KernelType::linear;
    p.c = 100.0;
    p.epsilon = 0.0;
    SolverOptions tight;
    tight.tolerance = 1e-10;
    const auto model = train_svr(x, y, p, tight);
    double sq = 0;
    for (std::size_t i = 0; i < 40; ++i) sq += std::pow(model.predict_raw(x.row(i)) - y[i], 2);
    CHECK(std::sqrt(sq / 40) < 1e-6);
}

TEST_CASE("single support vector closed form and clamping") {
    SvrModel m;
    m.params.kernel = KernelType::rbf;
    m.params.gamma = 0.5;
    m.scaling.input_dim = 2;
    m.scaling.kept = {0, 1};
    m.scaling.mean = {0.0, 0.0};
    m.scaling.scale = {1.0, 1.0};
    m.support_vectors = Matrix(1, 2);
    m.support_vectors(0, 0) = 1.0;
    m.support_vectors(0, 1) = -1.0;
    m.dual_coefs = {0.4};
    m.bias = 0.1;
    const std::vector<double> at{1.0, -1.0}, off{2.0, -1.0};
    CHECK(m.predict(at) == doctest::Approx(0.5));
    CHECK(m.predict_raw(off) == doctest::Approx(0.1 + 0.4 * std::exp(-0.5)));
    m.bias = 1.5;
    CHECK(m.predict_raw(at) == doctest::Approx(1.9));
    CHECK(m.predict(at) == 1.0);
    m.bias = -2.0;
    CHECK(m.predict(at) == 0.0);
    CHECK_THROWS_AS(m.predict(std::vector<double>{1.0}), ShapeError);
}

TEST_CASE("batch prediction equals single predictions and json round-trips") {
    Rng rng(5);
    const auto x = random_points(60, 4, rng);
    std::vector<double> y(60);
    for (std::size_t i = 0; i < 60; ++i) y[i] = 0.5 + 0.3 * std::tanh(x(i, 0) * x(i, 1));
    SvrParams p;
    p.c = 10.0;
    p.gamma = 0.25;
    const auto model = train_svr(x, y, p);
    const auto probe = random_points(25, 4, rng);
    const auto batch = predict_batch(model, probe);
    const auto copy = SvrModel::from_json(model.to_json());
    CHECK(copy.hash() == model.hash());
    for (std::size_t r = 0; r < probe.rows(); ++r) {
        CHECK(batch[r] == model.predict(probe.row(r)));
        CHECK(copy.predict(probe.row(r)) == model.predict(probe.row(r)));
    }
    for (const double v : model.dual_coefs) CHECK(std::abs(v) <= p.c + 1e-12);
    CHECK(std::abs(std::accumulate(model.dual_coefs.begin(), model.dual_coefs.end(), 0.0)) < 1e-9);
}

TEST_CASE("parameter validation") {
    SvrParams p;
    p.c = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.epsilon = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    Matrix one(1, 2, 0.5);
    CHECK_THROWS(train_svr(one, std::vector<double>{0.5}, SvrParams{}));
}

}
