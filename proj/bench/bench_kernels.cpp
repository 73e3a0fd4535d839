#include <benchmark/benchmark.h>

#include <random>

#include "vislip/collection.hpp"
#include "vislip/kernels.hpp"
#include "vislip/svr.hpp"

using namespace vislip;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    Matrix m(rows, cols);
    for (auto& v : m.data()) v = d(rng);
    return m;
}

const KernelSpec kRbf{KernelType::rbf, 1.0 / 109.0};

template <Matrix (*F)(const Matrix&, const KernelSpec&)>
void BM_gram(benchmark::State& st) {
    const auto x = random_matrix(static_cast<std::size_t>(st.range(0)), 109, 1);
    for (auto _ : st) benchmark::DoNotOptimize(F(x, kRbf));
}

template <Matrix (*F)(const Matrix&, const Matrix&, const KernelSpec&)>
void BM_cross(benchmark::State& st) {
    const auto a = random_matrix(static_cast<std::size_t>(st.range(0)), 109, 2);
    const auto b = random_matrix(400, 109, 3);
    for (auto _ : st) benchmark::DoNotOptimize(F(a, b, kRbf));
}

const SvrModel& bench_model() {
    static const SvrModel model = [] {
        const auto x = random_matrix(300, 109, 4);
        std::vector<double> y(300);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.5 + 0.1 * x(i, 0);
        SvrParams p;
        p.kernel = KernelType::rbf;
        p.c = 1.0;
        p.epsilon = 0.05;
        p.gamma = 1.0 / 109.0;
        return train_svr(x, y, p);
    }();
    return model;
}

template <std::vector<double> (*F)(const SvrModel&, const Matrix&)>
void BM_predict(benchmark::State& st) {
    const auto& model = bench_model();
    const auto x = random_matrix(static_cast<std::size_t>(st.range(0)), 109, 5);
    for (auto _ : st) benchmark::DoNotOptimize(F(model, x));
}

std::vector<TrialSpec> bench_specs(int n) {
    std::vector<TrialSpec> specs;
    for (int i = 0; i < n; ++i)
        specs.push_back({i, material_presets()[static_cast<std::size_t>(i) % 5], 1.5 + 0.4 * (i % 5),
                         static_cast<std::uint64_t>(1000 + i)});
    return specs;
}

template <std::vector<TrialRecord> (*F)(std::span<const TrialSpec>, const CollectionSetup&)>
void BM_trials(benchmark::State& st) {
    const auto specs = bench_specs(static_cast<int>(st.range(0)));
    const CollectionSetup setup;
    for (auto _ : st) benchmark::DoNotOptimize(F(specs, setup));
}

}  // namespace

BENCHMARK(BM_gram<gram_matrix>)->Name("gram_matrix/parallel")->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gram<gram_matrix_reference>)->Name("gram_matrix/serial")->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cross<cross_kernel>)->Name("cross_kernel/parallel")->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cross<cross_kernel_reference>)->Name("cross_kernel/serial")->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_predict<predict_batch>)->Name("predict_batch/parallel")->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_predict<predict_batch_reference>)->Name("predict_batch/serial")->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_trials<simulate_trials>)->Name("simulate_trials/parallel")->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_trials<simulate_trials_reference>)->Name("simulate_trials/serial")->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
