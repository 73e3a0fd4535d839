#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vislip/collection.hpp"
#include "vislip/features.hpp"
#include "vislip/fft.hpp"

using namespace vislip;

namespace {

std::vector<double> tone(double freq, double sample_rate, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2.0 * std::numbers::pi * freq * i / sample_rate);
    return x;
}

// Independent scan: the first step whose rise over the previous one beats the
// gross-slip rate scaled to one step.
std::optional<std::size_t> scan_gross_slip(const std::vector<double>& y, const RigConfig& rig) {
    const double per_step = rig.gross_slip_disp / (rig.gross_slip_window / rig.sample_window_T);
    for (std::size_t i = 0; i + 1 < y.size(); ++i)
        if (y[i + 1] - y[i] > per_step) return i + 1;
    return std::nullopt;
}

TrialSpec slipping_spec(const char* material, std::uint64_t seed) {
    const auto plan = plan_labeled_trials(std::vector<MaterialSpec>{material_preset(material)}, 1, RigConfig{}, seed);
    return plan.specs.at(0);
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("Parseval on noiseless windows") {
    for (std::size_t n : {2200u, 1100u, 1023u}) {
        const auto x = tone(123.4, 2200.0, n);
        double energy = 0;
        for (double v : x) energy += v * v;
        const double spectral = fft::two_sided_energy(fft::rfft(x), n) / static_cast<double>(n);
        CHECK(std::abs(spectral - energy) / energy < 1e-9);
        const auto back = fft::irfft(fft::rfft(x), n);
        for (std::size_t i = 0; i < n; i += 97) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
    }
}

TEST_CASE("single tone stays in its bin") {
    const WindowSpec spec;
    const auto x = tone(200.0, 2200.0, 2200);
    const auto sp = spectrum(x, spec, 2200.0);
    std::size_t peak = 0;
    for (std::size_t i = 0; i < sp.bins.size(); ++i)
        if (sp.bins[i] > sp.bins[peak]) peak = i;
    CHECK(sp.frequency(peak) == doctest::Approx(200.0));
    CHECK(sp.bins[peak] == doctest::Approx(1.0).epsilon(1e-9));
    // The Hann main lobe spans one bin either side at exactly half height.
    CHECK(sp.bins[peak - 1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(sp.bins[peak + 1] == doctest::Approx(0.5).epsilon(1e-9));
    for (std::size_t i = 0; i < sp.bins.size(); ++i)
        if (i + 1 < peak || i > peak + 1) CHECK(sp.bins[peak] > 10.0 * sp.bins[i]);
    for (std::size_t i = 1; i < sp.bins.size(); ++i) CHECK(sp.frequency(i) > sp.frequency(i - 1));
    CHECK(sp.frequency(0) == doctest::Approx(10.0));
    CHECK(sp.frequency(sp.bins.size() - 1) == doctest::Approx(1100.0));
}

TEST_CASE("zero waveform and short waveform") {
    const WindowSpec spec;
    for (double v : spectrum(std::vector<double>(2200, 0.0), spec, 2200.0).bins) CHECK(v == 0.0);
    CHECK_THROWS_AS(spectrum(std::vector<double>(100, 0.0), spec, 2200.0), LengthError);
}

TEST_CASE("white noise spectrum is flat") {
    const WindowSpec spec;
    const double sr = 10000.0;  // 1 s window = 10^4 samples
    std::vector<double> avg;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        std::normal_distribution<double> d;
        std::vector<double> x(10000);
        for (double& v : x) v = d(rng);
        const auto sp = spectrum(x, spec, sr);
        if (avg.empty()) avg.assign(sp.bins.size(), 0.0);
        for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += sp.bins[i] / 100.0;
    }
    double m = 0;
    for (double v : avg) m += v / avg.size();
    for (double v : avg) CHECK(std::abs(v - m) / m < 0.25);
}

TEST_CASE("band aggregation") {
    const WindowSpec spec;
    CHECK(band_count(spec) == 109);
    SpectrumFeature f;
    f.first_freq = 10.0;
    f.bin_width = 1.0;
    f.bins.assign(1091, 1.0);
    const auto b = band_features(f, spec);
    REQUIRE(b.size() == 109);
    for (double v : b) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("electrode time averaging") {
    SensorFrame a, b;
    for (int i = 0; i < 19; ++i) {
        a.electrodes[i] = i + 1.0;
        b.electrodes[i] = -(i + 1.0);
    }
    const std::vector<SensorFrame> same{a, a, a};
    const auto avg = time_average_electrodes(same, 19);
    for (int i = 0; i < 19; ++i) CHECK(avg[i] == a.electrodes[i]);
    const auto one = time_average_electrodes(same, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == a.electrodes[kCenterElectrode]);
    const std::vector<SensorFrame> alt{a, b, a, b};
    for (double v : time_average_electrodes(alt, 10)) CHECK(v == 0.0);
    CHECK_THROWS_AS(time_average_electrodes({}, 19), LengthError);
}

TEST_CASE("gross slip detection") {
    const RigConfig rig;
    CHECK_FALSE(detect_gross_slip(std::vector<double>(450, 1.0), rig).has_value());
    std::vector<double> y(450, 0.0);
    for (std::size_t i = 300; i < y.size(); ++i) y[i] = 0.5;
    CHECK(detect_gross_slip(y, rig) == std::optional<std::size_t>(300));
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        for (const auto& mat : material_presets()) {
            const auto trace = run_loading_trial(randomize_f_n(rig, seed), rig, mat, seed).y_trace();
            CHECK(detect_gross_slip(trace, rig) == scan_gross_slip(trace, rig));
        }
}

TEST_CASE("pseudo stick ratio label") {
    CHECK(label_pseudo_stick_ratio(0.0, 2.0) == 1.0);
    CHECK(label_pseudo_stick_ratio(2.0, 2.0) == 0.0);
    CHECK(label_pseudo_stick_ratio(0.5, 2.0) == 0.75);
    CHECK_THROWS_AS(label_pseudo_stick_ratio(0.5, 0.0), LabelingError);
    for (int i = 0; i <= 10000; ++i) {
        const double slip = 1.7, f_t = slip * i / 10000.0;
        CHECK(label_pseudo_stick_ratio(f_t, slip) == 1.0 - f_t / slip);
    }
}

TEST_CASE("datasets from simulated trials") {
    const CollectionSetup setup;
    const auto rec = simulate_trial(slipping_spec("pla", 5), setup);
    REQUIRE(rec.gross_slip_step.has_value());
    const std::vector<TrialRecord> trials{rec};
    for (Method m : kAllMethods) {
        const auto ds = build_dataset(trials, m);
        CHECK(ds.size() == 450);
        for (double s : ds.labels) {
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
        }
    }
    const auto labels = rec.labels();
    for (std::size_t k = 1; k < *rec.gross_slip_step; ++k) CHECK(labels[k] <= labels[k - 1]);
    CHECK(build_dataset(trials, Method::e4).features.cols() == 4);
    CHECK(build_dataset(trials, Method::injection).features.cols() == 109);

    CollectionSetup off = setup;
    off.sensor.injection.enabled = false;
    const std::vector<TrialRecord> quiet{simulate_trial(rec.spec, off)};
    const auto ds = build_dataset(quiet, Method::injection);
    CHECK(ds.size() == 450);
    const double floor = off.sensor.transfer.noise_std();
    for (double v : ds.features.data()) CHECK(v < 10.0 * floor);
}

TEST_CASE("method names round-trip") {
    for (Method m : kAllMethods) CHECK(parse_method(method_name(m)) == m);
    CHECK(parse_method_list("injection,E19").size() == 2);
    CHECK_THROWS_AS(parse_method("E7"), ConfigError);
}

}
