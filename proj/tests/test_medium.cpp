#include <doctest.h>

#include <cmath>
#include <numeric>

#include "calibration.hpp"
#include "vislip/fft.hpp"
#include "vislip/medium.hpp"

using namespace vislip;

namespace {

double stddev(const std::vector<double>& x) {
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double v = 0;
    for (double a : x) v += (a - m) * (a - m);
    return std::sqrt(v / (x.size() - 1));
}

double rms(const std::vector<double>& x) {
    double v = 0;
    for (double a : x) v += a * a;
    return std::sqrt(v / x.size());
}

TransferProfile noiseless() {
    TransferProfile p;
    p.measurement_noise = false;
    return p;
}

}  // namespace

TEST_SUITE("medium") {

TEST_CASE("excitation amplitude follows the intensity in dB") {
    for (double db : {-20.0, -6.0, 0.0}) {
        InjectionConfig cfg;
        cfg.intensity_db = db;
        CHECK(cfg.amplitude() == std::pow(10.0, db / 20.0));
        const auto x = gen_injection(cfg, 100000, 3);
        CHECK(stddev(x) == doctest::Approx(cfg.amplitude()).epsilon(0.02));
    }
    InjectionConfig off;
    off.enabled = false;
    for (double v : gen_injection(off, 512, 1)) CHECK(v == 0.0);
    InjectionConfig bad;
    bad.band_hi = 1500.0;
    CHECK_THROWS_AS(gen_injection(bad, 16, 1), ConfigError);
}

TEST_CASE("insensitive medium scales the spectrum by g0") {
    auto p = noiseless();
    p.slip_peak = 0.0;
    const InjectionConfig inj;
    const auto x = gen_injection(inj, 2200, 7);
    const auto y = propagate(x, 0.2, 3.0, p, inj.sample_rate, 1);
    const auto fx = fft::rfft(x), fy = fft::rfft(y);
    const double df = inj.sample_rate / 2200.0;
    const double damp = std::exp(-p.fn_damping * 3.0 / p.fn_ref_kpa);
    for (std::size_t k = 5; k < fx.size(); k += 37) {
        const double f = df * k;
        const double expected = p.g0(f) * damp * std::exp(-p.hf_damping * f / 1100.0);
        CHECK(std::abs(fy[k]) == doctest::Approx(std::abs(fx[k]) * expected).epsilon(1e-9));
    }
}

TEST_CASE("full stick over full slip gain ratio is 1 - alpha") {
    auto p = noiseless();
    p.fn_damping = 0.0;
    const InjectionConfig inj;
    const auto x = gen_injection(inj, 2200, 8);
    const auto stick = fft::rfft(propagate(x, 1.0, 3.0, p, inj.sample_rate, 1));
    const auto slip = fft::rfft(propagate(x, 0.0, 3.0, p, inj.sample_rate, 1));
    const double df = inj.sample_rate / 2200.0;
    for (std::size_t k = 10; k < 1100; k += 53)
        CHECK(std::abs(slip[k]) / std::abs(stick[k]) == doctest::Approx(1.0 - p.alpha(df * k)).epsilon(1e-9));
}

TEST_CASE("gain is non-negative and the slip sensitivity peaks at 200 Hz") {
    const TransferProfile p;
    for (double f = 10; f <= 1100; f += 10)
        for (double s = 0; s <= 1.0; s += 0.25)
            for (double fn = 0.5; fn <= 6.0; fn += 1.1) CHECK(p.gain(f, s, fn) >= 0.0);
    CHECK(p.alpha(200.0) == doctest::Approx(p.slip_peak));
    CHECK(p.alpha(200.0) > p.alpha(100.0));
    CHECK(p.alpha(200.0) > p.alpha(400.0));
    TransferProfile bad;
    bad.slip_peak = 1.2;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("200 Hz band tracks tangential load") {
    CHECK(calibration::band200_r_squared(noiseless()) >= 0.97);
    CHECK(calibration::band200_r_squared(TransferProfile{}) >= 0.90);
}

TEST_CASE("passive channel: floor, bursts and linearity") {
    const InjectionConfig band;
    const VibrotactileConfig cfg;
    const auto floor = vibrotactile_baseline({}, band, cfg, 1100, 4);
    CHECK(rms(floor) == doctest::Approx(std::pow(10.0, cfg.noise_floor_db / 20.0)).epsilon(0.1));

    const SlipEvent big{0.1, 0.5, 4.0};
    const auto burst = vibrotactile_baseline(std::vector<SlipEvent>{big}, band, cfg, 1100, 4);
    double peak = 0;
    for (double v : burst) peak = std::max(peak, std::abs(v));
    CHECK(peak >= 10.0 * rms(floor));

    const auto two = vibrotactile_baseline(std::vector<SlipEvent>{big, big}, band, cfg, 1100, 4);
    for (std::size_t i = 0; i < two.size(); i += 13)
        CHECK(two[i] - floor[i] == doctest::Approx(2.0 * (burst[i] - floor[i])).epsilon(1e-9));
}

TEST_CASE("electrode layout and subsets") {
    const auto& layout = electrode_layout();
    CHECK(layout[kCenterElectrode].x == doctest::Approx(0.0));
    CHECK(layout[kCenterElectrode].y == doctest::Approx(0.0));
    CHECK(electrode_subset(19).size() == 19);
    CHECK(electrode_subset(10).size() == 10);
    CHECK(electrode_subset(4).size() == 4);
    CHECK(electrode_subset(1) == std::vector<int>{kCenterElectrode});
    CHECK_THROWS_AS(electrode_subset(7), ConfigError);
}

TEST_CASE("electrode field: symmetry, load conservation, no contact") {
    const ElectrodeConfig cfg;
    const auto& layout = electrode_layout();
    const auto field = electrode_field(3.0, 1.0, cfg);
    for (int i = 0; i < 19; ++i)
        for (int j = 0; j < 19; ++j)
            if (std::abs(layout[i].x + layout[j].x) < 1e-9 && std::abs(layout[i].y + layout[j].y) < 1e-9)
                CHECK(field[i] == doctest::Approx(field[j]));
    CHECK(std::accumulate(field.begin(), field.end(), 0.0) / 19.0 == doctest::Approx(3.0).epsilon(0.02));
    ContactState none;
    none.f_n = 0.0;
    for (double v : electrode_array(none, cfg, 3)) CHECK(v <= 5.0 * cfg.noise_std);
    ContactState rest;
    rest.f_n = 3.0;
    const auto noisy = electrode_array(rest, cfg, 3);
    for (int i = 0; i < 19; ++i) CHECK(std::abs(noisy[i] - field[i]) <= 5.0 * cfg.noise_std);
}

TEST_CASE("centroid shifts monotonically with tangential load") {
    const ElectrodeConfig cfg;
    const RigConfig rig;
    const auto& mat = material_preset("pla");
    const auto& layout = electrode_layout();
    const double f_n = 3.5, force = normal_force(f_n, rig);
    const double a = cfg.patch_radius_ref * std::cbrt(f_n / cfg.f_ref_kpa);
    double last = -1.0;
    for (int i = 0; i <= 20; ++i) {
        const double s = stick_ratio_partial_slip(0.99 * mat.mu * force * i / 20.0, force, mat.mu);
        // Analytic Hertz profile, shifted toward the trailing edge.
        const double shift = cfg.shear_skew * a * std::pow(1.0 - s, cfg.shear_exponent);
        double w = 0, wx = 0;
        for (const auto& p : layout) {
            const double r2 = ((p.x - shift) * (p.x - shift) + p.y * p.y) / (a * a);
            const double v = r2 < 1 ? std::sqrt(1 - r2) : 0.0;
            w += v;
            wx += v * p.x;
        }
        const double c = electrode_centroid(electrode_field(f_n, s, cfg));
        CHECK(c == doctest::Approx(wx / w).epsilon(1e-12));
        CHECK(c >= last);
        last = c;
    }
    CHECK(last > 0.0);
}

TEST_CASE("placement draws stay inside the jitter box") {
    ElectrodeConfig cfg;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto p = draw_placement(cfg, seed);
        CHECK(std::abs(p.x) <= cfg.placement_jitter);
        CHECK(std::abs(p.y) <= cfg.placement_jitter);
    }
    cfg.placement_jitter = 0.0;
    CHECK(draw_placement(cfg, 4).x == 0.0);
}

TEST_CASE("frame sample counts") {
    const RigConfig rig;
    const SensorModel model;
    ContactState st;
    st.f_n = 2.0;
    const auto& mat = material_preset("abs");
    const auto frame = synthesize_frame(st, mat, model, rig.sample_window_T, true, 5);
    CHECK(frame.p_ac.size() == static_cast<std::size_t>(std::lround(rig.sample_window_T * model.injection.sample_rate)));
    double weighted = 0;
    for (double v : frame.electrodes) {
        CHECK(v >= 0.0);
        weighted += v;
    }
    CHECK(weighted / 19.0 == doctest::Approx(frame.p_dc).epsilon(0.02));
}

}
