#include "vislip/medium.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vislip/fft.hpp"

namespace vislip {

double InjectionConfig::amplitude() const { return std::pow(10.0, intensity_db / 20.0); }

void InjectionConfig::validate() const {
    if (!(sample_rate > 0.0)) throw ConfigError("injection.sample_rate must be > 0");
    if (band_hi > sample_rate / 2.0 + 1e-9)
        throw ConfigError("injection.band_hi exceeds the Nyquist frequency");
    if (!(band_lo >= 0.0 && band_lo < band_hi)) throw ConfigError("injection band is empty");
}

double TransferProfile::g0(double f) const {
    return base_gain / std::sqrt(1.0 + (f / base_rolloff_hz) * (f / base_rolloff_hz));
}

double TransferProfile::alpha(double f) const {
    if (f <= 0.0) return 0.0;
    const double octaves = std::log2(f / slip_center_hz) / slip_width_octaves;
    return slip_peak * std::exp(-0.5 * octaves * octaves);
}

double TransferProfile::gain(double f, double s, double f_n_kpa, double damping_scale) const {
    const double slip = 1.0 - alpha(f) * (1.0 - s);
    const double fn_term = std::exp(-fn_damping * damping_scale * f_n_kpa / fn_ref_kpa);
    const double hf_term = std::exp(-hf_damping * damping_scale * f / 1100.0);
    return g0(f) * slip * fn_term * hf_term;
}

double TransferProfile::noise_std() const {
    return measurement_noise ? std::pow(10.0, noise_floor_db / 20.0) : 0.0;
}

void TransferProfile::validate() const {
    if (!(slip_peak >= 0.0 && slip_peak <= 1.0))
        throw ConfigError("transfer.slip_peak must lie in [0,1] so the gain stays non-negative");
    if (!(base_gain >= 0.0) || !(base_rolloff_hz > 0.0) || !(slip_width_octaves > 0.0) ||
        !(slip_center_hz > 0.0))
        throw ConfigError("transfer profile has non-positive shape parameters");
    if (!(fn_damping >= 0.0) || !(hf_damping >= 0.0) || !(fn_ref_kpa > 0.0))
        throw ConfigError("transfer damping coefficients must be >= 0");
}

void SensorModel::validate() const {
    injection.validate();
    transfer.validate();
    if (!(electrodes.patch_radius_ref > 0.0) || !(electrodes.f_ref_kpa > 0.0))
        throw ConfigError("electrode patch geometry must be positive");
    if (!(electrodes.placement_jitter >= 0.0)) throw ConfigError("placement_jitter must be >= 0");
}

namespace {

void band_limit(std::vector<double>& x, double lo, double hi, double sample_rate) {
    auto spec = fft::rfft(x);
    const double df = sample_rate / static_cast<double>(x.size());
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double f = df * static_cast<double>(k);
        if (f < lo || f > hi) spec[k] = 0.0;
    }
    x = fft::irfft(spec, x.size());
}

std::vector<double> gaussian(std::size_t n, double stddev, Rng& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> out(n);
    for (double& v : out) v = stddev * dist(rng);
    return out;
}

}  // namespace

std::vector<double> gen_injection(const InjectionConfig& cfg, std::size_t n, std::uint64_t seed) {
    cfg.validate();
    if (n == 0) throw LengthError("injection length must be > 0");
    if (!cfg.enabled) return std::vector<double>(n, 0.0);
    Rng rng(seed);
    auto x = gaussian(n, cfg.amplitude(), rng);
    band_limit(x, cfg.band_lo, cfg.band_hi, cfg.sample_rate);
    return x;
}

std::vector<double> propagate(std::span<const double> excitation, double s, double f_n_kpa,
                              const TransferProfile& profile, double sample_rate,
                              std::uint64_t seed, double damping_scale) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("stick ratio outside [0,1]");
    const std::size_t n = excitation.size();
    if (n == 0) return {};
    auto spec = fft::rfft(excitation);
    const double df = sample_rate / static_cast<double>(n);
    for (std::size_t k = 0; k < spec.size(); ++k)
        spec[k] *= profile.gain(df * static_cast<double>(k), s, f_n_kpa, damping_scale);
    auto out = fft::irfft(spec, n);
    if (const double sigma = profile.noise_std(); sigma > 0.0) {
        Rng rng(seed);
        std::normal_distribution<double> dist(0.0, sigma);
        for (double& v : out) v += dist(rng);
    }
    return out;
}

std::vector<double> vibrotactile_baseline(std::span<const SlipEvent> events,
                                          const InjectionConfig& band, const VibrotactileConfig& cfg,
                                          std::size_t n, std::uint64_t seed) {
    if (n == 0) throw LengthError("waveform length must be > 0");
    Rng rng(seed);
    const double floor_std = std::pow(10.0, cfg.noise_floor_db / 20.0);
    auto out = gaussian(n, floor_std, rng);
    if (events.empty()) return out;

    // One shared unit-RMS carrier keeps the waveform linear in the event list.
    auto carrier = gaussian(n, 1.0, rng);
    band_limit(carrier, band.band_lo, band.band_hi, band.sample_rate);
    double rms = 0.0;
    for (double c : carrier) rms += c * c;
    rms = std::sqrt(rms / static_cast<double>(n));
    const double norm = rms > 0.0 ? 1.0 / rms : 0.0;

    const double dt = 1.0 / band.sample_rate;
    for (const auto& ev : events) {
        const double amp = cfg.burst_gain * ev.magnitude * ev.f_n * norm;
        const auto start = static_cast<std::size_t>(std::max(0.0, std::floor(ev.time_s / dt)));
        for (std::size_t i = start; i < n; ++i) {
            const double env = std::exp(-static_cast<double>(i - start) * dt / cfg.burst_decay_s);
            if (env < 1e-6) break;
            out[i] += amp * env * carrier[i];
        }
    }
    return out;
}

const std::array<ElectrodePoint, 19>& electrode_layout() {
    static const std::array<ElectrodePoint, 19> layout = [] {
        std::array<ElectrodePoint, 19> pts{};
        const int counts[5] = {3, 4, 5, 4, 3};
        const double row_pitch = std::sqrt(3.0) / 2.0;
        int idx = 0;
        for (int r = 0; r < 5; ++r) {
            const double y = (r - 2) * row_pitch;
            const double x0 = -(counts[r] - 1) / 2.0;
            for (int c = 0; c < counts[r]; ++c) pts[idx++] = {x0 + c, y};
        }
        return pts;
    }();
    return layout;
}

std::vector<int> electrode_subset(int count) {
    switch (count) {
        case 19: {
            std::vector<int> all(19);
            for (int i = 0; i < 19; ++i) all[i] = i;
            return all;
        }
        case 10: return {0, 2, 4, 6, 8, 10, 12, 14, 16, 18};
        case 4: return {0, 6, 12, 18};
        case 1: return {kCenterElectrode};
        default: throw ConfigError("electrode subset must be one of 19, 10, 4, 1");
    }
}

ElectrodePoint draw_placement(const ElectrodeConfig& cfg, std::uint64_t seed) {
    if (!(cfg.placement_jitter > 0.0)) return {0.0, 0.0};
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-cfg.placement_jitter, cfg.placement_jitter);
    const double x = u(rng);
    return {x, u(rng)};
}

std::array<double, 19> electrode_field(double f_n_kpa, double stick_ratio, const ElectrodeConfig& cfg,
                                       ElectrodePoint placement) {
    std::array<double, 19> out{};
    if (!(f_n_kpa > 0.0)) return out;
    const double a = cfg.patch_radius_ref * std::cbrt(f_n_kpa / cfg.f_ref_kpa);
    const double slip = std::clamp(1.0 - stick_ratio, 0.0, 1.0);
    const double shift = cfg.shear_skew * a * std::pow(slip, cfg.shear_exponent);
    const auto& layout = electrode_layout();
    double total = 0.0;
    for (int i = 0; i < 19; ++i) {
        const double dx = layout[i].x - placement.x - shift;
        const double dy = layout[i].y - placement.y;
        const double rho2 = (dx * dx + dy * dy) / (a * a);
        out[i] = rho2 < 1.0 ? std::sqrt(1.0 - rho2) : 0.0;
        total += out[i];
    }
    // Total load is conserved: the mean electrode pressure equals the DC pressure.
    const double scale = total > 0.0 ? 19.0 * f_n_kpa / total : 0.0;
    for (double& v : out) v *= scale;
    return out;
}

std::array<double, 19> electrode_array(const ContactState& patch, const ElectrodeConfig& cfg,
                                       std::uint64_t seed, ElectrodePoint placement) {
    auto values = electrode_field(patch.f_n, patch.stick_ratio_true, cfg, placement);
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, cfg.noise_std);
    for (double& v : values) v = std::max(0.0, v + noise(rng));
    return values;
}

double electrode_centroid(std::span<const double, 19> values) {
    const auto& layout = electrode_layout();
    double w = 0.0, wx = 0.0;
    for (int i = 0; i < 19; ++i) {
        w += values[i];
        wx += values[i] * layout[i].x;
    }
    return w > 0.0 ? wx / w : 0.0;
}

std::vector<SlipEvent> slip_events(const ContactState& state, const MaterialSpec& material,
                                   const SensorModel& model, double frame_seconds, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> when(0.0, frame_seconds);
    std::vector<SlipEvent> events;
    const double slip_fraction = 1.0 - state.stick_ratio_true;
    if (slip_fraction > 0.0 && model.vibrotactile.micro_rate > 0.0) {
        std::poisson_distribution<int> count(model.vibrotactile.micro_rate * slip_fraction);
        std::uniform_real_distribution<double> spread(0.5, 1.5);
        const int k = count(rng);
        for (int i = 0; i < k; ++i)
            events.push_back({when(rng), model.vibrotactile.micro_magnitude * material.mu * spread(rng),
                              state.f_n});
    }
    if (state.gross_slip_event) events.push_back({when(rng), state.slip_jump, state.f_n});
    std::sort(events.begin(), events.end(),
              [](const SlipEvent& a, const SlipEvent& b) { return a.time_s < b.time_s; });
    return events;
}

SensorFrame synthesize_frame(const ContactState& state, const MaterialSpec& material,
                             const SensorModel& model, double frame_seconds, bool inject,
                             std::uint64_t seed, ElectrodePoint placement) {
    const auto n = static_cast<std::size_t>(std::llround(frame_seconds * model.injection.sample_rate));
    const auto events = slip_events(state, material, model, frame_seconds, derive_seed(seed, {1}));

    SensorFrame frame;
    frame.frame_index = state.step;
    frame.p_ac = vibrotactile_baseline(events, model.injection, model.vibrotactile, n,
                                       derive_seed(seed, {2}));
    if (inject && model.injection.enabled) {
        const auto excitation = gen_injection(model.injection, n, derive_seed(seed, {3}));
        const auto propagated = propagate(excitation, state.stick_ratio_true, state.f_n, model.transfer,
                                          model.injection.sample_rate, derive_seed(seed, {4}),
                                          material.damping_scale);
        for (std::size_t i = 0; i < n; ++i) frame.p_ac[i] += propagated[i];
    }
    frame.electrodes = electrode_array(state, model.electrodes, derive_seed(seed, {5}), placement);
    Rng dc(derive_seed(seed, {6}));
    std::normal_distribution<double> dc_noise(0.0, model.electrodes.dc_noise_std);
    frame.p_dc = std::max(0.0, state.f_n + dc_noise(dc));
    return frame;
}

}  // namespace vislip
