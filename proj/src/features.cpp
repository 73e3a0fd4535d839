#include "vislip/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vislip {

std::size_t WindowSpec::window_samples(double sample_rate) const {
    return static_cast<std::size_t>(std::llround(window_T * sample_rate));
}

void WindowSpec::validate(double sample_rate) const {
    if (!(window_T > 0.0) || !(label_interval > 0.0) || !(hop > 0.0))
        throw ConfigError("window spec durations must be > 0");
    const double n = window_T * sample_rate;
    if (std::abs(n - std::round(n)) > 1e-6)
        throw ConfigError("window_T x sample_rate must be an integer sample count");
    if (!(band_width > 0.0) || !(band_lo < band_hi)) throw ConfigError("feature band layout invalid");
}

std::vector<fft::Complex> tapered_dft(std::span<const double> p_ac, const WindowSpec& spec,
                                      double sample_rate) {
    const std::size_t n = spec.window_samples(sample_rate);
    if (n == 0 || p_ac.size() < n) throw LengthError("waveform shorter than the feature window");
    auto window = p_ac.subspan(p_ac.size() - n, n);
    const double m = mean(window);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                              static_cast<double>(n));
        x[i] = (window[i] - m) * w;
    }
    return fft::rfft(x);
}

SpectrumFeature spectrum(std::span<const double> p_ac, const WindowSpec& spec, double sample_rate,
                         int frame_index) {
    const std::size_t n = spec.window_samples(sample_rate);
    const auto dft = tapered_dft(p_ac, spec, sample_rate);
    // Sum of the periodic Hann window is n/2.
    const double amp_scale = 2.0 / (0.5 * static_cast<double>(n));
    const double df = sample_rate / static_cast<double>(n);

    SpectrumFeature out;
    out.bin_width = df;
    out.frame_index = frame_index;
    const auto k_lo = static_cast<std::size_t>(std::ceil(spec.band_lo / df - 1e-9));
    const auto k_hi = std::min(dft.size() - 1, static_cast<std::size_t>(std::floor(spec.band_hi / df + 1e-9)));
    out.first_freq = df * static_cast<double>(k_lo);
    for (std::size_t k = k_lo; k <= k_hi; ++k) out.bins.push_back(std::abs(dft[k]) * amp_scale);
    return out;
}

std::size_t band_count(const WindowSpec& spec) {
    return static_cast<std::size_t>(std::floor((spec.band_hi - spec.band_lo) / spec.band_width + 1e-9));
}

std::vector<double> band_features(const SpectrumFeature& feature, const WindowSpec& spec) {
    const std::size_t bands = band_count(spec);
    std::vector<double> sum(bands, 0.0);
    std::vector<int> count(bands, 0);
    for (std::size_t i = 0; i < feature.bins.size(); ++i) {
        const double f = feature.frequency(i);
        if (f < spec.band_lo - 1e-9 || f > spec.band_hi + 1e-9) continue;
        auto b = static_cast<std::size_t>(std::floor((f - spec.band_lo) / spec.band_width + 1e-9));
        b = std::min(b, bands - 1);
        sum[b] += feature.bins[i];
        ++count[b];
    }
    for (std::size_t b = 0; b < bands; ++b)
        if (count[b] > 0) sum[b] /= count[b];
    return sum;
}

std::vector<double> time_average_electrodes(std::span<const SensorFrame> frames, int subset) {
    if (frames.empty()) throw LengthError("no frames to average");
    const auto idx = electrode_subset(subset);
    std::vector<double> out(idx.size(), 0.0);
    for (const auto& f : frames)
        for (std::size_t j = 0; j < idx.size(); ++j) out[j] += f.electrodes[idx[j]];
    for (double& v : out) v /= static_cast<double>(frames.size());
    return out;
}

std::optional<std::size_t> detect_gross_slip(std::span<const double> y_trace, const RigConfig& rig) {
    const double threshold = rig.gross_slip_disp * rig.sample_window_T / rig.gross_slip_window;
    for (std::size_t i = 1; i < y_trace.size(); ++i)
        if (y_trace[i] - y_trace[i - 1] > threshold) return i;
    return std::nullopt;
}

double label_pseudo_stick_ratio(double f_t, double f_t_slip) {
    if (!(f_t_slip > 0.0)) throw LabelingError("no gross slip observed (F_T^slip <= 0)");
    return std::clamp(1.0 - f_t / f_t_slip, 0.0, 1.0);
}

std::string_view method_name(Method m) {
    switch (m) {
        case Method::injection: return "injection";
        case Method::vibrotactile: return "vibrotactile";
        case Method::e19: return "E19";
        case Method::e10: return "E10";
        case Method::e4: return "E4";
        case Method::e1: return "E1";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (Method m : kAllMethods)
        if (method_name(m) == name) return m;
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::vector<Method> parse_method_list(std::string_view csv) {
    std::vector<Method> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const auto end = std::min(csv.find(',', start), csv.size());
        const auto token = csv.substr(start, end - start);
        if (!token.empty()) out.push_back(parse_method(token));
        start = end + 1;
    }
    if (out.empty()) throw ConfigError("method list is empty");
    return out;
}

bool is_electrode_method(Method m) {
    return m == Method::e19 || m == Method::e10 || m == Method::e4 || m == Method::e1;
}

int electrode_count(Method m) {
    switch (m) {
        case Method::e19: return 19;
        case Method::e10: return 10;
        case Method::e4: return 4;
        case Method::e1: return 1;
        default: return 0;
    }
}

LabeledSample Dataset::sample(std::size_t i) const {
    return {features.row(i), labels[i], materials[i], f_n[i], trial_ids[i], steps[i], s_true[i]};
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.method = method;
    out.features = features.select_rows(rows);
    for (auto r : rows) {
        out.labels.push_back(labels[r]);
        out.trial_ids.push_back(trial_ids[r]);
        out.materials.push_back(materials[r]);
        out.f_n.push_back(f_n[r]);
        out.steps.push_back(steps[r]);
        out.s_true.push_back(s_true[r]);
    }
    return out;
}

}  // namespace vislip
