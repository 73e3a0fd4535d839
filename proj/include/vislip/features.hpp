#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vislip/common.hpp"
#include "vislip/contact.hpp"
#include "vislip/fft.hpp"
#include "vislip/medium.hpp"

namespace vislip {

struct WindowSpec {
    double window_T = 1.0;        // s, feature window
    double label_interval = 0.5;  // s, one label per interval
    double hop = 0.5;             // s
    double band_width = 10.0;     // Hz, feature band aggregation
    double band_lo = 10.0;
    double band_hi = 1100.0;

    std::size_t window_samples(double sample_rate) const;
    void validate(double sample_rate) const;
};

struct SpectrumFeature {
    std::vector<double> bins;  // amplitude per DFT bin in [band_lo, band_hi]
    double bin_width = 1.0;    // Hz
    double first_freq = 0.0;   // Hz of bins[0]
    int frame_index = 0;

    double frequency(std::size_t i) const { return first_freq + bin_width * static_cast<double>(i); }
};

/// Mean-removed, Hann-tapered DFT of the terminal window (full half spectrum).
std::vector<fft::Complex> tapered_dft(std::span<const double> p_ac, const WindowSpec& spec,
                                      double sample_rate);

/// Amplitude spectrum (2|X|/sum(w)) restricted to [band_lo, band_hi].
SpectrumFeature spectrum(std::span<const double> p_ac, const WindowSpec& spec, double sample_rate,
                         int frame_index = 0);

/// Mean amplitude per band_width-wide band. The last band is closed at band_hi.
std::vector<double> band_features(const SpectrumFeature& feature, const WindowSpec& spec);
std::size_t band_count(const WindowSpec& spec);

std::vector<double> time_average_electrodes(std::span<const SensorFrame> frames, int subset);

/// First trace index whose displacement over the preceding interval exceeds the
/// gross-slip rate (gross_slip_disp per gross_slip_window, scaled to the interval).
std::optional<std::size_t> detect_gross_slip(std::span<const double> y_trace, const RigConfig& rig);

/// 1 - f_t / f_t_slip, clamped to [0,1].
double label_pseudo_stick_ratio(double f_t, double f_t_slip);

enum class Method { injection, vibrotactile, e19, e10, e4, e1 };

inline constexpr Method kAllMethods[] = {Method::injection, Method::vibrotactile, Method::e19,
                                         Method::e10,       Method::e4,           Method::e1};

std::string_view method_name(Method m);
Method parse_method(std::string_view name);
std::vector<Method> parse_method_list(std::string_view csv);
bool is_electrode_method(Method m);
int electrode_count(Method m);

struct LabeledSample {
    std::span<const double> feature;
    double label_s;
    std::string_view material;
    double f_n;
    int trial_id;
    int step;
    double s_true;
};

/// Samples of one method in struct-of-arrays form.
struct Dataset {
    Method method = Method::injection;
    Matrix features;
    std::vector<double> labels;
    std::vector<int> trial_ids;
    std::vector<std::string> materials;
    std::vector<double> f_n;
    std::vector<int> steps;
    std::vector<double> s_true;

    std::size_t size() const { return labels.size(); }
    LabeledSample sample(std::size_t i) const;
    Dataset subset(std::span<const std::size_t> rows) const;
};

}  // namespace vislip
