#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "vislip/common.hpp"
#include "vislip/contact.hpp"

namespace vislip {

struct InjectionConfig {
    double intensity_db = 0.0;
    double band_lo = 10.0;     // Hz
    double band_hi = 1100.0;   // Hz
    double sample_rate = 2200.0;
    bool enabled = true;

    double amplitude() const;  // 10^(I/20)
    void validate() const;
};

/// Spectral transfer of the fingertip medium. Effective gain
///   g(f) = g0(f) * (1 - alpha(f) (1 - s)) * exp(-beta d f_n/f_ref) * exp(-h d f/band_hi)
/// with d the material damping_scale. alpha is a log-frequency bump.
struct TransferProfile {
    double base_gain = 1.0;
    double base_rolloff_hz = 900.0;
    double slip_peak = 0.6;             // alpha at the centre frequency, must be <= 1
    double slip_center_hz = 200.0;
    double slip_width_octaves = 0.8;
    double fn_damping = 0.05;           // beta
    double fn_ref_kpa = 6.0;
    double hf_damping = 0.1;            // h
    double noise_floor_db = -40.0;
    bool measurement_noise = true;

    double g0(double f) const;
    double alpha(double f) const;
    double gain(double f, double s, double f_n_kpa, double damping_scale = 1.0) const;
    double noise_std() const;
    void validate() const;
};

struct SensorFrame {
    std::vector<double> p_ac;
    double p_dc = 0.0;
    std::array<double, 19> electrodes{};
    int frame_index = 0;
};

struct SlipEvent {
    double time_s = 0.0;     // offset within the frame
    double magnitude = 0.0;
    double f_n = 0.0;        // kPa at the time of the event
};

/// Burst model for the passive (no-injection) dynamic-pressure channel.
struct VibrotactileConfig {
    double noise_floor_db = -40.0;
    double burst_gain = 0.5;       // peak amplitude per (magnitude x kPa)
    double burst_decay_s = 0.008;
    double micro_rate = 4.0;       // expected incipient-slip micro events per frame at s = 0
    double micro_magnitude = 0.05; // scaled by mu
};

struct ElectrodeConfig {
    double patch_radius_ref = 2.4;  // in electrode pitch units, at f_ref
    double f_ref_kpa = 3.5;
    double shear_skew = 0.3;        // centroid shift at full slip, fraction of patch radius
    double shear_exponent = 2.0;
    double noise_std = 0.05;        // kPa per electrode
    double dc_noise_std = 0.005;    // kPa
    double placement_jitter = 0.05; // per-trial contact-centre offset, uniform +-, pitch units
};

/// Band-limited Gaussian excitation with std 10^(I/20); all zeros when disabled.
std::vector<double> gen_injection(const InjectionConfig& cfg, std::size_t n, std::uint64_t seed);

/// Frequency-domain shaping of one window by g(f), plus measurement noise.
std::vector<double> propagate(std::span<const double> excitation, double s, double f_n_kpa,
                              const TransferProfile& profile, double sample_rate,
                              std::uint64_t seed, double damping_scale = 1.0);

/// Passive channel: noise floor plus exponentially decaying band-limited bursts.
std::vector<double> vibrotactile_baseline(std::span<const SlipEvent> events,
                                          const InjectionConfig& band, const VibrotactileConfig& cfg,
                                          std::size_t n, std::uint64_t seed);

struct ElectrodePoint {
    double x;  // along the tangential load direction, electrode pitch units
    double y;
};

/// Hexagonal 3-4-5-4-3 layout; index 9 is the centre.
const std::array<ElectrodePoint, 19>& electrode_layout();
inline constexpr int kCenterElectrode = 9;

/// Index set for E19 / E10 / E4 / E1.
std::vector<int> electrode_subset(int count);

/// Where the object's contact centre sits on the fingertip for one trial.
ElectrodePoint draw_placement(const ElectrodeConfig& cfg, std::uint64_t seed);

/// Noiseless pressure field sampled at the layout; `placement` offsets the patch centre.
std::array<double, 19> electrode_field(double f_n_kpa, double stick_ratio, const ElectrodeConfig& cfg,
                                       ElectrodePoint placement = {0.0, 0.0});

std::array<double, 19> electrode_array(const ContactState& patch, const ElectrodeConfig& cfg,
                                       std::uint64_t seed, ElectrodePoint placement = {0.0, 0.0});

/// Pressure-weighted centroid along the load axis.
double electrode_centroid(std::span<const double, 19> values);

struct SensorModel {
    InjectionConfig injection;
    TransferProfile transfer;
    VibrotactileConfig vibrotactile;
    ElectrodeConfig electrodes;

    void validate() const;
};

/// Slip events implied by the step that produced `state`.
std::vector<SlipEvent> slip_events(const ContactState& state, const MaterialSpec& material,
                                   const SensorModel& model, double frame_seconds, std::uint64_t seed);

/// One label interval of every modality. `inject` chooses between the injected
/// channel and the passive channel for p_ac; events and electrodes are shared.
SensorFrame synthesize_frame(const ContactState& state, const MaterialSpec& material,
                             const SensorModel& model, double frame_seconds, bool inject,
                             std::uint64_t seed, ElectrodePoint placement = {0.0, 0.0});

}  // namespace vislip
