#pragma once

// Loading sweep used to check that the 200 Hz band tracks the tangential load.

#include <cstdint>
#include <vector>

#include "vislip/contact.hpp"
#include "vislip/features.hpp"
#include "vislip/medium.hpp"

namespace calibration {

/// R^2 of a least-squares line through (x, y).
inline double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= n, my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    return syy > 0 ? sxy * sxy / (sxx * syy) : 0.0;
}

/// Sweeps f_t from 0 to just below the sliding limit at a fixed grip. The
/// excitation is frozen (one seed) so only sensor noise varies between points.
inline double band200_r_squared(const vislip::TransferProfile& profile, int points = 60,
                                std::uint64_t noise_seed = 11) {
    using namespace vislip;
    const RigConfig rig;
    const MaterialSpec& mat = material_preset("pla");
    const InjectionConfig inj;
    const WindowSpec spec;
    const double f_n = 3.5;
    const double force = normal_force(f_n, rig);
    const auto n = spec.window_samples(inj.sample_rate);
    const auto excitation = gen_injection(inj, n, 5);
    const std::size_t band = static_cast<std::size_t>((200.0 - spec.band_lo) / spec.band_width);
    std::vector<double> ft, mag;
    for (int i = 0; i < points; ++i) {
        const double f_t = 0.98 * mat.mu * force * i / (points - 1);
        const double s = stick_ratio_partial_slip(f_t, force, mat.mu);
        const auto out = propagate(excitation, s, f_n, profile, inj.sample_rate,
                                   noise_seed + static_cast<std::uint64_t>(i), mat.damping_scale);
        ft.push_back(f_t);
        mag.push_back(band_features(spectrum(out, spec, inj.sample_rate), spec)[band]);
    }
    return r_squared(ft, mag);
}

}  // namespace calibration
