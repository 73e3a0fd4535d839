#include "vislip/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "vislip/common.hpp"

namespace vislip::fft {

namespace {

// FFTW planning is not thread-safe; execution with new arrays is.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, bool forward) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, forward);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::vector<double> real(n);
        std::vector<fftw_complex> half(n / 2 + 1);
        const int len = static_cast<int>(n);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan plan = forward ? fftw_plan_dft_r2c_1d(len, real.data(), half.data(), flags)
                                 : fftw_plan_dft_c2r_1d(len, half.data(), real.data(), flags);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, bool>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

}  // namespace

std::vector<Complex> rfft(std::span<const double> signal) {
    const std::size_t n = signal.size();
    if (n == 0) throw LengthError("rfft of empty signal");
    std::vector<double> in(signal.begin(), signal.end());
    std::vector<Complex> out(n / 2 + 1);
    fftw_execute_dft_r2c(cache().get(n, true), in.data(),
                         reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

std::vector<double> irfft(std::span<const Complex> spectrum, std::size_t n) {
    if (n == 0 || spectrum.size() != n / 2 + 1) throw LengthError("irfft size mismatch");
    // c2r destroys its input.
    std::vector<Complex> in(spectrum.begin(), spectrum.end());
    std::vector<double> out(n);
    fftw_execute_dft_c2r(cache().get(n, false), reinterpret_cast<fftw_complex*>(in.data()),
                         out.data());
    const double scale = 1.0 / static_cast<double>(n);
    for (double& v : out) v *= scale;
    return out;
}

double two_sided_energy(std::span<const Complex> half_spectrum, std::size_t n) {
    double e = 0.0;
    for (std::size_t k = 0; k < half_spectrum.size(); ++k) {
        const double p = std::norm(half_spectrum[k]);
        const bool self_conjugate = (k == 0) || (n % 2 == 0 && k == n / 2);
        e += self_conjugate ? p : 2.0 * p;
    }
    return e;
}

}  // namespace vislip::fft
