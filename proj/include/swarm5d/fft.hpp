// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "swarm5d/errors.hpp"

namespace swarm5d {

/// Thin RAII wrapper around one FFTW complex-to-complex plan. Transforms are
/// unnormalized (FFTW convention): inverse(forward(x)) == n * x.
///
/// Plan creation is serialized (the FFTW planner is not thread safe);
/// execute() is re-entrant and may be called from several threads on
/// distinct buffers.
class FftPlan {
public:
    FftPlan(std::size_t n, bool forward) : n_(n) {
        if (n == 0) throw InvalidArgumentError("FFT length must be positive");
        std::lock_guard<std::mutex> lock(planner_mutex());
        std::vector<std::complex<double>> scratch(n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf,
                                 forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    }

    ~FftPlan() {
        if (plan_) {
            std::lock_guard<std::mutex> lock(planner_mutex());
            fftw_destroy_plan(plan_);
        }
    }

    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    FftPlan(FftPlan&& other) noexcept : n_(other.n_), plan_(other.plan_) { other.plan_ = nullptr; }

    std::size_t size() const { return n_; }

    /// In-place or out-of-place transform of n samples.
    void execute(const std::complex<double>* in, std::complex<double>* out) const {
        fftw_execute_dft(plan_,
                         reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

    void execute(std::vector<std::complex<double>>& data) const {
        if (data.size() != n_) throw DimensionError("FFT buffer length mismatch");
        execute(data.data(), data.data());
    }

private:
    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }

    std::size_t n_;
    fftw_plan plan_ = nullptr;
};

/// Forward DFT of a copy of `x` (unnormalized).
inline std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x) {
    std::vector<std::complex<double>> out(x);
    FftPlan plan(x.size(), true);
    plan.execute(out);
    return out;
}

/// Inverse DFT of a copy of `x`, scaled by 1/n so that ifft(fft(x)) == x.
inline std::vector<std::complex<double>> ifft(const std::vector<std::complex<double>>& x) {
    std::vector<std::complex<double>> out(x);
    FftPlan plan(x.size(), false);
    plan.execute(out);
    const double scale = 1.0 / static_cast<double>(x.size());
    for (auto& v : out) v *= scale;
    return out;
}

} // namespace swarm5d
