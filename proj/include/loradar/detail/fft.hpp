// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace loradar::detail {

// Thin FFTW wrapper. Plans are cached per (size, direction) and created
// under a lock; fftw_execute_dft on caller buffers is thread-safe.
// FFTW_ESTIMATE keeps planning deterministic run to run.
class Fft {
public:
    static void forward(std::vector<std::complex<double>>& data) { run(data, FFTW_FORWARD); }
    static void backward(std::vector<std::complex<double>>& data) { run(data, FFTW_BACKWARD); }

    // sign -1: X[q] = sum_m x[m] e^{-j2pi mq/N};  sign +1: e^{+j2pi mq/N}.
    // No 1/N normalization either way.
    static void transform(std::vector<std::complex<double>>& data, int sign) {
        run(data, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
    }

private:
    static void run(std::vector<std::complex<double>>& data, int dir) {
        if (data.empty()) return;
        fftw_plan plan = plan_for(data.size(), dir);
        auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
        fftw_execute_dft(plan, ptr, ptr);
    }

    static fftw_plan plan_for(std::size_t n, int dir) {
        static std::mutex mutex;
        static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
        std::lock_guard<std::mutex> lock(mutex);
        auto key = std::make_pair(n, dir);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        std::vector<std::complex<double>> dummy(n);
        auto* ptr = reinterpret_cast<fftw_complex*>(dummy.data());
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), ptr, ptr, dir,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        cache.emplace(key, plan);
        return plan;
    }
};

}  // namespace loradar::detail
