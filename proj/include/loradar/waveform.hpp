// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "loradar/config.hpp"
#include "loradar/detail/rng.hpp"
#include "loradar/errors.hpp"

namespace loradar {

/// Frequency-shift indices for one frame, one per symbol.
struct Payload {
    std::vector<int> h;
};

/// Pseudo-random TDM antenna schedule: l[p] is the active Tx antenna for
/// symbol p; psets[l] lists the symbols assigned to antenna l, ascending.
struct TdmSchedule {
    std::vector<int> l;
    std::vector<std::vector<int>> psets;
};

inline Payload generate_payload(int p, int h, detail::Rng& rng) {
    if (h < 2) throw Error(ErrorCode::InvalidParameter, "alphabet size must be at least 2");
    Payload out;
    out.h.resize(p);
    for (int i = 0; i < p; ++i) {
        out.h[i] = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(h)));
    }
    return out;
}

/// Balanced random assignment: each antenna transmits exactly P/Lt symbols.
inline TdmSchedule generate_schedule(int p, int lt, detail::Rng& rng) {
    if (p % lt != 0) {
        throw Error(ErrorCode::ScheduleIndivisible, "P must be a multiple of Lt");
    }
    TdmSchedule sched;
    sched.l.resize(p);
    const int per = p / lt;
    for (int i = 0; i < p; ++i) sched.l[i] = i / per;
    for (int i = p - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i + 1)));
        std::swap(sched.l[i], sched.l[j]);
    }
    sched.psets.assign(lt, {});
    for (int i = 0; i < p; ++i) sched.psets[sched.l[i]].push_back(i);
    return sched;
}

/// Conventional alternating TDM schedule (antenna p mod Lt), the slow-time
/// pattern assumed by the uniform-sampling baseline.
inline TdmSchedule alternating_schedule(int p, int lt) {
    if (p % lt != 0) {
        throw Error(ErrorCode::ScheduleIndivisible, "P must be a multiple of Lt");
    }
    TdmSchedule sched;
    sched.l.resize(p);
    sched.psets.assign(lt, {});
    for (int i = 0; i < p; ++i) {
        sched.l[i] = i % lt;
        sched.psets[i % lt].push_back(i);
    }
    return sched;
}

/// Instantaneous frequency of the shifted up-chirp at time x into the
/// symbol: <(B/T)x + h/T>_B - B/2, in [-B/2, B/2).
inline double inst_frequency(double x, int hp, const WaveformParams& wp) {
    if (x < 0.0 || x >= wp.t) {
        throw Error(ErrorCode::InvalidParameter, "x outside the payload interval");
    }
    const double raw = (wp.b / wp.t) * x + static_cast<double>(hp) / wp.t;
    double wrapped = std::fmod(raw, wp.b);
    if (wrapped < 0.0) wrapped += wp.b;
    return wrapped - wp.b / 2.0;
}

namespace detail {

/// Accumulated phase of the shifted chirp in cycles. The instantaneous
/// frequency wraps at x = T - h/B; the phase stays continuous.
inline double chirp_phase_cycles(double x, int hp, const WaveformParams& wp) {
    double cycles = (wp.b / (2.0 * wp.t)) * x * x +
                    (static_cast<double>(hp) / wp.t - wp.b / 2.0) * x;
    if (hp > 0) {
        const double xw = wp.t - static_cast<double>(hp) / wp.b;
        if (x >= xw) cycles -= wp.b * (x - xw);
    }
    return cycles;
}

inline std::complex<double> unit_phasor(double cycles) {
    const double frac = cycles - std::round(cycles);
    return std::polar(1.0, 2.0 * std::numbers::pi * frac);
}

}  // namespace detail

/// Baseband transmit sample exp(j2pi Theta(x)) with Theta the integral of
/// inst_frequency from symbol start. Unit modulus for all inputs.
inline std::complex<double> tx_baseband_sample(double x, int hp, const WaveformParams& wp) {
    if (x < 0.0 || x >= wp.t) {
        throw Error(ErrorCode::InvalidParameter, "x outside the payload interval");
    }
    return detail::unit_phasor(detail::chirp_phase_cycles(x, hp, wp));
}

}  // namespace loradar
