// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "loradar/config.hpp"
#include "loradar/detail/rng.hpp"
#include "loradar/errors.hpp"
#include "loradar/sampling.hpp"
#include "loradar/waveform.hpp"

namespace loradar {

using cplx = std::complex<double>;

/// One point target. Derived quantities are filled by derive().
///
/// Sign convention: the delay grows as 2 v t / c for v > 0 (receding
/// target), so the Doppler phasor rotates as exp(-j 2 pi mu t) with
/// mu = 2 v / lambda.
struct Target {
    cplx alpha{1.0, 0.0};  ///< complex path gain
    double r = 0.0;        ///< range (m)
    double v = 0.0;        ///< radial velocity (m/s), positive = receding
    double theta = 0.0;    ///< angle (rad)

    // derived
    double tau = 0.0;          ///< round-trip delay 2r/c (s)
    double mu = 0.0;           ///< Doppler frequency 2v/lambda (Hz)
    double f_if = 0.0;         ///< IF tone B tau / T (Hz)
    cplx alpha_prime{};        ///< alpha e^{-j2pi fc tau}
    cplx alpha_dprime{};       ///< alpha' e^{-j2pi (mu + fIF) Tmix}

    void derive(const WaveformParams& wp, const DerivedParams& dp) {
        tau = 2.0 * r / kSpeedOfLight;
        mu = 2.0 * v / dp.lambda;
        f_if = wp.b * tau / wp.t;
        alpha_prime = alpha * std::polar(1.0, -2.0 * std::numbers::pi * wp.fc * tau);
        alpha_dprime =
            alpha_prime * std::polar(1.0, -2.0 * std::numbers::pi * (mu + f_if) * wp.t_mix);
    }
};

struct SensingScene {
    std::vector<Target> targets;
};

/// LOS communication link. tau_syn is pinned to zero (ideal
/// synchronization), which nulls the composite delay at the receiver.
struct CommLink {
    cplx alpha_bar{1.0, 0.0};
    double tau_bar = 0.0;
    double v_bar = 0.0;
    static constexpr double tau_syn = 0.0;
};

/// Compressed IF observations, indexed (symbol p, AIC sample n, Rx r).
struct IfSampleTensor {
    int p = 0;
    int n = 0;
    int lr = 0;
    std::vector<cplx> data;

    void resize(int p_, int n_, int lr_) {
        p = p_;
        n = n_;
        lr = lr_;
        data.assign(static_cast<std::size_t>(p) * n * lr, cplx{});
    }
    cplx& at(int pi, int ni, int ri) {
        return data[(static_cast<std::size_t>(pi) * n + ni) * lr + ri];
    }
    const cplx& at(int pi, int ni, int ri) const {
        return data[(static_cast<std::size_t>(pi) * n + ni) * lr + ri];
    }
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// K targets with parameters i.i.d. uniform over the given intervals and
/// unit-magnitude random-phase gains. Draw order per target: range,
/// velocity, angle, gain phase.
inline SensingScene generate_scene(int k, Interval range, Interval vel, Interval angle,
                                   detail::Rng& rng, const WaveformParams& wp,
                                   const DerivedParams& dp) {
    if (k < 1) throw Error(ErrorCode::InvalidParameter, "scene needs at least one target");
    if (2.0 * range.hi / kSpeedOfLight >= wp.t_mix) {
        throw Error(ErrorCode::DelayExceedsGuard,
                    "max range implies a delay reaching the mixing guard Tmix");
    }
    SensingScene scene;
    scene.targets.resize(k);
    for (auto& tgt : scene.targets) {
        tgt.r = rng.uniform(range.lo, range.hi);
        tgt.v = rng.uniform(vel.lo, vel.hi);
        tgt.theta = rng.uniform(angle.lo, angle.hi);
        tgt.alpha = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
        tgt.derive(wp, dp);
    }
    return scene;
}

/// Blank-window geometry for one (delay, shift) pair. The index bounds
/// follow floor(fmax (t - Tmix)) and may be negative when the window
/// opens before the first sample; segment membership tests stay valid.
struct BlankWindow {
    double t_bws = 0.0;
    double t_bwe = 0.0;
    long n_bws = 0;
    long n_bwe = 0;
};

inline BlankWindow blank_window(double tau_k, int hp, const WaveformParams& wp) {
    const double tw = wp.t - static_cast<double>(hp) / wp.b;
    BlankWindow bw;
    bw.t_bws = tau_k > tw ? wp.t_mix : tw;
    bw.t_bwe = std::min(wp.t, std::max(tau_k + tw, wp.t_mix));
    bw.n_bws = static_cast<long>(std::floor(wp.fmax * (bw.t_bws - wp.t_mix)));
    bw.n_bwe = static_cast<long>(std::floor(wp.fmax * (bw.t_bwe - wp.t_mix)));
    return bw;
}

/// First/third-segment IF phase pi (fIF + B - 2 h_p / T) tau_k. The third
/// segment carries this plus the 2 pi B tau_k discontinuity.
inline double segment_phase(double tau_k, int hp, const WaveformParams& wp) {
    const double f_if = wp.b * tau_k / wp.t;
    return std::numbers::pi * (f_if + wp.b - 2.0 * static_cast<double>(hp) / wp.t) * tau_k;
}

inline double segment_phase_jump(double tau_k, const WaveformParams& wp) {
    return 2.0 * std::numbers::pi * wp.b * tau_k;
}

namespace detail {

/// Per-target unit sample r_{p,k}[n]: the IF tone times the segment phasor,
/// zero inside the blank window. m is the full-rate index of the sample.
inline cplx per_target_sample(long m, const BlankWindow& bw, double tone_cycles_per_index,
                              cplx seg1, cplx seg3) {
    if (m >= bw.n_bws && m < bw.n_bwe) return cplx{};
    const cplx tone = unit_phasor(tone_cycles_per_index * static_cast<double>(m));
    return m < bw.n_bws ? tone * seg1 : tone * seg3;
}

}  // namespace detail

/// Closed-form compressed IF tensor per the dual-discontinuity model:
/// for each (p, n, r) the K targets contribute
///   alpha''_k e^{j pi r sin} e^{j pi l_p Lr sin} e^{-j 2 pi p mu T0} r_{p,k}[n].
/// Targets whose IF tone exceeds the LPF cutoff contribute nothing.
/// Optional snr_db adds circular Gaussian noise with per-sample variance
/// (mean noiseless sample power) / 10^(snr/10).
inline IfSampleTensor synthesize_if(const SensingScene& scene, const TdmSchedule& schedule,
                                    const Payload& payload, const SamplingIndexSet& set,
                                    const WaveformParams& wp, const DerivedParams& dp,
                                    std::optional<double> snr_db, detail::Rng& rng) {
    if (set.base != dp.nmax) {
        throw Error(ErrorCode::SamplingOverrun, "sampling set base must equal Nmax");
    }
    const int n_samp = set.count();
    IfSampleTensor out;
    out.resize(wp.p, n_samp, wp.lr);

    std::vector<cplx> rx_steer(wp.lr);
    for (int p = 0; p < wp.p; ++p) {
        const int hp = payload.h[p];
        for (const Target& tgt : scene.targets) {
            if (tgt.tau >= wp.t_mix) {
                throw Error(ErrorCode::DelayExceedsGuard, "target delay reaches Tmix");
            }
            if (tgt.f_if > wp.fmax) continue;  // removed by the LPF
            const BlankWindow bw = blank_window(tgt.tau, hp, wp);
            const double phi = segment_phase(tgt.tau, hp, wp);
            const cplx seg1 = std::polar(1.0, phi);
            const cplx seg3 = std::polar(1.0, phi + segment_phase_jump(tgt.tau, wp));
            const double tone_step = -tgt.f_if / wp.fmax;
            const double st = std::sin(tgt.theta);
            const cplx common = tgt.alpha_dprime *
                                detail::unit_phasor(0.5 * schedule.l[p] * wp.lr * st) *
                                detail::unit_phasor(-tgt.mu * dp.t0 * p);
            for (int r = 0; r < wp.lr; ++r) rx_steer[r] = detail::unit_phasor(0.5 * r * st);
            for (int ni = 0; ni < n_samp; ++ni) {
                const cplx unit =
                    detail::per_target_sample(set.indices[ni], bw, tone_step, seg1, seg3);
                if (unit == cplx{}) continue;
                const cplx contrib = common * unit;
                for (int r = 0; r < wp.lr; ++r) out.at(p, ni, r) += contrib * rx_steer[r];
            }
        }
    }

    if (snr_db) {
        double power = 0.0;
        for (const cplx& s : out.data) power += std::norm(s);
        power /= static_cast<double>(out.data.size());
        const double sigma = std::sqrt(power * std::pow(10.0, -*snr_db / 10.0) / 2.0);
        for (cplx& s : out.data) s += cplx{sigma * rng.normal(), sigma * rng.normal()};
    }
    return out;
}

/// Compressed baseband samples at the Com-Rx: sample (p, n) is
/// alpha_bar * s_h(m_n / fbar) plus noise, the composite delay being
/// nulled by ideal synchronization.
inline std::vector<std::vector<cplx>> comm_rx_samples(const Payload& payload,
                                                      const SamplingIndexSet& set_bar,
                                                      const WaveformParams& wp,
                                                      const DerivedParams& dp,
                                                      std::optional<double> snr_db,
                                                      detail::Rng& rng, const CommLink& link) {
    if (set_bar.base != dp.nbar_max) {
        throw Error(ErrorCode::SamplingOverrun, "comm sampling set base must equal NbarMax");
    }
    const int p_total = static_cast<int>(payload.h.size());
    std::vector<std::vector<cplx>> out(p_total);
    for (int p = 0; p < p_total; ++p) {
        out[p].resize(set_bar.count());
        for (int ni = 0; ni < set_bar.count(); ++ni) {
            const double x = static_cast<double>(set_bar.indices[ni]) / wp.fbar;
            out[p][ni] = link.alpha_bar * tx_baseband_sample(x, payload.h[p], wp);
        }
    }
    if (snr_db) {
        const double power = std::norm(link.alpha_bar);
        const double sigma = std::sqrt(power * std::pow(10.0, -*snr_db / 10.0) / 2.0);
        for (auto& sym : out) {
            for (cplx& s : sym) s += cplx{sigma * rng.normal(), sigma * rng.normal()};
        }
    }
    return out;
}

}  // namespace loradar
