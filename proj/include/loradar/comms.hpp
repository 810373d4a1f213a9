// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "loradar/config.hpp"
#include "loradar/cs.hpp"
#include "loradar/sampling.hpp"

namespace loradar {

/// De-chirped samples of one symbol together with the index set they were
/// taken on.
struct DechirpSequence {
    std::vector<cplx> values;
    const SamplingIndexSet* index_set = nullptr;
};

struct DemodResult {
    int h_hat = 0;
    double bin_energy_primary = 0.0;   ///< |coef| at bin h_hat
    double bin_energy_folded = 0.0;    ///< |coef| at bin h_hat + offset
    SparseEstimate xbar_hat;
};

/// Digital down-chirp at the compressed sampling instants:
/// exp{j pi [-(B/T)(m/fbar)^2 + B m/fbar]}.
inline std::vector<cplx> build_downchirp(const SamplingIndexSet& set_bar,
                                         const WaveformParams& wp, const DerivedParams& dp) {
    if (set_bar.base != dp.nbar_max) {
        throw Error(ErrorCode::SamplingOverrun, "index set base must equal NbarMax");
    }
    std::vector<cplx> down(set_bar.count());
    for (int i = 0; i < set_bar.count(); ++i) {
        const double x = static_cast<double>(set_bar.indices[i]) / wp.fbar;
        const double cycles = 0.5 * (-(wp.b / wp.t) * x * x + wp.b * x);
        down[i] = detail::unit_phasor(cycles);
    }
    return down;
}

/// Sample index where the de-chirped spectrum folds from the h/T tone to
/// the h/T - B tone: floor(fbar (T - h/B)).
inline int fold_sample_index(int hp, const WaveformParams& wp) {
    return static_cast<int>(std::floor(wp.fbar * (wp.t - static_cast<double>(hp) / wp.b)));
}

/// Elementwise product with the down-chirp. For the noiseless input the
/// result is the two-branch tone model: frequency h/T before the fold
/// index and h/T - B after it, with no extra phase between the branches.
inline DechirpSequence dechirp(const std::vector<cplx>& rx, const std::vector<cplx>& down,
                               const SamplingIndexSet& set_bar) {
    if (rx.size() != down.size()) {
        throw Error(ErrorCode::LengthMismatch, "sample and down-chirp lengths differ");
    }
    DechirpSequence out;
    out.values.resize(rx.size());
    for (std::size_t i = 0; i < rx.size(); ++i) out.values[i] = rx[i] * down[i];
    out.index_set = &set_bar;
    return out;
}

inline Dictionary make_comm_dictionary(const DerivedParams& dp) {
    GridMeta meta;
    meta.origin = 0.0;
    meta.step = 1.0;
    meta.unit = "bin";
    // positive-exponent convention so that shift index h lands on bin h
    return build_dft_dictionary(dp.nbar_max, 1, +1, meta);
}

/// Sparse spectral recovery (OMP, at most two atoms) followed by the
/// combined two-bin decision: argmax_h |x[h]| + |x[h + (fbar-B)H/B]|,
/// unrecovered bins contributing zero, lowest h on ties.
inline DemodResult demodulate(const DechirpSequence& seq, const DerivedParams& dp,
                              double residual_tol = 1e-6) {
    const Dictionary dict = make_comm_dictionary(dp);
    Eigen::VectorXcd y(static_cast<Eigen::Index>(seq.values.size()));
    for (std::size_t i = 0; i < seq.values.size(); ++i) {
        y[static_cast<Eigen::Index>(i)] = seq.values[i];
    }
    OmpStop stop;
    stop.max_atoms = 2;  // a de-chirped symbol occupies at most two bins
    stop.residual_tol = residual_tol;
    DemodResult result;
    result.xbar_hat = omp(y, dict, seq.index_set->indices, stop);

    // fold each recovered bin onto its data hypothesis: bin h and bin
    // h + offset both vote for h
    const int offset = dp.demod_bin_offset;
    std::vector<std::pair<int, double>> votes;  // (hypothesis, |coef|)
    for (std::size_t i = 0; i < result.xbar_hat.support.size(); ++i) {
        const int q = result.xbar_hat.support[i];
        const double mag = std::abs(result.xbar_hat.coeffs(static_cast<Eigen::Index>(i), 0));
        if (q < dp.h) {
            votes.emplace_back(q, mag);
        } else if (q - offset >= 0 && q - offset < dp.h) {
            votes.emplace_back(q - offset, mag);
        }
    }
    double best_metric = 0.0;
    int best_h = 0;
    for (const auto& [h, mag] : votes) {
        double metric = 0.0;
        for (const auto& [h2, mag2] : votes) {
            if (h2 == h) metric += mag2;
        }
        if (metric > best_metric || (metric == best_metric && h < best_h)) {
            best_metric = metric;
            best_h = h;
        }
    }
    result.h_hat = best_h;
    for (std::size_t i = 0; i < result.xbar_hat.support.size(); ++i) {
        const int q = result.xbar_hat.support[i];
        const double mag = std::abs(result.xbar_hat.coeffs(static_cast<Eigen::Index>(i), 0));
        if (q == result.h_hat) result.bin_energy_primary = mag;
        if (q == result.h_hat + offset) result.bin_energy_folded = mag;
    }
    return result;
}

struct LoraBaselineResult {
    int h_hat_reduced = 0;       ///< decision on the H*eta alphabet
    int h_hat_full = 0;          ///< full-alphabet decision (SER approaches 1)
    int reduced_alphabet = 0;    ///< H * Nbar / NbarMax
    double effective_bits = 0.0; ///< NSF + log2(eta)
};

/// Classical uniform-sampling LoRa receiver: de-chirp, length-Nbar DFT,
/// argmax. With eta < 1 only h mod (H eta) is decidable.
inline LoraBaselineResult lora_baseline_demod(const std::vector<cplx>& rx,
                                              const SamplingIndexSet& set_bar,
                                              const WaveformParams& wp,
                                              const DerivedParams& dp) {
    if (set_bar.kind != SamplingKind::Uniform) {
        throw Error(ErrorCode::InvalidParameter, "baseline requires uniform sampling");
    }
    const int n_bar = set_bar.count();
    const long long reduced = static_cast<long long>(dp.h) * n_bar / dp.nbar_max;
    if (reduced < 1 || (static_cast<long long>(dp.h) * n_bar) % dp.nbar_max != 0 ||
        (reduced & (reduced - 1)) != 0) {
        throw Error(ErrorCode::ConfigError,
                    "reduced alphabet H*Nbar/NbarMax must be a power of two");
    }
    const std::vector<cplx> down = build_downchirp(set_bar, wp, dp);
    std::vector<cplx> buf(n_bar);
    for (int i = 0; i < n_bar; ++i) buf[i] = rx[i] * down[i];
    // adjoint of the e^{+j} atom convention used by the CS path
    detail::Fft::forward(buf);
    int best = 0;
    double best_mag = -1.0;
    for (int q = 0; q < n_bar; ++q) {
        const double mag = std::abs(buf[q]);
        if (mag > best_mag) {
            best_mag = mag;
            best = q;
        }
    }
    LoraBaselineResult result;
    result.reduced_alphabet = static_cast<int>(reduced);
    result.h_hat_reduced = best % result.reduced_alphabet;
    result.h_hat_full = best;
    const double eta = static_cast<double>(n_bar) / dp.nbar_max;
    result.effective_bits = wp.nsf + std::log2(eta);
    return result;
}

}  // namespace loradar
