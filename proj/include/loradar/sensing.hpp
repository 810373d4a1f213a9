// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "loradar/channel.hpp"
#include "loradar/config.hpp"
#include "loradar/cs.hpp"
#include "loradar/sampling.hpp"
#include "loradar/waveform.hpp"

namespace loradar {

/// Signed Doppler bin: the upper half of the grid maps to negative
/// frequencies.
inline double shift_bin(int bin, int grid) {
    return bin < grid / 2.0 ? static_cast<double>(bin) : static_cast<double>(bin - grid);
}

inline Dictionary make_range_dictionary(const WaveformParams& wp, const DerivedParams& dp) {
    GridMeta meta;
    meta.origin = 0.0;
    meta.step = wp.fmax * wp.t / (wp.b * wp.rho_re * dp.nmax);  // delay per bin (s)
    meta.unit = "s";
    return build_dft_dictionary(dp.nmax, wp.rho_re, -1, meta);
}

inline Dictionary make_velocity_dictionary(const WaveformParams& wp, const DerivedParams& dp) {
    GridMeta meta;
    meta.origin = 0.0;
    meta.step = dp.lambda / (2.0 * wp.rho_ve * wp.p * dp.t0);  // m/s per signed bin
    meta.unit = "m/s";
    return build_dft_dictionary(wp.p, wp.rho_ve, -1, meta);
}

struct RangeResult {
    std::vector<int> n_hat;       ///< detected grid rows, strongest first
    std::vector<double> tau_hat;  ///< delay estimates (s)
    SparseEstimate xhat;          ///< full MMV estimate
};

/// Assembles Y_RE (column p*Lr + r holds the samples of symbol p at Rx r),
/// runs MMV-OMP against the range dictionary and keeps the K most
/// significant rows.
inline RangeResult range_estimate(const IfSampleTensor& tensor, const SamplingIndexSet& set,
                                  const WaveformParams& wp, const DerivedParams& dp, int k) {
    Eigen::MatrixXcd y(tensor.n, static_cast<Eigen::Index>(tensor.p) * tensor.lr);
    for (int p = 0; p < tensor.p; ++p) {
        for (int r = 0; r < tensor.lr; ++r) {
            for (int n = 0; n < tensor.n; ++n) {
                y(n, static_cast<Eigen::Index>(p) * tensor.lr + r) = tensor.at(p, n, r);
            }
        }
    }
    const Dictionary dict = make_range_dictionary(wp, dp);
    RangeResult result;
    result.xhat = mmv_omp(y, dict, set.indices, k);
    result.n_hat = top_k_rows(result.xhat, static_cast<int>(result.xhat.support.size()) < k
                                               ? static_cast<int>(result.xhat.support.size())
                                               : k);
    result.tau_hat.resize(result.n_hat.size());
    for (std::size_t i = 0; i < result.n_hat.size(); ++i) {
        result.tau_hat[i] = result.n_hat[i] * wp.fmax * wp.t / (wp.b * wp.rho_re * dp.nmax);
    }
    return result;
}

/// Phase-compensation matrix for one target: entry (n, p) undoes the
/// segment phase that the delay estimate predicts at sample m_n of
/// symbol p, and is 1 inside the predicted blank window.
inline Eigen::MatrixXcd build_pc_matrix(double tau_hat, const Payload& payload,
                                        const SamplingIndexSet& set, const WaveformParams& wp) {
    if (tau_hat < 0.0 || tau_hat >= wp.t_mix) {
        throw Error(ErrorCode::DelayExceedsGuard, "delay estimate outside [0, Tmix)");
    }
    const int n_samp = set.count();
    const int p_total = static_cast<int>(payload.h.size());
    Eigen::MatrixXcd pc(n_samp, p_total);
    for (int p = 0; p < p_total; ++p) {
        const BlankWindow bw = blank_window(tau_hat, payload.h[p], wp);
        const double phi = segment_phase(tau_hat, payload.h[p], wp);
        const cplx seg1 = std::polar(1.0, -phi);
        const cplx seg3 = std::polar(1.0, -(phi + segment_phase_jump(tau_hat, wp)));
        for (int ni = 0; ni < n_samp; ++ni) {
            const long m = set.indices[ni];
            pc(ni, p) = (m >= bw.n_bws && m < bw.n_bwe) ? cplx{1.0, 0.0}
                        : (m < bw.n_bws ? seg1 : seg3);
        }
    }
    return pc;
}

struct VelocityResult {
    Eigen::MatrixXd v_per_pair;   ///< (Lt x Lr) per-pair estimates (m/s)
    double v_hat = 0.0;           ///< average over all pairs
    std::vector<int> p_hat;       ///< Doppler bins, index l*Lr + r
    Eigen::VectorXcd pair_coef;   ///< recovered coefficients at p_hat, index l*Lr + r
    std::vector<SparseEstimate> z_hat;  ///< per-pair sparse estimates
};

/// PC-I velocity estimation: compensate the range row with
/// (R_PC)^T b, split per Tx antenna, recover one Doppler atom per pair
/// and average the signed velocities.
///
/// The multiplicative compensation factor carries a payload-dependent
/// envelope whose zero-Doppler mass scales with |1 - e^{-j 2 pi B tau_hat}|;
/// delays with B tau_hat near an integer weaken the Doppler line.
inline VelocityResult velocity_estimate(const SparseEstimate& xhat, int n_hat,
                                        const Eigen::MatrixXcd& pc, const TdmSchedule& schedule,
                                        const SamplingIndexSet& set, const Dictionary& re_dict,
                                        const WaveformParams& wp, const DerivedParams& dp) {
    const Eigen::RowVectorXcd row = xhat.row_for(n_hat);
    // b = column n_hat of the conjugated, row-selected range dictionary
    Eigen::VectorXcd b = re_dict.compressed_atom(set.indices, n_hat).conjugate();
    const Eigen::VectorXcd pc_factor = pc.transpose() * b;  // length P

    const Dictionary ve_dict = make_velocity_dictionary(wp, dp);
    const int grid = ve_dict.grid();

    VelocityResult result;
    result.v_per_pair.resize(wp.lt, wp.lr);
    result.p_hat.assign(static_cast<std::size_t>(wp.lt) * wp.lr, 0);
    result.pair_coef.resize(static_cast<Eigen::Index>(wp.lt) * wp.lr);
    result.z_hat.resize(static_cast<std::size_t>(wp.lt) * wp.lr);

    for (int r = 0; r < wp.lr; ++r) {
        Eigen::VectorXcd xpc(wp.p);
        for (int p = 0; p < wp.p; ++p) {
            xpc[p] = row[static_cast<Eigen::Index>(p) * wp.lr + r] * pc_factor[p];
        }
        for (int l = 0; l < wp.lt; ++l) {
            const auto& pset = schedule.psets[l];
            Eigen::VectorXcd data(static_cast<Eigen::Index>(pset.size()));
            for (std::size_t i = 0; i < pset.size(); ++i) {
                data[static_cast<Eigen::Index>(i)] = xpc[pset[i]];
            }
            OmpStop stop;
            stop.max_atoms = 1;
            SparseEstimate z = omp(data, ve_dict, pset, stop);
            const std::size_t pair = static_cast<std::size_t>(l) * wp.lr + r;
            if (z.support.empty()) {
                result.p_hat[pair] = 0;
                result.pair_coef[static_cast<Eigen::Index>(pair)] = cplx{};
                result.v_per_pair(l, r) = 0.0;
            } else {
                result.p_hat[pair] = z.support[0];
                result.pair_coef[static_cast<Eigen::Index>(pair)] = z.coeffs(0, 0);
                result.v_per_pair(l, r) = shift_bin(z.support[0], grid) * dp.lambda /
                                          (2.0 * wp.rho_ve * wp.p * dp.t0);
            }
            result.z_hat[pair] = std::move(z);
        }
    }
    result.v_hat = result.v_per_pair.mean();
    return result;
}

struct AngleResult {
    Eigen::VectorXcd a_hat;  ///< virtual-array vector, index l*Lr + r
    int n_hat_ae = 0;
    double theta_hat = 0.0;
};

/// Correlates the virtual-array vector against the steering dictionary
/// (plain transpose, as the per-pair Doppler fits already absorb the
/// slow-time phase) and picks the argmax column.
inline AngleResult angle_estimate(const Eigen::VectorXcd& pair_coef, const WaveformParams& wp) {
    const int lt_lr = wp.lt * wp.lr;
    if (pair_coef.size() != lt_lr) {
        throw Error(ErrorCode::LengthMismatch, "need one coefficient per antenna pair");
    }
    const Dictionary ae = build_ae_dictionary(lt_lr, wp.rho_ae);
    AngleResult result;
    result.a_hat = pair_coef;
    double best = -1.0;
    const int grid = ae.grid();
    for (int q = 0; q < grid; ++q) {
        cplx acc{};
        for (int i = 0; i < lt_lr; ++i) acc += pair_coef[i] * ae.entry(i, q);
        const double mag = std::abs(acc);
        if (mag > best) {
            best = mag;
            result.n_hat_ae = q;
        }
    }
    result.theta_hat = ae.meta().value(result.n_hat_ae);
    return result;
}

/// One estimated target: range plus the velocity/angle stages derived
/// from its row.
struct TargetEstimate {
    int n_hat = 0;
    double tau_hat = 0.0;
    double r_hat = 0.0;
    VelocityResult velocity;
    AngleResult angle;
};

struct SensingOutput {
    RangeResult range;
    std::vector<TargetEstimate> targets;
};

/// Full CS pipeline for one frame: range, then per detected target PC-I
/// velocity and angle.
inline SensingOutput run_cs_pipeline(const IfSampleTensor& tensor, const TdmSchedule& schedule,
                                     const Payload& payload, const SamplingIndexSet& set,
                                     const WaveformParams& wp, const DerivedParams& dp, int k) {
    SensingOutput out;
    out.range = range_estimate(tensor, set, wp, dp, k);
    const Dictionary re_dict = make_range_dictionary(wp, dp);
    out.targets.resize(out.range.n_hat.size());
    for (std::size_t i = 0; i < out.range.n_hat.size(); ++i) {
        TargetEstimate& te = out.targets[i];
        te.n_hat = out.range.n_hat[i];
        te.tau_hat = out.range.tau_hat[i];
        te.r_hat = te.tau_hat * kSpeedOfLight / 2.0;
        const Eigen::MatrixXcd pc = build_pc_matrix(te.tau_hat, payload, set, wp);
        te.velocity = velocity_estimate(out.range.xhat, te.n_hat, pc, schedule, set, re_dict,
                                        wp, dp);
        te.angle = angle_estimate(te.velocity.pair_coef, wp);
    }
    return out;
}

/// "Uniform sampling & DFT" baseline. Range comes from magnitude peak
/// picking on the length-Nmax spectrum (argmax with +-1 bin masking,
/// K peaks). Velocity treats each antenna's regular symbol subset as a
/// uniform slow-time sequence with PRI Lt*T0 (PC-I still applied), which
/// halves the unambiguous velocity for Lt = 2. Angle reuses the steering
/// dictionary on the per-pair DFT coefficients.
inline SensingOutput baseline_uniform_dft(const IfSampleTensor& tensor,
                                          const TdmSchedule& schedule, const Payload& payload,
                                          const SamplingIndexSet& set, const WaveformParams& wp,
                                          const DerivedParams& dp, int k) {
    if (set.kind != SamplingKind::Uniform) {
        throw Error(ErrorCode::InvalidParameter, "baseline requires a uniform sampling set");
    }
    const int n_samp = set.count();
    const int cols = wp.p * wp.lr;
    Eigen::MatrixXcd y(n_samp, cols);
    for (int p = 0; p < wp.p; ++p) {
        for (int r = 0; r < wp.lr; ++r) {
            for (int n = 0; n < n_samp; ++n) {
                y(n, static_cast<Eigen::Index>(p) * wp.lr + r) = tensor.at(p, n, r);
            }
        }
    }

    WaveformParams wp_re = wp;
    wp_re.rho_re = 1;
    const Dictionary dict = make_range_dictionary(wp_re, dp);
    const int grid = dict.grid();

    Eigen::VectorXd score = Eigen::VectorXd::Zero(grid);
    for (int c = 0; c < cols; ++c) score += dict.correlate(set.indices, y.col(c)).cwiseAbs2();

    // the receiver's rated delay span ends at fmax (T - Tmix) / B, i.e.
    // Rmax = c fmax (T - Tmix) / (2B); bins beyond it are not searched
    const double tau_rated = wp.fmax * (wp.t - wp.t_mix) / wp.b;
    const double tau_per_bin = wp.fmax * wp.t / (wp.b * grid);
    const int rated_bins =
        std::min(grid, static_cast<int>(std::floor(tau_rated / tau_per_bin)) + 1);

    SensingOutput out;
    std::vector<char> masked(grid, 0);
    for (int i = 0; i < k; ++i) {
        int best = -1;
        double best_score = -1.0;
        for (int q = 0; q < rated_bins; ++q) {
            if (!masked[q] && score[q] > best_score) {
                best_score = score[q];
                best = q;
            }
        }
        if (best < 0) break;
        for (int q = std::max(0, best - 1); q <= std::min(grid - 1, best + 1); ++q) masked[q] = 1;
        out.range.n_hat.push_back(best);
        out.range.tau_hat.push_back(best * wp.fmax * wp.t / (wp.b * grid));
    }

    // single-atom coefficient rows for the detected bins
    out.range.xhat.support = out.range.n_hat;
    out.range.xhat.coeffs.resize(static_cast<Eigen::Index>(out.range.n_hat.size()), cols);
    for (std::size_t i = 0; i < out.range.n_hat.size(); ++i) {
        const Eigen::VectorXcd atom = dict.compressed_atom(set.indices, out.range.n_hat[i]);
        const double denom = atom.squaredNorm();
        for (int c = 0; c < cols; ++c) {
            out.range.xhat.coeffs(static_cast<Eigen::Index>(i), c) = atom.dot(y.col(c)) / denom;
        }
    }

    const int sub_len = wp.p / wp.lt;
    out.targets.resize(out.range.n_hat.size());
    for (std::size_t i = 0; i < out.range.n_hat.size(); ++i) {
        TargetEstimate& te = out.targets[i];
        te.n_hat = out.range.n_hat[i];
        te.tau_hat = out.range.tau_hat[i];
        te.r_hat = te.tau_hat * kSpeedOfLight / 2.0;

        const Eigen::MatrixXcd pc = build_pc_matrix(te.tau_hat, payload, set, wp);
        const Eigen::VectorXcd b = dict.compressed_atom(set.indices, te.n_hat).conjugate();
        const Eigen::VectorXcd pc_factor = pc.transpose() * b;
        const Eigen::RowVectorXcd row = out.range.xhat.coeffs.row(static_cast<Eigen::Index>(i));

        te.velocity.v_per_pair.resize(wp.lt, wp.lr);
        te.velocity.p_hat.assign(static_cast<std::size_t>(wp.lt) * wp.lr, 0);
        te.velocity.pair_coef.resize(static_cast<Eigen::Index>(wp.lt) * wp.lr);
        for (int r = 0; r < wp.lr; ++r) {
            Eigen::VectorXcd xpc(wp.p);
            for (int p = 0; p < wp.p; ++p) {
                xpc[p] = row[static_cast<Eigen::Index>(p) * wp.lr + r] * pc_factor[p];
            }
            for (int l = 0; l < wp.lt; ++l) {
                const auto& pset = schedule.psets[l];
                // slow-time DFT over the per-antenna subsequence
                cplx best_coef{};
                int best_bin = 0;
                double best_mag = -1.0;
                for (int q = 0; q < sub_len; ++q) {
                    cplx acc{};
                    for (int j = 0; j < sub_len; ++j) {
                        const double cyc = static_cast<double>(q) * j / sub_len;
                        acc += xpc[pset[j]] * detail::unit_phasor(cyc);
                    }
                    if (std::abs(acc) > best_mag) {
                        best_mag = std::abs(acc);
                        best_bin = q;
                        best_coef = acc / static_cast<double>(sub_len);
                    }
                }
                const std::size_t pair = static_cast<std::size_t>(l) * wp.lr + r;
                te.velocity.p_hat[pair] = best_bin;
                te.velocity.pair_coef[static_cast<Eigen::Index>(pair)] = best_coef;
                te.velocity.v_per_pair(l, r) =
                    shift_bin(best_bin, sub_len) * dp.lambda / (2.0 * sub_len * wp.lt * dp.t0);
            }
        }
        te.velocity.v_hat = te.velocity.v_per_pair.mean();
        te.angle = angle_estimate(te.velocity.pair_coef, wp);
    }
    return out;
}

}  // namespace loradar
