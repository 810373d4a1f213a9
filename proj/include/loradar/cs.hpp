// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "loradar/detail/fft.hpp"
#include "loradar/errors.hpp"

namespace loradar {

using cplx = std::complex<double>;

/// Affine map from grid column index to its physical value.
struct GridMeta {
    double origin = 0.0;
    double step = 1.0;
    const char* unit = "bin";

    double value(int q) const { return origin + step * q; }
};

/// Atom dictionary. Partial-DFT dictionaries are stored implicitly (rows,
/// grid size, exponent sign) and correlated through a zero-padded fast
/// transform; the angle steering dictionary is dense.
class Dictionary {
public:
    /// Partial DFT: entry (m, q) = exp(sign * j 2 pi m q / grid).
    static Dictionary partial_dft(int rows, int grid, int sign, GridMeta meta = {}) {
        Dictionary d;
        d.rows_ = rows;
        d.grid_ = grid;
        d.sign_ = sign;
        d.meta_ = meta;
        return d;
    }

    static Dictionary dense(Eigen::MatrixXcd atoms, GridMeta meta = {}) {
        Dictionary d;
        d.rows_ = static_cast<int>(atoms.rows());
        d.grid_ = static_cast<int>(atoms.cols());
        d.dense_ = std::move(atoms);
        d.meta_ = meta;
        return d;
    }

    int rows() const { return rows_; }
    int grid() const { return grid_; }
    const GridMeta& meta() const { return meta_; }
    bool is_dense() const { return dense_.size() > 0; }

    cplx entry(int m, int q) const {
        if (is_dense()) return dense_(m, q);
        const double cycles = static_cast<double>(sign_) * static_cast<double>(m) *
                              static_cast<double>(q) / static_cast<double>(grid_);
        const double frac = cycles - std::round(cycles);
        return std::polar(1.0, 2.0 * std::numbers::pi * frac);
    }

    /// Column q restricted to the given rows.
    Eigen::VectorXcd compressed_atom(std::span<const int> row_idx, int q) const {
        Eigen::VectorXcd a(static_cast<Eigen::Index>(row_idx.size()));
        for (std::size_t i = 0; i < row_idx.size(); ++i) a[static_cast<Eigen::Index>(i)] = entry(row_idx[i], q);
        return a;
    }

    /// Adjoint correlation c_q = sum_i conj(A[m_i, q]) r[i] for all q.
    Eigen::VectorXcd correlate(std::span<const int> row_idx,
                               const Eigen::VectorXcd& residual) const {
        if (static_cast<std::size_t>(residual.size()) != row_idx.size()) {
            throw Error(ErrorCode::LengthMismatch, "residual length must match selection");
        }
        if (is_dense()) {
            Eigen::VectorXcd c(grid_);
            c.setZero();
            for (std::size_t i = 0; i < row_idx.size(); ++i) {
                c.noalias() += dense_.row(row_idx[i]).transpose().conjugate() *
                               residual[static_cast<Eigen::Index>(i)];
            }
            return c;
        }
        // scatter into the grid and run one length-grid transform with the
        // conjugate exponent
        std::vector<cplx> buf(grid_, cplx{});
        for (std::size_t i = 0; i < row_idx.size(); ++i) {
            buf[row_idx[i]] += residual[static_cast<Eigen::Index>(i)];
        }
        detail::Fft::transform(buf, -sign_);
        return Eigen::Map<Eigen::VectorXcd>(reinterpret_cast<cplx*>(buf.data()), grid_);
    }

    /// l2 norm of every compressed atom. Uniform sqrt(count) for
    /// unit-modulus partial-DFT dictionaries.
    Eigen::VectorXd compressed_norms(std::span<const int> row_idx) const {
        Eigen::VectorXd norms(grid_);
        if (!is_dense()) {
            norms.setConstant(std::sqrt(static_cast<double>(row_idx.size())));
            return norms;
        }
        for (int q = 0; q < grid_; ++q) {
            double s = 0.0;
            for (std::size_t i = 0; i < row_idx.size(); ++i) s += std::norm(dense_(row_idx[i], q));
            norms[q] = std::sqrt(s);
        }
        return norms;
    }

private:
    int rows_ = 0;
    int grid_ = 0;
    int sign_ = -1;
    Eigen::MatrixXcd dense_;
    GridMeta meta_;
};

/// First `rows` rows of the (oversample * rows)-order DFT matrix.
inline Dictionary build_dft_dictionary(int rows, int oversample, int sign = -1,
                                       GridMeta meta = {}) {
    if (rows < 1 || oversample < 1) {
        throw Error(ErrorCode::InvalidParameter, "dictionary dimensions must be positive");
    }
    return Dictionary::partial_dft(rows, oversample * rows, sign, meta);
}

/// Angle steering dictionary:
/// entry (i, q) = exp[-j pi i sin((q - rho LtLr / 2) pi / (rho LtLr))].
inline Dictionary build_ae_dictionary(int lt_lr, int rho_ae) {
    if (lt_lr < 2) throw Error(ErrorCode::InvalidParameter, "need at least two virtual elements");
    const int grid = rho_ae * lt_lr;
    Eigen::MatrixXcd atoms(lt_lr, grid);
    for (int q = 0; q < grid; ++q) {
        const double theta = (q - grid / 2.0) * std::numbers::pi / grid;
        for (int i = 0; i < lt_lr; ++i) {
            atoms(i, q) = std::polar(1.0, -std::numbers::pi * i * std::sin(theta));
        }
    }
    GridMeta meta;
    meta.origin = -std::numbers::pi / 2.0;
    meta.step = std::numbers::pi / grid;
    meta.unit = "rad";
    return Dictionary::dense(std::move(atoms), meta);
}

/// Support, coefficients (one column per measurement column) and final
/// residual norm of a greedy recovery.
struct SparseEstimate {
    std::vector<int> support;
    Eigen::MatrixXcd coeffs;
    double residual_norm = 0.0;
    bool rank_deficient = false;

    /// Coefficient row for a grid index in the support.
    Eigen::RowVectorXcd row_for(int grid_index) const {
        for (std::size_t i = 0; i < support.size(); ++i) {
            if (support[i] == grid_index) return coeffs.row(static_cast<Eigen::Index>(i));
        }
        throw Error(ErrorCode::InvalidParameter, "grid index not in support");
    }
};

struct OmpStop {
    int max_atoms = 1;
    double residual_tol = 0.0;  ///< stop when ||R|| <= tol * ||Y||
};

namespace detail {

/// Greedy loop shared by omp and mmv_omp. Selection scores are l2 norms
/// across measurement columns of correlations with l2-normalized
/// compressed atoms; coefficients are refit jointly against the
/// unnormalized atoms each iteration.
inline SparseEstimate greedy_pursuit(const Eigen::MatrixXcd& y, const Dictionary& dict,
                                     std::span<const int> row_idx, const OmpStop& stop) {
    if (static_cast<std::size_t>(y.rows()) != row_idx.size()) {
        throw Error(ErrorCode::LengthMismatch, "measurement rows must match selection");
    }
    const int grid = dict.grid();
    const Eigen::VectorXd norms = dict.compressed_norms(row_idx);
    const double y_norm = y.norm();

    SparseEstimate est;
    est.residual_norm = y_norm;
    if (y_norm == 0.0) return est;

    Eigen::MatrixXcd residual = y;
    Eigen::MatrixXcd atoms(y.rows(), 0);
    std::vector<char> used(grid, 0);
    double prev_norm = y_norm;

    for (int it = 0; it < stop.max_atoms; ++it) {
        if (est.residual_norm <= stop.residual_tol * y_norm) break;

        Eigen::VectorXd score = Eigen::VectorXd::Zero(grid);
        for (Eigen::Index c = 0; c < residual.cols(); ++c) {
            const Eigen::VectorXcd corr = dict.correlate(row_idx, residual.col(c));
            score += corr.cwiseAbs2();
        }
        int best = -1;
        double best_score = -1.0;
        for (int q = 0; q < grid; ++q) {
            if (used[q] || norms[q] == 0.0) continue;
            const double s = score[q] / (norms[q] * norms[q]);
            if (s > best_score) {  // strict: ties resolve to the lowest index
                best_score = s;
                best = q;
            }
        }
        if (best < 0) break;

        atoms.conservativeResize(Eigen::NoChange, atoms.cols() + 1);
        atoms.col(atoms.cols() - 1) = dict.compressed_atom(row_idx, best);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(atoms);
        if (qr.rank() < atoms.cols()) {
            est.rank_deficient = true;
            atoms.conservativeResize(Eigen::NoChange, atoms.cols() - 1);
            break;
        }
        used[best] = 1;
        est.support.push_back(best);
        est.coeffs = qr.solve(y);
        residual = y - atoms * est.coeffs;
        est.residual_norm = residual.norm();
        // greedy least squares can only shrink the residual
        if (est.residual_norm > prev_norm * (1.0 + 1e-9) + 1e-12) {
            throw Error(ErrorCode::RankDeficient, "residual norm increased in pursuit");
        }
        prev_norm = est.residual_norm;
    }
    return est;
}

}  // namespace detail

/// Single-vector orthogonal matching pursuit against the row-compressed
/// dictionary.
inline SparseEstimate omp(const Eigen::VectorXcd& y, const Dictionary& dict,
                          std::span<const int> row_idx, const OmpStop& stop) {
    return detail::greedy_pursuit(y, dict, row_idx, stop);
}

/// MMV variant: one shared support across all measurement columns,
/// exactly k rows selected (fewer only on rank deficiency).
inline SparseEstimate mmv_omp(const Eigen::MatrixXcd& y, const Dictionary& dict,
                              std::span<const int> row_idx, int k) {
    if (k < 1) throw Error(ErrorCode::InvalidParameter, "row sparsity must be positive");
    OmpStop stop;
    stop.max_atoms = k;
    stop.residual_tol = 0.0;
    return detail::greedy_pursuit(y, dict, row_idx, stop);
}

/// The k support rows with the largest aggregate coefficient l2 norms,
/// descending; ties break toward the lower grid index.
inline std::vector<int> top_k_rows(const SparseEstimate& est, int k) {
    if (static_cast<int>(est.support.size()) < k) {
        throw Error(ErrorCode::InvalidParameter, "fewer supported rows than requested");
    }
    std::vector<std::pair<double, int>> ranked;
    ranked.reserve(est.support.size());
    for (std::size_t i = 0; i < est.support.size(); ++i) {
        ranked.emplace_back(est.coeffs.row(static_cast<Eigen::Index>(i)).norm(), est.support[i]);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<int> rows(k);
    for (int i = 0; i < k; ++i) rows[i] = ranked[i].second;
    return rows;
}

}  // namespace loradar
