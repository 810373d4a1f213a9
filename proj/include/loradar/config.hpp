// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "loradar/errors.hpp"

namespace loradar {

inline constexpr double kSpeedOfLight = 299792458.0;

/// User-settable waveform and sampling parameters. SI base units throughout.
struct WaveformParams {
    double fc = 0.0;      ///< carrier frequency (Hz)
    double b = 0.0;       ///< sweep bandwidth (Hz)
    int nsf = 0;          ///< spreading factor (bits/symbol)
    double t = 0.0;       ///< payload duration (s)
    double t_gi = 0.0;    ///< guard interval (s)
    double t_mix = 0.0;   ///< mixing guard (s)
    int p = 0;            ///< symbols per frame
    int lt = 0;           ///< transmit antennas
    int lr = 0;           ///< receive antennas
    double fmax = 0.0;    ///< sensing LPF cutoff / AIC base rate (Hz)
    double fbar = 0.0;    ///< comm AIC base rate (Hz)
    int n = 0;            ///< sensing AIC samples per symbol
    int nbar = 0;         ///< comm AIC samples per symbol
    int rho_re = 1;       ///< range dictionary oversampling
    int rho_ve = 1;       ///< velocity dictionary oversampling
    int rho_ae = 1;       ///< angle dictionary oversampling
    std::uint64_t seed = 0;
    int nmax_override = 0;  ///< 0 = use floor(fmax (T - Tmix)); else forced Nmax
};

/// Quantities derived from WaveformParams by validate(); immutable afterwards.
struct DerivedParams {
    int h = 0;                   ///< alphabet size 2^nsf
    double t0 = 0.0;             ///< symbol duration T + TGI (s)
    double lambda = 0.0;         ///< wavelength (m)
    double d = 0.0;              ///< receive element spacing lambda/2 (m)
    int nmax = 0;                ///< full-rate sensing samples per symbol
    int nbar_max = 0;            ///< full-rate comm samples per symbol
    double range_grid_step = 0.0;  ///< range bin width (m)
    double vel_grid_step = 0.0;    ///< velocity bin width (m/s)
    double v_max_unamb = 0.0;      ///< maximum unambiguous velocity (m/s)
    double r_max = 0.0;            ///< maximum unambiguous range (m)
    double hit_threshold = 0.0;    ///< range-hit criterion (m)
    int demod_bin_offset = 0;      ///< (fbar - B) H / B, spectral fold distance in bins
};

namespace detail {
inline void require(bool cond, ErrorCode code, const std::string& msg) {
    if (!cond) throw Error(code, msg);
}
}  // namespace detail

/// Checks every invariant and evaluates all derived quantities.
/// Pure and idempotent.
inline DerivedParams validate(const WaveformParams& wp) {
    using detail::require;
    require(wp.fc > 0 && wp.b > 0 && wp.t > 0 && wp.t_gi > 0 && wp.t_mix > 0 &&
                wp.fmax > 0 && wp.fbar > 0,
            ErrorCode::InvalidParameter, "frequencies and durations must be positive");
    require(wp.nsf >= 1 && wp.p >= 1 && wp.lt >= 1 && wp.lr >= 1 && wp.n >= 1 && wp.nbar >= 1,
            ErrorCode::InvalidParameter, "counts must be positive");
    require(wp.rho_re >= 1 && wp.rho_ve >= 1 && wp.rho_ae >= 1,
            ErrorCode::InvalidParameter, "oversampling factors must be >= 1");
    require(wp.t_gi >= wp.t_mix, ErrorCode::InvalidParameter, "TGI must be >= Tmix");
    require(wp.t > wp.t_mix, ErrorCode::InvalidParameter, "T must exceed Tmix");

    DerivedParams dp;
    dp.h = 1 << wp.nsf;

    const double b_expected = static_cast<double>(dp.h) / wp.t;
    require(std::abs(wp.b - b_expected) / wp.b <= 1e-3, ErrorCode::BandwidthMismatch,
            "B must equal 2^NSF / T within 1e-3 relative tolerance");

    require(wp.p % wp.lt == 0, ErrorCode::ScheduleIndivisible,
            "P must be an integer multiple of Lt");

    dp.t0 = wp.t + wp.t_gi;
    dp.lambda = kSpeedOfLight / wp.fc;
    dp.d = dp.lambda / 2.0;
    dp.nmax = wp.nmax_override > 0
                  ? wp.nmax_override
                  : static_cast<int>(std::floor(wp.fmax * (wp.t - wp.t_mix)));
    dp.nbar_max = static_cast<int>(std::floor(wp.fbar * wp.t));
    require(dp.nmax >= 1 && dp.nbar_max >= 1, ErrorCode::InvalidParameter,
            "derived sample counts must be positive");
    require(wp.n <= dp.nmax, ErrorCode::SamplingOverrun, "N exceeds Nmax");
    require(wp.nbar <= dp.nbar_max, ErrorCode::SamplingOverrun, "Nbar exceeds NbarMax");

    require(wp.fbar >= wp.b, ErrorCode::InvalidParameter,
            "fbar must be at least B for reliable demodulation");
    const double offset = (wp.fbar - wp.b) * dp.h / wp.b;
    require(std::abs(offset - std::round(offset)) <= 1e-6 * std::max(1.0, offset),
            ErrorCode::BinOffsetNonInteger, "(fbar - B) 2^NSF / B must be an integer");
    dp.demod_bin_offset = static_cast<int>(std::round(offset));

    dp.range_grid_step =
        wp.fmax * wp.t * kSpeedOfLight / (2.0 * wp.b * wp.rho_re * dp.nmax);
    dp.vel_grid_step = dp.lambda / (2.0 * wp.rho_ve * wp.p * dp.t0);
    dp.v_max_unamb = dp.lambda / (4.0 * dp.t0);
    dp.r_max = kSpeedOfLight * wp.fmax * (wp.t - wp.t_mix) / (2.0 * wp.b);
    dp.hit_threshold = kSpeedOfLight * (wp.t - wp.t_mix) / (2.0 * wp.b * wp.t);
    require(dp.hit_threshold < dp.r_max, ErrorCode::InvalidParameter,
            "hit threshold must be below the maximum range");
    return dp;
}

/// The 77 GHz / 1 GHz preset. T is set to 2^NSF / B exactly so the
/// B = H/T constraint holds; pass nmax_override = 512 to mimic the
/// literal published constants instead.
inline WaveformParams preset_1ghz() {
    WaveformParams wp;
    wp.fc = 77e9;
    wp.b = 1e9;
    wp.nsf = 14;
    wp.t = 16384.0 / 1e9;  // 16.384 us
    wp.t_gi = 0.5e-6;
    wp.t_mix = 0.5e-6;
    wp.p = 120;
    wp.lt = 2;
    wp.lr = 6;
    wp.fmax = 31.25e6;
    wp.fbar = 2e9;
    wp.n = 448;
    wp.nbar = 512;
    wp.rho_re = 1;
    wp.rho_ve = 1;
    wp.rho_ae = 15;
    wp.seed = 1;
    return wp;
}

/// The 500 MHz / NSF=13 preset; same T and fbar as preset_1ghz().
inline WaveformParams preset_500mhz() {
    WaveformParams wp = preset_1ghz();
    wp.b = 500e6;
    wp.nsf = 13;
    return wp;
}

/// Parses a JSON document whose keys are exactly the snake_case parameter
/// names. Every parameter except nmax_override is required; unknown keys
/// are a hard error.
inline WaveformParams parse_waveform_params(const nlohmann::json& j) {
    static const std::set<std::string> known = {
        "fc", "b", "nsf", "t", "t_gi", "t_mix", "p", "lt", "lr", "fmax", "fbar",
        "n", "nbar", "rho_re", "rho_ve", "rho_ae", "seed", "nmax_override"};
    for (const auto& item : j.items()) {
        if (!known.count(item.key())) {
            throw Error(ErrorCode::ConfigError, "unknown configuration key '" + item.key() + "'");
        }
    }
    auto require_key = [&](const char* key) -> const nlohmann::json& {
        if (!j.contains(key)) {
            throw Error(ErrorCode::ConfigError, std::string("missing configuration key '") + key + "'");
        }
        return j.at(key);
    };
    WaveformParams wp;
    wp.fc = require_key("fc").get<double>();
    wp.b = require_key("b").get<double>();
    wp.nsf = require_key("nsf").get<int>();
    wp.t = require_key("t").get<double>();
    wp.t_gi = require_key("t_gi").get<double>();
    wp.t_mix = require_key("t_mix").get<double>();
    wp.p = require_key("p").get<int>();
    wp.lt = require_key("lt").get<int>();
    wp.lr = require_key("lr").get<int>();
    wp.fmax = require_key("fmax").get<double>();
    wp.fbar = require_key("fbar").get<double>();
    wp.n = require_key("n").get<int>();
    wp.nbar = require_key("nbar").get<int>();
    wp.rho_re = require_key("rho_re").get<int>();
    wp.rho_ve = require_key("rho_ve").get<int>();
    wp.rho_ae = require_key("rho_ae").get<int>();
    wp.seed = require_key("seed").get<std::uint64_t>();
    if (j.contains("nmax_override")) wp.nmax_override = j.at("nmax_override").get<int>();
    return wp;
}

inline WaveformParams load_waveform_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, "malformed config " + path + ": " + e.what());
    }
    return parse_waveform_params(j);
}

inline nlohmann::json waveform_params_to_json(const WaveformParams& wp) {
    nlohmann::json j;
    j["fc"] = wp.fc;
    j["b"] = wp.b;
    j["nsf"] = wp.nsf;
    j["t"] = wp.t;
    j["t_gi"] = wp.t_gi;
    j["t_mix"] = wp.t_mix;
    j["p"] = wp.p;
    j["lt"] = wp.lt;
    j["lr"] = wp.lr;
    j["fmax"] = wp.fmax;
    j["fbar"] = wp.fbar;
    j["n"] = wp.n;
    j["nbar"] = wp.nbar;
    j["rho_re"] = wp.rho_re;
    j["rho_ve"] = wp.rho_ve;
    j["rho_ae"] = wp.rho_ae;
    j["seed"] = wp.seed;
    j["nmax_override"] = wp.nmax_override;
    return j;
}

}  // namespace loradar
