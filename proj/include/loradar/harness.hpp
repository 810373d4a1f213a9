// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "loradar/channel.hpp"
#include "loradar/comms.hpp"
#include "loradar/config.hpp"
#include "loradar/io.hpp"
#include "loradar/sensing.hpp"

namespace loradar {

enum class Scheme { Cs, UniformDft, LoraBaseline };
enum class Task { Sensing, Comms };

/// How the SNR axis is referenced. Bandwidth: noise density is set
/// against the sweep bandwidth B, so a sampler with base rate f sees
/// per-sample SNR of snr - 10 log10(f / B). Sample: per-sample SNR equals
/// the configured value directly.
enum class NoiseRef { Bandwidth, Sample };

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::Cs: return "cs";
        case Scheme::UniformDft: return "uniform-dft";
        case Scheme::LoraBaseline: return "lora-baseline";
    }
    return "?";
}

inline const char* to_string(Task t) { return t == Task::Sensing ? "sensing" : "comms"; }

struct SceneSpec {
    int k = 6;
    Interval range{0.0, 70.0};
    Interval vel{-50.0, 50.0};
    Interval angle{-std::numbers::pi / 3.0, std::numbers::pi / 3.0};
};

struct ExperimentConfig {
    Scheme scheme = Scheme::Cs;
    Task task = Task::Sensing;
    std::vector<double> snr_grid_db;
    int trials = 200;  ///< sensing: frames per SNR; comms: symbols per SNR
    WaveformParams params;
    SceneSpec scene;
    std::string output_path;
    NoiseRef noise_ref = NoiseRef::Bandwidth;
    double baseline_rate = 28.125e6;  ///< uniform-DFT fast-time sampling rate (Hz)

    void check() const {
        if (trials < 1) throw Error(ErrorCode::ConfigError, "trials must be >= 1");
        if (snr_grid_db.empty()) throw Error(ErrorCode::ConfigError, "SNR grid is empty");
    }
};

struct SnrMetrics {
    double snr_db = 0.0;
    long trial_count = 0;
    // sensing
    long hits = 0;
    long targets_total = 0;
    std::vector<double> range_err;  ///< all matched targets
    std::vector<double> vel_err;    ///< hit targets only
    std::vector<double> angle_err;  ///< hit targets only
    // comms
    long symbol_errors = 0;
    long symbols_total = 0;
    long full_alphabet_errors = 0;

    double hit_rate() const {
        return targets_total ? static_cast<double>(hits) / targets_total : 0.0;
    }
    double ser() const {
        return symbols_total ? static_cast<double>(symbol_errors) / symbols_total : 0.0;
    }
    double full_alphabet_ser() const {
        return symbols_total ? static_cast<double>(full_alphabet_errors) / symbols_total : 0.0;
    }
};

struct MetricsRecord {
    Scheme scheme = Scheme::Cs;
    Task task = Task::Sensing;
    std::vector<SnrMetrics> per_snr;
    double effective_bits = 0.0;
    double comm_rate_bps = 0.0;
    std::uint64_t run_seed = 0;
    std::uint64_t params_hash = 0;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t config_hash(const ExperimentConfig& cfg) {
    nlohmann::json j = waveform_params_to_json(cfg.params);
    j["scheme"] = to_string(cfg.scheme);
    j["task"] = to_string(cfg.task);
    j["trials"] = cfg.trials;
    j["snr_grid_db"] = cfg.snr_grid_db;
    j["scene_k"] = cfg.scene.k;
    j["scene_range"] = {cfg.scene.range.lo, cfg.scene.range.hi};
    j["scene_vel"] = {cfg.scene.vel.lo, cfg.scene.vel.hi};
    j["scene_angle"] = {cfg.scene.angle.lo, cfg.scene.angle.hi};
    j["noise_ref"] = cfg.noise_ref == NoiseRef::Bandwidth ? "bandwidth" : "sample";
    j["baseline_rate"] = cfg.baseline_rate;
    return fnv1a(j.dump());
}

inline int worker_count() {
    if (const char* env = std::getenv("LORADAR_WORKERS")) {
        const int w = std::atoi(env);
        if (w >= 1) return w;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

/// Runs fn(i) for i in [0, n) on a small worker pool. Each index is
/// independent, so results do not depend on the schedule.
template <typename Fn>
void parallel_for_index(long n, Fn&& fn) {
    const int workers = std::min<long>(worker_count(), n);
    if (workers <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

/// Greedy nearest-range assignment between truth and estimates.
/// Returns est index per target, -1 when unmatched.
inline std::vector<int> greedy_range_match(const std::vector<double>& truth_r,
                                           const std::vector<double>& est_r) {
    std::vector<int> match(truth_r.size(), -1);
    std::vector<char> used(est_r.size(), 0);
    const std::size_t rounds = std::min(truth_r.size(), est_r.size());
    for (std::size_t round = 0; round < rounds; ++round) {
        double best = std::numeric_limits<double>::infinity();
        int bt = -1, be = -1;
        for (std::size_t t = 0; t < truth_r.size(); ++t) {
            if (match[t] >= 0) continue;
            for (std::size_t e = 0; e < est_r.size(); ++e) {
                if (used[e]) continue;
                const double d = std::abs(truth_r[t] - est_r[e]);
                if (d < best) {
                    best = d;
                    bt = static_cast<int>(t);
                    be = static_cast<int>(e);
                }
            }
        }
        if (bt < 0) break;
        match[bt] = be;
        used[be] = 1;
    }
    return match;
}

inline double effective_snr_db(const ExperimentConfig& cfg, double snr_db, double base_rate) {
    if (cfg.noise_ref == NoiseRef::Sample) return snr_db;
    return snr_db - 10.0 * std::log10(base_rate / cfg.params.b);
}

}  // namespace detail

/// Waveform parameters of the uniform-sampling baseline receiver: the
/// LPF cutoff and full sampling rate drop to cfg.baseline_rate.
inline WaveformParams baseline_params(const ExperimentConfig& cfg) {
    WaveformParams wp = cfg.params;
    wp.fmax = cfg.baseline_rate;
    wp.rho_re = 1;
    const int nmax_b =
        static_cast<int>(std::floor(wp.fmax * (wp.t - wp.t_mix)));
    wp.n = nmax_b;
    wp.nmax_override = 0;
    return wp;
}

struct SensingTrialOutcome {
    int hits = 0;
    int targets = 0;
    std::vector<double> range_err;
    std::vector<double> vel_err;
    std::vector<double> angle_err;
};

/// One sensing Monte-Carlo trial. All randomness derives from
/// (seed, trial_index): draw order is scene, payload, schedule, sampling
/// set, then noise inside synthesize_if.
inline SensingTrialOutcome run_sensing_trial(const ExperimentConfig& cfg, double snr_db,
                                             std::uint64_t trial_index) {
    const bool baseline = cfg.scheme == Scheme::UniformDft;
    const WaveformParams wp = baseline ? baseline_params(cfg) : cfg.params;
    const DerivedParams dp = validate(wp);
    detail::Rng rng(cfg.params.seed, trial_index);

    SensingTrialOutcome out;
    const SensingScene scene =
        generate_scene(cfg.scene.k, cfg.scene.range, cfg.scene.vel, cfg.scene.angle, rng,
                       wp, dp);
    out.targets = cfg.scene.k;
    try {
        const Payload payload = generate_payload(wp.p, dp.h, rng);
        const TdmSchedule schedule = baseline ? alternating_schedule(wp.p, wp.lt)
                                              : generate_schedule(wp.p, wp.lt, rng);
        const SamplingIndexSet set = baseline ? uniform_set(dp.nmax, dp.nmax)
                                              : draw_random_set(wp.n, dp.nmax, rng);
        const double snr_eff = detail::effective_snr_db(cfg, snr_db, wp.fmax);
        const IfSampleTensor tensor =
            synthesize_if(scene, schedule, payload, set, wp, dp, snr_eff, rng);
        const SensingOutput output =
            baseline ? baseline_uniform_dft(tensor, schedule, payload, set, wp, dp, cfg.scene.k)
                     : run_cs_pipeline(tensor, schedule, payload, set, wp, dp, cfg.scene.k);

        std::vector<double> truth_r(scene.targets.size());
        for (std::size_t i = 0; i < scene.targets.size(); ++i) truth_r[i] = scene.targets[i].r;
        std::vector<double> est_r(output.targets.size());
        for (std::size_t i = 0; i < output.targets.size(); ++i) est_r[i] = output.targets[i].r_hat;
        const std::vector<int> match = detail::greedy_range_match(truth_r, est_r);

        for (std::size_t t = 0; t < scene.targets.size(); ++t) {
            if (match[t] < 0) continue;  // unmatched counts as a miss
            const Target& truth = scene.targets[t];
            const TargetEstimate& est = output.targets[match[t]];
            const double range_error = std::abs(est.r_hat - truth.r);
            out.range_err.push_back(range_error);
            if (range_error < dp.hit_threshold) {
                ++out.hits;
                out.vel_err.push_back(std::abs(est.velocity.v_hat - truth.v));
                out.angle_err.push_back(std::abs(est.angle.theta_hat - truth.theta));
            }
        }
    } catch (const std::exception&) {
        // solver failure: every target of the trial counts as missed
    }
    return out;
}

struct CommsTrialOutcome {
    int symbols = 0;
    int errors = 0;
    int full_alphabet_errors = 0;
};

/// One comms trial = one frame of P symbols sharing a sampling index set.
inline CommsTrialOutcome run_comms_trial(const ExperimentConfig& cfg, double snr_db,
                                         std::uint64_t trial_index, int symbols_wanted) {
    const WaveformParams& wp = cfg.params;
    const DerivedParams dp = validate(wp);
    detail::Rng rng(cfg.params.seed, trial_index);

    CommsTrialOutcome out;
    const int nsym = std::min(symbols_wanted, wp.p);
    Payload payload = generate_payload(wp.p, dp.h, rng);
    payload.h.resize(nsym);
    const bool baseline = cfg.scheme == Scheme::LoraBaseline;
    const SamplingIndexSet set = baseline ? uniform_set(wp.nbar, dp.nbar_max)
                                          : draw_random_set(wp.nbar, dp.nbar_max, rng);
    CommLink link;
    link.alpha_bar = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
    const double snr_eff = detail::effective_snr_db(cfg, snr_db, wp.fbar);

    try {
        const auto rx = comm_rx_samples(payload, set, wp, dp, snr_eff, rng, link);
        if (baseline) {
            for (int s = 0; s < nsym; ++s) {
                const LoraBaselineResult res = lora_baseline_demod(rx[s], set, wp, dp);
                ++out.symbols;
                if (res.h_hat_reduced != payload.h[s] % res.reduced_alphabet) ++out.errors;
                if (res.h_hat_full != payload.h[s]) ++out.full_alphabet_errors;
            }
        } else {
            const std::vector<cplx> down = build_downchirp(set, wp, dp);
            for (int s = 0; s < nsym; ++s) {
                const DechirpSequence seq = dechirp(rx[s], down, set);
                const DemodResult res = demodulate(seq, dp, 0.0);
                ++out.symbols;
                if (res.h_hat != payload.h[s]) ++out.errors;
                if (res.h_hat != payload.h[s]) ++out.full_alphabet_errors;
            }
        }
    } catch (const std::exception&) {
        out.errors += nsym - out.symbols;
        out.full_alphabet_errors += nsym - out.symbols;
        out.symbols = nsym;
    }
    return out;
}

inline MetricsRecord run_sensing_experiment(const ExperimentConfig& cfg) {
    cfg.check();
    validate(cfg.params);
    MetricsRecord record;
    record.scheme = cfg.scheme;
    record.task = Task::Sensing;
    record.run_seed = cfg.params.seed;
    record.params_hash = detail::config_hash(cfg);
    record.per_snr.resize(cfg.snr_grid_db.size());

    for (std::size_t si = 0; si < cfg.snr_grid_db.size(); ++si) {
        const double snr = cfg.snr_grid_db[si];
        std::vector<SensingTrialOutcome> results(cfg.trials);
        detail::parallel_for_index(cfg.trials, [&](long i) {
            const std::uint64_t trial_index = si * static_cast<std::uint64_t>(cfg.trials) + i;
            results[i] = run_sensing_trial(cfg, snr, trial_index);
        });
        SnrMetrics& m = record.per_snr[si];
        m.snr_db = snr;
        m.trial_count = cfg.trials;
        for (const auto& r : results) {
            m.hits += r.hits;
            m.targets_total += r.targets;
            m.range_err.insert(m.range_err.end(), r.range_err.begin(), r.range_err.end());
            m.vel_err.insert(m.vel_err.end(), r.vel_err.begin(), r.vel_err.end());
            m.angle_err.insert(m.angle_err.end(), r.angle_err.begin(), r.angle_err.end());
        }
        std::sort(m.range_err.begin(), m.range_err.end());
        std::sort(m.vel_err.begin(), m.vel_err.end());
        std::sort(m.angle_err.begin(), m.angle_err.end());
    }
    return record;
}

inline MetricsRecord run_comms_experiment(const ExperimentConfig& cfg) {
    cfg.check();
    const DerivedParams dp = validate(cfg.params);
    MetricsRecord record;
    record.scheme = cfg.scheme;
    record.task = Task::Comms;
    record.run_seed = cfg.params.seed;
    record.params_hash = detail::config_hash(cfg);
    if (cfg.scheme == Scheme::LoraBaseline) {
        const double eta = static_cast<double>(cfg.params.nbar) / dp.nbar_max;
        record.effective_bits = cfg.params.nsf + std::log2(eta);
    } else {
        record.effective_bits = cfg.params.nsf;
    }
    record.comm_rate_bps = record.effective_bits / dp.t0;
    record.per_snr.resize(cfg.snr_grid_db.size());

    const int frames = (cfg.trials + cfg.params.p - 1) / cfg.params.p;
    for (std::size_t si = 0; si < cfg.snr_grid_db.size(); ++si) {
        const double snr = cfg.snr_grid_db[si];
        std::vector<CommsTrialOutcome> results(frames);
        detail::parallel_for_index(frames, [&](long f) {
            const std::uint64_t trial_index = si * static_cast<std::uint64_t>(frames) + f;
            const int remaining = cfg.trials - static_cast<int>(f) * cfg.params.p;
            results[f] = run_comms_trial(cfg, snr, trial_index, remaining);
        });
        SnrMetrics& m = record.per_snr[si];
        m.snr_db = snr;
        m.trial_count = cfg.trials;
        for (const auto& r : results) {
            m.symbols_total += r.symbols;
            m.symbol_errors += r.errors;
            m.full_alphabet_errors += r.full_alphabet_errors;
        }
    }
    return record;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Writes the CSV (schema: scheme,task,snr_db,metric,value,trial_count,
/// seed,params_hash) plus a JSON sidecar at path + ".meta.json". Output
/// bytes depend only on (seed, config).
inline void emit_results(const MetricsRecord& record, const ExperimentConfig& cfg,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    out << "scheme,task,snr_db,metric,value,trial_count,seed,params_hash\n";
    char hash_hex[20];
    std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                  static_cast<unsigned long long>(record.params_hash));
    auto row = [&](double snr, const char* metric, double value, long trials) {
        out << to_string(record.scheme) << ',' << to_string(record.task) << ','
            << detail::format_double(snr) << ',' << metric << ','
            << detail::format_double(value) << ',' << trials << ',' << record.run_seed << ','
            << hash_hex << '\n';
    };
    for (const SnrMetrics& m : record.per_snr) {
        if (record.task == Task::Sensing) {
            row(m.snr_db, "hit_rate", m.hit_rate(), m.trial_count);
            for (double v : m.range_err) row(m.snr_db, "range_err_cdf", v, m.trial_count);
            for (double v : m.vel_err) row(m.snr_db, "vel_err_cdf", v, m.trial_count);
            for (double v : m.angle_err) row(m.snr_db, "angle_err_cdf", v, m.trial_count);
        } else {
            row(m.snr_db, "ser", m.ser(), m.symbols_total);
            if (record.scheme == Scheme::LoraBaseline) {
                row(m.snr_db, "ser_full_alphabet", m.full_alphabet_ser(), m.symbols_total);
            }
            row(m.snr_db, "effective_bits_per_symbol", record.effective_bits, m.symbols_total);
            row(m.snr_db, "comm_rate_bps", record.comm_rate_bps, m.symbols_total);
        }
    }
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "short write to " + path);

    nlohmann::json meta;
    meta["schema"] = "scheme,task,snr_db,metric,value,trial_count,seed,params_hash";
    meta["params"] = waveform_params_to_json(cfg.params);
    meta["scheme"] = to_string(cfg.scheme);
    meta["task"] = to_string(cfg.task);
    meta["snr_grid_db"] = cfg.snr_grid_db;
    meta["trials"] = cfg.trials;
    meta["scene"] = {{"k", cfg.scene.k},
                     {"range", {cfg.scene.range.lo, cfg.scene.range.hi}},
                     {"vel", {cfg.scene.vel.lo, cfg.scene.vel.hi}},
                     {"angle", {cfg.scene.angle.lo, cfg.scene.angle.hi}}};
    meta["noise_ref"] = cfg.noise_ref == NoiseRef::Bandwidth ? "bandwidth" : "sample";
    meta["baseline_rate"] = cfg.baseline_rate;
    meta["seed"] = cfg.params.seed;
    meta["params_hash"] = hash_hex;
    meta["rng"] = "per-trial mt19937_64 streams derived from (seed, trial_index)";
    std::ofstream meta_out(path + ".meta.json");
    if (!meta_out) throw Error(ErrorCode::IoError, "cannot write sidecar for " + path);
    meta_out << meta.dump(2) << '\n';
}

/// Full per-trial dump (scene, payload, schedule, index set, estimates)
/// for reproducibility inspection.
inline nlohmann::json trace_sensing_trial(const ExperimentConfig& cfg, double snr_db,
                                          std::uint64_t trial_index) {
    const bool baseline = cfg.scheme == Scheme::UniformDft;
    const WaveformParams wp = baseline ? baseline_params(cfg) : cfg.params;
    const DerivedParams dp = validate(wp);
    detail::Rng rng(cfg.params.seed, trial_index);

    const SensingScene scene = generate_scene(cfg.scene.k, cfg.scene.range, cfg.scene.vel,
                                              cfg.scene.angle, rng, wp, dp);
    const Payload payload = generate_payload(wp.p, dp.h, rng);
    const TdmSchedule schedule =
        baseline ? alternating_schedule(wp.p, wp.lt) : generate_schedule(wp.p, wp.lt, rng);
    const SamplingIndexSet set =
        baseline ? uniform_set(dp.nmax, dp.nmax) : draw_random_set(wp.n, dp.nmax, rng);
    const double snr_eff = detail::effective_snr_db(cfg, snr_db, wp.fmax);
    const IfSampleTensor tensor =
        synthesize_if(scene, schedule, payload, set, wp, dp, snr_eff, rng);
    const SensingOutput output =
        baseline ? baseline_uniform_dft(tensor, schedule, payload, set, wp, dp, cfg.scene.k)
                 : run_cs_pipeline(tensor, schedule, payload, set, wp, dp, cfg.scene.k);

    nlohmann::json estimates = nlohmann::json::array();
    for (const TargetEstimate& te : output.targets) {
        estimates.push_back({{"r_hat", te.r_hat},
                             {"v_hat", te.velocity.v_hat},
                             {"theta_hat", te.angle.theta_hat},
                             {"n_hat", te.n_hat}});
    }
    return nlohmann::json{{"trial_index", trial_index},
                          {"snr_db", snr_db},
                          {"scene", to_json(scene)},
                          {"payload", to_json(payload)},
                          {"schedule", to_json(schedule)},
                          {"sampling_set", to_json(set)},
                          {"estimates", estimates}};
}

}  // namespace loradar
