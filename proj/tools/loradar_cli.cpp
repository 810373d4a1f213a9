// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: Monte-Carlo sensing / comms experiments and
// single-trial traces.

#include <cstdio>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "loradar/harness.hpp"

namespace {

struct CommonArgs {
    std::string preset = "paper-1ghz";
    std::string config_path;
    std::string scheme = "cs";
    std::vector<double> snr;
    int trials = 0;
    std::uint64_t seed = 1;
    std::string out_path = "results.csv";
    std::string noise_ref = "bandwidth";
    int k = 6;
    double range_lo = 0.0, range_hi = 70.0;
    double vel_lo = -50.0, vel_hi = 50.0;
    double angle_lo_deg = -60.0, angle_hi_deg = 60.0;
    double baseline_rate = 28.125e6;
    int n_override = 0;
    int nbar_override = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--preset", a.preset, "paper-1ghz or paper-500mhz")
        ->check(CLI::IsMember({"paper-1ghz", "paper-500mhz"}));
    cmd->add_option("--config", a.config_path, "JSON waveform config (overrides --preset)");
    cmd->add_option("--scheme", a.scheme, "cs, uniform-dft (sense) or lora-baseline (comm)")
        ->check(CLI::IsMember({"cs", "uniform-dft", "lora-baseline"}));
    cmd->add_option("--snr", a.snr, "SNR grid in dB")->delimiter(',');
    cmd->add_option("--trials", a.trials, "trials (sensing: frames, comms: symbols) per SNR");
    cmd->add_option("--seed", a.seed, "RNG seed");
    cmd->add_option("--out", a.out_path, "output CSV path");
    cmd->add_option("--noise-ref", a.noise_ref, "SNR reference: bandwidth or sample")
        ->check(CLI::IsMember({"bandwidth", "sample"}));
    cmd->add_option("--n", a.n_override, "sensing AIC samples per symbol");
    cmd->add_option("--nbar", a.nbar_override, "comm AIC samples per symbol");
    cmd->add_option("--baseline-rate", a.baseline_rate, "uniform-DFT sampling rate (Hz)");
    cmd->add_option("--k", a.k, "targets per scene");
    cmd->add_option("--range-lo", a.range_lo, "scene range interval low (m)");
    cmd->add_option("--range-hi", a.range_hi, "scene range interval high (m)");
    cmd->add_option("--vel-lo", a.vel_lo, "scene velocity interval low (m/s)");
    cmd->add_option("--vel-hi", a.vel_hi, "scene velocity interval high (m/s)");
    cmd->add_option("--angle-lo", a.angle_lo_deg, "scene angle interval low (deg)");
    cmd->add_option("--angle-hi", a.angle_hi_deg, "scene angle interval high (deg)");
}

loradar::ExperimentConfig build_config(const CommonArgs& a, loradar::Task task) {
    loradar::ExperimentConfig cfg;
    cfg.task = task;
    if (!a.config_path.empty()) {
        cfg.params = loradar::load_waveform_params(a.config_path);
    } else {
        cfg.params = a.preset == "paper-500mhz" ? loradar::preset_500mhz()
                                                : loradar::preset_1ghz();
    }
    cfg.params.seed = a.seed;
    if (a.n_override > 0) cfg.params.n = a.n_override;
    if (a.nbar_override > 0) cfg.params.nbar = a.nbar_override;

    if (a.scheme == "cs") {
        cfg.scheme = loradar::Scheme::Cs;
    } else if (a.scheme == "uniform-dft") {
        cfg.scheme = loradar::Scheme::UniformDft;
    } else if (a.scheme == "lora-baseline") {
        cfg.scheme = loradar::Scheme::LoraBaseline;
    } else {
        throw loradar::Error(loradar::ErrorCode::ConfigError, "unknown scheme " + a.scheme);
    }
    cfg.snr_grid_db = a.snr;
    cfg.trials = a.trials > 0 ? a.trials : (task == loradar::Task::Sensing ? 200 : 2000);
    cfg.scene.k = a.k;
    cfg.scene.range = {a.range_lo, a.range_hi};
    cfg.scene.vel = {a.vel_lo, a.vel_hi};
    cfg.scene.angle = {a.angle_lo_deg * std::numbers::pi / 180.0,
                       a.angle_hi_deg * std::numbers::pi / 180.0};
    cfg.output_path = a.out_path;
    cfg.noise_ref = a.noise_ref == "sample" ? loradar::NoiseRef::Sample
                                            : loradar::NoiseRef::Bandwidth;
    cfg.baseline_rate = a.baseline_rate;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mmWave LoRa-FMCW ISAC simulator"};
    app.require_subcommand(1);

    CommonArgs sense_args;
    CLI::App* sense = app.add_subcommand("sense", "Monte-Carlo sensing experiment");
    add_common(sense, sense_args);

    CommonArgs comm_args;
    CLI::App* comm = app.add_subcommand("comm", "Monte-Carlo demodulation experiment");
    add_common(comm, comm_args);
    std::string dump_iq_path;
    comm->add_option("--dump-iq", dump_iq_path,
                     "write de-chirped I/Q of the first noiseless frame to this file");

    CommonArgs trace_args;
    std::uint64_t trace_trial = 0;
    double trace_snr = 10.0;
    CLI::App* trace = app.add_subcommand("trace", "dump one sensing trial as JSON");
    add_common(trace, trace_args);
    trace->add_option("--trial", trace_trial, "trial index");
    trace->add_option("--trial-snr", trace_snr, "SNR of the traced trial (dB)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sense->parsed()) {
            if (sense_args.snr.empty()) sense_args.snr = {10.0};
            if (sense_args.scheme == "lora-baseline") {
                throw loradar::Error(loradar::ErrorCode::ConfigError,
                                     "lora-baseline is a comms scheme");
            }
            loradar::ExperimentConfig cfg = build_config(sense_args, loradar::Task::Sensing);
            const loradar::MetricsRecord record = loradar::run_sensing_experiment(cfg);
            loradar::emit_results(record, cfg, cfg.output_path);
            for (const auto& m : record.per_snr) {
                std::printf("snr %+6.1f dB  hit rate %.4f  (%ld/%ld targets)\n", m.snr_db,
                            m.hit_rate(), m.hits, m.targets_total);
            }
            std::printf("wrote %s\n", cfg.output_path.c_str());
        } else if (comm->parsed()) {
            if (comm_args.snr.empty()) comm_args.snr = {0.0};
            if (comm_args.scheme == "uniform-dft") {
                throw loradar::Error(loradar::ErrorCode::ConfigError,
                                     "uniform-dft is a sensing scheme");
            }
            loradar::ExperimentConfig cfg = build_config(comm_args, loradar::Task::Comms);
            const loradar::MetricsRecord record = loradar::run_comms_experiment(cfg);
            loradar::emit_results(record, cfg, cfg.output_path);
            for (const auto& m : record.per_snr) {
                std::printf("snr %+6.1f dB  SER %.5f  (%ld/%ld symbols)\n", m.snr_db, m.ser(),
                            m.symbol_errors, m.symbols_total);
            }
            std::printf("Rc = %.1f bits/s (%.2f bits/symbol)\n", record.comm_rate_bps,
                        record.effective_bits);
            if (!dump_iq_path.empty()) {
                const auto dp = loradar::validate(cfg.params);
                loradar::detail::Rng rng(cfg.params.seed, 0);
                loradar::Payload payload =
                    loradar::generate_payload(cfg.params.p, dp.h, rng);
                const auto set = cfg.scheme == loradar::Scheme::LoraBaseline
                                     ? loradar::uniform_set(cfg.params.nbar, dp.nbar_max)
                                     : loradar::draw_random_set(cfg.params.nbar, dp.nbar_max,
                                                                rng);
                loradar::CommLink link;
                const auto rx = loradar::comm_rx_samples(payload, set, cfg.params, dp,
                                                         std::nullopt, rng, link);
                const auto down = loradar::build_downchirp(set, cfg.params, dp);
                std::vector<std::vector<loradar::cplx>> symbols;
                symbols.reserve(rx.size());
                for (const auto& sym : rx) {
                    symbols.push_back(loradar::dechirp(sym, down, set).values);
                }
                loradar::write_iq_dump(dump_iq_path, loradar::detail::config_hash(cfg), symbols);
                std::printf("wrote %s\n", dump_iq_path.c_str());
            }
            std::printf("wrote %s\n", cfg.output_path.c_str());
        } else if (trace->parsed()) {
            if (trace_args.snr.empty()) trace_args.snr = {trace_snr};
            loradar::ExperimentConfig cfg = build_config(trace_args, loradar::Task::Sensing);
            std::cout << loradar::trace_sensing_trial(cfg, trace_snr, trace_trial).dump(2)
                      << std::endl;
        }
    } catch (const loradar::Error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}
