// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "loradar/channel.hpp"
#include "loradar/errors.hpp"
#include "loradar/sampling.hpp"
#include "loradar/waveform.hpp"

namespace loradar {

inline nlohmann::json to_json(const Payload& payload) {
    return nlohmann::json{{"h", payload.h}};
}

inline Payload payload_from_json(const nlohmann::json& j) {
    Payload p;
    p.h = j.at("h").get<std::vector<int>>();
    return p;
}

inline nlohmann::json to_json(const TdmSchedule& sched) {
    return nlohmann::json{{"l", sched.l}};
}

inline TdmSchedule schedule_from_json(const nlohmann::json& j) {
    TdmSchedule s;
    s.l = j.at("l").get<std::vector<int>>();
    int lt = 0;
    for (int v : s.l) lt = std::max(lt, v + 1);
    s.psets.assign(lt, {});
    for (std::size_t i = 0; i < s.l.size(); ++i) s.psets[s.l[i]].push_back(static_cast<int>(i));
    return s;
}

inline nlohmann::json to_json(const SamplingIndexSet& set) {
    return nlohmann::json{{"indices", set.indices},
                          {"base", set.base},
                          {"kind", set.kind == SamplingKind::Random ? "random" : "uniform"}};
}

inline SamplingIndexSet sampling_set_from_json(const nlohmann::json& j) {
    SamplingIndexSet s;
    s.indices = j.at("indices").get<std::vector<int>>();
    s.base = j.at("base").get<int>();
    s.kind = j.at("kind").get<std::string>() == "uniform" ? SamplingKind::Uniform
                                                          : SamplingKind::Random;
    for (std::size_t i = 1; i < s.indices.size(); ++i) {
        if (s.indices[i] <= s.indices[i - 1]) {
            throw Error(ErrorCode::ConfigError, "sampling indices must be strictly increasing");
        }
    }
    return s;
}

inline nlohmann::json to_json(const SensingScene& scene) {
    nlohmann::json targets = nlohmann::json::array();
    for (const Target& t : scene.targets) {
        targets.push_back({{"r", t.r},
                           {"v", t.v},
                           {"theta", t.theta},
                           {"gain_re", t.alpha.real()},
                           {"gain_im", t.alpha.imag()}});
    }
    return nlohmann::json{{"targets", targets}};
}

/// Binary little-endian I/Q dump of de-chirped sequences.
/// Layout: magic "LRIQ", u32 version, u64 params hash, u32 symbol count,
/// u32 samples per symbol, then interleaved re/im float64 per sample.
inline void write_iq_dump(const std::string& path, std::uint64_t params_hash,
                          const std::vector<std::vector<std::complex<double>>>& symbols) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    const char magic[4] = {'L', 'R', 'I', 'Q'};
    out.write(magic, 4);
    const std::uint32_t version = 1;
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    out.write(reinterpret_cast<const char*>(&params_hash), sizeof params_hash);
    const std::uint32_t count = static_cast<std::uint32_t>(symbols.size());
    out.write(reinterpret_cast<const char*>(&count), sizeof count);
    const std::uint32_t per = symbols.empty() ? 0u : static_cast<std::uint32_t>(symbols[0].size());
    out.write(reinterpret_cast<const char*>(&per), sizeof per);
    for (const auto& sym : symbols) {
        if (sym.size() != per) {
            throw Error(ErrorCode::LengthMismatch, "ragged symbol lengths in I/Q dump");
        }
        for (const auto& s : sym) {
            const double re = s.real();
            const double im = s.imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof re);
            out.write(reinterpret_cast<const char*>(&im), sizeof im);
        }
    }
    if (!out) throw Error(ErrorCode::IoError, "short write to " + path);
}

}  // namespace loradar
