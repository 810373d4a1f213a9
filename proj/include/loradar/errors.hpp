// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace loradar {

enum class ErrorCode {
    BandwidthMismatch,
    ScheduleIndivisible,
    SamplingOverrun,
    BinOffsetNonInteger,
    InvalidParameter,
    DelayExceedsGuard,
    LengthMismatch,
    RankDeficient,
    ConfigError,
    IoError,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::BandwidthMismatch: return "BandwidthMismatch";
        case ErrorCode::ScheduleIndivisible: return "ScheduleIndivisible";
        case ErrorCode::SamplingOverrun: return "SamplingOverrun";
        case ErrorCode::BinOffsetNonInteger: return "BinOffsetNonInteger";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::DelayExceedsGuard: return "DelayExceedsGuard";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace loradar
