#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace otfs {

enum class ErrorKind {
    NotHermitian,
    NotPositiveDefinite,
    NonFinite,
    DimensionMismatch,
    CpTooLong,
    NonPositiveNoise,
    InvalidConfig,
    TooManyPaths,
    OutOfGrid,
    EmptyGrid,
    NoSnapshots,
    NumericalBreakdown,
    EmptySupport,
    SingularInformation,
    OddBitCount,
    SingularCovariance,
    ZeroReference,
    LengthMismatch,
    UnknownEstimator,
    IoError,
    ParseError,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::CpTooLong: return "CpTooLong";
        case ErrorKind::NonPositiveNoise: return "NonPositiveNoise";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::TooManyPaths: return "TooManyPaths";
        case ErrorKind::OutOfGrid: return "OutOfGrid";
        case ErrorKind::EmptyGrid: return "EmptyGrid";
        case ErrorKind::NoSnapshots: return "NoSnapshots";
        case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
        case ErrorKind::EmptySupport: return "EmptySupport";
        case ErrorKind::SingularInformation: return "SingularInformation";
        case ErrorKind::OddBitCount: return "OddBitCount";
        case ErrorKind::SingularCovariance: return "SingularCovariance";
        case ErrorKind::ZeroReference: return "ZeroReference";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::UnknownEstimator: return "UnknownEstimator";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Exception carrying a machine-readable kind alongside the message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) throw Error(kind, what);
}

}  // namespace otfs
