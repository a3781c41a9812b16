#pragma once

#include <stdexcept>
#include <string>

namespace synreg {

struct GeometryMismatch : std::runtime_error {
    explicit GeometryMismatch(const std::string& what) : std::runtime_error("geometry mismatch: " + what) {}
};

struct DegenerateWindow : std::runtime_error {
    explicit DegenerateWindow(const std::string& what) : std::runtime_error("degenerate window: " + what) {}
};

struct ShapeMismatch : std::runtime_error {
    explicit ShapeMismatch(const std::string& what) : std::runtime_error("shape mismatch: " + what) {}
};

struct SpecOutOfBounds : std::runtime_error {
    explicit SpecOutOfBounds(const std::string& what) : std::runtime_error("phantom spec out of bounds: " + what) {}
};

struct UnknownLabel : std::runtime_error {
    explicit UnknownLabel(const std::string& what) : std::runtime_error("unknown label: " + what) {}
};

struct EmptyMask : std::runtime_error {
    explicit EmptyMask(const std::string& what) : std::runtime_error("empty mask: " + what) {}
};

struct NoEdgesInReference : std::runtime_error {
    explicit NoEdgesInReference(const std::string& what) : std::runtime_error("no edges in reference: " + what) {}
};

struct RoiTooSmall : std::runtime_error {
    explicit RoiTooSmall(const std::string& what) : std::runtime_error("roi too small: " + what) {}
};

struct BinMismatch : std::runtime_error {
    explicit BinMismatch(const std::string& what) : std::runtime_error("bin mismatch: " + what) {}
};

struct EdgeMismatch : std::runtime_error {
    explicit EdgeMismatch(const std::string& what) : std::runtime_error("histogram edge mismatch: " + what) {}
};

struct ZeroVariance : std::runtime_error {
    explicit ZeroVariance(const std::string& what) : std::runtime_error("zero variance: " + what) {}
};

struct OutOfSupport : std::runtime_error {
    explicit OutOfSupport(const std::string& what) : std::runtime_error("point outside spline support: " + what) {}
};

struct DegenerateHistogram : std::runtime_error {
    explicit DegenerateHistogram(const std::string& what) : std::runtime_error("degenerate histogram: " + what) {}
};

struct MetricDiverged : std::runtime_error {
    explicit MetricDiverged(const std::string& what) : std::runtime_error("metric diverged: " + what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error("io error: " + what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error("config error: " + what) {}
};

} // namespace synreg
