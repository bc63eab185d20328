#pragma once

#include <stdexcept>
#include <string>

namespace placerec {

// Error hierarchy used across the toolkit. The CLI maps these onto its
// exit codes (bad input, pipeline failure), so throw the most specific one.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed configuration, bad parameter values, even median windows, ...
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Malformed files: depth images, descriptor records, scene specs.
struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

// The pipeline could not produce a result from valid input
// (no ground plane, too few walls, registration chain broke down).
struct PipelineError : Error {
    explicit PipelineError(const std::string& msg) : Error(msg) {}
};

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

}  // namespace placerec
