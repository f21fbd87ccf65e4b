#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace forstruct {

// Sentinel for degenerate / unavailable feature values. Serialized as the
// literal token "NA" in all file formats.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& msg) : std::invalid_argument(msg) {}
};

class InsufficientData : public InvalidInput {
public:
    explicit InsufficientData(const std::string& msg) : InvalidInput(msg) {}
};

// Thrown when a CHM has hmax = 0 and cannot be thresholded.
class DegenerateCanopy : public std::runtime_error {
public:
    explicit DegenerateCanopy(const std::string& msg) : std::runtime_error(msg) {}
};

// Curves to be compared do not share the same r grid.
class GridMismatch : public InvalidInput {
public:
    explicit GridMismatch(const std::string& msg) : InvalidInput(msg) {}
};

// f > 0 where the reference curve is 0: the KL-type integral diverges.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace forstruct
