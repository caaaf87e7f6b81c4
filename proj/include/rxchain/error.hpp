#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rxchain {

/// Base of every domain error raised by the library. The CLI maps these to exit status 1.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (Touchstone, CSV, chain document). Line is 1-based, 0 when unknown.
class parse_error : public error {
public:
    parse_error(const std::string& what, std::size_t line = 0)
        : error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A query outside the domain of a table, band, or validity range. No extrapolation is done.
class range_error : public error {
public:
    using error::error;
};

/// One or more invariant violations in a chain description.
class validation_error : public error {
public:
    explicit validation_error(std::vector<std::string> violations)
        : error(join(violations)), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "invalid chain:";
        for (const auto& s : v) out += "\n  - " + s;
        return out;
    }
    std::vector<std::string> violations_;
};

/// Two-tone simulation refused: non-coherent bins, aliasing, or out-of-region drive.
class simulation_error : public error {
public:
    using error::error;
};

/// An interferer whose intermodulation products all fall outside the analysis passband.
class out_of_band_error : public error {
public:
    using error::error;
};

/// Calibration target cannot be met by the adjustable attenuator at some frequency.
class unreachable_error : public error {
public:
    unreachable_error(const std::string& what, double freq_hz) : error(what), freq_hz_(freq_hz) {}
    double freq_hz() const noexcept { return freq_hz_; }

private:
    double freq_hz_;
};

}  // namespace rxchain
