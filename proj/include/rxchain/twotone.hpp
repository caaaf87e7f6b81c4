#pragma once

// Time-domain two-tone oracle: synthesize two coherent tones, pass them through one or
// more memoryless cubic stages y = a1*x + a3*x^3, and read the tone and IM3 powers off
// exact DFT bins. No windowing; every requested frequency must sit on a bin.
//
// Voltages are peak volts across the reference impedance, P = A^2 / (2R).

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "rxchain/error.hpp"
#include "rxchain/model.hpp"
#include "rxchain/units.hpp"

namespace rxchain {

/// Bins with no energy at all report this instead of -inf.
inline constexpr double numerical_floor_dbm = -300.0;

struct PolyNonlinearity {
    double a1 = 1.0;
    double a3 = 0.0;
    double ref_impedance_ohm = reference_impedance_ohm;

    double operator()(double x) const { return a1 * x + a3 * x * x * x; }

    double gain_db() const { return 20.0 * std::log10(a1); }

    /// Input amplitude where the extrapolated fundamental and IM3 lines meet.
    double input_intercept_volts() const {
        if (a3 == 0.0) return std::numeric_limits<double>::infinity();
        return std::sqrt(4.0 * a1 / (3.0 * std::abs(a3)));
    }

    double iip3_dbm() const { return peak_volts_to_dbm(input_intercept_volts(), ref_impedance_ohm); }
    double oip3_dbm() const { return iip3_dbm() + gain_db(); }
};

/// Cubic model with the given small-signal gain and output intercept (compressive).
inline PolyNonlinearity design_nonlinearity(double gain_db, double oip3_dbm) {
    if (!std::isfinite(oip3_dbm) || !std::isfinite(gain_db)) throw error("design_nonlinearity needs finite inputs");
    PolyNonlinearity p;
    p.a1 = std::pow(10.0, gain_db / 20.0);
    const double a_oip3 = dbm_to_peak_volts(oip3_dbm, p.ref_impedance_ohm);
    p.a3 = -4.0 * p.a1 * p.a1 * p.a1 / (3.0 * a_oip3 * a_oip3);
    return p;
}

struct SamplingGrid {
    double sample_rate_hz = 1.024e9;
    std::size_t num_samples = std::size_t{1} << 20;

    double bin_hz() const { return sample_rate_hz / static_cast<double>(num_samples); }
};

struct ToneMeasurement {
    double f1_hz = 0.0;
    double f2_hz = 0.0;
    double p_f1_dbm = 0.0;
    double p_f2_dbm = 0.0;
    double p_2f1_f2_dbm = 0.0;  // at 2*f1 - f2
    double p_2f2_f1_dbm = 0.0;  // at 2*f2 - f1
    /// Every measured bin, keyed by frequency.
    std::map<double, double> bins_dbm;
    double total_power_dbm = 0.0;
    double sample_rate_hz = 0.0;
    std::size_t num_samples = 0;
};

struct TwoToneOptions {
    /// Largest tolerated |linear prediction - measured fundamental|, dB.
    double max_compression_db = 0.1;
    /// Additional bins to measure (e.g. harmonics); each must be coherent and unaliased.
    std::vector<double> extra_bins_hz;
};

namespace detail {

inline std::size_t coherent_bin(double f_hz, const SamplingGrid& g, const char* what) {
    const double k = f_hz / g.bin_hz();
    const double kr = std::round(k);
    if (!(f_hz > 0.0) || std::abs(k - kr) > 1e-9 * std::max(1.0, kr)) {
        throw simulation_error(std::string("non-coherent bin request: ") + what + " at " + std::to_string(f_hz) +
                               " Hz is not an integer multiple of " + std::to_string(g.bin_hz()) + " Hz");
    }
    return static_cast<std::size_t>(kr);
}

/// Sums in fixed 4096-sample blocks, so the result does not depend on how the blocks
/// are scheduled.
template <typename Fn>
auto blocked_sum(std::size_t n, Fn&& term) {
    using T = decltype(term(std::size_t{0}));
    constexpr std::size_t block = 4096;
    T total{};
    for (std::size_t start = 0; start < n; start += block) {
        T partial{};
        const std::size_t end = std::min(n, start + block);
        for (std::size_t i = start; i < end; ++i) partial += term(i);
        total += partial;
    }
    return total;
}

}  // namespace detail

/// Two tones of (possibly different) power through the cascade `stages`.
inline ToneMeasurement simulate_two_tone(std::span<const PolyNonlinearity> stages, double f1_hz, double f2_hz,
                                         double p1_dbm, double p2_dbm, const SamplingGrid& grid = {},
                                         const TwoToneOptions& opts = {}) {
    if (stages.empty()) throw simulation_error("no stages to simulate");
    if (f1_hz == f2_hz) throw simulation_error("two-tone simulation needs distinct tones");
    if (grid.num_samples < 16 || !(grid.sample_rate_hz > 0.0)) throw simulation_error("bad sampling grid");
    const double ohms = stages.front().ref_impedance_ohm;

    const double f_max = std::max(f1_hz, f2_hz);
    double max_order = 1.0;
    for (std::size_t i = 0; i < stages.size(); ++i) max_order *= 3.0;
    if (!(max_order * f_max < grid.sample_rate_hz / 2.0))
        throw simulation_error("aliasing: order-" + std::to_string(static_cast<int>(max_order)) +
                               " products of the tones exceed Nyquist; raise the sample rate");

    const std::size_t n = grid.num_samples;
    const std::size_t k1 = detail::coherent_bin(f1_hz, grid, "f1");
    const std::size_t k2 = detail::coherent_bin(f2_hz, grid, "f2");
    if (!(2.0 * f1_hz - f2_hz > 0.0) || !(2.0 * f2_hz - f1_hz > 0.0))
        throw simulation_error("IM3 products must be at positive frequencies");
    const std::size_t k_lo = detail::coherent_bin(2.0 * f1_hz - f2_hz, grid, "2f1-f2");
    const std::size_t k_hi = detail::coherent_bin(2.0 * f2_hz - f1_hz, grid, "2f2-f1");

    std::vector<std::pair<double, std::size_t>> requested = {
        {f1_hz, k1}, {f2_hz, k2}, {2.0 * f1_hz - f2_hz, k_lo}, {2.0 * f2_hz - f1_hz, k_hi}};
    for (double f : opts.extra_bins_hz) {
        if (!(f < grid.sample_rate_hz / 2.0)) throw simulation_error("aliasing: requested bin above Nyquist");
        requested.emplace_back(f, detail::coherent_bin(f, grid, "extra bin"));
    }

    // Exact twiddles: phase index (k * i) mod n is computed in integers.
    std::vector<double> cos_tab(n), sin_tab(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ang = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        cos_tab[i] = std::cos(ang);
        sin_tab[i] = std::sin(ang);
    }

    const double a1 = dbm_to_peak_volts(p1_dbm, ohms);
    const double a2 = dbm_to_peak_volts(p2_dbm, ohms);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = a1 * cos_tab[(static_cast<std::uint64_t>(k1) * i) % n] +
                   a2 * cos_tab[(static_cast<std::uint64_t>(k2) * i) % n];
        for (const auto& s : stages) v = s(v);
        y[i] = v;
    }

    const auto bin_power_dbm = [&](std::size_t k) {
        const auto x = detail::blocked_sum(n, [&](std::size_t i) {
            const auto idx = (static_cast<std::uint64_t>(k) * i) % n;
            return std::complex<double>(y[i] * cos_tab[idx], -y[i] * sin_tab[idx]);
        });
        const double amp = 2.0 * std::abs(x) / static_cast<double>(n);
        const double w = amp * amp / (2.0 * ohms);
        return w > 0.0 ? std::max(numerical_floor_dbm, watts_to_dbm(w)) : numerical_floor_dbm;
    };

    ToneMeasurement m;
    m.f1_hz = f1_hz;
    m.f2_hz = f2_hz;
    m.sample_rate_hz = grid.sample_rate_hz;
    m.num_samples = n;
    for (const auto& [f, k] : requested) m.bins_dbm[f] = bin_power_dbm(k);
    m.p_f1_dbm = m.bins_dbm.at(f1_hz);
    m.p_f2_dbm = m.bins_dbm.at(f2_hz);
    m.p_2f1_f2_dbm = m.bins_dbm.at(2.0 * f1_hz - f2_hz);
    m.p_2f2_f1_dbm = m.bins_dbm.at(2.0 * f2_hz - f1_hz);
    const double mean_sq = detail::blocked_sum(n, [&](std::size_t i) { return y[i] * y[i]; }) / static_cast<double>(n);
    m.total_power_dbm = mean_sq > 0.0 ? watts_to_dbm(mean_sq / ohms) : numerical_floor_dbm;

    double linear_gain_db = 0.0;
    for (const auto& s : stages) linear_gain_db += s.gain_db();
    const double compression =
        std::max(std::abs(p1_dbm + linear_gain_db - m.p_f1_dbm), std::abs(p2_dbm + linear_gain_db - m.p_f2_dbm));
    if (compression > opts.max_compression_db)
        throw simulation_error("drive too large for small-signal validity: fundamental deviates " +
                               std::to_string(compression) + " dB from linear");
    return m;
}

inline ToneMeasurement simulate_two_tone(const PolyNonlinearity& model, double f1_hz, double f2_hz,
                                         double p_per_tone_dbm, const SamplingGrid& grid = {},
                                         const TwoToneOptions& opts = {}) {
    return simulate_two_tone(std::span<const PolyNonlinearity>(&model, 1), f1_hz, f2_hz, p_per_tone_dbm,
                             p_per_tone_dbm, grid, opts);
}

/// Intercept from equal-tone measurements at two drive levels. The fundamental and IM3
/// lines are taken with slopes 1 and 3; per point IIP3 = p + (P_fund - P_im3) / 2 and
/// the two points are averaged.
inline Intercepts extract_ip3(const ToneMeasurement& low, const ToneMeasurement& high, double p_low_dbm,
                              double p_high_dbm, double gain_db) {
    if (!(p_low_dbm < p_high_dbm)) throw error("extract_ip3 needs p_low < p_high");
    const auto fund = [](const ToneMeasurement& m) { return 0.5 * (m.p_f1_dbm + m.p_f2_dbm); };
    const auto im3 = [](const ToneMeasurement& m) { return 0.5 * (m.p_2f1_f2_dbm + m.p_2f2_f1_dbm); };
    const double slope = (im3(high) - im3(low)) / (p_high_dbm - p_low_dbm);
    if (std::abs(slope - 3.0) > 0.05)
        throw error("measured IM3 slope " + std::to_string(slope) + " dB/dB is not 3; drive is outside the "
                    "third-order region");
    const double iip3_low = p_low_dbm + (fund(low) - im3(low)) / 2.0;
    const double iip3_high = p_high_dbm + (fund(high) - im3(high)) / 2.0;
    const double iip3 = 0.5 * (iip3_low + iip3_high);
    return {iip3, iip3 + gain_db};
}

struct SlopeSegment {
    double p_from_dbm;
    double p_to_dbm;
    double fundamental_slope;
    double im3_slope;
};

/// Finite-difference slopes of fundamental and IM3 output power between consecutive drives.
inline std::vector<SlopeSegment> slope_scan(std::span<const PolyNonlinearity> stages, double f1_hz, double f2_hz,
                                            std::span<const double> drive_levels_dbm, const SamplingGrid& grid = {}) {
    if (drive_levels_dbm.size() < 3) throw error("slope_scan needs at least 3 drive levels");
    for (std::size_t i = 1; i < drive_levels_dbm.size(); ++i)
        if (!(drive_levels_dbm[i] > drive_levels_dbm[i - 1]))
            throw error("slope_scan drive levels must be strictly ascending");

    std::vector<ToneMeasurement> meas;
    for (double p : drive_levels_dbm) meas.push_back(simulate_two_tone(stages, f1_hz, f2_hz, p, p, grid));

    std::vector<SlopeSegment> out;
    for (std::size_t i = 1; i < meas.size(); ++i) {
        const double dp = drive_levels_dbm[i] - drive_levels_dbm[i - 1];
        const double dfund = 0.5 * ((meas[i].p_f1_dbm - meas[i - 1].p_f1_dbm) + (meas[i].p_f2_dbm - meas[i - 1].p_f2_dbm));
        const double dim3 = 0.5 * ((meas[i].p_2f1_f2_dbm - meas[i - 1].p_2f1_f2_dbm) +
                                   (meas[i].p_2f2_f1_dbm - meas[i - 1].p_2f2_f1_dbm));
        out.push_back({drive_levels_dbm[i - 1], drive_levels_dbm[i], dfund / dp, dim3 / dp});
    }
    return out;
}

inline std::vector<SlopeSegment> slope_scan(const PolyNonlinearity& model, double f1_hz, double f2_hz,
                                            std::span<const double> drive_levels_dbm, const SamplingGrid& grid = {}) {
    return slope_scan(std::span<const PolyNonlinearity>(&model, 1), f1_hz, f2_hz, drive_levels_dbm, grid);
}

}  // namespace rxchain
