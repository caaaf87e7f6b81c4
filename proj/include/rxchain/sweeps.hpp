#pragma once

// Batch evaluation over operating-point grids, process corners, Monte Carlo tolerance
// runs, and adjustable-attenuator calibration.
//
// Gain, NF and IIP3 do not depend on input power (no compression model); input power
// only moves signal-referred outputs such as output level and interferer margin.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rxchain/cascade.hpp"
#include "rxchain/detail/parallel.hpp"
#include "rxchain/error.hpp"
#include "rxchain/intermod.hpp"
#include "rxchain/model.hpp"

namespace rxchain {

struct SweepInterferer {
    double offset_hz = 1e6;
    std::vector<double> levels_dbm;
};

struct SweepGrid {
    std::vector<double> freqs_hz;
    std::vector<double> temps_degc;
    std::vector<double> powers_dbm;
    std::optional<SweepInterferer> interferer;

    /// 3.1/3.3/3.5 GHz, -40/+25/+85 degC, -122..-32 dBm in 10 dB steps, interferer
    /// 1 MHz away at -92/-82/-32 dBm.
    static SweepGrid defaults() {
        SweepGrid g;
        g.freqs_hz = {3.1e9, 3.3e9, 3.5e9};
        g.temps_degc = {-40.0, 25.0, 85.0};
        for (int p = -122; p <= -32; p += 10) g.powers_dbm.push_back(p);
        g.interferer = SweepInterferer{1e6, {-92.0, -82.0, -32.0}};
        return g;
    }

    void check() const {
        if (freqs_hz.empty() || temps_degc.empty() || powers_dbm.empty())
            throw error("sweep grid lists must be nonempty");
        if (interferer && interferer->levels_dbm.empty()) throw error("sweep interferer level list is empty");
    }
};

struct SweepRow {
    double rf_hz = 0.0;
    double temp_degc = 0.0;
    double p_in_dbm = 0.0;
    std::optional<double> interferer_dbm;
    double total_gain_db = 0.0;
    double total_nf_db = 0.0;
    Limit total_iip3_dbm = Limit::unbounded();
    double noise_floor_dbm = 0.0;
    Limit sfdr_db = Limit::unbounded();
    double p_out_dbm = 0.0;
    /// Empty when the interferer's IM3 products miss the passband.
    std::optional<Limit> interferer_margin_db;
};

/// Output-referred main-signal level minus the stronger in-band IM3 product generated by
/// the main tone and an interferer `offset_hz` above it. The passband is the model's
/// noise bandwidth centred on the signal. Equal powers reduce to the equal-tone case
/// 2 * (IIP3 - p).
inline Limit interferer_margin(const CascadeResult& result, double main_p_dbm, double interferer_p_dbm,
                               double offset_hz, const NoiseModel& model) {
    if (!result.total_iip3_dbm.bounded()) return Limit::unbounded();
    const double rf = result.point.rf_hz;
    const double f_int = rf + offset_hz;
    const double f_main_side = 2.0 * rf - f_int;  // 2*f_main - f_int
    const double f_int_side = 2.0 * f_int - rf;   // 2*f_int - f_main
    const auto levels = im3_level(main_p_dbm, interferer_p_dbm, result.total_iip3_dbm.value());

    std::optional<double> worst;
    const auto consider = [&](double f, double level) {
        if (is_in_band(f, rf, model.bandwidth_hz)) worst = worst ? std::max(*worst, level) : level;
    };
    consider(f_main_side, levels.at_2f1_minus_f2_dbm);
    consider(f_int_side, levels.at_2f2_minus_f1_dbm);
    if (!worst) throw out_of_band_error("interferer IM3 products fall outside the passband; margin undefined");

    const double main_out = main_p_dbm + result.total_gain_db;
    const double im3_out = *worst + result.total_gain_db;
    return Limit::of(main_out - im3_out);
}

namespace detail {

inline std::string describe_point(const OperatingPoint& p) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "rf=%.9g Hz, temp=%g degC, pin=%g dBm", p.rf_hz, p.temp_degc, p.p_in_dbm);
    return buf;
}

}  // namespace detail

/// Cartesian sweep in frequency-major, then temperature, power, interferer-level order.
inline std::vector<SweepRow> run_sweep(const Chain& chain, const SweepGrid& grid, const NoiseModel& model,
                                       unsigned threads = 1) {
    grid.check();
    const std::size_t n_int = grid.interferer ? grid.interferer->levels_dbm.size() : 1;
    const std::size_t n_pow = grid.powers_dbm.size();
    const std::size_t n_temp = grid.temps_degc.size();
    const std::size_t total = grid.freqs_hz.size() * n_temp * n_pow * n_int;
    std::vector<SweepRow> rows(total);

    detail::parallel_for(total, threads, [&](std::size_t idx) {
        const std::size_t ii = idx % n_int;
        const std::size_t pi = (idx / n_int) % n_pow;
        const std::size_t ti = (idx / (n_int * n_pow)) % n_temp;
        const std::size_t fi = idx / (n_int * n_pow * n_temp);
        OperatingPoint pt{grid.freqs_hz[fi], grid.temps_degc[ti], grid.powers_dbm[pi], std::nullopt};
        if (grid.interferer) pt.interferer = Interferer{grid.interferer->offset_hz, grid.interferer->levels_dbm[ii]};

        CascadeResult r;
        try {
            r = analyze(chain, pt, model);
        } catch (const error& e) {
            throw range_error("sweep point " + detail::describe_point(pt) + ": " + e.what());
        }
        SweepRow& row = rows[idx];
        row.rf_hz = pt.rf_hz;
        row.temp_degc = pt.temp_degc;
        row.p_in_dbm = pt.p_in_dbm;
        row.total_gain_db = r.total_gain_db;
        row.total_nf_db = r.total_nf_db;
        row.total_iip3_dbm = r.total_iip3_dbm;
        row.noise_floor_dbm = r.noise_floor_dbm;
        row.sfdr_db = r.sfdr_db;
        row.p_out_dbm = pt.p_in_dbm + r.total_gain_db;
        if (pt.interferer) {
            row.interferer_dbm = pt.interferer->p_dbm;
            try {
                row.interferer_margin_db =
                    interferer_margin(r, pt.p_in_dbm, pt.interferer->p_dbm, pt.interferer->offset_hz, r.model);
            } catch (const out_of_band_error&) {
                row.interferer_margin_db.reset();
            }
        }
    });
    return rows;
}

struct WorstCase {
    CascadeResult nominal;
    CascadeResult min_gain;
    CascadeResult max_gain;
};

/// Process corners: every stage at gain + tol (max-gain) or gain - tol (min-gain).
inline WorstCase worst_case(const Chain& chain, const OperatingPoint& point, const NoiseModel& model) {
    std::vector<double> up, down;
    for (const auto& s : chain.stages) {
        up.push_back(s.gain_tol_db);
        down.push_back(-s.gain_tol_db);
    }
    return {analyze(chain, point, model), analyze(chain, point, model, down), analyze(chain, point, model, up)};
}

struct MetricSummary {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation (n - 1); 0 for n = 1
    double min = 0.0;
    double max = 0.0;
};

struct MonteCarloSummary {
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    MetricSummary gain_db;
    MetricSummary nf_db;
    std::optional<MetricSummary> iip3_dbm;  // absent for an ideally linear chain
    std::optional<MetricSummary> sfdr_db;
};

namespace detail {

inline MetricSummary summarize(const std::vector<double>& v) {
    MetricSummary s;
    s.min = v.front();
    s.max = v.front();
    double sum = 0.0;
    for (double x : v) {
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

/// Uniform [0, 1) from the top 53 bits of a 64-bit draw.
inline double unit_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Stage gains drawn uniformly in +/- gain_tol_db. Trial t draws from its own generator
/// seeded by (seed, t), so results do not depend on the worker count.
inline MonteCarloSummary monte_carlo(const Chain& chain, const OperatingPoint& point, const NoiseModel& model,
                                     std::size_t n_trials, std::uint64_t seed, unsigned threads = 1) {
    if (n_trials < 1) throw error("monte_carlo needs at least one trial");
    check_point(chain, point);
    const std::size_t n_stages = chain.stages.size();
    std::vector<double> gain(n_trials), nf(n_trials), iip3(n_trials), sf(n_trials);
    std::vector<char> bounded(n_trials, 0);

    detail::parallel_for(n_trials, threads, [&](std::size_t t) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(static_cast<std::uint64_t>(t) >> 32)};
        std::mt19937_64 gen(seq);
        std::vector<double> offsets(n_stages);
        for (std::size_t s = 0; s < n_stages; ++s)
            offsets[s] = chain.stages[s].gain_tol_db * (2.0 * detail::unit_uniform(gen) - 1.0);
        const auto r = analyze(chain, point, model, offsets);
        gain[t] = r.total_gain_db;
        nf[t] = r.total_nf_db;
        if (r.total_iip3_dbm.bounded()) {
            bounded[t] = 1;
            iip3[t] = r.total_iip3_dbm.value();
            sf[t] = r.sfdr_db.value();
        }
    });

    MonteCarloSummary out;
    out.trials = n_trials;
    out.seed = seed;
    out.gain_db = detail::summarize(gain);
    out.nf_db = detail::summarize(nf);
    if (std::all_of(bounded.begin(), bounded.end(), [](char b) { return b != 0; })) {
        out.iip3_dbm = detail::summarize(iip3);
        out.sfdr_db = detail::summarize(sf);
    }
    return out;
}

struct CalibrationEntry {
    double freq_hz;
    double setting_db;
    double achieved_gain_db;
};

struct CalibrationTable {
    std::string stage_label;
    double target_gain_db = 0.0;
    double temp_degc = reference_temp_degc;
    std::vector<CalibrationEntry> entries;

    double setting_for(double freq_hz) const {
        for (const auto& e : entries)
            if (e.freq_hz == freq_hz) return e.setting_db;
        throw range_error("no calibration entry for the requested frequency");
    }
};

/// Per-frequency attenuator settings bringing the chain gain to `target_gain_db`.
///
/// The required attenuation is rounded to the nearest step, ties going to more
/// attenuation, so every achieved gain is within half a step of the target.
inline CalibrationTable calibrate_attenuator(const Chain& chain, const std::vector<double>& freqs_hz,
                                             double target_gain_db, const NoiseModel& model,
                                             double temp_degc = reference_temp_degc) {
    const StageSpec* att = nullptr;
    for (const auto& s : chain.stages) {
        if (s.kind != StageKind::adjustable_attenuator) continue;
        if (att) throw error("calibration needs exactly one adjustable-attenuator stage, found several");
        att = &s;
    }
    if (!att) throw error("calibration needs exactly one adjustable-attenuator stage, found none");

    const double step = att->setting_step_db;
    const Chain zeroed = with_attenuator_setting(chain, 0.0);
    CalibrationTable table;
    table.stage_label = att->label;
    table.target_gain_db = target_gain_db;
    table.temp_degc = temp_degc;

    for (double f : freqs_hz) {
        const OperatingPoint pt{f, temp_degc, -32.0, std::nullopt};
        const double g0 = analyze(zeroed, pt, model).total_gain_db;
        const double setting = step * std::floor((g0 - target_gain_db) / step + 0.5);
        char buf[200];
        if (setting < 0.0 || setting > att->setting_max_db) {
            std::snprintf(buf, sizeof buf,
                          "target gain %.3f dB unreachable at %.9g Hz: needs %.3f dB attenuation, range is 0..%g dB",
                          target_gain_db, f, g0 - target_gain_db, att->setting_max_db);
            throw unreachable_error(buf, f);
        }
        const double achieved = analyze(with_attenuator_setting(chain, setting), pt, model).total_gain_db;
        if (std::abs(achieved - target_gain_db) > step / 2.0 + 1e-9) {
            std::snprintf(buf, sizeof buf, "target gain %.3f dB unreachable at %.9g Hz within half a step",
                          target_gain_db, f);
            throw unreachable_error(buf, f);
        }
        table.entries.push_back({f, setting, achieved});
    }
    return table;
}

}  // namespace rxchain
