#pragma once

// Closed-form cascade analysis: gain, noise figure, input intercept, noise floor, SFDR.
//
// Noise figure uses the standard Friis form with (F_k - 1) on every stage after the
// first. Cascaded IIP3 is the power-unit form of the amplitude-squared sum:
//     1 / P_cas = sum_k (G_1 ... G_{k-1}) / P_k      (mW, linear power gains)
// Stages without an intercept contribute nothing; a chain with none is unbounded.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rxchain/error.hpp"
#include "rxchain/model.hpp"
#include "rxchain/units.hpp"

namespace rxchain {

/// A dB quantity that may be unbounded, as for the IIP3 of an ideally linear chain.
class Limit {
public:
    static Limit unbounded() { return Limit(); }
    static Limit of(double v) {
        Limit l;
        l.bounded_ = true;
        l.value_ = v;
        return l;
    }

    bool bounded() const { return bounded_; }
    double value() const {
        if (!bounded_) throw error("value of an unbounded quantity requested");
        return value_;
    }
    double value_or(double fallback) const { return bounded_ ? value_ : fallback; }

    friend bool operator==(const Limit&, const Limit&) = default;

private:
    Limit() = default;
    bool bounded_ = false;
    double value_ = 0.0;
};

struct NoiseModel {
    double ref_temp_k = standard_noise_temp_k;
    double bandwidth_hz = 5e6;
    double ambient_temp_k = standard_noise_temp_k;

    NoiseModel at(const OperatingPoint& p) const {
        NoiseModel m = *this;
        m.ambient_temp_k = celsius_to_kelvin(p.temp_degc);
        return m;
    }

    void check() const {
        if (!(ref_temp_k > 0.0) || !(ambient_temp_k > 0.0)) throw error("noise model temperatures must be > 0 K");
        if (!(bandwidth_hz > 0.0)) throw error("noise bandwidth must be > 0 Hz");
    }
};

/// Noise model using the chain's analysis passband as the noise bandwidth.
inline NoiseModel noise_model_for(const Chain& c) {
    NoiseModel m;
    if (c.plan.passband_hz > 0.0) m.bandwidth_hz = c.plan.passband_hz;
    return m;
}

inline double cascade_gain(std::span<const ResolvedStage> stages) {
    double g = 0.0;
    for (const auto& s : stages) g += s.gain_db;
    return g;
}

struct NoiseFigure {
    double noise_factor_lin;
    double nf_db;
};

inline NoiseFigure cascade_noise_figure(std::span<const ResolvedStage> stages) {
    if (stages.empty()) throw error("noise figure of an empty cascade is undefined");
    double f = stages[0].noise_factor_lin;
    double g = stages[0].gain_lin;
    for (std::size_t k = 1; k < stages.size(); ++k) {
        if (!(g > 0.0) || !std::isfinite(g)) throw error("cascade gain underflowed to zero before stage " + stages[k].label);
        f += (stages[k].noise_factor_lin - 1.0) / g;
        g *= stages[k].gain_lin;
    }
    return {f, lin_to_db(f)};
}

namespace detail {

/// Per-stage terms of the reciprocal intercept sum, in 1/mW. Zero for linear stages.
inline std::vector<double> iip3_terms(std::span<const ResolvedStage> stages) {
    std::vector<double> terms;
    terms.reserve(stages.size());
    double g = 1.0;
    for (const auto& s : stages) {
        terms.push_back(s.iip3_mw ? g / *s.iip3_mw : 0.0);
        g *= s.gain_lin;
    }
    return terms;
}

}  // namespace detail

inline Limit cascade_iip3(std::span<const ResolvedStage> stages) {
    if (stages.empty()) throw error("IIP3 of an empty cascade is undefined");
    double sum = 0.0;
    for (double t : detail::iip3_terms(stages)) sum += t;
    if (sum == 0.0) return Limit::unbounded();
    return Limit::of(mw_to_dbm(1.0 / sum));
}

/// kTB in the model bandwidth at the ambient temperature, plus the cascade noise figure.
inline double noise_floor(const NoiseModel& model, double total_nf_db) {
    model.check();
    return watts_to_dbm(boltzmann_j_per_k * model.ambient_temp_k * model.bandwidth_hz) + total_nf_db;
}

inline double sfdr(double iip3_dbm, double noise_floor_dbm) { return 2.0 / 3.0 * (iip3_dbm - noise_floor_dbm); }

inline Limit sfdr(const Limit& iip3_dbm, double noise_floor_dbm) {
    if (!iip3_dbm.bounded()) return Limit::unbounded();
    return Limit::of(sfdr(iip3_dbm.value(), noise_floor_dbm));
}

/// Cumulative budget after one stage: the analysis of the prefix ending at it.
struct CascadeRow {
    std::string label;
    StageKind kind = StageKind::amplifier;
    double stage_gain_db = 0.0;
    double stage_nf_db = 0.0;
    std::optional<double> stage_iip3_dbm;
    double cum_gain_db = 0.0;
    double cum_nf_db = 0.0;
    Limit cum_iip3_dbm = Limit::unbounded();
    double cum_noise_floor_dbm = 0.0;
    Limit cum_sfdr_db = Limit::unbounded();
};

struct CascadeResult {
    OperatingPoint point;
    NoiseModel model;
    double total_gain_db = 0.0;
    double total_nf_db = 0.0;
    double total_noise_factor_lin = 1.0;
    Limit total_iip3_dbm = Limit::unbounded();
    Limit total_oip3_dbm = Limit::unbounded();
    double noise_floor_dbm = 0.0;
    Limit sfdr_db = Limit::unbounded();
    std::vector<CascadeRow> rows;
};

/// Cascade analysis of already-resolved stages; totals and every prefix row.
inline CascadeResult analyze_resolved(std::span<const ResolvedStage> stages, const NoiseModel& model,
                                      const OperatingPoint& point) {
    CascadeResult r;
    r.point = point;
    r.model = model;
    const auto totals = [&](std::span<const ResolvedStage> prefix, CascadeRow& row) {
        row.cum_gain_db = cascade_gain(prefix);
        const auto nf = prefix.empty() ? NoiseFigure{1.0, 0.0} : cascade_noise_figure(prefix);
        row.cum_nf_db = nf.nf_db;
        row.cum_iip3_dbm = prefix.empty() ? Limit::unbounded() : cascade_iip3(prefix);
        row.cum_noise_floor_dbm = noise_floor(model, nf.nf_db);
        row.cum_sfdr_db = sfdr(row.cum_iip3_dbm, row.cum_noise_floor_dbm);
        return nf;
    };
    for (std::size_t k = 0; k < stages.size(); ++k) {
        CascadeRow row;
        row.label = stages[k].label;
        row.kind = stages[k].kind;
        row.stage_gain_db = stages[k].gain_db;
        row.stage_nf_db = stages[k].nf_db;
        row.stage_iip3_dbm = stages[k].iip3_dbm;
        totals(stages.first(k + 1), row);
        r.rows.push_back(std::move(row));
    }
    CascadeRow total;
    const auto nf = totals(stages, total);
    r.total_gain_db = total.cum_gain_db;
    r.total_nf_db = total.cum_nf_db;
    r.total_noise_factor_lin = nf.noise_factor_lin;
    r.total_iip3_dbm = total.cum_iip3_dbm;
    r.total_oip3_dbm = total.cum_iip3_dbm.bounded() ? Limit::of(total.cum_iip3_dbm.value() + total.cum_gain_db)
                                                    : Limit::unbounded();
    r.noise_floor_dbm = total.cum_noise_floor_dbm;
    r.sfdr_db = total.cum_sfdr_db;
    return r;
}

/// Resolves the chain at `point` and analyzes it. The model's ambient temperature is
/// taken from the point.
inline CascadeResult analyze(const Chain& chain, const OperatingPoint& point, const NoiseModel& model,
                             std::span<const double> gain_offsets_db = {}) {
    const auto stages = resolve_chain(chain, point, gain_offsets_db);
    return analyze_resolved(stages, model.at(point), point);
}

inline CascadeResult analyze(const Chain& chain, const OperatingPoint& point) {
    return analyze(chain, point, noise_model_for(chain));
}

struct IntermodContribution {
    std::string label;
    double share;
};

/// Each nonlinear stage's share of the reciprocal intercept sum, largest first.
inline std::vector<IntermodContribution> bottleneck_report(std::span<const ResolvedStage> stages) {
    const auto terms = detail::iip3_terms(stages);
    double sum = 0.0;
    for (double t : terms) sum += t;
    if (sum == 0.0) throw error("bottleneck report needs at least one nonlinear stage");
    std::vector<IntermodContribution> out;
    for (std::size_t k = 0; k < stages.size(); ++k)
        if (stages[k].iip3_mw) out.push_back({stages[k].label, terms[k] / sum});
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.share > b.share; });
    return out;
}

}  // namespace rxchain
