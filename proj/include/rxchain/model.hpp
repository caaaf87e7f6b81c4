#pragma once

// Domain types for a receive chain and resolution of each stage's parameters at an
// operating point (frequency, temperature, process offset).

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rxchain/error.hpp"
#include "rxchain/touchstone.hpp"
#include "rxchain/units.hpp"

namespace rxchain {

enum class StageKind { amplifier, mixer, attenuator, adjustable_attenuator, filter, thermopad, cable };

inline std::string_view to_string(StageKind k) {
    switch (k) {
        case StageKind::amplifier: return "amplifier";
        case StageKind::mixer: return "mixer";
        case StageKind::attenuator: return "attenuator";
        case StageKind::adjustable_attenuator: return "adjustable-attenuator";
        case StageKind::filter: return "filter";
        case StageKind::thermopad: return "thermopad";
        case StageKind::cable: return "cable";
    }
    return "?";
}

inline std::optional<StageKind> parse_stage_kind(std::string_view s) {
    for (auto k : {StageKind::amplifier, StageKind::mixer, StageKind::attenuator, StageKind::adjustable_attenuator,
                   StageKind::filter, StageKind::thermopad, StageKind::cable})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

/// Lossy two-ports whose noise figure equals their loss at 290 K.
inline bool is_passive(StageKind k) { return k != StageKind::amplifier && k != StageKind::mixer; }

struct StageSpec {
    std::string label;
    StageKind kind = StageKind::amplifier;
    double gain_db = 0.0;
    /// Overrides gain_db as the frequency-dependent base gain when present.
    std::optional<GainTable> gain_table;
    double gain_tempco_db_per_degc = 0.0;
    double gain_tol_db = 0.0;
    double nf_db = 0.0;
    /// Lets a passive stage carry an nf_db other than its loss.
    bool nf_override = false;
    std::optional<double> oip3_dbm;
    std::optional<double> iip3_dbm;

    // adjustable-attenuator only
    double setting_db = 0.0;
    double setting_max_db = 31.5;
    double setting_step_db = 0.5;

    bool is_nonlinear() const { return oip3_dbm.has_value() || iip3_dbm.has_value(); }
};

/// Every invariant violation of a single stage, each message naming the stage.
inline std::vector<std::string> check_stage(const StageSpec& s) {
    std::vector<std::string> v;
    const std::string who = "stage '" + s.label + "' (" + std::string(to_string(s.kind)) + ")";
    if (s.label.empty()) v.push_back("stage with empty label");
    if (!std::isfinite(s.gain_db)) v.push_back(who + ": gain_db must be finite");
    if (is_passive(s.kind)) {
        if (s.gain_db > 0.0) v.push_back(who + ": passive stage has positive gain_db");
        if (s.gain_table)
            for (double g : s.gain_table->gains_db())
                if (g > 0.0) {
                    v.push_back(who + ": passive stage gain table has a positive gain");
                    break;
                }
        if (!s.nf_override && s.nf_db != -s.gain_db)
            v.push_back(who + ": passive stage nf_db must equal its loss (set nf_override to bypass)");
    }
    if (s.nf_db < 0.0) v.push_back(who + ": nf_db must be >= 0");
    if (s.gain_tol_db < 0.0) v.push_back(who + ": gain_tol_db must be >= 0");
    if (s.oip3_dbm && s.iip3_dbm) v.push_back(who + ": give exactly one of oip3_dbm / iip3_dbm, not both");
    if (s.kind == StageKind::adjustable_attenuator) {
        if (!(s.setting_step_db > 0.0)) v.push_back(who + ": setting_step_db must be > 0");
        if (!(s.setting_max_db >= 0.0)) v.push_back(who + ": setting_max_db must be >= 0");
        if (s.setting_db < 0.0 || s.setting_db > s.setting_max_db)
            v.push_back(who + ": setting_db outside 0.." + std::to_string(s.setting_max_db) + " dB");
        else if (s.setting_step_db > 0.0) {
            const double steps = s.setting_db / s.setting_step_db;
            if (std::abs(steps - std::round(steps)) > 1e-9) v.push_back(who + ": setting_db is not on the step grid");
        }
    } else if (s.setting_db != 0.0) {
        v.push_back(who + ": setting_db applies only to adjustable-attenuator stages");
    }
    return v;
}

enum class LoSide { high, low };

inline std::string_view to_string(LoSide s) { return s == LoSide::high ? "high-side" : "low-side"; }

/// Two-stage downconversion plan: switching LO1, fixed LO2.
struct FrequencyPlan {
    double rf_low_hz = 0.0;
    double rf_high_hz = 0.0;
    LoSide lo1_mode = LoSide::high;
    double lo2_hz = 0.0;
    double if2_hz = 0.0;
    double if1_hz = 0.0;  // lo2 + if2 or lo2 - if2
    double passband_hz = 0.0;

    /// Builds a plan with IF1 = LO2 + IF2 (or LO2 - IF2 when `if1_above_lo2` is false).
    static FrequencyPlan make(double rf_low_hz, double rf_high_hz, LoSide lo1_mode, double lo2_hz, double if2_hz,
                              double passband_hz, bool if1_above_lo2 = true) {
        FrequencyPlan p{rf_low_hz, rf_high_hz, lo1_mode, lo2_hz, if2_hz,
                        if1_above_lo2 ? lo2_hz + if2_hz : lo2_hz - if2_hz, passband_hz};
        return p;
    }

    bool contains(double rf_hz) const { return rf_hz >= rf_low_hz && rf_hz <= rf_high_hz; }
};

inline std::vector<std::string> check_plan(const FrequencyPlan& p) {
    std::vector<std::string> v;
    if (!(p.rf_low_hz > 0.0) || !(p.rf_high_hz >= p.rf_low_hz)) v.push_back("plan: rf_band_hz must be 0 < low <= high");
    if (!(p.lo2_hz > 0.0)) v.push_back("plan: lo2_hz must be > 0");
    if (!(p.if2_hz > 0.0)) v.push_back("plan: if2_hz must be > 0");
    if (!(p.passband_hz > 0.0)) v.push_back("plan: passband_hz must be > 0");
    if (!(p.if1_hz > 0.0)) v.push_back("plan: if1_hz must be > 0");
    else if (p.if1_hz != p.lo2_hz + p.if2_hz && p.if1_hz != p.lo2_hz - p.if2_hz)
        v.push_back("plan: if1_hz must equal lo2_hz + if2_hz or lo2_hz - if2_hz");
    if (p.lo1_mode == LoSide::low && p.rf_low_hz > 0.0 && p.rf_low_hz - p.if1_hz <= 0.0)
        v.push_back("plan: low-side LO1 would be non-positive at the band edge");
    return v;
}

struct TempRange {
    double min_degc = -55.0;
    double max_degc = 125.0;
};

struct Chain {
    std::string name;
    FrequencyPlan plan;
    std::vector<StageSpec> stages;
    /// An empty chain is only legal when this is set.
    bool identity = false;
    TempRange validity;
};

/// Chain-level invariants on top of per-stage ones. Collects every violation.
inline std::vector<std::string> check_chain(const Chain& c) {
    std::vector<std::string> v = check_plan(c.plan);
    if (c.stages.empty() && !c.identity) v.push_back("chain has no stages (set identity to build an empty chain)");
    if (!c.stages.empty() && c.identity) v.push_back("identity chain must have no stages");
    for (std::size_t i = 0; i < c.stages.size(); ++i) {
        for (auto& m : check_stage(c.stages[i])) v.push_back(std::move(m));
        for (std::size_t j = 0; j < i; ++j)
            if (c.stages[j].label == c.stages[i].label) v.push_back("duplicate stage label '" + c.stages[i].label + "'");
    }
    if (!c.identity) {
        const auto mixers = std::count_if(c.stages.begin(), c.stages.end(),
                                          [](const StageSpec& s) { return s.kind == StageKind::mixer; });
        if (mixers != 2)
            v.push_back("two-stage downconversion plan needs exactly 2 mixer stages, found " + std::to_string(mixers));
    }
    if (!(c.validity.min_degc < c.validity.max_degc)) v.push_back("temp_range_degc must be ascending");
    return v;
}

inline Chain make_chain(Chain c) {
    auto v = check_chain(c);
    if (!v.empty()) throw validation_error(std::move(v));
    return c;
}

/// Chain with every adjustable attenuator set to `setting_db`.
inline Chain with_attenuator_setting(Chain c, double setting_db) {
    for (auto& s : c.stages)
        if (s.kind == StageKind::adjustable_attenuator) s.setting_db = setting_db;
    return make_chain(std::move(c));
}

struct Interferer {
    double offset_hz = 0.0;
    double p_dbm = 0.0;
};

struct OperatingPoint {
    double rf_hz = 0.0;
    double temp_degc = reference_temp_degc;
    double p_in_dbm = -32.0;
    std::optional<Interferer> interferer;
};

/// Throws range_error when the point lies outside the chain's band or temperature range.
inline void check_point(const Chain& c, const OperatingPoint& p) {
    char buf[200];
    if (!c.identity && !c.plan.contains(p.rf_hz)) {
        std::snprintf(buf, sizeof buf, "rf %.9g Hz outside plan band [%.9g, %.9g] Hz", p.rf_hz, c.plan.rf_low_hz,
                      c.plan.rf_high_hz);
        throw range_error(buf);
    }
    if (!(p.temp_degc >= c.validity.min_degc && p.temp_degc <= c.validity.max_degc)) {
        std::snprintf(buf, sizeof buf, "temperature %g degC outside model validity [%g, %g] degC", p.temp_degc,
                      c.validity.min_degc, c.validity.max_degc);
        throw range_error(buf);
    }
}

/// A stage's parameters evaluated at one operating point.
struct ResolvedStage {
    std::string label;
    StageKind kind = StageKind::amplifier;
    double gain_db = 0.0;
    double gain_lin = 1.0;
    double noise_factor_lin = 1.0;
    double nf_db = 0.0;
    std::optional<double> iip3_dbm;  // absent: ideally linear
    std::optional<double> iip3_mw;
    std::optional<double> oip3_dbm;
};

struct Intercepts {
    double iip3_dbm;
    double oip3_dbm;
};

/// Completes an intercept pair from whichever side is known: IIP3 = OIP3 - gain.
inline Intercepts derive_ip3(double gain_db, std::optional<double> oip3_dbm, std::optional<double> iip3_dbm) {
    if (oip3_dbm.has_value() == iip3_dbm.has_value())
        throw error("derive_ip3 needs exactly one of oip3 / iip3");
    if (oip3_dbm) return {*oip3_dbm - gain_db, *oip3_dbm};
    return {*iip3_dbm, *iip3_dbm + gain_db};
}

/// Resolves a stage at `point`, with an extra process offset added to its gain.
///
/// The reference gain is the table (or gain_db) value at the operating frequency plus
/// the offset, minus the attenuator setting. Temperature adds tempco * (T - 25 degC) on
/// top. The input intercept is fixed at reference temperature (a stage given by OIP3
/// gets IIP3 = OIP3 - reference gain) so the output intercept tracks thermal gain
/// drift. Passive noise figure is the reference loss.
inline ResolvedStage resolve_stage(const StageSpec& s, const OperatingPoint& point, double gain_offset_db = 0.0) {
    const double base = s.gain_table ? s.gain_table->at(point.rf_hz) : s.gain_db;
    double ref_gain = base + gain_offset_db;
    if (s.kind == StageKind::adjustable_attenuator) ref_gain -= s.setting_db;

    ResolvedStage r;
    r.label = s.label;
    r.kind = s.kind;
    r.gain_db = ref_gain + s.gain_tempco_db_per_degc * (point.temp_degc - reference_temp_degc);
    r.gain_lin = db_to_lin(r.gain_db);
    r.nf_db = (is_passive(s.kind) && !s.nf_override) ? std::max(0.0, -ref_gain) : s.nf_db;
    r.noise_factor_lin = db_to_lin(r.nf_db);
    if (s.is_nonlinear()) {
        const double iip3 = s.iip3_dbm ? *s.iip3_dbm : derive_ip3(ref_gain, s.oip3_dbm, std::nullopt).iip3_dbm;
        r.iip3_dbm = iip3;
        r.iip3_mw = dbm_to_mw(iip3);
        r.oip3_dbm = derive_ip3(r.gain_db, std::nullopt, iip3).oip3_dbm;
    }
    return r;
}

/// Resolves every stage. `gain_offsets_db` is empty or one entry per stage.
inline std::vector<ResolvedStage> resolve_chain(const Chain& c, const OperatingPoint& point,
                                                std::span<const double> gain_offsets_db = {}) {
    check_point(c, point);
    if (!gain_offsets_db.empty() && gain_offsets_db.size() != c.stages.size())
        throw error("gain offset count does not match stage count");
    std::vector<ResolvedStage> out;
    out.reserve(c.stages.size());
    for (std::size_t i = 0; i < c.stages.size(); ++i)
        out.push_back(resolve_stage(c.stages[i], point, gain_offsets_db.empty() ? 0.0 : gain_offsets_db[i]));
    return out;
}

}  // namespace rxchain
