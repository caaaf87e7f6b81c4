#pragma once

// CSV and JSON renderings of analysis results. Numbers are written in shortest
// round-trip form, so re-parsing reproduces the library values exactly. Unbounded
// quantities are written as the string "unbounded".

#include <charconv>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "rxchain/cascade.hpp"
#include "rxchain/intermod.hpp"
#include "rxchain/sweeps.hpp"
#include "rxchain/twotone.hpp"

namespace rxchain {

namespace detail {

inline std::string num(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

inline std::string num(const Limit& v) { return v.bounded() ? num(v.value()) : std::string("unbounded"); }

inline std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

inline nlohmann::json to_json(const Limit& v) { return v.bounded() ? nlohmann::json(v.value()) : nlohmann::json("unbounded"); }

inline nlohmann::json to_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace detail

inline std::string cascade_csv(const CascadeResult& r) {
    std::string out = "label,cum_gain_db,cum_nf_db,cum_iip3_dbm,cum_sfdr_db\n";
    for (const auto& row : r.rows) {
        out += row.label + ',' + detail::num(row.cum_gain_db) + ',' + detail::num(row.cum_nf_db) + ',' +
               detail::num(row.cum_iip3_dbm) + ',' + detail::num(row.cum_sfdr_db) + '\n';
    }
    return out;
}

inline nlohmann::json cascade_json(const CascadeResult& r) {
    nlohmann::json j;
    j["point"] = {{"rf_hz", r.point.rf_hz}, {"temp_degc", r.point.temp_degc}, {"p_in_dbm", r.point.p_in_dbm}};
    j["noise_model"] = {{"ref_temp_k", r.model.ref_temp_k},
                        {"bandwidth_hz", r.model.bandwidth_hz},
                        {"ambient_temp_k", r.model.ambient_temp_k}};
    j["total_gain_db"] = r.total_gain_db;
    j["total_nf_db"] = r.total_nf_db;
    j["total_noise_factor_lin"] = r.total_noise_factor_lin;
    j["total_iip3_dbm"] = detail::to_json(r.total_iip3_dbm);
    j["total_oip3_dbm"] = detail::to_json(r.total_oip3_dbm);
    j["noise_floor_dbm"] = r.noise_floor_dbm;
    j["sfdr_db"] = detail::to_json(r.sfdr_db);
    j["rows"] = nlohmann::json::array();
    for (const auto& row : r.rows) {
        j["rows"].push_back({{"label", row.label},
                             {"kind", std::string(to_string(row.kind))},
                             {"stage_gain_db", row.stage_gain_db},
                             {"stage_nf_db", row.stage_nf_db},
                             {"stage_iip3_dbm", detail::to_json(row.stage_iip3_dbm)},
                             {"cum_gain_db", row.cum_gain_db},
                             {"cum_nf_db", row.cum_nf_db},
                             {"cum_iip3_dbm", detail::to_json(row.cum_iip3_dbm)},
                             {"cum_noise_floor_dbm", row.cum_noise_floor_dbm},
                             {"cum_sfdr_db", detail::to_json(row.cum_sfdr_db)}});
    }
    return j;
}

inline std::string products_csv(const std::vector<ImProduct>& products) {
    std::string out = "m,n,freq_hz,order,in_band\n";
    for (const auto& p : products)
        out += std::to_string(p.m) + ',' + std::to_string(p.n) + ',' + detail::num(p.freq_hz) + ',' +
               std::to_string(p.order) + ',' + (p.in_band ? "1" : "0") + '\n';
    return out;
}

inline std::string spur_csv(const std::vector<SpurEntry>& spurs) {
    std::string out = "m,n,freq_hz,order,in_band,desired\n";
    for (const auto& s : spurs)
        out += std::to_string(s.product.m) + ',' + std::to_string(s.product.n) + ',' + detail::num(s.product.freq_hz) +
               ',' + std::to_string(s.product.order) + ',' + (s.product.in_band ? "1" : "0") + ',' +
               (s.desired ? "1" : "0") + '\n';
    return out;
}

inline nlohmann::json spur_json(const std::vector<SpurEntry>& spurs) {
    auto j = nlohmann::json::array();
    for (const auto& s : spurs)
        j.push_back({{"m", s.product.m},
                     {"n", s.product.n},
                     {"freq_hz", s.product.freq_hz},
                     {"order", s.product.order},
                     {"in_band", s.product.in_band},
                     {"desired", s.desired}});
    return j;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "rf_hz,temp_degc,p_in_dbm,interferer_dbm,total_gain_db,total_nf_db,total_iip3_dbm,noise_floor_dbm,sfdr_db,"
        "p_out_dbm,interferer_margin_db\n";
    for (const auto& r : rows) {
        out += detail::num(r.rf_hz) + ',' + detail::num(r.temp_degc) + ',' + detail::num(r.p_in_dbm) + ',' +
               detail::num(r.interferer_dbm) + ',' + detail::num(r.total_gain_db) + ',' + detail::num(r.total_nf_db) +
               ',' + detail::num(r.total_iip3_dbm) + ',' + detail::num(r.noise_floor_dbm) + ',' +
               detail::num(r.sfdr_db) + ',' + detail::num(r.p_out_dbm) + ',' +
               (r.interferer_margin_db ? detail::num(*r.interferer_margin_db) : std::string()) + '\n';
    }
    return out;
}

inline nlohmann::json sweep_json(const std::vector<SweepRow>& rows) {
    auto j = nlohmann::json::array();
    for (const auto& r : rows) {
        j.push_back({{"rf_hz", r.rf_hz},
                     {"temp_degc", r.temp_degc},
                     {"p_in_dbm", r.p_in_dbm},
                     {"interferer_dbm", detail::to_json(r.interferer_dbm)},
                     {"total_gain_db", r.total_gain_db},
                     {"total_nf_db", r.total_nf_db},
                     {"total_iip3_dbm", detail::to_json(r.total_iip3_dbm)},
                     {"noise_floor_dbm", r.noise_floor_dbm},
                     {"sfdr_db", detail::to_json(r.sfdr_db)},
                     {"p_out_dbm", r.p_out_dbm},
                     {"interferer_margin_db", r.interferer_margin_db ? detail::to_json(*r.interferer_margin_db)
                                                                     : nlohmann::json(nullptr)}});
    }
    return j;
}

/// Long-format series for external plotting: columns metric,series_key,series_value,
/// temp_degc,freq_hz,value.
///
/// gain_db, nf_db and sfdr_db are keyed by temperature (one point per frequency and
/// temperature, taken at the first grid power since they do not vary with power).
/// interferer_margin_db is keyed by interferer level, taken at the highest grid power.
inline std::string plot_csv(const std::vector<SweepRow>& rows) {
    std::string out = "metric,series_key,series_value,temp_degc,freq_hz,value\n";
    if (rows.empty()) return out;
    double first_power = rows.front().p_in_dbm;
    double max_power = rows.front().p_in_dbm;
    for (const auto& r : rows) max_power = std::max(max_power, r.p_in_dbm);

    std::set<std::pair<double, double>> seen;
    std::string gain, nf, sf, margin;
    for (const auto& r : rows) {
        const std::string prefix_t = ",temp_degc," + detail::num(r.temp_degc) + ',' + detail::num(r.temp_degc) + ',' +
                                     detail::num(r.rf_hz) + ',';
        if (r.p_in_dbm == first_power && seen.insert({r.rf_hz, r.temp_degc}).second) {
            gain += "gain_db" + prefix_t + detail::num(r.total_gain_db) + '\n';
            nf += "nf_db" + prefix_t + detail::num(r.total_nf_db) + '\n';
            sf += "sfdr_db" + prefix_t + detail::num(r.sfdr_db) + '\n';
        }
        if (r.p_in_dbm == max_power && r.interferer_dbm && r.interferer_margin_db) {
            margin += "interferer_margin_db,interferer_dbm," + detail::num(*r.interferer_dbm) + ',' +
                      detail::num(r.temp_degc) + ',' + detail::num(r.rf_hz) + ',' + detail::num(*r.interferer_margin_db) +
                      '\n';
        }
    }
    return out + gain + nf + sf + margin;
}

inline std::string calibration_csv(const CalibrationTable& t) {
    std::string out = "freq_hz,setting_db,achieved_gain_db\n";
    for (const auto& e : t.entries)
        out += detail::num(e.freq_hz) + ',' + detail::num(e.setting_db) + ',' + detail::num(e.achieved_gain_db) + '\n';
    return out;
}

inline nlohmann::json calibration_json(const CalibrationTable& t) {
    nlohmann::json j;
    j["stage"] = t.stage_label;
    j["target_gain_db"] = t.target_gain_db;
    j["temp_degc"] = t.temp_degc;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : t.entries)
        j["entries"].push_back({{"freq_hz", e.freq_hz}, {"setting_db", e.setting_db}, {"achieved_gain_db", e.achieved_gain_db}});
    return j;
}

inline std::string worst_case_csv(const WorstCase& w) {
    std::string out = "corner,total_gain_db,total_nf_db,total_iip3_dbm,noise_floor_dbm,sfdr_db\n";
    const auto line = [&](const char* name, const CascadeResult& r) {
        out += std::string(name) + ',' + detail::num(r.total_gain_db) + ',' + detail::num(r.total_nf_db) + ',' +
               detail::num(r.total_iip3_dbm) + ',' + detail::num(r.noise_floor_dbm) + ',' + detail::num(r.sfdr_db) + '\n';
    };
    line("min_gain", w.min_gain);
    line("nominal", w.nominal);
    line("max_gain", w.max_gain);
    return out;
}

inline nlohmann::json worst_case_json(const WorstCase& w) {
    return {{"min_gain", cascade_json(w.min_gain)}, {"nominal", cascade_json(w.nominal)}, {"max_gain", cascade_json(w.max_gain)}};
}

namespace detail {

inline nlohmann::json summary_json(const MetricSummary& s) {
    return {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}};
}

}  // namespace detail

inline std::string monte_carlo_csv(const MonteCarloSummary& m) {
    std::string out = "metric,mean,std,min,max\n";
    const auto line = [&](const char* name, const MetricSummary& s) {
        out += std::string(name) + ',' + detail::num(s.mean) + ',' + detail::num(s.std) + ',' + detail::num(s.min) + ',' +
               detail::num(s.max) + '\n';
    };
    line("total_gain_db", m.gain_db);
    line("total_nf_db", m.nf_db);
    if (m.iip3_dbm) line("total_iip3_dbm", *m.iip3_dbm);
    if (m.sfdr_db) line("sfdr_db", *m.sfdr_db);
    return out;
}

inline nlohmann::json monte_carlo_json(const MonteCarloSummary& m) {
    nlohmann::json j;
    j["trials"] = m.trials;
    j["seed"] = m.seed;
    j["total_gain_db"] = detail::summary_json(m.gain_db);
    j["total_nf_db"] = detail::summary_json(m.nf_db);
    j["total_iip3_dbm"] = m.iip3_dbm ? detail::summary_json(*m.iip3_dbm) : nlohmann::json("unbounded");
    j["sfdr_db"] = m.sfdr_db ? detail::summary_json(*m.sfdr_db) : nlohmann::json("unbounded");
    return j;
}

}  // namespace rxchain
