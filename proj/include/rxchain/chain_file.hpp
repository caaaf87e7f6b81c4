#pragma once

// Chain-description documents (JSON): top-level `name`, `plan`, `stages[]`, plus optional
// `identity`, `temp_range_degc` and free-form `notes`. Field names match StageSpec and
// FrequencyPlan. Frequencies in Hz, gains and noise figures in dB, powers in dBm.
//
// A stage's `gain_table` is one of
//   {"freq_hz": [...], "gain_db": [...]}          inline
//   {"touchstone": "file.s2p"}                    |S21| of a v1 two-port file
//   {"csv": "file.csv", "column": "gain_db"}      frequency-only parameter table
// with paths relative to the chain file.

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rxchain/model.hpp"
#include "rxchain/touchstone.hpp"

namespace rxchain {

namespace detail {

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot read file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class ChainReader {
public:
    ChainReader(std::filesystem::path base_dir, std::vector<std::string>& violations)
        : base_dir_(std::move(base_dir)), v_(violations) {}

    Chain read(const nlohmann::json& doc) {
        Chain c;
        if (!doc.is_object()) {
            v_.push_back("document root must be an object");
            return c;
        }
        unknown_keys(doc, {"name", "plan", "stages", "identity", "temp_range_degc", "notes"}, "document");
        c.name = string_field(doc, "name", "document", true).value_or("");
        c.identity = bool_field(doc, "identity", "document").value_or(false);
        if (auto it = doc.find("temp_range_degc"); it != doc.end()) {
            if (auto r = number_pair(*it, "temp_range_degc")) c.validity = {r->first, r->second};
        }
        if (auto it = doc.find("plan"); it == doc.end()) v_.push_back("document: missing 'plan'");
        else c.plan = read_plan(*it);

        auto it = doc.find("stages");
        if (it == doc.end() || !it->is_array()) {
            v_.push_back("document: 'stages' must be an array");
            return c;
        }
        for (std::size_t i = 0; i < it->size(); ++i) c.stages.push_back(read_stage((*it)[i], i));
        return c;
    }

private:
    FrequencyPlan read_plan(const nlohmann::json& j) {
        FrequencyPlan p;
        if (!j.is_object()) {
            v_.push_back("plan must be an object");
            return p;
        }
        unknown_keys(j, {"rf_band_hz", "lo1_mode", "lo2_hz", "if2_hz", "if1_hz", "passband_hz"}, "plan");
        if (auto it = j.find("rf_band_hz"); it == j.end()) v_.push_back("plan: missing 'rf_band_hz'");
        else if (auto r = number_pair(*it, "plan.rf_band_hz")) {
            p.rf_low_hz = r->first;
            p.rf_high_hz = r->second;
        }
        if (auto mode = string_field(j, "lo1_mode", "plan", false)) {
            if (*mode == "high-side") p.lo1_mode = LoSide::high;
            else if (*mode == "low-side") p.lo1_mode = LoSide::low;
            else v_.push_back("plan: lo1_mode must be 'high-side' or 'low-side'");
        }
        p.lo2_hz = number_field(j, "lo2_hz", "plan", true).value_or(0.0);
        p.if2_hz = number_field(j, "if2_hz", "plan", true).value_or(0.0);
        p.passband_hz = number_field(j, "passband_hz", "plan", true).value_or(0.0);
        p.if1_hz = number_field(j, "if1_hz", "plan", false).value_or(p.lo2_hz + p.if2_hz);
        return p;
    }

    StageSpec read_stage(const nlohmann::json& j, std::size_t index) {
        StageSpec s;
        const std::string where = "stages[" + std::to_string(index) + "]";
        if (!j.is_object()) {
            v_.push_back(where + ": must be an object");
            return s;
        }
        unknown_keys(j,
                     {"label", "kind", "gain_db", "gain_table", "gain_tempco_db_per_degc", "gain_tol_db", "nf_db",
                      "nf_override", "oip3_dbm", "iip3_dbm", "setting_db", "setting_max_db", "setting_step_db", "note"},
                     where);
        s.label = string_field(j, "label", where, true).value_or(where);
        const std::string who = where + " '" + s.label + "'";
        if (auto k = string_field(j, "kind", who, true)) {
            if (auto kind = parse_stage_kind(*k)) s.kind = *kind;
            else v_.push_back(who + ": unknown kind '" + *k + "'");
        }
        s.gain_db = number_field(j, "gain_db", who, true).value_or(0.0);
        s.gain_tempco_db_per_degc = number_field(j, "gain_tempco_db_per_degc", who, false).value_or(0.0);
        s.gain_tol_db = number_field(j, "gain_tol_db", who, false).value_or(0.0);
        s.nf_override = bool_field(j, "nf_override", who).value_or(false);
        const bool passive = is_passive(s.kind);
        const auto nf = number_field(j, "nf_db", who, !passive);
        s.nf_db = nf ? *nf : (passive ? -s.gain_db : 0.0);
        s.oip3_dbm = number_field(j, "oip3_dbm", who, false);
        s.iip3_dbm = number_field(j, "iip3_dbm", who, false);
        s.setting_db = number_field(j, "setting_db", who, false).value_or(0.0);
        if (auto m = number_field(j, "setting_max_db", who, false)) s.setting_max_db = *m;
        if (auto st = number_field(j, "setting_step_db", who, false)) s.setting_step_db = *st;
        if (auto it = j.find("gain_table"); it != j.end()) s.gain_table = read_gain_table(*it, who);
        return s;
    }

    std::optional<GainTable> read_gain_table(const nlohmann::json& j, const std::string& who) {
        try {
            if (!j.is_object()) throw error("gain_table must be an object");
            if (j.contains("touchstone")) {
                const auto path = base_dir_ / j.at("touchstone").get<std::string>();
                return parse_touchstone(read_text_file(path)).gain_table();
            }
            if (j.contains("csv")) {
                const auto path = base_dir_ / j.at("csv").get<std::string>();
                const auto column = j.value("column", std::string("gain_db"));
                return load_param_table(read_text_file(path)).gain_table(column);
            }
            if (j.contains("freq_hz") && j.contains("gain_db"))
                return GainTable(j.at("freq_hz").get<std::vector<double>>(), j.at("gain_db").get<std::vector<double>>());
            throw error("gain_table needs 'touchstone', 'csv', or 'freq_hz' + 'gain_db'");
        } catch (const nlohmann::json::exception& e) {
            v_.push_back(who + ": gain_table: " + e.what());
        } catch (const error& e) {
            v_.push_back(who + ": gain_table: " + e.what());
        }
        return std::nullopt;
    }

    void unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where) {
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!ok.count(it.key())) v_.push_back(where + ": unknown field '" + it.key() + "'");
    }

    std::optional<double> number_field(const nlohmann::json& j, const char* key, const std::string& where,
                                       bool required) {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) {
            if (required) v_.push_back(where + ": missing '" + key + "'");
            return std::nullopt;
        }
        if (!it->is_number()) {
            v_.push_back(where + ": '" + key + "' must be a number");
            return std::nullopt;
        }
        return it->get<double>();
    }

    std::optional<std::string> string_field(const nlohmann::json& j, const char* key, const std::string& where,
                                            bool required) {
        auto it = j.find(key);
        if (it == j.end()) {
            if (required) v_.push_back(where + ": missing '" + key + "'");
            return std::nullopt;
        }
        if (!it->is_string()) {
            v_.push_back(where + ": '" + key + "' must be a string");
            return std::nullopt;
        }
        return it->get<std::string>();
    }

    std::optional<bool> bool_field(const nlohmann::json& j, const char* key, const std::string& where) {
        auto it = j.find(key);
        if (it == j.end()) return std::nullopt;
        if (!it->is_boolean()) {
            v_.push_back(where + ": '" + key + "' must be true or false");
            return std::nullopt;
        }
        return it->get<bool>();
    }

    std::optional<std::pair<double, double>> number_pair(const nlohmann::json& j, const std::string& where) {
        if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
            v_.push_back(where + " must be a two-number array");
            return std::nullopt;
        }
        return std::pair{j[0].get<double>(), j[1].get<double>()};
    }

    std::filesystem::path base_dir_;
    std::vector<std::string>& v_;
};

}  // namespace detail

struct ValidationReport {
    std::string name;
    std::size_t stage_count = 0;
    std::vector<std::string> violations;

    bool valid() const { return violations.empty(); }
};

/// Schema and invariant check of a parsed document; reports every violation found.
inline ValidationReport validate_chain_document(const nlohmann::json& doc, const std::filesystem::path& base_dir = {}) {
    ValidationReport report;
    detail::ChainReader reader(base_dir, report.violations);
    const Chain c = reader.read(doc);
    for (auto& m : check_chain(c)) {
        if (std::find(report.violations.begin(), report.violations.end(), m) == report.violations.end())
            report.violations.push_back(std::move(m));
    }
    report.name = c.name;
    report.stage_count = c.stages.size();
    return report;
}

inline nlohmann::json parse_chain_json(std::string_view text) {
    try {
        return nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(std::string("chain document is not valid JSON: ") + e.what());
    }
}

/// Builds a validated Chain, throwing validation_error with every violation.
inline Chain build_chain(const nlohmann::json& doc, const std::filesystem::path& base_dir = {}) {
    std::vector<std::string> violations;
    detail::ChainReader reader(base_dir, violations);
    Chain c = reader.read(doc);
    for (auto& m : check_chain(c))
        if (std::find(violations.begin(), violations.end(), m) == violations.end()) violations.push_back(std::move(m));
    if (!violations.empty()) throw validation_error(std::move(violations));
    return c;
}

inline Chain build_chain_text(std::string_view json_text, const std::filesystem::path& base_dir = {}) {
    return build_chain(parse_chain_json(json_text), base_dir);
}

inline Chain load_chain_file(const std::filesystem::path& path) {
    return build_chain_text(detail::read_text_file(path), path.parent_path());
}

inline ValidationReport validate_chain_file(const std::filesystem::path& path) {
    return validate_chain_document(parse_chain_json(detail::read_text_file(path)), path.parent_path());
}

}  // namespace rxchain
