#pragma once

// Command-line front end. Exit status: 0 success, 1 domain error (message names the
// violated rule), 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rxchain/cascade.hpp"
#include "rxchain/chain_file.hpp"
#include "rxchain/intermod.hpp"
#include "rxchain/report.hpp"
#include "rxchain/sweeps.hpp"
#include "rxchain/twotone.hpp"

namespace rxchain::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_domain = 1;
inline constexpr int exit_usage = 2;

namespace detail {

inline std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

inline std::string fmt(const char* f, const Limit& v) { return v.bounded() ? fmt(f, v.value()) : "unbounded"; }

struct Common {
    std::string chain_path;
    std::string out_path;
    std::string format = "csv";
    double freq_hz = 3.3e9;
    double temp_degc = 25.0;
    double pin_dbm = -32.0;
    std::optional<double> bandwidth_hz;
    std::optional<double> att_db;
};

inline void add_point_options(CLI::App* app, Common& c) {
    app->add_option("--chain", c.chain_path, "chain description (JSON)")->required()->check(CLI::ExistingFile);
    app->add_option("--freq", c.freq_hz, "RF frequency, Hz")->capture_default_str();
    app->add_option("--temp", c.temp_degc, "ambient temperature, degC")->capture_default_str();
    app->add_option("--pin", c.pin_dbm, "input signal power, dBm")->capture_default_str();
    app->add_option("--bw", c.bandwidth_hz, "noise bandwidth, Hz (default: plan passband)")->check(CLI::PositiveNumber);
    app->add_option("--att", c.att_db, "adjustable attenuator setting, dB");
}

inline void add_output_options(CLI::App* app, Common& c) {
    app->add_option("--out", c.out_path, "write structured output to this file");
    app->add_option("--format", c.format, "structured output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

inline Chain load(const Common& c) {
    Chain chain = load_chain_file(c.chain_path);
    if (c.att_db) chain = with_attenuator_setting(std::move(chain), *c.att_db);
    return chain;
}

inline NoiseModel model_for(const Chain& chain, const Common& c) {
    NoiseModel m = noise_model_for(chain);
    if (c.bandwidth_hz) m.bandwidth_hz = *c.bandwidth_hz;
    return m;
}

/// Writes `text` to --out when given, else to `out` when `to_stdout_otherwise`.
inline void emit(const Common& c, const std::string& text, std::ostream& out, bool to_stdout_otherwise) {
    if (!c.out_path.empty()) {
        std::ofstream f(c.out_path, std::ios::binary);
        if (!f) throw error("cannot write '" + c.out_path + "'");
        f << text;
        if (!f) throw error("write to '" + c.out_path + "' failed");
    } else if (to_stdout_otherwise) {
        out << text;
    }
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline void print_budget(std::ostream& out, const Chain& chain, const CascadeResult& r) {
    out << "chain: " << chain.name << " (" << chain.stages.size() << " stages)\n";
    out << "point: rf " << fmt("%.6g", r.point.rf_hz) << " Hz, temp " << fmt("%g", r.point.temp_degc) << " degC, pin "
        << fmt("%g", r.point.p_in_dbm) << " dBm, bandwidth " << fmt("%.6g", r.model.bandwidth_hz) << " Hz\n\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-14s %-22s %8s %7s %8s %9s %8s %9s %9s\n", "stage", "kind", "gain", "nf",
                  "iip3", "cum_gain", "cum_nf", "cum_iip3", "cum_sfdr");
    out << line;
    for (const auto& row : r.rows) {
        std::snprintf(line, sizeof line, "%-14s %-22s %8.2f %7.2f %8s %9.2f %8.3f %9s %9s\n", row.label.c_str(),
                      std::string(to_string(row.kind)).c_str(), row.stage_gain_db, row.stage_nf_db,
                      row.stage_iip3_dbm ? fmt("%.2f", *row.stage_iip3_dbm).c_str() : "-", row.cum_gain_db,
                      row.cum_nf_db, fmt("%.2f", row.cum_iip3_dbm).c_str(), fmt("%.2f", row.cum_sfdr_db).c_str());
        out << line;
    }
    out << "\n";
    out << "total gain:   " << fmt("%.2f", r.total_gain_db) << " dB\n";
    out << "total NF:     " << fmt("%.3f", r.total_nf_db) << " dB\n";
    out << "total IIP3:   " << fmt("%.2f", r.total_iip3_dbm) << " dBm\n";
    out << "total OIP3:   " << fmt("%.2f", r.total_oip3_dbm) << " dBm\n";
    out << "noise floor:  " << fmt("%.2f", r.noise_floor_dbm) << " dBm\n";
    out << "SFDR:         " << fmt("%.2f", r.sfdr_db) << " dB\n";
    out << "output power: " << fmt("%.2f", r.point.p_in_dbm + r.total_gain_db) << " dBm\n";
}

}  // namespace detail

/// Runs one CLI invocation; argv[0] is the program name.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Receive-chain cascade analysis: gain, noise figure, IIP3, SFDR, sweeps, spurs, calibration",
                 "rxchain"};
    app.require_subcommand(1);
    detail::Common c;

    auto* validate = app.add_subcommand("validate", "check a chain file and list every violation");
    validate->add_option("--chain", c.chain_path, "chain description (JSON)")->required();

    auto* analyze_cmd = app.add_subcommand("analyze", "cascade budget at one operating point");
    detail::add_point_options(analyze_cmd, c);
    detail::add_output_options(analyze_cmd, c);

    auto* budget = app.add_subcommand("budget", "per-stage cumulative budget as CSV or JSON");
    detail::add_point_options(budget, c);
    detail::add_output_options(budget, c);

    auto* sweep = app.add_subcommand("sweep", "evaluate the chain over a frequency/temperature/power grid");
    detail::add_point_options(sweep, c);
    detail::add_output_options(sweep, c);
    const auto defaults = SweepGrid::defaults();
    std::vector<double> freqs = defaults.freqs_hz, temps = defaults.temps_degc, powers = defaults.powers_dbm;
    std::vector<double> int_levels = defaults.interferer->levels_dbm;
    double int_offset = defaults.interferer->offset_hz;
    bool no_interferer = false;
    std::string plot_path;
    unsigned threads = 1;
    sweep->add_option("--freqs", freqs, "RF frequencies, Hz")->delimiter(',');
    sweep->add_option("--temps", temps, "temperatures, degC")->delimiter(',');
    sweep->add_option("--powers", powers, "input powers, dBm")->delimiter(',');
    sweep->add_option("--interferer-offset", int_offset, "interferer offset from the signal, Hz")->capture_default_str();
    sweep->add_option("--interferer-levels", int_levels, "interferer powers, dBm")->delimiter(',');
    sweep->add_flag("--no-interferer", no_interferer, "omit the interferer dimension");
    sweep->add_option("--plot-out", plot_path, "write long-format plot data CSV here");
    sweep->add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();

    auto* spurs = app.add_subcommand("spurs", "frequency plan, mixer spur tables, or two-tone product list");
    std::string spur_chain;
    std::optional<double> f1, f2, sig, lo, center, passband;
    int order = 3, m_max = 5, n_max = 5;
    spurs->add_option("--chain", spur_chain, "chain file: plan-driven spur tables for both mixers");
    spurs->add_option("--freq", c.freq_hz, "RF frequency for --chain mode, Hz")->capture_default_str();
    spurs->add_option("--f1", f1, "two-tone mode: first tone, Hz");
    spurs->add_option("--f2", f2, "two-tone mode: second tone, Hz");
    spurs->add_option("--order", order, "two-tone mode: maximum order")->capture_default_str();
    spurs->add_option("--sig", sig, "mixer mode: signal frequency, Hz");
    spurs->add_option("--lo", lo, "mixer mode: LO frequency, Hz");
    spurs->add_option("--center", center, "passband centre, Hz");
    spurs->add_option("--passband", passband, "passband width, Hz");
    spurs->add_option("--m-max", m_max, "largest signal harmonic")->capture_default_str();
    spurs->add_option("--n-max", n_max, "largest LO harmonic")->capture_default_str();
    detail::add_output_options(spurs, c);

    auto* calibrate = app.add_subcommand("calibrate", "adjustable-attenuator settings flattening gain over frequency");
    calibrate->add_option("--chain", c.chain_path, "chain description (JSON)")->required()->check(CLI::ExistingFile);
    std::vector<double> cal_freqs = defaults.freqs_hz;
    std::optional<double> target;
    calibrate->add_option("--freqs", cal_freqs, "calibration frequencies, Hz")->delimiter(',');
    calibrate->add_option("--target", target, "target gain, dB (default: lowest gain over --freqs)");
    calibrate->add_option("--temp", c.temp_degc, "temperature, degC")->capture_default_str();
    calibrate->add_option("--bw", c.bandwidth_hz, "noise bandwidth, Hz");
    detail::add_output_options(calibrate, c);

    auto* verify = app.add_subcommand("verify-im3", "compare closed-form IM3 with the time-domain two-tone simulation");
    double v_gain = 0.0, v_oip3 = 10.0;
    std::vector<double> drives = {-40.0, -30.0};
    std::optional<double> v_p2;
    double v_f1 = 60e6, v_f2 = 61e6;
    SamplingGrid grid;
    verify->add_option("--gain", v_gain, "small-signal gain, dB")->capture_default_str();
    verify->add_option("--oip3", v_oip3, "output intercept, dBm")->capture_default_str();
    verify->add_option("--drive", drives, "per-tone drive levels, dBm (ascending)")->delimiter(',');
    verify->add_option("--p2", v_p2, "second-tone power for an unequal-tone comparison, dBm");
    verify->add_option("--f1", v_f1, "first tone, Hz")->capture_default_str();
    verify->add_option("--f2", v_f2, "second tone, Hz")->capture_default_str();
    verify->add_option("--fs", grid.sample_rate_hz, "sample rate, Hz")->capture_default_str();
    verify->add_option("--samples", grid.num_samples, "samples per record")->capture_default_str();
    detail::add_output_options(verify, c);

    auto* worst = app.add_subcommand("worst-case", "process corners with every stage at +/- its gain tolerance");
    detail::add_point_options(worst, c);
    detail::add_output_options(worst, c);

    auto* mc = app.add_subcommand("monte-carlo", "uniform gain-tolerance Monte Carlo");
    detail::add_point_options(mc, c);
    detail::add_output_options(mc, c);
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    mc->add_option("--trials", trials, "number of trials")->capture_default_str();
    mc->add_option("--seed", seed, "random seed")->capture_default_str();
    mc->add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return exit_usage;
    }

    const bool json = c.format == "json";
    try {
        if (validate->parsed()) {
            const auto report = validate_chain_file(c.chain_path);
            if (report.valid()) {
                out << "valid: " << report.name << ", " << report.stage_count << " stages\n";
                return exit_ok;
            }
            out << "invalid: " << report.violations.size() << " violation(s)\n";
            for (const auto& v : report.violations) out << "  - " << v << "\n";
            return exit_domain;
        }

        if (analyze_cmd->parsed() || budget->parsed()) {
            const auto chain = detail::load(c);
            const OperatingPoint pt{c.freq_hz, c.temp_degc, c.pin_dbm, std::nullopt};
            const auto r = analyze(chain, pt, detail::model_for(chain, c));
            const std::string structured = json ? detail::dump(cascade_json(r)) : cascade_csv(r);
            if (analyze_cmd->parsed()) {
                detail::print_budget(out, chain, r);
                detail::emit(c, structured, out, false);
            } else {
                detail::emit(c, structured, out, true);
            }
            return exit_ok;
        }

        if (sweep->parsed()) {
            const auto chain = detail::load(c);
            SweepGrid g;
            g.freqs_hz = freqs;
            g.temps_degc = temps;
            g.powers_dbm = powers;
            if (!no_interferer) g.interferer = SweepInterferer{int_offset, int_levels};
            const auto rows = run_sweep(chain, g, detail::model_for(chain, c), threads);
            detail::emit(c, json ? detail::dump(sweep_json(rows)) : sweep_csv(rows), out, false);
            if (!plot_path.empty()) {
                detail::Common p = c;
                p.out_path = plot_path;
                detail::emit(p, plot_csv(rows), out, false);
            }
            out << "sweep: " << rows.size() << " rows (" << g.freqs_hz.size() << " freqs x " << g.temps_degc.size()
                << " temps x " << g.powers_dbm.size() << " powers"
                << (g.interferer ? " x " + std::to_string(g.interferer->levels_dbm.size()) + " interferer levels" : "")
                << ")\n";
            for (double f : g.freqs_hz) {
                out << "  " << detail::fmt("%.6g", f) << " Hz:";
                for (const auto& r : rows)
                    if (r.rf_hz == f && r.p_in_dbm == g.powers_dbm.front() &&
                        (!r.interferer_dbm || *r.interferer_dbm == g.interferer->levels_dbm.front()))
                        out << "  [" << detail::fmt("%g", r.temp_degc) << " degC gain " << detail::fmt("%.2f", r.total_gain_db)
                            << " nf " << detail::fmt("%.3f", r.total_nf_db) << " sfdr " << detail::fmt("%.2f", r.sfdr_db) << "]";
                out << "\n";
            }
            if (c.out_path.empty()) out << (json ? detail::dump(sweep_json(rows)) : sweep_csv(rows));
            return exit_ok;
        }

        if (spurs->parsed()) {
            if (!spur_chain.empty()) {
                const auto chain = load_chain_file(spur_chain);
                const auto plan = frequency_plan_table(chain.plan, c.freq_hz);
                const double pb = passband.value_or(chain.plan.passband_hz);
                const auto first = mixer_spur_table(c.freq_hz, plan.lo1_hz, m_max, n_max, plan.if1_hz, pb);
                const auto second = mixer_spur_table(plan.if1_hz, plan.lo2_hz, m_max, n_max, plan.if2_hz, pb);
                out << "rf " << detail::fmt("%.6g", plan.rf_hz) << "  lo1 " << detail::fmt("%.6g", plan.lo1_hz) << "  if1 "
                    << detail::fmt("%.6g", plan.if1_hz) << "  lo2 " << detail::fmt("%.6g", plan.lo2_hz) << "  if2 "
                    << detail::fmt("%.6g", plan.if2_hz) << "  image1 " << detail::fmt("%.6g", plan.image1_hz)
                    << "  image2 " << detail::fmt("%.6g", plan.image2_hz) << " Hz\n";
                std::size_t in1 = 0, in2 = 0;
                for (const auto& s : first) in1 += s.product.in_band && !s.desired;
                for (const auto& s : second) in2 += s.product.in_band && !s.desired;
                out << "mixer1: " << first.size() << " products, " << in1 << " undesired in IF1 band\n";
                out << "mixer2: " << second.size() << " products, " << in2 << " undesired in IF2 band\n";
                if (json) {
                    nlohmann::json j;
                    j["plan"] = {{"rf_hz", plan.rf_hz},       {"lo1_hz", plan.lo1_hz},       {"if1_hz", plan.if1_hz},
                                 {"lo2_hz", plan.lo2_hz},     {"if2_hz", plan.if2_hz},       {"image1_hz", plan.image1_hz},
                                 {"image2_hz", plan.image2_hz}};
                    j["mixer1"] = spur_json(first);
                    j["mixer2"] = spur_json(second);
                    detail::emit(c, detail::dump(j), out, true);
                } else {
                    detail::emit(c, "# mixer1\n" + spur_csv(first) + "# mixer2\n" + spur_csv(second), out, true);
                }
                return exit_ok;
            }
            if (f1 && f2) {
                auto products = two_tone_products(*f1, *f2, order);
                if (passband) products = in_band(std::move(products), center.value_or(0.5 * (*f1 + *f2)), *passband);
                detail::emit(c, products_csv(products), out, true);
                return exit_ok;
            }
            if (sig && lo) {
                if (!center || !passband) throw error("mixer mode needs --center and --passband for the IF band");
                detail::emit(c, spur_csv(mixer_spur_table(*sig, *lo, m_max, n_max, *center, *passband)), out, true);
                return exit_ok;
            }
            err << "error: spurs needs --chain, or --f1 and --f2, or --sig and --lo\n\n" << spurs->help();
            return exit_usage;
        }

        if (calibrate->parsed()) {
            const auto chain = load_chain_file(c.chain_path);
            const auto model = detail::model_for(chain, c);
            double tgt = 0.0;
            if (target) {
                tgt = *target;
            } else {
                const auto zeroed = with_attenuator_setting(chain, 0.0);
                bool first = true;
                for (double f : cal_freqs) {
                    const double g = analyze(zeroed, {f, c.temp_degc, -32.0, std::nullopt}, model).total_gain_db;
                    tgt = first ? g : std::min(tgt, g);
                    first = false;
                }
            }
            const auto table = calibrate_attenuator(chain, cal_freqs, tgt, model, c.temp_degc);
            out << "calibration of '" << table.stage_label << "' to " << detail::fmt("%.3f", tgt) << " dB at "
                << detail::fmt("%g", c.temp_degc) << " degC\n";
            for (const auto& e : table.entries)
                out << "  " << detail::fmt("%.6g", e.freq_hz) << " Hz: setting " << detail::fmt("%.1f", e.setting_db)
                    << " dB, gain " << detail::fmt("%.3f", e.achieved_gain_db) << " dB\n";
            detail::emit(c, json ? detail::dump(calibration_json(table)) : calibration_csv(table), out, false);
            return exit_ok;
        }

        if (verify->parsed()) {
            if (drives.size() < 2) throw error("verify-im3 needs at least two drive levels");
            const auto model = design_nonlinearity(v_gain, v_oip3);
            const double iip3 = v_oip3 - v_gain;
            bool pass = true;
            nlohmann::json j;
            j["configured"] = {{"gain_db", v_gain}, {"oip3_dbm", v_oip3}, {"iip3_dbm", iip3}};
            j["rows"] = nlohmann::json::array();
            std::vector<ToneMeasurement> meas;
            out << "drive_dbm  p2_dbm  predicted_im3_out_dbm  measured_2f1-f2  measured_2f2-f1  max_delta_db\n";
            for (double p : drives) {
                const double p2 = v_p2.value_or(p);
                const PolyNonlinearity stages[] = {model};
                const auto m = simulate_two_tone(stages, v_f1, v_f2, p, p2, grid);
                if (!v_p2) meas.push_back(m);
                const auto pred = im3_level(p, p2, iip3);
                const double lo_out = pred.at_2f1_minus_f2_dbm + v_gain;
                const double hi_out = pred.at_2f2_minus_f1_dbm + v_gain;
                const double delta = std::max(std::abs(m.p_2f1_f2_dbm - lo_out), std::abs(m.p_2f2_f1_dbm - hi_out));
                pass = pass && delta <= 0.1;
                char line[200];
                std::snprintf(line, sizeof line, "%9.2f %7.2f %12.3f/%-9.3f %16.3f %16.3f %13.4f\n", p, p2, lo_out, hi_out,
                              m.p_2f1_f2_dbm, m.p_2f2_f1_dbm, delta);
                out << line;
                j["rows"].push_back({{"drive_dbm", p},
                                     {"p2_dbm", p2},
                                     {"predicted_2f1_f2_dbm", lo_out},
                                     {"predicted_2f2_f1_dbm", hi_out},
                                     {"measured_2f1_f2_dbm", m.p_2f1_f2_dbm},
                                     {"measured_2f2_f1_dbm", m.p_2f2_f1_dbm},
                                     {"max_delta_db", delta}});
            }
            if (!v_p2) {
                const auto x = extract_ip3(meas.front(), meas.back(), drives.front(), drives.back(), v_gain);
                const bool ok = std::abs(x.iip3_dbm - iip3) <= 0.1;
                pass = pass && ok;
                out << "extracted IIP3 " << detail::fmt("%.3f", x.iip3_dbm) << " dBm (configured "
                    << detail::fmt("%.3f", iip3) << "), OIP3 " << detail::fmt("%.3f", x.oip3_dbm) << " dBm (configured "
                    << detail::fmt("%.3f", v_oip3) << ")\n";
                j["extracted"] = {{"iip3_dbm", x.iip3_dbm}, {"oip3_dbm", x.oip3_dbm}};
            }
            j["pass"] = pass;
            out << (pass ? "PASS" : "FAIL") << ": IM3 within 0.1 dB of prediction"
                << (v_p2 ? "" : ", extracted IIP3 within 0.1 dB") << "\n";
            if (!c.out_path.empty()) detail::emit(c, detail::dump(j), out, false);
            return pass ? exit_ok : exit_domain;
        }

        if (worst->parsed()) {
            const auto chain = detail::load(c);
            const auto w = worst_case(chain, {c.freq_hz, c.temp_degc, c.pin_dbm, std::nullopt}, detail::model_for(chain, c));
            out << "corner     gain_db   nf_db  iip3_dbm  sfdr_db\n";
            for (const auto& [name, r] : {std::pair<const char*, const CascadeResult*>{"min_gain", &w.min_gain},
                                          {"nominal", &w.nominal},
                                          {"max_gain", &w.max_gain}}) {
                char line[160];
                std::snprintf(line, sizeof line, "%-9s %8.3f %7.3f %9s %8s\n", name, r->total_gain_db, r->total_nf_db,
                              detail::fmt("%.2f", r->total_iip3_dbm).c_str(), detail::fmt("%.2f", r->sfdr_db).c_str());
                out << line;
            }
            detail::emit(c, json ? detail::dump(worst_case_json(w)) : worst_case_csv(w), out, false);
            return exit_ok;
        }

        if (mc->parsed()) {
            const auto chain = detail::load(c);
            const auto s = monte_carlo(chain, {c.freq_hz, c.temp_degc, c.pin_dbm, std::nullopt},
                                       detail::model_for(chain, c), trials, seed, threads);
            out << "monte carlo: " << s.trials << " trials, seed " << s.seed << "\n";
            out << monte_carlo_csv(s);
            detail::emit(c, json ? detail::dump(monte_carlo_json(s)) : monte_carlo_csv(s), out, false);
            return exit_ok;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_domain;
    }
    return exit_usage;
}

}  // namespace rxchain::cli
