#pragma once

// Vendor data ingestion: Touchstone v1 two-port files and CSV parameter tables.
//
// Only |S21| feeds the rest of the library (as a frequency -> gain table). The
// full four-parameter data is retained so files can be written back out.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rxchain/detail/text.hpp"
#include "rxchain/error.hpp"

namespace rxchain {

namespace detail {

struct bracket_t {
    std::size_t lo;
    std::size_t hi;
    double weight;  // of hi; 0 when lo == hi
};

/// Locates x on an ascending axis. Exact grid hits return weight 0 so the stored value
/// comes back bit-for-bit.
inline bracket_t bracket(const std::vector<double>& axis, double x, std::string_view what) {
    if (axis.empty() || !(x >= axis.front() && x <= axis.back())) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.*s %.9g outside table range [%.9g, %.9g]",
                      static_cast<int>(what.size()), what.data(), x,
                      axis.empty() ? 0.0 : axis.front(), axis.empty() ? 0.0 : axis.back());
        throw range_error(buf);
    }
    const auto it = std::lower_bound(axis.begin(), axis.end(), x);
    const auto hi = static_cast<std::size_t>(it - axis.begin());
    if (*it == x) return {hi, hi, 0.0};
    const std::size_t lo = hi - 1;
    return {lo, hi, (x - axis[lo]) / (axis[hi] - axis[lo])};
}

inline double lerp_at(const bracket_t& b, double y_lo, double y_hi) {
    return b.lo == b.hi ? y_lo : y_lo + (y_hi - y_lo) * b.weight;
}

}  // namespace detail

/// Frequency -> gain (dB) lookup, linearly interpolated in dB. No extrapolation.
class GainTable {
public:
    GainTable(std::vector<double> freq_hz, std::vector<double> gain_db)
        : freq_hz_(std::move(freq_hz)), gain_db_(std::move(gain_db)) {
        if (freq_hz_.empty()) throw error("gain table needs at least one point");
        if (freq_hz_.size() != gain_db_.size())
            throw error("gain table frequency and gain lists differ in length");
        for (std::size_t i = 0; i < freq_hz_.size(); ++i) {
            if (!std::isfinite(freq_hz_[i]) || !std::isfinite(gain_db_[i]))
                throw error("gain table contains a non-finite value");
            if (i > 0 && !(freq_hz_[i] > freq_hz_[i - 1]))
                throw error("gain table frequencies must be strictly ascending");
        }
    }

    double at(double freq_hz) const {
        const auto b = detail::bracket(freq_hz_, freq_hz, "frequency");
        return detail::lerp_at(b, gain_db_[b.lo], gain_db_[b.hi]);
    }

    double min_freq_hz() const { return freq_hz_.front(); }
    double max_freq_hz() const { return freq_hz_.back(); }
    const std::vector<double>& freqs_hz() const { return freq_hz_; }
    const std::vector<double>& gains_db() const { return gain_db_; }

private:
    std::vector<double> freq_hz_;
    std::vector<double> gain_db_;
};

enum class SParamFormat { db, ma, ri };

inline std::string_view to_string(SParamFormat f) {
    switch (f) {
        case SParamFormat::db: return "DB";
        case SParamFormat::ma: return "MA";
        case SParamFormat::ri: return "RI";
    }
    return "?";
}

struct TwoPortNetwork {
    using SParams = std::array<std::complex<double>, 4>;  // S11 S21 S12 S22

    std::vector<double> freq_points_hz;
    std::vector<double> s21_db;
    std::vector<SParams> s;
    SParamFormat format = SParamFormat::ma;
    double reference_ohm = 50.0;

    GainTable gain_table() const { return GainTable(freq_points_hz, s21_db); }
};

namespace detail {

inline std::complex<double> pair_to_complex(SParamFormat fmt, double a, double b) {
    constexpr double deg = std::numbers::pi / 180.0;
    switch (fmt) {
        case SParamFormat::db: return std::polar(std::pow(10.0, a / 20.0), b * deg);
        case SParamFormat::ma: return std::polar(a, b * deg);
        case SParamFormat::ri: return {a, b};
    }
    return {};
}

inline double pair_to_db(SParamFormat fmt, double a, double b) {
    switch (fmt) {
        case SParamFormat::db: return a;
        case SParamFormat::ma: return 20.0 * std::log10(std::abs(a));
        case SParamFormat::ri: return 20.0 * std::log10(std::hypot(a, b));
    }
    return 0.0;
}

}  // namespace detail

/// Parses Touchstone v1 two-port text.
///
/// Grammar: `!` starts a comment; the first `# <unit> S <format> R <ohms>` line sets
/// the options (unit defaults to GHz, format to MA, R to 50); every data row has nine
/// numbers: frequency then S11 S21 S12 S22 as pairs. A noise-parameter block (5-column
/// rows whose frequency restarts) after the network data is skipped.
inline TwoPortNetwork parse_touchstone(std::string_view text) {
    TwoPortNetwork net;
    bool have_options = false;
    bool in_noise_block = false;
    double unit_scale = 1e9;

    detail::for_each_line(text, [&](std::string_view raw, std::size_t line_no) {
        auto line = raw.substr(0, raw.find('!'));
        line = detail::trim(line);
        if (line.empty()) return;

        if (line.front() == '[')
            throw parse_error("Touchstone version 2 keyword '" + std::string(line) +
                                  "' is not supported; only version 1 files are accepted",
                              line_no);

        if (line.front() == '#') {
            if (have_options) return;  // only the first option line counts
            have_options = true;
            const auto tokens = detail::split_ws(line.substr(1));
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                const auto tok = detail::to_upper(tokens[i]);
                if (tok == "HZ") unit_scale = 1.0;
                else if (tok == "KHZ") unit_scale = 1e3;
                else if (tok == "MHZ") unit_scale = 1e6;
                else if (tok == "GHZ") unit_scale = 1e9;
                else if (tok == "S") {}
                else if (tok == "Y" || tok == "Z" || tok == "H" || tok == "G")
                    throw parse_error("only S-parameter files are supported, got '" + tok + "'", line_no);
                else if (tok == "DB") net.format = SParamFormat::db;
                else if (tok == "MA") net.format = SParamFormat::ma;
                else if (tok == "RI") net.format = SParamFormat::ri;
                else if (tok == "R") {
                    if (i + 1 >= tokens.size()) throw parse_error("option line: R without a value", line_no);
                    const auto r = detail::parse_double(tokens[++i]);
                    if (!r || !(*r > 0.0)) throw parse_error("option line: bad reference resistance", line_no);
                    net.reference_ohm = *r;
                } else {
                    throw parse_error("unsupported option token '" + std::string(tokens[i]) + "'", line_no);
                }
            }
            return;
        }

        if (!have_options) throw parse_error("missing option line before data", line_no);

        const auto tokens = detail::split_ws(line);
        std::vector<double> values;
        values.reserve(tokens.size());
        for (auto t : tokens) {
            const auto v = detail::parse_double(t);
            if (!v) throw parse_error("non-numeric field '" + std::string(t) + "'", line_no);
            values.push_back(*v);
        }

        const double freq = values.front() * unit_scale;
        if (in_noise_block) {
            if (values.size() != 5) throw parse_error("noise-parameter row must have 5 columns", line_no);
            return;
        }
        if (values.size() == 5 && !net.freq_points_hz.empty() && freq <= net.freq_points_hz.back()) {
            in_noise_block = true;
            return;
        }
        if (values.size() != 9)
            throw parse_error("expected 9 columns in a two-port data row, got " +
                                  std::to_string(values.size()),
                              line_no);
        if (!net.freq_points_hz.empty() && !(freq > net.freq_points_hz.back()))
            throw parse_error("frequencies must be strictly ascending", line_no);

        TwoPortNetwork::SParams sp;
        for (std::size_t k = 0; k < 4; ++k)
            sp[k] = detail::pair_to_complex(net.format, values[1 + 2 * k], values[2 + 2 * k]);
        const double s21 = detail::pair_to_db(net.format, values[3], values[4]);
        if (!std::isfinite(s21)) throw parse_error("S21 magnitude is zero or non-finite", line_no);

        net.freq_points_hz.push_back(freq);
        net.s21_db.push_back(s21);
        net.s.push_back(sp);
    });

    if (!have_options) throw parse_error("missing option line");
    if (net.freq_points_hz.empty()) throw parse_error("no network data rows");
    return net;
}

/// Writes `net` as Touchstone v1 text with frequencies in Hz.
inline std::string write_touchstone(const TwoPortNetwork& net, SParamFormat fmt = SParamFormat::db) {
    constexpr double rad = 180.0 / std::numbers::pi;
    std::string out = "! written by rxchain\n# HZ S " + std::string(to_string(fmt)) + " R ";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g\n", net.reference_ohm);
    out += buf;
    for (std::size_t i = 0; i < net.freq_points_hz.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", net.freq_points_hz[i]);
        out += buf;
        for (std::size_t k = 0; k < 4; ++k) {
            const auto c = net.s[i][k];
            double a = 0.0, b = 0.0;
            switch (fmt) {
                case SParamFormat::db:
                    a = k == 1 ? net.s21_db[i] : 20.0 * std::log10(std::abs(c));
                    b = std::arg(c) * rad;
                    break;
                case SParamFormat::ma:
                    a = std::abs(c);
                    b = std::arg(c) * rad;
                    break;
                case SParamFormat::ri:
                    a = c.real();
                    b = c.imag();
                    break;
            }
            std::snprintf(buf, sizeof buf, " %.17g %.17g", a, b);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

/// |S21| in dB at `freq_hz`, interpolated in dB between points.
inline double gain_at(const TwoPortNetwork& net, double freq_hz) {
    const auto b = detail::bracket(net.freq_points_hz, freq_hz, "frequency");
    return detail::lerp_at(b, net.s21_db[b.lo], net.s21_db[b.hi]);
}

/// Datasheet parameters on a frequency axis, optionally crossed with temperature.
class ParamTable {
public:
    ParamTable(std::vector<double> freqs, std::vector<double> temps, std::vector<std::string> columns,
               std::vector<std::vector<double>> values)
        : freqs_(std::move(freqs)), temps_(std::move(temps)), columns_(std::move(columns)),
          values_(std::move(values)) {}

    bool has_temp_axis() const { return !temps_.empty(); }
    const std::vector<double>& freqs_hz() const { return freqs_; }
    const std::vector<double>& temps_degc() const { return temps_; }
    const std::vector<std::string>& columns() const { return columns_; }

    double at(std::string_view column, double freq_hz) const {
        if (has_temp_axis()) throw error("table has a temperature axis; give a temperature");
        const auto& col = values_[column_index(column)];
        const auto b = detail::bracket(freqs_, freq_hz, "frequency");
        return detail::lerp_at(b, col[b.lo], col[b.hi]);
    }

    /// Bilinear lookup over (frequency, temperature).
    double at(std::string_view column, double freq_hz, double temp_degc) const {
        if (!has_temp_axis()) return at(column, freq_hz);
        const auto& col = values_[column_index(column)];
        const auto bf = detail::bracket(freqs_, freq_hz, "frequency");
        const auto bt = detail::bracket(temps_, temp_degc, "temperature");
        const auto v = [&](std::size_t fi, std::size_t ti) { return col[fi * temps_.size() + ti]; };
        const double lo = detail::lerp_at(bt, v(bf.lo, bt.lo), v(bf.lo, bt.hi));
        const double hi = detail::lerp_at(bt, v(bf.hi, bt.lo), v(bf.hi, bt.hi));
        return detail::lerp_at(bf, lo, hi);
    }

    GainTable gain_table(std::string_view column) const {
        if (has_temp_axis()) throw error("a gain table needs a frequency-only parameter table");
        return GainTable(freqs_, values_[column_index(column)]);
    }

private:
    std::size_t column_index(std::string_view name) const {
        for (std::size_t i = 0; i < columns_.size(); ++i)
            if (columns_[i] == name) return i;
        throw error("parameter table has no column '" + std::string(name) + "'");
    }

    std::vector<double> freqs_;
    std::vector<double> temps_;
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> values_;  // [column][freq_index * n_temps + temp_index]
};

/// Parses a parameter CSV with header `freq_hz[,temp_degc],<column>...`.
///
/// Rows may come in any order but must cover the full frequency x temperature grid
/// exactly once.
inline ParamTable load_param_table(std::string_view csv_text) {
    std::vector<std::string> header;
    std::size_t header_line = 0;
    std::vector<std::pair<std::size_t, std::vector<double>>> rows;

    detail::for_each_line(csv_text, [&](std::string_view line, std::size_t line_no) {
        if (detail::trim(line).empty() || detail::trim(line).front() == '#') return;
        const auto fields = detail::split_on(line, ',');
        if (header.empty()) {
            for (auto f : fields) header.emplace_back(f);
            header_line = line_no;
            return;
        }
        if (fields.size() != header.size())
            throw parse_error("ragged row: expected " + std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()),
                              line_no);
        std::vector<double> vals;
        for (auto f : fields) {
            const auto v = detail::parse_double(f);
            if (!v || !std::isfinite(*v)) throw parse_error("non-numeric cell '" + std::string(f) + "'", line_no);
            vals.push_back(*v);
        }
        rows.emplace_back(line_no, std::move(vals));
    });

    if (header.empty()) throw parse_error("empty parameter table");
    if (header[0] != "freq_hz") throw parse_error("first header column must be freq_hz", header_line);
    const bool two_d = header.size() > 1 && header[1] == "temp_degc";
    const std::size_t first_col = two_d ? 2 : 1;
    if (header.size() <= first_col) throw parse_error("no parameter columns in header", header_line);
    for (std::size_t i = 0; i < header.size(); ++i)
        for (std::size_t j = i + 1; j < header.size(); ++j)
            if (header[i] == header[j]) throw parse_error("duplicate column '" + header[i] + "'", header_line);
    if (rows.empty()) throw parse_error("parameter table has no data rows");

    std::vector<double> freqs, temps;
    for (const auto& [ln, r] : rows) {
        freqs.push_back(r[0]);
        if (two_d) temps.push_back(r[1]);
    }
    std::sort(freqs.begin(), freqs.end());
    freqs.erase(std::unique(freqs.begin(), freqs.end()), freqs.end());
    std::sort(temps.begin(), temps.end());
    temps.erase(std::unique(temps.begin(), temps.end()), temps.end());

    const std::size_t nt = two_d ? temps.size() : 1;
    const std::size_t ncols = header.size() - first_col;
    std::vector<std::vector<double>> values(ncols, std::vector<double>(freqs.size() * nt));
    std::vector<bool> seen(freqs.size() * nt, false);
    for (const auto& [ln, r] : rows) {
        const auto fi = static_cast<std::size_t>(std::lower_bound(freqs.begin(), freqs.end(), r[0]) - freqs.begin());
        const auto ti = two_d ? static_cast<std::size_t>(std::lower_bound(temps.begin(), temps.end(), r[1]) - temps.begin())
                              : std::size_t{0};
        const auto idx = fi * nt + ti;
        if (seen[idx]) throw parse_error("duplicate axis value", ln);
        seen[idx] = true;
        for (std::size_t c = 0; c < ncols; ++c) values[c][idx] = r[first_col + c];
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw parse_error("table is not a rectangular frequency x temperature grid");

    return ParamTable(std::move(freqs), two_d ? std::move(temps) : std::vector<double>{},
                      std::vector<std::string>(header.begin() + static_cast<std::ptrdiff_t>(first_col), header.end()),
                      std::move(values));
}

}  // namespace rxchain
