#pragma once

// Generated Touchstone files: one random network rendered in DB, MA and RI with
// independently computed columns, plus the |S21| in dB it was generated from.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "support/gen.hpp"

namespace rxtest {

struct SParamCase {
    std::vector<double> freq_hz;
    std::vector<double> s21_db;  // ground truth
    std::string db, ma, ri;      // the same network in each format
};

inline SParamCase random_sparam_case(Gen& g) {
    SParamCase c;
    const std::size_t n = static_cast<std::size_t>(g.integer(1, 40));
    const char* units[] = {"HZ", "KHZ", "MHZ", "GHZ"};
    const double scales[] = {1.0, 1e3, 1e6, 1e9};
    const int u = g.integer(0, 3);
    const double r = g.coin() ? 50.0 : 75.0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "# %s S %%s R %g\n", units[u], r);
    const std::string opt = buf;
    const auto header = [&](const char* fmt) {
        std::snprintf(buf, sizeof buf, opt.c_str(), fmt);
        return "! generated\n" + std::string(buf);
    };
    c.db = header("DB");
    c.ma = header("MA");
    c.ri = header("RI");

    auto f = g.ascending(n, g.uniform(0.1, 10.0), 0.01, 1.0);  // in file units
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", f[i]);
        std::string row_db = buf, row_ma = buf, row_ri = buf;
        for (int k = 0; k < 4; ++k) {
            const double db = g.uniform(-60.0, 30.0);
            const double deg = g.uniform(-180.0, 180.0);
            const double mag = std::pow(10.0, db / 20.0);
            const double rad = deg * std::numbers::pi / 180.0;
            if (k == 1) c.s21_db.push_back(db);
            std::snprintf(buf, sizeof buf, " %.17g %.17g", db, deg);
            row_db += buf;
            std::snprintf(buf, sizeof buf, " %.17g %.17g", mag, deg);
            row_ma += buf;
            std::snprintf(buf, sizeof buf, " %.17g %.17g", mag * std::cos(rad), mag * std::sin(rad));
            row_ri += buf;
        }
        c.db += row_db + "\n";
        c.ma += row_ma + "\n";
        c.ri += row_ri + "\n";
        c.freq_hz.push_back(f[i] * scales[u]);
    }
    return c;
}

}  // namespace rxtest
