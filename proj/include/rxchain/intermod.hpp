#pragma once

// Frequency bookkeeping for two-tone intermodulation and the two-stage mixer plan.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "rxchain/error.hpp"
#include "rxchain/model.hpp"

namespace rxchain {

/// A product |m*f1 + n*f2| of two tones, or |m*f_sig + n*f_lo| of a mixer.
struct ImProduct {
    int m = 0;
    int n = 0;
    double freq_hz = 0.0;
    int order = 0;
    bool in_band = false;
};

/// Every distinct two-tone product of order 2..max_order, harmonics included, ascending
/// in frequency. Coincident products keep the lowest-order coefficient pair. DC is dropped.
inline std::vector<ImProduct> two_tone_products(double f1_hz, double f2_hz, int max_order) {
    if (!(f1_hz > 0.0) || !(f2_hz > 0.0)) throw error("tone frequencies must be > 0");
    if (f1_hz == f2_hz) throw error("two-tone products need distinct tones (f1 == f2)");
    if (max_order < 2) throw error("max_order must be >= 2");

    std::vector<ImProduct> all;
    for (int m = -max_order; m <= max_order; ++m) {
        for (int n = -max_order; n <= max_order; ++n) {
            const int order = std::abs(m) + std::abs(n);
            if (order < 2 || order > max_order) continue;
            const double f = m * f1_hz + n * f2_hz;
            if (!(f > 0.0)) continue;  // the mirrored pair (-m, -n) carries the positive sign
            all.push_back({m, n, f, order, false});
        }
    }
    std::sort(all.begin(), all.end(), [](const ImProduct& a, const ImProduct& b) {
        if (a.freq_hz != b.freq_hz) return a.freq_hz < b.freq_hz;
        if (a.order != b.order) return a.order < b.order;
        return a.m > b.m;
    });

    const double tol = 1e-12 * std::max(f1_hz, f2_hz) * max_order;
    std::vector<ImProduct> out;
    for (const auto& p : all) {
        if (!out.empty() && p.freq_hz - out.back().freq_hz <= tol) {
            if (p.order < out.back().order) out.back() = p;
            continue;
        }
        out.push_back(p);
    }
    return out;
}

/// True iff |freq - center| <= passband / 2 (closed interval).
inline bool is_in_band(double freq_hz, double center_hz, double passband_hz) {
    return std::abs(freq_hz - center_hz) <= passband_hz / 2.0;
}

inline std::vector<ImProduct> in_band(std::vector<ImProduct> products, double center_hz, double passband_hz) {
    if (!(passband_hz > 0.0)) throw error("passband must be > 0 Hz");
    for (auto& p : products) p.in_band = is_in_band(p.freq_hz, center_hz, passband_hz);
    return products;
}

/// Input-referred third-order products of two tones through a device of given IIP3.
struct Im3Levels {
    double at_2f1_minus_f2_dbm;
    double at_2f2_minus_f1_dbm;
};

inline Im3Levels im3_level(double p1_dbm, double p2_dbm, double iip3_dbm) {
    if (!std::isfinite(iip3_dbm)) throw error("im3_level needs a finite IIP3");
    return {2.0 * p1_dbm + p2_dbm - 2.0 * iip3_dbm, p1_dbm + 2.0 * p2_dbm - 2.0 * iip3_dbm};
}

struct PlanFrequencies {
    double rf_hz;
    double lo1_hz;
    double if1_hz;
    double lo2_hz;
    double if2_hz;
    double image1_hz;
    double image2_hz;
};

inline PlanFrequencies frequency_plan_table(const FrequencyPlan& plan, double rf_hz) {
    if (!plan.contains(rf_hz)) throw range_error("rf frequency outside the plan band");
    PlanFrequencies f{};
    f.rf_hz = rf_hz;
    f.if1_hz = plan.if1_hz;
    f.lo2_hz = plan.lo2_hz;
    f.if2_hz = plan.if2_hz;
    if (plan.lo1_mode == LoSide::high) {
        f.lo1_hz = rf_hz + plan.if1_hz;
        f.image1_hz = rf_hz + 2.0 * plan.if1_hz;
    } else {
        f.lo1_hz = rf_hz - plan.if1_hz;
        f.image1_hz = std::abs(rf_hz - 2.0 * plan.if1_hz);
    }
    f.image2_hz = std::abs(2.0 * plan.lo2_hz - plan.if1_hz);
    return f;
}

struct SpurEntry {
    ImProduct product;
    bool desired = false;
};

/// Sum and difference products m*f_sig +/- n*f_lo for 1 <= m <= m_max, 1 <= n <= n_max,
/// flagged against the IF passband. Exactly 2*m_max*n_max entries, no deduplication.
/// The (1, -1) difference product is the desired conversion.
inline std::vector<SpurEntry> mixer_spur_table(double f_sig_hz, double f_lo_hz, int m_max, int n_max,
                                               double if_center_hz, double if_passband_hz) {
    if (m_max < 1 || n_max < 1) throw error("m_max and n_max must be >= 1");
    if (!(if_passband_hz > 0.0)) throw error("IF passband must be > 0 Hz");
    std::vector<SpurEntry> out;
    out.reserve(static_cast<std::size_t>(2 * m_max * n_max));
    for (int m = 1; m <= m_max; ++m) {
        for (int n = 1; n <= n_max; ++n) {
            for (int sign : {+1, -1}) {
                SpurEntry e;
                e.product.m = m;
                e.product.n = sign * n;
                e.product.order = m + n;
                e.product.freq_hz = std::abs(m * f_sig_hz + sign * n * f_lo_hz);
                e.product.in_band = is_in_band(e.product.freq_hz, if_center_hz, if_passband_hz);
                e.desired = m == 1 && n == 1 && sign < 0;
                out.push_back(e);
            }
        }
    }
    return out;
}

}  // namespace rxchain
