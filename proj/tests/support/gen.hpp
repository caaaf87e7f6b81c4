#pragma once

// Small deterministic generators for property tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rxchain/model.hpp"

namespace rxtest {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    std::vector<double> ascending(std::size_t n, double start, double min_step, double max_step) {
        std::vector<double> v;
        double x = start;
        for (std::size_t i = 0; i < n; ++i) {
            v.push_back(x);
            x += uniform(min_step, max_step);
        }
        return v;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// A valid two-mixer chain over an S-band plan with random amplifier/passive stages.
inline rxchain::Chain random_chain(Gen& g, int extra_stages) {
    using namespace rxchain;
    Chain c;
    c.name = "random";
    c.plan = FrequencyPlan::make(3.1e9, 3.5e9, LoSide::high, 540e6, 60e6, 5e6);
    const auto add = [&](StageKind k, std::string label) {
        StageSpec s;
        s.label = std::move(label);
        s.kind = k;
        s.gain_tol_db = g.uniform(0.0, 1.0);
        if (is_passive(k)) {
            s.gain_db = -g.uniform(0.5, 10.0);
        } else {
            s.gain_db = k == StageKind::mixer ? -g.uniform(5.0, 9.0) : g.uniform(5.0, 25.0);
            s.nf_db = g.uniform(0.5, 10.0);
            s.gain_tempco_db_per_degc = g.uniform(-0.02, 0.0);
            if (g.coin()) s.oip3_dbm = g.uniform(10.0, 45.0);
            else s.iip3_dbm = g.uniform(0.0, 30.0);
        }
        c.stages.push_back(std::move(s));
    };
    add(StageKind::mixer, "mix1");
    for (int i = 0; i < extra_stages; ++i) {
        const auto k = g.coin() ? StageKind::amplifier : (g.coin() ? StageKind::filter : StageKind::attenuator);
        add(k, "s" + std::to_string(i));
    }
    add(StageKind::mixer, "mix2");
    return c;
}

}  // namespace rxtest
