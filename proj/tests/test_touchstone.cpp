#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "rxchain/chain_file.hpp"
#include "rxchain/touchstone.hpp"
#include "support/touchstone_corpus.hpp"

using namespace rxchain;

namespace {

std::string golden() { return detail::read_text_file(std::string(RXCHAIN_DATA_DIR) + "/lna_s21.s2p"); }

}  // namespace

TEST(Touchstone, RiMagnitudeInDb) {
    const auto net = parse_touchstone("# GHZ S RI R 50\n1 0 0 3 4 0 0 0.1 0\n");
    ASSERT_EQ(net.s21_db.size(), 1u);
    EXPECT_NEAR(net.s21_db[0], 20.0 * std::log10(5.0), 1e-12);  // 13.979 dB
    EXPECT_NEAR(net.s21_db[0], 13.9794, 1e-4);
    EXPECT_DOUBLE_EQ(net.freq_points_hz[0], 1e9);
}

TEST(Touchstone, Defaults) {
    // "#" alone: GHz, MA, 50 ohm.
    const auto net = parse_touchstone("#\n2 0.5 0 0.5 90 0.1 0 0.5 0\n");
    EXPECT_EQ(net.format, SParamFormat::ma);
    EXPECT_DOUBLE_EQ(net.reference_ohm, 50.0);
    EXPECT_DOUBLE_EQ(net.freq_points_hz[0], 2e9);
    EXPECT_NEAR(net.s21_db[0], -6.0206, 1e-4);
    EXPECT_NEAR(net.s[0][1].imag(), 0.5, 1e-15);
}

TEST(Touchstone, CommentsCaseAndSecondOptionLine) {
    const auto net = parse_touchstone(
        "! header\n# mhz s db r 75 ! trailing\n# GHZ S RI R 50\n100 0 0 -3 0 0 0 0 0 ! row\n\n200 0 0 -4 0 0 0 0 0\n");
    EXPECT_EQ(net.format, SParamFormat::db);
    EXPECT_DOUBLE_EQ(net.reference_ohm, 75.0);
    ASSERT_EQ(net.freq_points_hz.size(), 2u);
    EXPECT_DOUBLE_EQ(net.freq_points_hz[1], 200e6);
    EXPECT_DOUBLE_EQ(net.s21_db[1], -4.0);
}

TEST(Touchstone, NoiseBlockSkipped) {
    const auto net = parse_touchstone("# GHZ S DB R 50\n1 0 0 10 0 0 0 0 0\n2 0 0 12 0 0 0 0 0\n1 1.5 0.3 20 0.2\n");
    EXPECT_EQ(net.freq_points_hz.size(), 2u);
}

TEST(Touchstone, Rejections) {
    const auto bad = [](const char* text) { EXPECT_THROW(parse_touchstone(text), parse_error) << text; };
    bad("1 0 0 10 0 0 0 0 0\n");                                   // data before option line
    bad("! only a comment\n");                                     // no option line
    bad("# GHZ S DB R 50\n");                                      // no data
    bad("[Version] 2.0\n# GHZ S DB R 50\n1 0 0 1 0 0 0 0 0\n");    // v2
    bad("# GHZ Z MA R 50\n1 0 0 1 0 0 0 0 0\n");                   // not S
    bad("# GHZ S XX R 50\n1 0 0 1 0 0 0 0 0\n");                   // unknown token
    bad("# GHZ S DB R 50\n1 0 0 1 0 0 0 0\n");                     // 8 columns
    bad("# GHZ S DB R 50\n1 0 0 1 0 0 0 0 0 0\n");                 // 10 columns
    bad("# GHZ S DB R 50\n1 0 0 1 0 0 0 0 x\n");                   // non-numeric
    bad("# GHZ S DB R 50\n2 0 0 1 0 0 0 0 0\n1 0 0 1 0 0 0 0 0\n"); // descending
    bad("# GHZ S DB R 50\n1 0 0 1 0 0 0 0 0\n1 0 0 1 0 0 0 0 0\n"); // duplicate
    bad("# GHZ S MA R 50\n1 0 0 0 0 0 0 0 0\n");                   // |S21| = 0
    bad("# GHZ S DB R -5\n1 0 0 1 0 0 0 0 0\n");                   // bad R
}

TEST(Touchstone, ErrorsCarryLineNumbers) {
    try {
        parse_touchstone("# GHZ S DB R 50\n1 0 0 1 0 0 0 0 0\n2 0 0 1 0 0 0 0\n");
        FAIL();
    } catch (const parse_error& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(Touchstone, FormatEquivalenceProperty) {
    rxtest::Gen g(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const auto c = rxtest::random_sparam_case(g);
        const auto a = parse_touchstone(c.db), b = parse_touchstone(c.ma), d = parse_touchstone(c.ri);
        ASSERT_EQ(a.freq_points_hz, c.freq_hz);
        ASSERT_EQ(b.freq_points_hz, c.freq_hz);
        ASSERT_EQ(d.freq_points_hz, c.freq_hz);
        for (std::size_t i = 0; i < c.freq_hz.size(); ++i) {
            EXPECT_NEAR(a.s21_db[i], c.s21_db[i], 1e-9);
            EXPECT_NEAR(b.s21_db[i], c.s21_db[i], 1e-9);
            EXPECT_NEAR(d.s21_db[i], c.s21_db[i], 1e-9);
        }
    }
}

TEST(Touchstone, RoundTripProperty) {
    rxtest::Gen g(77);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = rxtest::random_sparam_case(g);
        const auto net = parse_touchstone(trial % 3 == 0 ? c.db : trial % 3 == 1 ? c.ma : c.ri);
        for (auto fmt : {SParamFormat::db, SParamFormat::ma, SParamFormat::ri}) {
            const auto back = parse_touchstone(write_touchstone(net, fmt));
            ASSERT_EQ(back.freq_points_hz, net.freq_points_hz);
            EXPECT_DOUBLE_EQ(back.reference_ohm, net.reference_ohm);
            for (std::size_t i = 0; i < net.s21_db.size(); ++i) {
                if (fmt == SParamFormat::db) EXPECT_EQ(back.s21_db[i], net.s21_db[i]);
                else EXPECT_NEAR(back.s21_db[i], net.s21_db[i], 1e-9);
                for (int k = 0; k < 4; ++k) EXPECT_LT(std::abs(back.s[i][k] - net.s[i][k]), 1e-9 * std::abs(net.s[i][k]) + 1e-15);
            }
        }
    }
}

TEST(Touchstone, GoldenVendorFile) {
    const auto net = parse_touchstone(golden());
    EXPECT_EQ(net.format, SParamFormat::db);
    ASSERT_EQ(net.freq_points_hz.size(), 13u);
    EXPECT_DOUBLE_EQ(net.freq_points_hz.front(), 3.0e9);
    EXPECT_DOUBLE_EQ(net.freq_points_hz.back(), 3.6e9);
    EXPECT_EQ(gain_at(net, 3.1e9), 16.0);
    EXPECT_EQ(gain_at(net, 3.3e9), 18.0);
    EXPECT_EQ(gain_at(net, 3.5e9), 20.0);
    EXPECT_NEAR(gain_at(net, 3.325e9), 18.23, 1e-12);  // midway between 18.00 and 18.46
    EXPECT_THROW(gain_at(net, 2.9e9), range_error);
    EXPECT_THROW(gain_at(net, 3.7e9), range_error);
}

TEST(GainTable, InterpolatesWithoutExtrapolating) {
    const GainTable t({1.0, 3.0}, {10.0, 14.0});
    EXPECT_DOUBLE_EQ(t.at(2.0), 12.0);
    EXPECT_EQ(t.at(1.0), 10.0);
    EXPECT_EQ(t.at(3.0), 14.0);
    EXPECT_THROW(t.at(0.999), range_error);
    EXPECT_THROW(t.at(3.001), range_error);
    EXPECT_THROW(GainTable({1.0, 1.0}, {0.0, 0.0}), error);
    EXPECT_THROW(GainTable({1.0}, {0.0, 0.0}), error);
    EXPECT_THROW(GainTable({}, {}), error);
}

TEST(ParamTable, OneDimensional) {
    const auto t = load_param_table("# comment\nfreq_hz,gain_db,nf_db\n2e9,12,3\n1e9,10,2\n\n");
    EXPECT_FALSE(t.has_temp_axis());
    EXPECT_DOUBLE_EQ(t.at("gain_db", 1.5e9), 11.0);
    EXPECT_DOUBLE_EQ(t.at("nf_db", 2e9), 3.0);
    EXPECT_THROW(t.at("oip3", 1e9), error);
    EXPECT_THROW(t.at("gain_db", 3e9), range_error);
    EXPECT_DOUBLE_EQ(t.gain_table("gain_db").at(1.25e9), 10.5);
}

TEST(ParamTable, BilinearOracle) {
    const auto t = load_param_table(
        "freq_hz,temp_degc,g\n1e9,-40,1\n1e9,85,3\n2e9,-40,5\n2e9,85,11\n");
    ASSERT_TRUE(t.has_temp_axis());
    // Corners exactly, centre = mean of the four corners.
    EXPECT_EQ(t.at("g", 1e9, -40.0), 1.0);
    EXPECT_EQ(t.at("g", 2e9, 85.0), 11.0);
    EXPECT_DOUBLE_EQ(t.at("g", 1.5e9, 22.5), (1.0 + 3.0 + 5.0 + 11.0) / 4.0);
    EXPECT_THROW(t.at("g", 1.5e9, 100.0), range_error);
    EXPECT_THROW(t.gain_table("g"), error);
}

TEST(ParamTable, Rejections) {
    const auto bad = [](const char* text) { EXPECT_THROW(load_param_table(text), parse_error) << text; };
    bad("");
    bad("gain,freq_hz\n1,2\n");
    bad("freq_hz\n1\n");
    bad("freq_hz,g,g\n1,2,3\n");
    bad("freq_hz,g\n");
    bad("freq_hz,g\n1,2,3\n");
    bad("freq_hz,g\n1,abc\n");
    bad("freq_hz,g\n1,2\n1,3\n");
    bad("freq_hz,temp_degc,g\n1,0,1\n1,10,1\n2,0,1\n");
}
