#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rxchain/cli.hpp"
#include "rxchain/report.hpp"

using namespace rxchain;
namespace fs = std::filesystem;

namespace {

const std::string ref_chain = std::string(RXCHAIN_DATA_DIR) + "/fig2_chain.json";

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "rxchain");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path temp_path(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "rxchain_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST(Cli, AnalyzeReferenceChain) {
    const auto r = run_cli({"analyze", "--chain", ref_chain, "--freq", "3.3e9", "--temp", "25", "--pin", "-32"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("total gain:   42.00 dB"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("amp5"), std::string::npos);
}

TEST(Cli, AnalyzeNumbersMatchLibrary) {
    const auto path = temp_path("analyze.json");
    const auto r = run_cli({"analyze", "--chain", ref_chain, "--temp", "85", "--format", "json", "--out", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(path));
    const auto lib = analyze(load_chain_file(ref_chain), {3.3e9, 85.0, -32.0, std::nullopt});
    EXPECT_EQ(j["total_gain_db"].get<double>(), lib.total_gain_db);
    EXPECT_EQ(j["total_nf_db"].get<double>(), lib.total_nf_db);
    EXPECT_EQ(j["sfdr_db"].get<double>(), lib.sfdr_db.value());
    EXPECT_EQ(j["rows"].size(), 14u);
}

TEST(Cli, BudgetCsvRoundTrips) {
    const auto r = run_cli({"budget", "--chain", ref_chain, "--att", "2.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto lib = analyze(with_attenuator_setting(load_chain_file(ref_chain), 2.5), {3.3e9, 25.0, -32.0, std::nullopt});
    EXPECT_EQ(r.out, cascade_csv(lib));
    std::istringstream lines(r.out);
    std::string line, last;
    while (std::getline(lines, line)) last = line;
    const auto comma = last.find(',');
    EXPECT_EQ(std::stod(last.substr(comma + 1)), lib.total_gain_db);
}

TEST(Cli, Validate) {
    auto r = run_cli({"validate", "--chain", ref_chain});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("valid: "), std::string::npos);
    EXPECT_NE(r.out.find("14 stages"), std::string::npos);

    auto doc = nlohmann::json::parse(slurp(ref_chain));
    doc["stages"][1]["gain_db"] = 3.0;
    doc["stages"][0]["lna_type"] = "x";
    for (auto& s : doc["stages"])
        if (s.contains("gain_table")) s.erase("gain_table");
    const auto bad = temp_path("bad_chain.json");
    std::ofstream(bad) << doc.dump();
    r = run_cli({"validate", "--chain", bad.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("rf_bpf"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("lna_type"), std::string::npos) << r.out;

    const auto empty = temp_path("empty.json");
    std::ofstream(empty).flush();
    r = run_cli({"validate", "--chain", empty.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("not valid JSON"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrors) {
    auto r = run_cli({"analyze", "--chain", ref_chain, "--bogus"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("Usage"), std::string::npos) << r.err;
    EXPECT_EQ(run_cli({}).code, 2);
    EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
    EXPECT_EQ(run_cli({"analyze"}).code, 2);
    EXPECT_EQ(run_cli({"analyze", "--chain", ref_chain, "--format", "xml"}).code, 2);
    EXPECT_EQ(run_cli({"spurs"}).code, 2);
    r = run_cli({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("verify-im3"), std::string::npos);
}

TEST(Cli, DomainErrors) {
    auto r = run_cli({"analyze", "--chain", ref_chain, "--freq", "4e9"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("outside plan band"), std::string::npos) << r.err;
    r = run_cli({"analyze", "--chain", ref_chain, "--att", "0.3"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("step grid"), std::string::npos) << r.err;
    r = run_cli({"calibrate", "--chain", ref_chain, "--target", "60"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("unreachable"), std::string::npos) << r.err;
}

TEST(Cli, VerifyIm3) {
    const auto path = temp_path("verify.json");
    const auto r = run_cli({"verify-im3", "--gain", "0", "--oip3", "10", "--drive", "-40,-30", "--out", path.string()});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_NE(r.out.find("PASS"), std::string::npos);
    const auto j = nlohmann::json::parse(slurp(path));
    EXPECT_NEAR(j["extracted"]["iip3_dbm"].get<double>(), 10.0, 0.1);
    EXPECT_TRUE(j["pass"].get<bool>());
    const auto u = run_cli({"verify-im3", "--gain", "12", "--oip3", "30", "--drive", "-50,-40", "--p2", "-60"});
    EXPECT_EQ(u.code, 0) << u.out << u.err;
    const auto bad = run_cli({"verify-im3", "--drive", "0,5"});  // compressed
    EXPECT_EQ(bad.code, 1);
}

TEST(Cli, Sweep) {
    const auto csv = temp_path("sweep.csv"), plot = temp_path("plot.csv");
    const auto r = run_cli({"sweep", "--chain", ref_chain, "--out", csv.string(), "--plot-out", plot.string(),
                            "--threads", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("270 rows"), std::string::npos) << r.out;
    const auto chain = load_chain_file(ref_chain);
    const auto rows = run_sweep(chain, SweepGrid::defaults(), noise_model_for(chain));
    EXPECT_EQ(slurp(csv), sweep_csv(rows));
    EXPECT_EQ(slurp(plot), plot_csv(rows));
    const auto p = slurp(plot);
    EXPECT_NE(p.find("gain_db,temp_degc,-40,-40,3.1e+09,"), std::string::npos);
    EXPECT_NE(p.find("interferer_margin_db,interferer_dbm,-92,"), std::string::npos);

    const auto small = run_cli({"sweep", "--chain", ref_chain, "--freqs", "3.2e9", "--temps", "0", "--powers",
                                "-50,-40", "--no-interferer", "--format", "json"});
    ASSERT_EQ(small.code, 0) << small.err;
    EXPECT_NE(small.out.find("2 rows"), std::string::npos);
}

TEST(Cli, Spurs) {
    auto r = run_cli({"spurs", "--chain", ref_chain, "--freq", "3.3e9"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("lo1 3.9e+09"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("image2 4.8e+08"), std::string::npos) << r.out;
    r = run_cli({"spurs", "--f1", "3300e6", "--f2", "3301e6", "--order", "3", "--center", "3300.5e6", "--passband", "5e6"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("2,-1,3.299e+09,3,1"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("-1,2,3.302e+09,3,1"), std::string::npos) << r.out;
    r = run_cli({"spurs", "--sig", "3300e6", "--lo", "3900e6", "--center", "600e6", "--passband", "5e6", "--m-max", "2",
                 "--n-max", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("1,-1,6e+08,2,1,1"), std::string::npos) << r.out;
    EXPECT_EQ(run_cli({"spurs", "--sig", "1e9", "--lo", "2e9"}).code, 1);
}

TEST(Cli, CalibrateWorstCaseMonteCarlo) {
    auto r = run_cli({"calibrate", "--chain", ref_chain});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("3.5e+09 Hz: setting 4.0 dB"), std::string::npos) << r.out;
    r = run_cli({"worst-case", "--chain", ref_chain});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("nominal"), std::string::npos);
    const auto a = run_cli({"monte-carlo", "--chain", ref_chain, "--trials", "500", "--seed", "9"});
    const auto b = run_cli({"monte-carlo", "--chain", ref_chain, "--trials", "500", "--seed", "9", "--threads", "3"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);  // byte-identical
}

TEST(Report, ShortestRoundTripNumbers) {
    EXPECT_EQ(detail::num(0.1), "0.1");
    EXPECT_EQ(detail::num(3.3e9), "3.3e+09");
    EXPECT_EQ(detail::num(42.0), "42");
    EXPECT_EQ(detail::num(Limit::unbounded()), "unbounded");
    EXPECT_EQ(detail::num(std::optional<double>{}), "");
    const double x = 1.0 / 3.0;
    EXPECT_EQ(std::stod(detail::num(x)), x);
}
