#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "rmt/cli.hpp"

using namespace rmt;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) { return cli_main(std::move(args)); }

struct TempDir {
    fs::path path;

    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("rmt_cli_unit_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }

    std::string str(const std::string& sub) const { return (path / sub).string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::vector<std::string> listing(const fs::path& dir) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

const char* kFactorSpec =
    R"([{"kind": "common-factor", "targets": [0, 1, 2, 3, 4, 5],
         "span": [0, 241], "rho": 0.85, "seed": 43}])";

}  // namespace

TEST_CASE("synth, analyze, and detect chain end to end deterministically") {
    TempDir tmp;
    spit(tmp.path / "inject.json", kFactorSpec);

    REQUIRE(run({"synth", "--n", "24", "--l", "241", "--seed", "41", "--inject",
                 tmp.str("inject.json"), "--out", tmp.str("synth")}) == 0);
    const std::string panel_csv = slurp(tmp.path / "synth" / "panel.csv");
    REQUIRE(panel_csv.substr(0, 13) == "timestamp,s0,");
    const std::string mask_csv = slurp(tmp.path / "synth" / "mask.csv");
    REQUIRE(mask_csv.substr(0, 2) == "1,");      // row 0 is a target
    REQUIRE(mask_csv.substr(mask_csv.size() - 4) == "0,0\n");  // row 23 is not

    const std::vector<std::string> analyze_flags = {
        "analyze", "--input", tmp.str("synth/panel.csv"), "--broadening", "2",
        "--window", "120",    "--step",  "60",            "--seed",       "9"};
    std::vector<std::string> first = analyze_flags, second = analyze_flags;
    first.insert(first.end(), {"--out", tmp.str("a1")});
    second.insert(second.end(), {"--out", tmp.str("a2")});
    REQUIRE(run(first) == 0);
    REQUIRE(run(second) == 0);

    for (const char* name :
         {"report.json", "eigenvalue_density.csv", "ipr.csv", "unfolded.csv", "nn_spacing.csv",
          "nnn_spacing.csv", "number_variance.csv", "components_bulk.csv", "projection_corr.csv",
          "projection_scatter.csv"}) {
        INFO(name);
        REQUIRE(fs::exists(tmp.path / "a1" / name));
    }

    const AnalyzeReport report =
        json::parse(slurp(tmp.path / "a1" / "report.json")).get<AnalyzeReport>();
    REQUIRE(report.n == 24);
    REQUIRE(report.l == 240);
    REQUIRE(report.seed == 9);
    REQUIRE(report.broadening_a == 2);
    REQUIRE(report.p() >= 1);
    REQUIRE(report.windows.size() == 3);
    REQUIRE_FALSE(report.basis.vectors.empty());

    // identical invocations produce byte-identical outputs
    REQUIRE(listing(tmp.path / "a1") == listing(tmp.path / "a2"));
    for (const auto& name : listing(tmp.path / "a1")) {
        INFO(name);
        REQUIRE(slurp(tmp.path / "a1" / name) == slurp(tmp.path / "a2" / name));
    }

    REQUIRE(run({"detect", "--baseline", tmp.str("a1/report.json"), "--current",
                 tmp.str("a2/report.json"), "--out", tmp.str("d1")}) == 0);
    const DetectReport verdict =
        json::parse(slurp(tmp.path / "d1" / "verdict.json")).get<DetectReport>();
    REQUIRE_FALSE(verdict.any_fired);
    REQUIRE(verdict.overlap_diagonal.available);
    REQUIRE(verdict.overlap_diagonal.mean_abs_diagonal == Approx(1.0));
}

TEST_CASE("stability command writes a report and overlap grids") {
    TempDir tmp;
    spit(tmp.path / "inject.json", kFactorSpec);
    REQUIRE(run({"synth", "--n", "24", "--l", "241", "--seed", "41", "--inject",
                 tmp.str("inject.json"), "--out", tmp.str("synth")}) == 0);

    REQUIRE(run({"stability", "--input", tmp.str("synth/panel.csv"), "--window", "100", "--lags",
                 "0,50", "--out", tmp.str("s1")}) == 0);
    const StabilityReport report =
        json::parse(slurp(tmp.path / "s1" / "stability.json")).get<StabilityReport>();
    REQUIRE(report.base_p >= 1);
    REQUIRE(report.lags.size() == 2);
    REQUIRE(report.lags[0].ok);
    REQUIRE(report.lags[0].mean_abs_diagonal == Approx(1.0).margin(1e-10));
    REQUIRE(fs::exists(tmp.path / "s1" / "overlap_0.csv"));
    REQUIRE(fs::exists(tmp.path / "s1" / "overlap_50.csv"));

    // a lag that pushes the window past the end of the panel is a config error
    REQUIRE(run({"stability", "--input", tmp.str("synth/panel.csv"), "--window", "100", "--lags",
                 "200", "--out", tmp.str("s2")}) == 1);
}

TEST_CASE("mrtg directories merge into one panel with per-direction series") {
    TempDir tmp;
    fs::create_directories(tmp.path / "logs");
    const auto make_log = [](int base) {
        std::ostringstream os;
        const int in[10] = {120, 116, 118, 115, 109, 111, 108, 103, 105, 100};
        const int out[10] = {77, 71, 76, 70, 64, 69, 63, 58, 61, 55};
        for (int i = 0; i < 10; ++i)
            os << 3000 - 300 * i << ' ' << in[i] + base << ' ' << out[i] + base << ' '
               << in[i] + base << ' ' << out[i] + base << '\n';
        return os.str();
    };
    spit(tmp.path / "logs" / "a.log", make_log(0));
    spit(tmp.path / "logs" / "b.log", make_log(40));

    REQUIRE(run({"analyze", "--input", tmp.str("logs"), "--kind", "mrtg-dir", "--out",
                 tmp.str("m1")}) == 0);
    const AnalyzeReport report =
        json::parse(slurp(tmp.path / "m1" / "report.json")).get<AnalyzeReport>();
    REQUIRE(report.labels == std::vector<std::string>{"a:in", "a:out", "b:in", "b:out"});
    REQUIRE(report.n == 4);
    REQUIRE(report.l == 9);
    // the panel is too small for spacing statistics at the default broadening
    REQUIRE_FALSE(fs::exists(tmp.path / "m1" / "unfolded.csv"));
    REQUIRE(fs::exists(tmp.path / "m1" / "eigenvalue_density.csv"));
}

TEST_CASE("config files supply values but explicit flags win") {
    TempDir tmp;
    REQUIRE(run({"synth", "--n", "12", "--l", "121", "--seed", "3", "--out",
                 tmp.str("synth")}) == 0);
    spit(tmp.path / "run.cfg", "seed=7\nbroadening=2\n");

    REQUIRE(run({"analyze", "--input", tmp.str("synth/panel.csv"), "--config", tmp.str("run.cfg"),
                 "--out", tmp.str("c1")}) == 0);
    const AnalyzeReport from_config =
        json::parse(slurp(tmp.path / "c1" / "report.json")).get<AnalyzeReport>();
    REQUIRE(from_config.seed == 7);
    REQUIRE(from_config.broadening_a == 2);

    REQUIRE(run({"analyze", "--input", tmp.str("synth/panel.csv"), "--config", tmp.str("run.cfg"),
                 "--seed", "9", "--out", tmp.str("c2")}) == 0);
    const AnalyzeReport with_flag =
        json::parse(slurp(tmp.path / "c2" / "report.json")).get<AnalyzeReport>();
    REQUIRE(with_flag.seed == 9);
    REQUIRE(with_flag.broadening_a == 2);
}

TEST_CASE("bad invocations exit with the documented codes") {
    TempDir tmp;

    SECTION("usage errors are exit 1") {
        REQUIRE(run({}) == 1);
        REQUIRE(run({"analyze", "--nope"}) == 1);
        REQUIRE(run({"analyze", "--input", "x.csv", "--kind", "weird", "--out", tmp.str("o")}) ==
                1);
        REQUIRE(run({"--help"}) == 0);
    }

    SECTION("invalid parameter values are exit 1") {
        spit(tmp.path / "p.csv", "timestamp,a,b\n300,1,2\n600,3,4\n900,5,6\n");
        REQUIRE(run({"analyze", "--input", tmp.str("p.csv"), "--dt", "0", "--out",
                     tmp.str("o")}) == 1);
        REQUIRE(run({"analyze", "--input", tmp.str("p.csv"), "--broadening", "0", "--out",
                     tmp.str("o")}) == 1);
        // window must exceed 2a+1 = 17 at the default broadening
        REQUIRE(run({"analyze", "--input", tmp.str("p.csv"), "--window", "17", "--out",
                     tmp.str("o")}) == 1);
        REQUIRE(run({"synth", "--n", "1", "--l", "10", "--out", tmp.str("o")}) == 1);
        REQUIRE(run({"synth", "--n", "5", "--l", "6", "--out", tmp.str("o")}) == 1);
    }

    SECTION("missing and malformed inputs are exit 2") {
        REQUIRE(run({"analyze", "--input", tmp.str("absent.csv"), "--out", tmp.str("o")}) == 2);
        spit(tmp.path / "short.csv", "timestamp,a\n300,1\n");
        REQUIRE(run({"analyze", "--input", tmp.str("short.csv"), "--out", tmp.str("o")}) == 2);
        spit(tmp.path / "not_json.txt", "hello\n");
        REQUIRE(run({"detect", "--baseline", tmp.str("not_json.txt"), "--current",
                     tmp.str("not_json.txt"), "--out", tmp.str("o")}) == 2);
    }

    SECTION("wrong report kinds and bad thresholds are exit 1") {
        spit(tmp.path / "stab.json", R"({"kind": "stability"})");
        REQUIRE(run({"detect", "--baseline", tmp.str("stab.json"), "--current",
                     tmp.str("stab.json"), "--out", tmp.str("o")}) == 1);

        spit(tmp.path / "bad.thresholds", "mystery_knob=1\n");
        spit(tmp.path / "r.json", "{}");
        REQUIRE(run({"detect", "--baseline", tmp.str("r.json"), "--current", tmp.str("r.json"),
                     "--thresholds", tmp.str("bad.thresholds"), "--out", tmp.str("o")}) == 1);
    }
}
