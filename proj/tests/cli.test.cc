// Copyright 2026 The Timebin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "test_util.h"
#include "timebin/config_io.h"

using namespace timebin;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(const std::vector<std::string> &args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void put(const fs::path &p, const std::string &text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::vector<std::vector<double>> numeric_rows(const std::string &csv) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(csv);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            char *end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            row.push_back(end == cell.c_str() + cell.size() ? v : std::nan(""));
        }
        rows.push_back(row);
    }
    return rows;
}

class CliTest : public ::testing::Test {
   protected:
    void SetUp() override {
        dir = fs::path(::testing::TempDir()) /
              ("timebin_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string path(const std::string &name) const { return (dir / name).string(); }

    std::string small_config(const std::string &extra = "") {
        std::string text = R"({"run": {"n_pulses": 1000000, "batch_pulses": 250000},
            "source": {"mean_pairs": 0.1, "collection_loss_db": 0},
            "detector_a": {"efficiency": 0.5}, "detector_b": {"efficiency": 0.5})";
        if (!extra.empty()) text += ", " + extra;
        text += "}";
        put(dir / "config.json", text);
        return path("config.json");
    }

    fs::path dir;
};

}  // namespace

TEST_F(CliTest, usage_errors_exit_1) {
    EXPECT_EQ(cli({}).code, kExitParse);
    EXPECT_EQ(cli({"frobnicate"}).code, kExitParse);
    EXPECT_EQ(cli({"curve", "v_vs_x", "--out", path("c.csv")}).code, kExitParse);
    EXPECT_EQ(cli({"curve", "v_vs_e"}).code, kExitParse);
    EXPECT_EQ(cli({"run", "--threads", "0", "--out", path("o")}).code, kExitParse);
    EXPECT_EQ(cli({"curve", "v_vs_e", "--points", "1", "--out", path("c.csv")}).code, kExitParse);
    EXPECT_EQ(cli({"curve", "v_vs_mu", "--mu", "0.1,-1", "--out", path("c.csv")}).code, kExitParse);
    EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST_F(CliTest, config_errors) {
    put(dir / "bad.json", "{\"source\": {\"mean_pairz\": 0.1}}");
    Outcome o = cli({"run", "--config", path("bad.json"), "--out", path("o")});
    EXPECT_EQ(o.code, kExitParse);
    EXPECT_NE(o.err.find("mean_pairz"), std::string::npos);

    put(dir / "syntax.json", "{\"source\": ");
    EXPECT_EQ(cli({"run", "--config", path("syntax.json"), "--out", path("o")}).code, kExitParse);

    put(dir / "wide.json", R"({"windows": {"window_width_ps": 2000}})");
    EXPECT_EQ(cli({"run", "--config", path("wide.json"), "--out", path("o")}).code, kExitValidation);

    put(dir / "neg.json", R"({"source": {"mean_pairs": -0.1}})");
    EXPECT_EQ(cli({"run", "--config", path("neg.json"), "--out", path("o")}).code, kExitValidation);

    EXPECT_EQ(cli({"scan", "--config", small_config(), "--out", path("o")}).code, kExitValidation);
}

TEST_F(CliTest, io_errors_exit_3) {
    EXPECT_EQ(cli({"run", "--config", path("missing.json"), "--out", path("o")}).code, kExitIo);
    put(dir / "blocker", "x");
    EXPECT_EQ(cli({"run", "--config", small_config(), "--out", path("blocker/sub")}).code, kExitIo);
    EXPECT_EQ(cli({"fit", path("missing.csv"), "--out", path("f.csv")}).code, kExitIo);
    EXPECT_EQ(cli({"curve", "v_vs_e", "--out", path("no/such/dir/c.csv")}).code, kExitIo);
}

TEST_F(CliTest, two_phase_scan_exits_4) {
    std::string cfg = small_config(R"("scan": {"phases_rad": [0, 3.14159]})");
    EXPECT_EQ(cli({"scan", "--config", cfg, "--out", path("o")}).code, kExitDegenerate);
}

TEST_F(CliTest, curve_v_vs_e) {
    ASSERT_EQ(cli({"curve", "v_vs_e", "--points", "11", "--scale", "0.95", "--out", path("e.csv")}).code, kExitOk);
    auto rows = numeric_rows(slurp(dir / "e.csv"));
    ASSERT_EQ(rows.size(), 11u);
    EXPECT_EQ(rows.front()[0], 0.5);
    EXPECT_EQ(rows.front()[1], 1.0);
    EXPECT_NEAR(rows.front()[2], 1.0, 1e-15);
    EXPECT_EQ(rows.back()[0], 1.0);
    EXPECT_EQ(rows.back()[1], 0.0);
    EXPECT_EQ(rows.back()[2], 0.0);
    double max_scaled = 0;
    for (auto &r : rows) max_scaled = std::max(max_scaled, r[3]);
    EXPECT_NEAR(max_scaled, 0.95, 1e-15);
}

TEST_F(CliTest, curve_v_vs_mu) {
    ASSERT_EQ(cli({"curve", "v_vs_mu", "--mu", "0,0.2,1", "--out", path("m.csv")}).code, kExitOk);
    auto rows = numeric_rows(slurp(dir / "m.csv"));
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0][1], 1.0);
    EXPECT_NEAR(rows[1][1], 0.95058282642491972, 1e-12);
    EXPECT_NEAR(rows[2][1], 0.76698835407943425, 1e-12);

    ASSERT_EQ(cli({"curve", "v_vs_mu", "--points", "5", "--mu-max", "1", "--v-max", "0.9", "--out", path("g.csv")})
                  .code,
              kExitOk);
    rows = numeric_rows(slurp(dir / "g.csv"));
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[0][1], 0.9);
    EXPECT_NEAR(rows[4][1], 0.9 * 0.76698835407943425, 1e-12);
}

TEST_F(CliTest, fit_matches_library) {
    FringeScan scan = timebin::testing::synthetic_scan(timebin::testing::uniform_grid(16), 80, 0.5, 0.3, 0);
    std::ostringstream csv;
    write_scan_csv(csv, scan, {"feedfacefeedface", 5});
    put(dir / "scan.csv", csv.str());
    ASSERT_EQ(cli({"fit", path("scan.csv"), "--out", path("fit.csv")}).code, kExitOk);
    std::string report = slurp(dir / "fit.csv");
    auto rows = numeric_rows(report);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0][3], 0.5, 1e-10);
    EXPECT_NE(report.find("feedfacefeedface"), std::string::npos);

    put(dir / "neg.csv", "phase_rad,raw,accidental,net\n0,1,0,1\n1,2,0,2\n2,-4,0,-4\n");
    Outcome o = cli({"fit", path("neg.csv"), "--out", path("fit2.csv")});
    EXPECT_EQ(o.code, kExitParse);
    EXPECT_NE(o.err.find("4"), std::string::npos);
}

TEST_F(CliTest, run_writes_outputs_with_provenance) {
    std::string cfg = small_config();
    Outcome o = cli({"run", "--config", cfg, "--out", path("a"), "--seed", "11"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    for (const char *name : {"summary.csv", "histogram.csv"}) {
        std::string text = slurp(dir / "a" / name);
        EXPECT_EQ(text.rfind("# timebin 0.1.0", 0), 0u) << name;
        EXPECT_NE(text.find("# seed=11"), std::string::npos) << name;
        EXPECT_NE(text.find("# config_hash="), std::string::npos) << name;
    }
    EXPECT_NE(slurp(dir / "a" / "histogram.csv").find("time_ns,counts_a,counts_b"), std::string::npos);
}

TEST_F(CliTest, reproducible_bytes) {
    std::string cfg = small_config(R"("scan": {"linspace_rad": {"start": 0, "stop": 6.283185307179586, "count": 6}})");
    ASSERT_EQ(cli({"scan", "--config", cfg, "--out", path("a"), "--seed", "3"}).code, kExitOk);
    ASSERT_EQ(cli({"scan", "--config", cfg, "--out", path("b"), "--seed", "3", "--threads", "3"}).code, kExitOk);
    ASSERT_EQ(cli({"scan", "--config", cfg, "--out", path("c"), "--seed", "4"}).code, kExitOk);
    EXPECT_EQ(slurp(dir / "a" / "scan.csv"), slurp(dir / "b" / "scan.csv"));
    EXPECT_EQ(slurp(dir / "a" / "fit_report.csv"), slurp(dir / "b" / "fit_report.csv"));
    EXPECT_NE(slurp(dir / "a" / "scan.csv"), slurp(dir / "c" / "scan.csv"));

    ASSERT_EQ(cli({"fit", path("a/scan.csv"), "--out", path("refit.csv")}).code, kExitOk);
    EXPECT_EQ(slurp(dir / "refit.csv"), slurp(dir / "a" / "fit_report.csv"));
}

TEST_F(CliTest, scan_repetitions) {
    std::string cfg = small_config(
        R"("scan": {"linspace_rad": {"start": 0, "stop": 6.283185307179586, "count": 6}, "repetitions": 2})");
    ASSERT_EQ(cli({"scan", "--config", cfg, "--out", path("r")}).code, kExitOk);
    EXPECT_TRUE(fs::exists(dir / "r" / "scan_0.csv"));
    EXPECT_TRUE(fs::exists(dir / "r" / "scan_1.csv"));
    EXPECT_NE(slurp(dir / "r" / "scan_0.csv"), slurp(dir / "r" / "scan_1.csv"));
    EXPECT_EQ(numeric_rows(slurp(dir / "r" / "fit_report.csv")).size(), 2u);
}

TEST_F(CliTest, config_dump_round_trips) {
    std::string cfg = small_config();
    Outcome o = cli({"config", "--config", cfg, "--seed", "99"});
    ASSERT_EQ(o.code, kExitOk);
    ConfigFile parsed = parse_config_text(o.out);
    EXPECT_EQ(parsed.experiment.rng_seed, 99u);
    EXPECT_EQ(parsed.experiment.n_pulses, 1000000u);
}
