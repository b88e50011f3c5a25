// Copyright 2026 The mpqkd Authors
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

#include "mpqkd/harness.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "gtest/gtest.h"

using namespace mpqkd;

namespace {

std::vector<std::string> lines_of(const std::string &text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<double> row_values(const std::string &line) {
    std::vector<double> out;
    std::istringstream in(line);
    for (std::string cell; std::getline(in, cell, ',');) out.push_back(std::strtod(cell.c_str(), nullptr));
    return out;
}

}  // namespace

TEST(Grid, parse) {
    auto g = Grid::parse("0:0.9:91");
    EXPECT_EQ(g.steps, 91);
    auto pts = g.points();
    ASSERT_EQ(pts.size(), 91u);
    EXPECT_EQ(pts.front(), 0.0);
    EXPECT_EQ(pts.back(), 0.9);
    EXPECT_NEAR(pts[50], 0.5, 1e-15);
    EXPECT_EQ(Grid::parse("-2:3:2").points(), (std::vector<double>{-2.0, 3.0}));
    EXPECT_EQ(Grid::parse("0.5:0.5:1").points(), (std::vector<double>{0.5}));
    for (const char *bad : {"", "1:2", "1:2:3:4", "a:1:3", "0:1:0", "0:1:-3", "1:0:5", "0:1:2.5", "0:1:1"}) {
        EXPECT_THROW(Grid::parse(bad), ConfigError) << bad;
    }
}

TEST(Grid, format_double_round_trips) {
    for (double v : {0.1, 1.0 / 3.0, 1.8911398544750249e-08, -2460.0, 0.0}) {
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
}

TEST(Figures, fig2_anchors) {
    const auto text = fig2_csv(SourceParams{}, DetectorModel::noiseless(), {0.0, 0.5});
    auto rows = lines_of(text);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0], "eta,p_err");
    EXPECT_NEAR(row_values(rows[1])[1], 1.8911398544777286e-8, 1e-17);
    EXPECT_NEAR(row_values(rows[2])[1], 0.048605101179928787, 1e-12);
    EXPECT_EQ(text.find('\r'), std::string::npos);
    EXPECT_EQ(text.back(), '\n');
}

TEST(Figures, fig3_anchors) {
    auto rows = lines_of(fig3_csv(SourceParams{}, {0.0, 0.5, 1.0}));
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0], "eta,p_eta");
    EXPECT_EQ(row_values(rows[1])[1], 0.5);
    EXPECT_NEAR(row_values(rows[2])[1], 0.95139489882007121, 1e-12);
}

TEST(Figures, fig1_columns) {
    const SourceParams p;
    const auto d = DetectorModel::noiseless();
    const auto grid = fig1_default_grid(p, d, 0.0);
    EXPECT_EQ(grid.steps, 2001);
    auto rows = lines_of(fig1_csv(p, d, 0.0, grid.points()));
    ASSERT_EQ(rows.size(), 2002u);
    EXPECT_EQ(rows[0], "n,pdf_correct_bit1,pdf_correct_bit0,pdf_incorrect");
    // The incorrect-basis curve peaks at n = 0; the correct-basis curves at +/-N.
    double best1 = -1, best1_n = 0, best_wrong = -1, best_wrong_n = 1;
    for (size_t i = 1; i < rows.size(); ++i) {
        auto v = row_values(rows[i]);
        ASSERT_EQ(v.size(), 4u);
        if (v[1] > best1) best1 = v[1], best1_n = v[0];
        if (v[3] > best_wrong) best_wrong = v[3], best_wrong_n = v[0];
    }
    EXPECT_NEAR(best1_n, 2460.0, 2 * (grid.stop - grid.start) / 2000);
    EXPECT_NEAR(best_wrong_n, 0.0, (grid.stop - grid.start) / 2000);
    // Grid spacing is about 36 photons, so the sampled peak sits just below the maximum.
    EXPECT_NEAR(best1, 1.0 / std::sqrt(2 * std::numbers::pi * 2e5), 1e-3 * best1);
}

TEST(Config, json_round_trip) {
    SessionConfig c;
    c.source.gain = 7.5;
    c.channel_loss = 0.25;
    c.detector.noise_equivalent_number = 13;
    c.attack.kind = AttackKind::kBeamsplitterTap;
    c.attack.tap_fraction = 0.3;
    c.attack.dual_basis_rule = DualBasisRule::kLikelihoodRatio;
    c.num_pulses = 1234;
    c.seed = 0xfeedfacecafebeefULL;
    const auto back = config_from_json(nlohmann::json::parse(config_to_json(c).dump()));
    EXPECT_EQ(config_to_json(back), config_to_json(c));
    EXPECT_EQ(back.seed, c.seed);
    EXPECT_EQ(back.attack.tap_fraction, 0.3);
}

TEST(Config, partial_documents_keep_defaults) {
    auto c = config_from_json(nlohmann::json::parse(R"({"num_pulses": 10, "attack": {"kind": "intercept_resend"}})"));
    EXPECT_EQ(c.num_pulses, 10u);
    EXPECT_EQ(c.attack.kind, AttackKind::kInterceptResend);
    EXPECT_EQ(c.source.gain, 10.0);
    EXPECT_EQ(c.seed, 42u);
}

TEST(Config, bad_documents_name_their_fields) {
    try {
        config_from_json(nlohmann::json::parse(R"({"num_pulses": "many", "attack": {"kind": "psychic"}})"));
        FAIL() << "expected ConfigError";
    } catch (const ConfigError &e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("num_pulses"), std::string::npos) << msg;
        EXPECT_NE(msg.find("attack.kind"), std::string::npos) << msg;
    }
}

TEST(Report, document_is_deterministic_and_reloadable) {
    SessionConfig c;
    c.num_pulses = 4000;
    c.attack.kind = AttackKind::kInterceptResend;
    const auto a = run_report_document(c, run_session(c));
    const auto b = run_report_document(c, run_session(c, {3}));
    EXPECT_EQ(a, b);
    auto doc = nlohmann::json::parse(a);
    EXPECT_EQ(doc.at("format"), "mpqkd-run-report/1");
    EXPECT_EQ(doc.at("rng").at("seed"), 42);
    EXPECT_EQ(doc.at("report").at("attack"), "intercept_resend");
    EXPECT_TRUE(doc.at("report").at("eve_correct_arm_accuracy").is_null());
    // A report doubles as a config for rerunning the session.
    const auto again = config_from_json(doc);
    EXPECT_EQ(run_report_document(again, run_session(again)), a);
}

TEST(Report, csv_lists_config_and_report) {
    SessionConfig c;
    c.num_pulses = 2000;
    auto rows = lines_of(run_report_csv(c, run_session(c)));
    ASSERT_FALSE(rows.empty());
    EXPECT_EQ(rows[0], "key,value");
    bool saw_seed = false, saw_verdict = false;
    for (const auto &r : rows) {
        saw_seed = saw_seed || r == "config.seed,42";
        saw_verdict = saw_verdict || r == "report.detection_verdict,clean";
    }
    EXPECT_TRUE(saw_seed);
    EXPECT_TRUE(saw_verdict);
}

TEST(Files, io_errors_carry_the_path) {
    const auto dir = std::filesystem::temp_directory_path() / "mpqkd_harness_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.txt";
    write_text_file(path, "hello\n");
    EXPECT_EQ(read_text_file(path), "hello\n");
    try {
        read_text_file(dir / "missing" / "nope.json");
        FAIL() << "expected IoError";
    } catch (const IoError &e) {
        EXPECT_NE(std::string(e.what()).find("nope.json"), std::string::npos);
    }
    EXPECT_THROW(write_text_file(dir / "missing" / "x.csv", "x"), IoError);
    std::filesystem::remove_all(dir);
}
