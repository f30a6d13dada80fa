// Copyright 2026 The BosonSim Authors
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

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "bosonsim/io.h"
#include "cli.h"

using namespace bosonsim;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(const std::vector<std::string> &args) {
    std::vector<const char *> argv{"bosonsim"};
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
   protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("bosonsim_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override {
        fs::remove_all(dir_);
    }
    std::string path(const std::string &name) const {
        return (dir_ / name).string();
    }
    std::string data(const std::string &name) const {
        return std::string(BOSONSIM_DATA_DIR) + "/" + name;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, beamsplitter_hom) {
    auto r = cli({"distribution", "--matrix", data("beamsplitter.json"), "--input", "11"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto d = distribution_from_csv(r.out);
    EXPECT_NEAR(d.probability({2, 0}), 0.5, 1e-15);
    EXPECT_NEAR(d.probability({1, 1}), 0.0, 1e-15);
    EXPECT_NEAR(d.probability({0, 2}), 0.5, 1e-15);
}

TEST_F(CliTest, identity_single_outcome) {
    auto r = cli({"distribution", "--matrix", data("identity6.json"), "--input", "011010", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto d = distribution_from_json(r.out);
    for (size_t k = 0; k < d.size(); ++k) {
        EXPECT_EQ(d.probs()[k], d.outcomes()[k] == ModeOccupation::from_string("011010") ? 1.0 : 0.0);
    }
}

TEST_F(CliTest, random_collision_free_twenty_rows) {
    ASSERT_EQ(cli({"random-matrix", "--size", "6", "--seed", "5", "--out", path("random6.json")}).code, 0);
    auto r = cli({"distribution", "--matrix", path("random6.json"), "--input", "011010", "--collision-free", "--out", path("d.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    auto d = distribution_from_csv(read_file(path("d.csv")));
    EXPECT_EQ(d.size(), 20u);
    EXPECT_NEAR(d.total(), 1.0, 1e-12);
}

TEST_F(CliTest, usage_and_data_errors) {
    EXPECT_EQ(cli({}).code, kExitUsage);
    EXPECT_EQ(cli({"distribution", "--input", "11"}).code, kExitUsage);
    EXPECT_EQ(cli({"distribution", "--matrix", data("beamsplitter.json"), "--input", "11", "--clicks", "--collision-free"}).code,
              kExitUsage);
    EXPECT_EQ(cli({"distribution", "--matrix", data("beamsplitter.json"), "--input", "110"}).code, kExitData);
    write_file(path("bad.json"), "{\"m\": 2}");
    EXPECT_EQ(cli({"distribution", "--matrix", path("bad.json"), "--input", "11"}).code, kExitData);
    EXPECT_EQ(cli({"distribution", "--matrix", path("missing.json"), "--input", "11"}).code, kExitData);
    EXPECT_EQ(cli({"distribution", "--matrix", data("beamsplitter.json"), "--input", "11", "--format", "xml"}).code, kExitUsage);
    EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST_F(CliTest, sample_empty_and_deterministic) {
    auto empty = cli({"sample", "--matrix", data("beamsplitter.json"), "--input", "11", "--samples", "0"});
    ASSERT_EQ(empty.code, 0) << empty.err;
    auto s = samples_from_csv(empty.out);
    EXPECT_EQ(s.record.total, 0u);
    EXPECT_TRUE(s.record.counts.empty());

    ASSERT_EQ(cli({"random-matrix", "--size", "6", "--seed", "5", "--out", path("random6.json")}).code, 0);
    std::vector<std::string> args{"sample", "--matrix", path("random6.json"), "--input", "011010", "--collision-free",
                                  "--samples", "1421", "--seed", "1"};
    auto a = cli(args);
    auto b = cli(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    auto rec = samples_from_csv(a.out);
    EXPECT_EQ(rec.record.total, 1421u);
    EXPECT_EQ(rec.matrix_hash, matrix_hash(matrix_from_json(read_file(path("random6.json")))));
}

TEST_F(CliTest, large_sample_converges) {
    ASSERT_EQ(cli({"random-matrix", "--size", "6", "--seed", "5", "--out", path("random6.json")}).code, 0);
    auto exact = cli({"distribution", "--matrix", path("random6.json"), "--input", "011010", "--collision-free"});
    auto counts = cli({"sample", "--matrix", path("random6.json"), "--input", "011010", "--collision-free", "--samples",
                       "1000000", "--seed", "1"});
    ASSERT_EQ(counts.code, 0);
    auto d = distribution_from_csv(exact.out);
    auto s = samples_from_csv(counts.out);
    EXPECT_LT(l1_distance(s.record.empirical(d), d), 0.01);
}

TEST_F(CliTest, characterize_round_trip) {
    ASSERT_EQ(cli({"random-matrix", "--size", "5", "--seed", "8", "--out", path("m.json")}).code, 0);
    ASSERT_EQ(cli({"tomography-data", "--matrix", path("m.json"), "--one-photon", path("p1.csv"), "--two-photon", path("p2.csv")}).code, 0);
    auto r = cli({"characterize", "--one-photon", path("p1.csv"), "--two-photon", path("p2.csv"), "--matrix-out", path("rec_m.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rec = reconstruction_from_json(r.out);
    EXPECT_LT(rec.residual, 1e-10);
    EXPECT_EQ(rec.free_phases, 16u);
    auto truth = matrix_from_json(read_file(path("m.json")));
    auto fit = matrix_from_json(read_file(path("rec_m.json")));
    auto outcomes = enumerate_outcomes(5, 3, true);
    auto a = distribution(truth, {1, 0, 1, 1, 0}, outcomes);
    auto b = distribution(fit, {1, 0, 1, 1, 0}, outcomes);
    EXPECT_LT(l1_distance(a, b), 1e-6);
}

TEST_F(CliTest, characterize_real_matrix_phases) {
    write_file(path("real.json"), R"({"schema_version": 1, "m": 3,
      "re": [[0.5, -0.6, 0.4], [0.7, 0.3, -0.5], [-0.2, 0.6, 0.8]],
      "im": [[0, 0, 0], [0, 0, 0], [0, 0, 0]]})");
    ASSERT_EQ(cli({"tomography-data", "--matrix", path("real.json"), "--one-photon", path("p1.csv"), "--two-photon", path("p2.csv")}).code, 0);
    auto r = cli({"characterize", "--one-photon", path("p1.csv"), "--two-photon", path("p2.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rec = reconstruction_from_json(r.out);
    for (Eigen::Index i = 0; i < 3; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) {
            double p = std::abs(rec.phases(i, j));
            EXPECT_TRUE(p < 1e-6 || std::abs(p - M_PI) < 1e-6) << p;
        }
    }
}

TEST_F(CliTest, characterize_single_record_rank_error) {
    ASSERT_EQ(cli({"random-matrix", "--size", "3", "--seed", "8", "--out", path("m.json")}).code, 0);
    ASSERT_EQ(cli({"tomography-data", "--matrix", path("m.json"), "--one-photon", path("p1.csv"), "--two-photon", path("p2.csv")}).code, 0);
    auto text = read_file(path("p2.csv"));
    auto header_end = text.find("variance\n") + 9;
    auto first_row_end = text.find('\n', header_end) + 1;
    write_file(path("one.csv"), text.substr(0, first_row_end));
    auto r = cli({"characterize", "--one-photon", path("p1.csv"), "--two-photon", path("one.csv")});
    EXPECT_EQ(r.code, kExitData);
    EXPECT_NE(r.err.find("rank 1 of 4"), std::string::npos) << r.err;
}

TEST_F(CliTest, noise_sweep) {
    auto off = cli({"noise-sweep", "--config", data("noise3.json"), "--sweep", "lambda2=0;alpha=1"});
    ASSERT_EQ(off.code, 0) << off.err;
    EXPECT_NE(off.out.find("\n0,1,0\n"), std::string::npos) << off.out;

    auto r = cli({"noise-sweep", "--config", data("noise3.json"), "--sweep", "lambda2=0,0.011,0.023;alpha=0.974"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::vector<double> d;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'l') {
            continue;
        }
        d.push_back(std::stod(line.substr(line.rfind(',') + 1)));
    }
    ASSERT_EQ(d.size(), 3u);
    EXPECT_LE(d[0], d[1]);
    EXPECT_LE(d[1], d[2]);
    EXPECT_GT(d[1], 0.0);

    EXPECT_EQ(cli({"noise-sweep", "--config", data("noise3.json"), "--sweep", "beta=1"}).code, kExitUsage);
}

TEST_F(CliTest, noise_sweep_dense_grid_budget) {
    auto start = std::chrono::steady_clock::now();
    auto r = cli({"noise-sweep", "--config", data("noise3.json"), "--sweep", "lambda2=0:0.05:20;alpha=0.9:1:5", "--format", "json"});
    double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LT(t, 10.0);
}

TEST_F(CliTest, bench) {
    auto r = cli({"bench", "--min", "2", "--max", "8"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("\n2,"), std::string::npos);
    EXPECT_EQ(cli({"bench", "--min", "5", "--max", "40"}).code, kExitData);
}
