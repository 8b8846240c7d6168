// Copyright 2026 The spsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "spsim/binary_io.hpp"
#include "spsim/evalbench.hpp"
#include "spsim/stats.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kCli = SPSIM_CLI_PATH;
const std::string kData = std::string(SPSIM_SOURCE_DIR) + "/data/synthetic";

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

Outcome cli(const fs::path& dir, const std::string& args) {
    const auto out = dir / "stdout.txt";
    const auto err = dir / "stderr.txt";
    const std::string cmd = fmt::format("'{}' {} > '{}' 2> '{}'", kCli, args, out.string(), err.string());
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.out = spsim::read_file(out.string());
    o.err = spsim::read_file(err.string());
    return o;
}

/// Runs the toy pipeline once per test binary; later tests reuse its outputs.
class Pipeline : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new fs::path(fixture::temp_dir("cli_pipeline"));
        const auto d = dir_->string();
        auto step = [&](const std::string& args) {
            const auto o = cli(*dir_, fmt::format("--out-dir '{}' --seed 7 {}", d, args));
            if (o.code != 0) failures_ += fmt::format("[{}] exit {}: {}\n", args, o.code, o.err);
        };
        step(fmt::format("ingest --input '{}/documents.jsonl'", kData));
        step(fmt::format("clean --documents '{}/documents.jsonl'", d));
        step(fmt::format("embed --documents '{}/documents.clean.jsonl' --dim 128", d));
        step(fmt::format("index --store '{}/store.spsim' --documents '{}/documents.clean.jsonl'", d, d));
        step(fmt::format("bench-build --documents '{}/documents.clean.jsonl' --citations '{}/citations.tsv'", d, kData));
        step(fmt::format("bench-run --tasks '{}/tasks.jsonl' --store '{}/store.spsim' --model toy", d, d));
    }
    static void TearDownTestSuite() {
        fs::remove_all(*dir_);
        delete dir_;
    }

    void SetUp() override { ASSERT_TRUE(failures_.empty()) << failures_; }

    static fs::path* dir_;
    static std::string failures_;
};

fs::path* Pipeline::dir_ = nullptr;
std::string Pipeline::failures_;

}  // namespace

TEST(Cli, NoArgumentsPrintsUsage) {
    const auto dir = fixture::temp_dir("cli_usage");
    const auto o = cli(dir, "");
    EXPECT_EQ(o.code, 1);
    EXPECT_NE(o.err.find("bench-run"), std::string::npos);
}

TEST(Cli, VersionFlag) {
    const auto dir = fixture::temp_dir("cli_version");
    const auto o = cli(dir, "--version");
    EXPECT_EQ(o.code, 0);
    EXPECT_NE(o.out.find("0.1.0"), std::string::npos);
}

TEST(Cli, MissingInputExitsTwo) {
    const auto dir = fixture::temp_dir("cli_missing");
    const auto o = cli(dir, fmt::format("--out-dir '{}' ingest --input '{}/nope.jsonl'", dir.string(), dir.string()));
    EXPECT_EQ(o.code, 2);
    const auto err = json::parse(o.err);
    EXPECT_EQ(err["error"]["kind"], "input");
    EXPECT_NE(err["error"]["message"].get<std::string>().find("nope.jsonl"), std::string::npos);
}

TEST(Cli, BadConfigExitsOne) {
    const auto dir = fixture::temp_dir("cli_config");
    const auto o = cli(dir, fmt::format("--out-dir '{}' embed --embedder bogus", dir.string()));
    EXPECT_EQ(o.code, 1);
    EXPECT_EQ(json::parse(o.err)["error"]["kind"], "config");
    const auto p = cli(dir, "ingest --no-such-flag");
    EXPECT_EQ(p.code, 1);
}

TEST(Cli, IniConfigFile) {
    const auto dir = fixture::temp_dir("cli_ini");
    spsim::write_file((dir / "run.ini").string(), fmt::format("out-dir={}\nseed=3\n[ingest]\ninput={}/documents.jsonl\n",
                                                              dir.string(), kData));
    const auto o = cli(dir, fmt::format("--config '{}/run.ini' ingest", dir.string()));
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_TRUE(fs::exists(dir / "documents.jsonl"));
    const auto m = json::parse(spsim::read_file((dir / "ingest.manifest.json").string()));
    EXPECT_EQ(m["seed"], 3);
}

TEST_F(Pipeline, MetricsParseAndManifestsExist) {
    const auto metrics = spsim::evalbench::read_metrics_csv((*dir_ / "metrics.csv").string());
    EXPECT_GT(metrics.size(), 10u);
    for (const auto& m : metrics) {
        EXPECT_EQ(m.model, "toy");
        EXPECT_GE(m.ap, 0.0);
        EXPECT_LE(m.ap, 1.0);
    }
    for (const char* sub : {"ingest", "clean", "embed", "index", "bench-build", "bench-run"}) {
        const auto path = *dir_ / fmt::format("{}.manifest.json", sub);
        ASSERT_TRUE(fs::exists(path)) << sub;
        const auto m = json::parse(spsim::read_file(path.string()));
        EXPECT_EQ(m["subcommand"], sub);
        EXPECT_EQ(m["seed"], 7);
        EXPECT_FALSE(m["inputs"].empty());
        EXPECT_FALSE(m["outputs"].empty());
        EXPECT_TRUE(m.contains("version"));
        EXPECT_TRUE(m.contains("wall_time_s"));
        EXPECT_TRUE(m.contains("config"));
    }
}

TEST_F(Pipeline, BenchRunIsByteIdentical) {
    const auto again = *dir_ / "again";
    fs::create_directories(again);
    const auto o = cli(again, fmt::format("--out-dir '{}' --seed 7 --threads 1 bench-run --tasks '{}/tasks.jsonl' --store "
                                          "'{}/store.spsim' --model toy",
                                          again.string(), dir_->string(), dir_->string()));
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(spsim::read_file((again / "metrics.csv").string()), spsim::read_file((*dir_ / "metrics.csv").string()));
}

TEST_F(Pipeline, SearchStudiesAndRegression) {
    const auto d = dir_->string();
    const auto docs = spsim::corpus::ingest_documents(d + "/documents.clean.jsonl", spsim::corpus::DocFormat::kJsonl);
    const std::string query = docs.front().id;
    auto o = cli(*dir_, fmt::format("--out-dir '{}' search --store '{}/store.spsim' --index '{}/index.spidx' "
                                    "--query-id '{}' --k 3",
                                    d, d, d, query));
    ASSERT_EQ(o.code, 0) << o.err;
    const auto hits = json::parse(spsim::read_file(d + "/search.json"));
    EXPECT_EQ(hits["results"][0]["doc_id"], query);

    o = cli(*dir_, fmt::format("--out-dir '{}' study-ppp-sep --ppps '{}/ppps.tsv' --citations '{}/citations.tsv' "
                               "--store '{}/store.spsim'",
                               d, kData, kData, d));
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_TRUE(fs::exists(*dir_ / "separation.json"));

    o = cli(*dir_, fmt::format("--out-dir '{}' study-ppp-predict --ppps '{}/ppps.tsv' --store '{}/store.spsim' "
                               "--index '{}/index.spidx' --documents '{}/documents.clean.jsonl' --k 50",
                               d, kData, d, d, d));
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_TRUE(fs::exists(*dir_ / "ppp_rank_summary.json"));

    o = cli(*dir_, fmt::format("--out-dir '{}' study-ppc-match --citations '{}/citations.tsv' --store "
                               "'{}/store.spsim' --index '{}/index.spidx' --documents '{}/documents.clean.jsonl' "
                               "--k 100 --rank-threshold 20",
                               d, kData, d, d, d));
    ASSERT_EQ(o.code, 0) << o.err;
    const auto records = spsim::stats::read_csv(d + "/match_records.csv", {"patent_id", "paper_id"});
    EXPECT_GT(records.rows(), 0u);

    o = cli(*dir_, fmt::format("--out-dir '{}' study-ppc-match --citations '{}/citations.tsv' --store "
                               "'{}/store.spsim' --index '{}/index.spidx' --documents '{}/documents.clean.jsonl' "
                               "--k 10 --rank-threshold 20",
                               d, kData, d, d, d));
    EXPECT_EQ(o.code, 1);

    o = cli(*dir_, fmt::format("--out-dir '{}' regress --records '{}/match_records.csv' --no-year-fe "
                               "--no-confidence-fe",
                               d, d));
    ASSERT_EQ(o.code, 0) << o.err;
    const auto table = spsim::read_file(d + "/regression.txt");
    EXPECT_NE(table.find("Log-Likelihood"), std::string::npos);
    EXPECT_NE(table.find("const"), std::string::npos);
}

TEST_F(Pipeline, CompareAndReport) {
    const auto d = dir_->string();
    auto o = cli(*dir_, fmt::format("--out-dir '{}/other' --seed 8 embed --documents '{}/documents.clean.jsonl' "
                                    "--dim 128 --pooling mean",
                                    d, d));
    ASSERT_EQ(o.code, 0) << o.err;
    o = cli(*dir_, fmt::format("--out-dir '{}/other' bench-run --tasks '{}/tasks.jsonl' --store "
                               "'{}/other/store.spsim' --model toy8 --pooling mean",
                               d, d, d));
    ASSERT_EQ(o.code, 0) << o.err;
    o = cli(*dir_, fmt::format("--out-dir '{}' bench-compare --metrics '{}/metrics.csv' '{}/other/metrics.csv' "
                               "--base toy",
                               d, d, d));
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_NE(spsim::read_file(d + "/comparison.txt").find("model[toy8]"), std::string::npos);

    o = cli(*dir_, fmt::format("--out-dir '{}' report --metrics '{}/metrics.csv' '{}/other/metrics.csv'", d, d, d));
    ASSERT_EQ(o.code, 0) << o.err;
    const auto report = spsim::stats::read_csv(d + "/report.csv", {"Model", "Pooling"});
    EXPECT_EQ(report.rows(), 2u);
}
