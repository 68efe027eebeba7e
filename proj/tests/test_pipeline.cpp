#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "fixtures.hpp"
#include "netforensic/error.hpp"
#include "netforensic/ingest.hpp"
#include "netforensic/pipeline.hpp"
#include "netforensic/synthetic.hpp"

using namespace nf;
using nf::testing::TempDir;

namespace {

Dataset separation(std::size_t n_each, std::uint64_t seed = 1) {
    SeparationSpec spec;
    spec.n_normal = n_each;
    spec.n_attack = n_each;
    spec.seed = seed;
    return make_separation_dataset(spec);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> read_tree(const std::filesystem::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root))
        if (e.is_regular_file()) out[std::filesystem::relative(e.path(), root).string()] = slurp(e.path());
    return out;
}

ExperimentConfig config_in(const TempDir& dir) {
    ExperimentConfig c;
    c.output_dir = dir / "out";
    c.top_k = 4;
    return c;
}

}  // namespace

TEST(Config, ParsesFileWithCommentsAndRelativePaths) {
    TempDir dir("config");
    auto path = dir.write("exp.conf",
                          "# experiment\n"
                          "input = a.csv, /abs/b.csv\n"
                          "sample_size = 100_000, 200000\n"
                          "seed = 7   # trailing comment\n"
                          "sigma = 0.25\n"
                          "top_k = 5\n"
                          "dedup = false\n"
                          "output = results\n\n");
    auto c = load_config(path);
    ASSERT_EQ(c.inputs.size(), 2u);
    EXPECT_EQ(c.inputs[0], dir / "a.csv");
    EXPECT_EQ(c.inputs[1], "/abs/b.csv");
    EXPECT_EQ(c.sample_sizes, (std::vector<std::size_t>{100000, 200000}));
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.bandwidth.kind, BandwidthPolicy::Kind::fixed);
    EXPECT_EQ(c.bandwidth.sigma, 0.25);
    EXPECT_EQ(c.top_k, 5u);
    EXPECT_FALSE(c.dedup);
    EXPECT_EQ(c.output_dir, dir / "results");
    EXPECT_EQ(c.multiplier, 2.0);
    EXPECT_EQ(c.bins, 10u);
}

TEST(Config, TextRoundTrip) {
    ExperimentConfig c;
    c.inputs = {"/data/x.csv"};
    c.sample_sizes = {10, 20};
    c.bandwidth = {BandwidthPolicy::Kind::silverman_pooled, 0.0};
    c.multiplier = 2.5;
    c.output_dir = "/results/out";
    TempDir dir("config");
    auto again = load_config(dir.write("c.conf", config_to_text(c)));
    EXPECT_EQ(config_to_text(again), config_to_text(c));
}

TEST(Config, Errors) {
    ExperimentConfig c;
    EXPECT_THROW(apply_setting(c, "colour", "blue"), Error);
    EXPECT_THROW(apply_setting(c, "seed", "-1"), Error);
    EXPECT_THROW(apply_setting(c, "dedup", "maybe"), Error);
    EXPECT_THROW(apply_setting(c, "multiplier", "x"), Error);
    EXPECT_THROW(load_config("/nonexistent.conf"), Error);

    auto bad = [](auto mutate) {
        ExperimentConfig c;
        mutate(c);
        try {
            c.validate();
        } catch (const Error& e) {
            return e.stage() == "config";
        }
        return false;
    };
    EXPECT_TRUE(bad([](auto& c) { c.bins = 1; }));
    EXPECT_TRUE(bad([](auto& c) { c.top_k = 0; }));
    EXPECT_TRUE(bad([](auto& c) { c.multiplier = -1; }));
    EXPECT_TRUE(bad([](auto& c) { c.train_fraction = 1; }));
    EXPECT_TRUE(bad([](auto& c) { c.sample_sizes = {0}; }));
    EXPECT_TRUE(bad([](auto& c) { c.bandwidth = BandwidthPolicy::fixed_sigma(0); }));
}

TEST(Split, TrainsOnNormalRecordsOnly) {
    auto ds = separation(100);
    auto s = split_normal_records(ds, 0.6, 9);
    EXPECT_EQ(s.train.size(), 60u);
    EXPECT_EQ(s.train.size() + s.test.size(), ds.size());
    EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
    EXPECT_TRUE(std::is_sorted(s.test.begin(), s.test.end()));
    for (auto i : s.train) EXPECT_EQ(*ds.records[i].binary_label, 0);
    std::vector<std::size_t> all = s.train;
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    EXPECT_EQ(std::adjacent_find(all.begin(), all.end()), all.end());

    EXPECT_EQ(split_normal_records(ds, 0.6, 9).train, s.train);
    EXPECT_NE(split_normal_records(ds, 0.6, 10).train, s.train);
    EXPECT_EQ(index_checksum(s.train), index_checksum(split_normal_records(ds, 0.6, 9).train));
    EXPECT_NE(index_checksum(s.train), index_checksum(split_normal_records(ds, 0.6, 10).train));
}

TEST(Split, NeedsTwoNormalRecords) {
    auto ds = separation(1);
    EXPECT_THROW(split_normal_records(ds, 0.6, 1), Error);
}

TEST(Pipeline, SyntheticSeparationMeetsAccuracy) {
    TempDir dir("pipe");
    auto c = config_in(dir);
    c.top_k = 8;
    auto result = run_experiment(c, separation(2000));
    ASSERT_EQ(result.runs.size(), 1u);
    const auto& report = result.runs[0].report;
    EXPECT_GE(report.accuracy, 0.95);
    EXPECT_LE(report.far, 0.05);
    EXPECT_EQ(result.runs[0].selected.size(), 8u);
    EXPECT_EQ(result.runs[0].baseline.training_checksum, index_checksum(result.runs[0].split.train));

    for (const char* name : {"config_used.conf", "summary.txt", "features.csv", "baseline.txt", "train_indices.txt",
                             "scores.csv", "roc.csv", "report.txt", "report.csv", "evidence.txt", "provenance.txt"})
        EXPECT_TRUE(std::filesystem::exists(dir / "out" / name)) << name;
}

TEST(Pipeline, SameSeedGivesIdenticalArtifacts) {
    TempDir dir("pipe");
    auto c = config_in(dir);
    c.sample_sizes = {300, 500};
    auto data = separation(400, 3);
    run_experiment(c, data);
    auto first = read_tree(c.output_dir);
    std::filesystem::remove_all(c.output_dir);
    c.workers = 3;
    run_experiment(c, data);
    EXPECT_EQ(read_tree(c.output_dir), first);

    std::filesystem::remove_all(c.output_dir);
    c.seed = 2;
    run_experiment(c, data);
    EXPECT_NE(read_tree(c.output_dir), first);
}

TEST(Pipeline, OneSummaryRowPerSampleSize) {
    TempDir dir("pipe");
    auto c = config_in(dir);
    c.sample_sizes = {200, 400, 600};
    auto result = run_experiment(c, separation(400));
    ASSERT_EQ(result.runs.size(), 3u);
    std::istringstream in(result.summary);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_NE(lines[1].find("200"), std::string::npos);
    EXPECT_NE(lines[3].find("600"), std::string::npos);
    for (auto n : {200, 400, 600}) {
        EXPECT_TRUE(std::filesystem::exists(dir / "out" / ("n_" + std::to_string(n)) / "report.txt"));
        EXPECT_EQ(result.runs[n / 200 - 1].report.sample_size, static_cast<std::uint64_t>(n));
    }
}

TEST(Pipeline, RunsFromCsvFiles) {
    TempDir dir("pipe");
    auto data = separation(300);
    write_csv(data, dir / "flows.csv");
    auto c = config_in(dir);
    c.inputs = {dir / "flows.csv"};
    c.schema = "auto";
    c.has_header = true;
    auto result = run_experiment(c);
    EXPECT_GE(result.runs[0].report.accuracy, 0.9);
    EXPECT_NE(slurp(dir / "out" / "ingest_stats.txt").find("rows_read 600"), std::string::npos);
}

TEST(Pipeline, ErrorsCarryTheFailingStage) {
    TempDir dir("pipe");
    auto stage_of = [](auto fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.stage();
        }
        return std::string("none");
    };
    auto c = config_in(dir);
    c.inputs = {dir / "missing.csv"};
    EXPECT_EQ(stage_of([&] { run_experiment(c); }), "ingest");

    c.sample_sizes = {10'000};
    EXPECT_EQ(stage_of([&] { run_experiment(c, separation(100)); }), "sample");

    c.sample_sizes.clear();
    auto no_labels = separation(50);
    Dataset unlabeled;
    unlabeled.schema = no_labels.schema;
    EXPECT_EQ(stage_of([&] { run_experiment(c, unlabeled); }), "select");

    c.inputs.clear();
    EXPECT_EQ(stage_of([&] { run_experiment(c); }), "config");
}
