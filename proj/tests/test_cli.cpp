#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "netforensic/detector.hpp"
#include "netforensic/eval.hpp"
#include "netforensic/feature_select.hpp"
#include "netforensic/ingest.hpp"
#include "netforensic/synthetic.hpp"

using nf::testing::TempDir;

namespace {

struct Outcome {
    int status;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome cli(const TempDir& dir, const std::string& args) {
    auto out = dir / "stdout.txt", err = dir / "stderr.txt";
    std::string cmd = std::string("'") + NETFORENSIC_CLI + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

std::filesystem::path write_separation(const TempDir& dir, std::size_t n_each) {
    nf::SeparationSpec spec;
    spec.n_normal = n_each;
    spec.n_attack = n_each;
    auto path = dir / "flows.csv";
    nf::write_csv(nf::make_separation_dataset(spec), path);
    return path;
}

}  // namespace

TEST(Cli, AggregateBySourceAndDestination) {
    TempDir dir("cli");
    auto in = dir.write("flows.csv",
                        "srcip,sport,dstip,dsport,proto,f1,attack_cat,label\n"
                        "10.0.0.1,1000,10.0.0.2,80,tcp,1.5,Normal,0\n"
                        "10.0.0.1,1001,10.0.0.2,443,tcp,2.5,Normal,0\n"
                        "10.0.0.3,1000,10.0.0.2,80,udp,0.5,DoS,1\n");
    auto r = cli(dir, "aggregate --input " + in.string() + " --schema auto --has-header --keys srcip,dstip --output " +
                          (dir / "counts.csv").string());
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(slurp(dir / "counts.csv"), "srcip,dstip,flows\n10.0.0.1,10.0.0.2,2\n10.0.0.3,10.0.0.2,1\n");
}

TEST(Cli, ScoreWithoutBaselineFails) {
    TempDir dir("cli");
    auto in = write_separation(dir, 10);
    auto r = cli(dir, "score --input " + in.string() + " --schema auto --has-header --baseline " +
                          (dir / "nope.txt").string() + " --output " + (dir / "s.csv").string());
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.err.find("baseline not found"), std::string::npos) << r.err;
    EXPECT_FALSE(std::filesystem::exists(dir / "s.csv"));
}

TEST(Cli, UnknownFlagAndMissingSubcommandFail) {
    TempDir dir("cli");
    EXPECT_NE(cli(dir, "aggregate --bogus").status, 0);
    EXPECT_NE(cli(dir, "").status, 0);
    EXPECT_EQ(cli(dir, "--help").status, 0);
}

TEST(Cli, StepwiseWorkflow) {
    TempDir dir("cli");
    auto csv = write_separation(dir, 300);
    auto p = [&](const char* name) { return (dir / name).string(); };
    const std::string src = " --schema auto --has-header --input " + csv.string();

    auto r = cli(dir, "ingest" + src + " --output " + p("all.snap"));
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("rows read 600"), std::string::npos);
    EXPECT_TRUE(nf::is_snapshot(dir / "all.snap"));

    r = cli(dir, "sample --input " + p("all.snap") + " --n 400 --seed 5 --dedup --output " + p("s.snap"));
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(nf::load_any(dir / "s.snap", "auto", {}).dataset.size(), 400u);

    r = cli(dir, "select --input " + p("s.snap") + " --top-k 8 --output " + p("features.csv"));
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(nf::read_scores_csv(dir / "features.csv").size(), 8u);

    r = cli(dir, "fit --input " + p("s.snap") + " --features " + p("features.csv") + " --output " + p("baseline.txt"));
    ASSERT_EQ(r.status, 0) << r.err;
    auto baseline = nf::load_baseline(dir / "baseline.txt");
    EXPECT_EQ(baseline.dimension(), 8u);

    r = cli(dir, "score --input " + p("all.snap") + " --baseline " + p("baseline.txt") + " --output " +
                     p("scores.csv") + " --evidence " + p("evidence.txt") + " --top-n 5");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(nf::read_scored_csv(dir / "scores.csv").size(), 600u);
    {
        auto text = slurp(dir / "evidence.txt");
        EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
    }

    r = cli(dir, "eval --input " + p("scores.csv") + " --output " + p("report.txt") + " --csv " + p("report.csv"));
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(slurp(dir / "report.txt").find("Exploits"), std::string::npos);

    r = cli(dir, "roc --input " + p("all.snap") + " --baseline " + p("baseline.txt") + " --multipliers 0,2,4 --output " +
                     p("roc.csv"));
    ASSERT_EQ(r.status, 0) << r.err;
    {
        auto text = slurp(dir / "roc.csv");
        EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
    }
}

TEST(Cli, RunFromConfigWritesFullArtifactSet) {
    TempDir dir("cli");
    write_separation(dir, 300);
    auto conf = dir.write("exp.conf",
                          "input = flows.csv\nschema = auto\nhas_header = true\ntop_k = 8\nseed = 3\noutput = results\n");
    auto r = cli(dir, "run --config " + conf.string());
    ASSERT_EQ(r.status, 0) << r.err;
    for (const char* name : {"config_used.conf", "ingest_stats.txt", "summary.txt", "features.csv", "baseline.txt",
                             "train_indices.txt", "scores.csv", "roc.csv", "report.txt", "report.csv", "evidence.txt",
                             "provenance.txt"})
        EXPECT_TRUE(std::filesystem::exists(dir / "results" / name)) << name;

    r = cli(dir, "run --config " + conf.string() + " --n 200,400 --output " + (dir / "multi").string());
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_TRUE(std::filesystem::exists(dir / "multi" / "n_200" / "report.txt"));
    EXPECT_TRUE(std::filesystem::exists(dir / "multi" / "n_400" / "report.txt"));

    r = cli(dir, "run --config " + (dir / "missing.conf").string());
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.err.find("config"), std::string::npos);
}
