#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "netforensic/error.hpp"
#include "netforensic/ingest.hpp"

using namespace nf;
using nf::testing::TempDir;

namespace {

const char* kHeader = "srcip,sport,dstip,dsport,proto,f1,f2,attack_cat,label\n";

// Rows in the layout of the raw UNSW-NB15 part files.
const char* kUnswRows =
    "59.166.0.0,1390,149.171.126.6,53,udp,CON,0.001055,132,164,31,29,0,0,dns,500473.9375,621800.9375,2,2,0,0,0,0,66,"
    "82,0,0,0,0,1421927414,1421927414,0.017,0.013,0,0,0,0,0,0,0,0,3,7,1,3,1,1,1,,0\n"
    "175.45.176.3,21223,149.171.126.18,32780,udp,INT,0.000021,728,0,254,0,0,0,-,138666672,0,2,0,0,0,0,0,364,0,0,0,0,"
    "0,1421927416,1421927416,0.011,0,0,0,0,0,2,0,0,0,1,1,1,1,1,1,1, Exploits,1\n"
    "175.45.176.1,0x000b,149.171.126.16,80,tcp,FIN,1.2,1062,1998,254,252,3,4,http,6610.5,12000.25,12,10,255,255,"
    "1419870591,2715914011,89,200,1,0,12,15,1421927420,1421927421,100.5,90.2,0.1,0.05,0.05,0,1,,,0,1,1,1,1,1,1,1,"
    "Backdoors,1\n"
    "149.171.126.14,179,175.45.176.3,-,tcp,FIN,0.1,100,100,31,29,0,0,-,10,10,1,1,255,255,1,1,100,100,0,0,0,0,"
    "1421927414,1421927414,0,0,0,0,0,0,0,0,0,0,1,1,1,1,1,1,1,,0\n";

}  // namespace

TEST(LoadCsv, CleanInput) {
    TempDir dir("ingest");
    std::string text = kHeader;
    for (int i = 0; i < 5; ++i)
        text += "10.0.0." + std::to_string(i) + ",100" + std::to_string(i) + ",10.0.1.1,80,TCP," + std::to_string(i) +
                ",2.5,,0\n";
    auto path = dir.write("clean.csv", text);
    auto r = load_csv_inferred(path);
    EXPECT_EQ(r.dataset.size(), 5u);
    EXPECT_EQ(r.stats.rows_read, 5u);
    EXPECT_EQ(r.stats.rows_dropped, 0u);
    EXPECT_EQ(r.dataset.records[0].key.proto, "tcp");
    EXPECT_EQ(r.dataset.records[3].features[0], 3.0);
    EXPECT_EQ(r.dataset.records[3].class_label, "Normal");
    for (const auto& rec : r.dataset.records) EXPECT_EQ(validate_record(rec, r.dataset.schema), std::nullopt);
}

TEST(LoadCsv, EmptyProtoIsDroppedUnderSkip) {
    TempDir dir("ingest");
    auto path = dir.write("bad.csv", std::string(kHeader) + "10.0.0.1,1,10.0.0.2,2,tcp,1,2,,0\n"
                                                           "10.0.0.1,1,10.0.0.2,2,,1,2,,0\n"
                                                           "10.0.0.1,1,10.0.0.2,2,udp,x,2,,0\n");
    auto r = load_csv_inferred(path);
    EXPECT_EQ(r.dataset.size(), 1u);
    EXPECT_EQ(r.stats.rows_read, 3u);
    EXPECT_EQ(r.stats.rows_dropped, 2u);
    EXPECT_EQ(r.stats.drop_reasons.at("empty identifier"), 1u);
    EXPECT_EQ(r.stats.drop_reasons.at("unparseable numeric"), 1u);
    EXPECT_EQ(r.stats.rows_read, r.dataset.size() + r.stats.rows_dropped);
}

TEST(LoadCsv, FailModeReportsRow) {
    TempDir dir("ingest");
    auto path = dir.write("bad.csv", std::string(kHeader) + "10.0.0.1,1,10.0.0.2,2,tcp,1,2,,0\n"
                                                           "10.0.0.1,1,10.0.0.2,2,,1,2,,0\n");
    try {
        load_csv_inferred(path, BadRowPolicy::fail);
        FAIL() << "expected failure";
    } catch (const Error& e) {
        EXPECT_EQ(e.stage(), "ingest");
        EXPECT_NE(std::string(e.what()).find("row 3: empty identifier"), std::string::npos) << e.what();
    }
}

TEST(LoadCsv, MissingFileAndArityMismatch) {
    EXPECT_THROW(load_csv("/nonexistent/flows.csv", unsw_nb15_schema()), Error);
    TempDir dir("ingest");
    auto path = dir.write("short.csv", "10.0.0.1,1,10.0.0.2,2,tcp,1\n");
    EXPECT_THROW(load_csv(path, unsw_nb15_schema()), Error);
}

TEST(LoadCsv, UnswPartFileLayout) {
    TempDir dir("ingest");
    auto path = dir.write("UNSW-NB15_1.csv", kUnswRows);
    auto r = load_csv(path, unsw_nb15_schema());
    ASSERT_EQ(r.stats.rows_read, 4u);
    ASSERT_EQ(r.dataset.size(), 3u);  // the "-" destination port is malformed
    EXPECT_EQ(r.stats.drop_reasons.at("malformed identifier"), 1u);

    const auto& schema = r.dataset.schema;
    for (const char* name : {"sbytes", "swin", "dttl", "stcpb", "dtcpb", "dwin", "smean", "sload"})
        EXPECT_TRUE(schema.numeric_index(name).has_value()) << name;

    const auto& normal = r.dataset.records[0];
    EXPECT_EQ(normal.key, (FlowKey{"59.166.0.0", 1390, "149.171.126.6", 53, "udp"}));
    EXPECT_EQ(normal.binary_label, 0);
    EXPECT_EQ(normal.class_label, "Normal");
    EXPECT_EQ(normal.metadata, (std::vector<std::string>{"con", "dns"}));
    EXPECT_EQ(normal.features[*schema.numeric_index("sbytes")], 132.0);
    EXPECT_EQ(normal.features[*schema.numeric_index("sload")], 500473.9375);

    EXPECT_EQ(r.dataset.records[1].class_label, "Exploits");
    const auto& backdoor = r.dataset.records[2];
    EXPECT_EQ(backdoor.key.src_port, 11);  // hex port
    EXPECT_EQ(backdoor.class_label, "Backdoor");
    EXPECT_FALSE(backdoor.features[*schema.numeric_index("ct_flw_http_mthd")].has_value());
    EXPECT_FALSE(backdoor.complete());
}

TEST(LoadCsv, HeaderIsCheckedAgainstBuiltInSchema) {
    TempDir dir("ingest");
    std::string header;
    const auto schema = unsw_nb15_schema();
    for (const auto& c : schema.columns()) header += (header.empty() ? "" : ",") + c.name;
    auto ok = dir.write("ok.csv", header + "\n" + kUnswRows);
    EXPECT_EQ(load_csv(ok, unsw_nb15_schema(), {true, BadRowPolicy::skip}).dataset.size(), 3u);

    std::string wrong = header;
    wrong.replace(wrong.find("sbytes"), 6, "zbytes");
    auto bad = dir.write("bad.csv", wrong + "\n" + kUnswRows);
    EXPECT_THROW(load_csv(bad, unsw_nb15_schema(), {true, BadRowPolicy::skip}), Error);
}

TEST(LoadCsv, DeterministicAndConcatenating) {
    TempDir dir("ingest");
    auto path = dir.write("UNSW-NB15_1.csv", kUnswRows);
    auto a = load_csv_files({path, path}, "unsw-nb15");
    auto b = load_csv_files({path, path}, "unsw-nb15");
    EXPECT_EQ(a.dataset, b.dataset);
    EXPECT_EQ(a.dataset.size(), 6u);
    EXPECT_EQ(a.stats.rows_read, 8u);
    EXPECT_THROW(load_csv_files({path}, "bogus"), Error);
}

TEST(WriteCsv, RoundTripsThroughInferredSchema) {
    std::mt19937_64 rng(7);
    auto ds = nf::testing::random_dataset(rng, 200, 4, 0.1);
    TempDir dir("ingest");
    write_csv(ds, dir / "out.csv");
    auto back = load_csv_inferred(dir / "out.csv");
    EXPECT_EQ(back.stats.rows_dropped, 0u);
    EXPECT_EQ(back.dataset.records, ds.records);
    EXPECT_EQ(back.dataset.schema.numeric_names(), ds.schema.numeric_names());
}

TEST(Snapshot, EmptyDataset) {
    TempDir dir("snap");
    Dataset ds;
    ds.schema = unsw_nb15_schema();
    ds.provenance = "empty";
    save_snapshot(ds, dir / "e.snap");
    auto back = load_snapshot(dir / "e.snap");
    EXPECT_EQ(back.size(), 0u);
    EXPECT_EQ(back, ds);
}

TEST(Snapshot, RoundTripIdentityOnRandomDatasets) {
    TempDir dir("snap");
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        auto ds = nf::testing::random_dataset(rng, trial * 13, 1 + trial % 6, 0.2);
        ds.provenance = "trial " + std::to_string(trial);
        if (!ds.records.empty()) ds.records[0].class_label.reset();
        auto path = dir / ("t" + std::to_string(trial) + ".snap");
        auto bytes = save_snapshot(ds, path);
        EXPECT_EQ(bytes, std::filesystem::file_size(path));
        EXPECT_TRUE(is_snapshot(path));
        EXPECT_EQ(load_snapshot(path), ds) << "trial " << trial;
    }
}

TEST(Snapshot, UnswRecordsWithMetadataSurvive) {
    TempDir dir("snap");
    auto csv = dir.write("u.csv", kUnswRows);
    auto ds = load_csv(csv, unsw_nb15_schema()).dataset;
    save_snapshot(ds, dir / "u.snap");
    EXPECT_EQ(load_snapshot(dir / "u.snap"), ds);
    auto any = load_any(dir / "u.snap", "unsw-nb15");
    EXPECT_EQ(any.dataset, ds);
}

TEST(Snapshot, DetectsCorruptionAndVersionMismatch) {
    TempDir dir("snap");
    std::mt19937_64 rng(3);
    auto ds = nf::testing::random_dataset(rng, 50, 3);
    auto path = dir / "d.snap";
    save_snapshot(ds, path);

    std::string bytes;
    {
        std::ifstream in(path, std::ios::binary);
        bytes.assign(std::istreambuf_iterator<char>(in), {});
    }
    auto corrupt = bytes;
    corrupt[bytes.size() / 2] ^= 0x5A;
    std::ofstream(dir / "c.snap", std::ios::binary) << corrupt;
    try {
        load_snapshot(dir / "c.snap");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("checksum"), std::string::npos);
    }

    auto versioned = bytes;
    versioned[8] = 9;
    std::ofstream(dir / "v.snap", std::ios::binary) << versioned;
    try {
        load_snapshot(dir / "v.snap");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("version mismatch"), std::string::npos);
    }

    std::ofstream(dir / "t.snap", std::ios::binary) << bytes.substr(0, 20);
    EXPECT_THROW(load_snapshot(dir / "t.snap"), Error);
    EXPECT_FALSE(is_snapshot(dir / "nope.snap"));
}
