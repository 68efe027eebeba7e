#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "netforensic/detector.hpp"
#include "netforensic/eval.hpp"
#include "netforensic/feature_select.hpp"

namespace nf {

struct ExperimentConfig {
    std::vector<std::filesystem::path> inputs;
    std::string schema = "unsw-nb15";
    bool has_header = false;
    std::vector<std::size_t> sample_sizes;  // empty: use every cleaned record
    std::uint64_t seed = 1;
    bool dedup = true;
    std::size_t bins = kDefaultBins;
    std::size_t top_k = 8;
    BandwidthPolicy bandwidth;
    double multiplier = kDefaultMultiplier;
    double train_fraction = 0.6;  // share of normal records used for fitting
    std::filesystem::path output_dir = "out";
    unsigned workers = 1;
    std::size_t evidence_top_n = 20;

    /// Throws nf::Error("config", ...) on the first out-of-range parameter.
    void validate() const;
};

/// Applies one `key = value` setting. Relative paths resolve against `base_dir`.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir = {});

/// Plain-text `key = value` file; `#` starts a comment.
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_text(const ExperimentConfig& config);

/// Stable 64-bit digest (hex) of the training record indices.
std::string index_checksum(const std::vector<std::size_t>& indices);

struct Split {
    std::vector<std::size_t> train;  // sorted indices of normal records used for fitting
    std::vector<std::size_t> test;   // every other record, in input order
};

/// Seeded split: train_fraction of the normal-labeled records (at least 2)
/// go to training; attack-labeled records always go to test.
Split split_normal_records(const Dataset& dataset, double train_fraction, std::uint64_t seed);

Dataset subset(const Dataset& dataset, const std::vector<std::size_t>& indices);

struct ExperimentRun {
    std::size_t requested_size = 0;  // 0 when the whole dataset was used
    std::vector<FeatureScore> feature_scores;
    std::vector<std::string> selected;
    NormalBaseline baseline;
    Split split;
    EvalReport report;
    std::filesystem::path artifact_dir;
};

struct ExperimentResult {
    std::vector<ExperimentRun> runs;
    std::string summary;  // sample size / accuracy / FAR table
};

/// Ingest -> clean -> sample -> select -> fit -> score -> evaluate, once per
/// sample size, writing every artifact under config.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Same as run_experiment but starting from an in-memory dataset.
ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& dataset);

}  // namespace nf
