#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "netforensic/detector.hpp"

namespace nf {

/// Attack is the positive class.
struct ConfusionCounts {
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
    std::uint64_t total() const noexcept { return tp + tn + fp + fn; }

    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(const std::vector<ScoredFlow>& scored);

struct Metrics {
    double accuracy = 0.0;  // (tp + tn) / total
    double far = 0.0;       // (fp + fn) / total: both error kinds, the complement of accuracy
};

Metrics metrics(const ConfusionCounts& c);

struct ClassAccuracy {
    std::string name;
    std::uint64_t correct = 0;
    std::uint64_t total = 0;
    double accuracy = 0.0;

    friend bool operator==(const ClassAccuracy&, const ClassAccuracy&) = default;
};

struct PerClassResult {
    std::vector<ClassAccuracy> classes;  // known classes in reporting order, then others by name
    std::vector<std::string> warnings;   // reporting-order classes with no records
};

/// Normal: fraction not flagged. Attack classes: fraction flagged. Records
/// without a category fall into "Normal" or "Attack" by their binary label.
PerClassResult per_class_accuracy(const std::vector<ScoredFlow>& scored);

struct RocPoint {
    double multiplier = 0.0;
    double detection_rate = 0.0;       // tp / (tp + fn)
    double false_positive_rate = 0.0;  // fp / (fp + tn)

    friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

/// 0.0, 0.1, ..., 6.0.
std::vector<double> default_multiplier_grid();

/// Re-thresholds the fixed per-record deviations at each multiplier.
std::vector<RocPoint> roc_from_scores(const std::vector<ScoredFlow>& scored, double sd_corpy,
                                      const std::vector<double>& multipliers);

std::vector<RocPoint> roc_sweep(const Dataset& dataset, const NormalBaseline& baseline,
                                const std::vector<double>& multipliers, unsigned workers = 1);

/// Highest risk first, ties by flow key. At most top_n rows.
std::vector<ScoredFlow> evidence_report(const std::vector<ScoredFlow>& scored, std::size_t top_n);
/// Tab-separated `srcip sport dstip dsport proto label RL`, RL to 2 decimals.
std::string format_evidence_report(const std::vector<ScoredFlow>& rows);

struct EvalReport {
    ConfusionCounts confusion;
    double accuracy = 0.0;
    double far = 0.0;
    std::vector<ClassAccuracy> per_class;
    std::vector<std::string> warnings;
    std::vector<RocPoint> roc;
    std::uint64_t sample_size = 0;
};

EvalReport build_report(const std::vector<ScoredFlow>& scored, std::vector<RocPoint> roc, std::uint64_t sample_size);

std::string format_report_text(const EvalReport& report);
std::string format_report_csv(const EvalReport& report);
/// One `Sample size / Accuracy / FAR` row per report.
std::string format_summary_table(const std::vector<EvalReport>& reports);

void write_roc_csv(const std::vector<RocPoint>& roc, const std::filesystem::path& path);
void write_scored_csv(const std::vector<ScoredFlow>& scored, const std::filesystem::path& path);
std::vector<ScoredFlow> read_scored_csv(const std::filesystem::path& path);

/// Writes `text` to `path`, throwing nf::Error tagged with `stage` on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text, const std::string& stage);

}  // namespace nf
