#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "netforensic/flow_model.hpp"

namespace nf {

struct Discretization {
    std::vector<std::size_t> bins;  // bin index per input value
    std::vector<double> edges;      // interior cut points; bin b holds edges[b-1] <= v < edges[b]
    std::size_t bin_count() const noexcept { return edges.size() + 1; }
};

/// Equal-frequency binning. Ties never straddle a cut, so heavily repeated
/// values can leave fewer bins than requested.
Discretization discretize(const std::vector<double>& values, std::size_t bins);

/// Observed counts of (feature bin x class) with cached marginals.
class ContingencyTable {
public:
    ContingencyTable(std::size_t rows, std::size_t cols);
    explicit ContingencyTable(std::vector<std::vector<double>> observed);

    void add(std::size_t row, std::size_t col, double count = 1.0);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double observed(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c]; }
    double row_total(std::size_t r) const { return row_totals_[r]; }
    double col_total(std::size_t c) const { return col_totals_[c]; }
    double total() const noexcept { return total_; }

private:
    std::size_t rows_, cols_;
    std::vector<double> cells_;
    std::vector<double> row_totals_;
    std::vector<double> col_totals_;
    double total_ = 0.0;
};

/// Pearson chi-square statistic of independence. Cells whose expected count
/// is zero contribute nothing.
double chi_square(const ContingencyTable& table);

struct FeatureScore {
    std::string feature_name;
    double chi2 = 0.0;
    double weight = 0.0;  // chi2 / max chi2 over all features
    std::size_t rank = 0; // 1-based

    friend bool operator==(const FeatureScore&, const FeatureScore&) = default;
};

inline constexpr std::size_t kDefaultBins = 10;

/// Scores every numeric feature against the binary label. Result is sorted
/// by rank (chi2 descending, ties by name).
std::vector<FeatureScore> score_features(const Dataset& dataset, std::size_t bins = kDefaultBins, unsigned workers = 1);

struct Selection {
    std::vector<std::string> names;
    FeatureSchema schema;
};

Selection select_top_k(const std::vector<FeatureScore>& scores, std::size_t k, const FeatureSchema& schema);

/// CSV `feature,weight,chi2,rank`.
void write_scores_csv(const std::vector<FeatureScore>& scores, const std::filesystem::path& path);
std::vector<FeatureScore> read_scores_csv(const std::filesystem::path& path);

}  // namespace nf
