#include "netforensic/feature_select.hpp"

#include <algorithm>
#include <fstream>

#include "netforensic/csv.hpp"
#include "netforensic/error.hpp"
#include "netforensic/parallel.hpp"

namespace nf {

Discretization discretize(const std::vector<double>& values, std::size_t bins) {
    if (values.empty()) throw Error("select", "cannot discretize an empty column");
    if (bins < 2) throw Error("select", "bins must be at least 2");
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    Discretization out;
    for (std::size_t b = 1; b < bins; ++b) {
        std::size_t pos = b * n / bins;
        if (pos == 0 || pos >= n) continue;
        // A run of equal values straddling the cut moves the cut to whichever
        // end of the run is nearer.
        std::size_t cut = pos;
        if (sorted[pos - 1] == sorted[pos]) {
            auto lo = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), sorted[pos]) - sorted.begin());
            auto hi = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), sorted[pos]) - sorted.begin());
            bool lo_ok = lo > 0, hi_ok = hi < n;
            if (!lo_ok && !hi_ok) continue;
            if (lo_ok && (!hi_ok || pos - lo <= hi - pos)) cut = lo;
            else cut = hi;
        }
        double edge = sorted[cut];
        if (!out.edges.empty() && edge <= out.edges.back()) continue;
        out.edges.push_back(edge);
    }
    out.bins.reserve(n);
    for (double v : values)
        out.bins.push_back(static_cast<std::size_t>(std::upper_bound(out.edges.begin(), out.edges.end(), v) -
                                                    out.edges.begin()));
    return out;
}

ContingencyTable::ContingencyTable(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), cells_(rows * cols, 0.0), row_totals_(rows, 0.0), col_totals_(cols, 0.0) {}

ContingencyTable::ContingencyTable(std::vector<std::vector<double>> observed)
    : ContingencyTable(observed.size(), observed.empty() ? 0 : observed.front().size()) {
    for (std::size_t r = 0; r < rows_; ++r) {
        if (observed[r].size() != cols_) throw Error("select", "ragged contingency table");
        for (std::size_t c = 0; c < cols_; ++c) add(r, c, observed[r][c]);
    }
}

void ContingencyTable::add(std::size_t row, std::size_t col, double count) {
    if (count < 0) throw Error("select", "negative contingency count");
    cells_.at(row * cols_ + col) += count;
    row_totals_[row] += count;
    col_totals_[col] += count;
    total_ += count;
}

double chi_square(const ContingencyTable& table) {
    if (!(table.total() > 0)) throw Error("select", "chi-square of an all-zero table");
    double chi2 = 0.0;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < table.cols(); ++c) {
            double expected = table.row_total(r) * table.col_total(c) / table.total();
            if (expected == 0.0) continue;
            double d = table.observed(r, c) - expected;
            chi2 += d * d / expected;
        }
    }
    return chi2;
}

std::vector<FeatureScore> score_features(const Dataset& dataset, std::size_t bins, unsigned workers) {
    if (!dataset.schema.has_binary_label()) throw Error("select", "dataset has no label column");
    if (dataset.empty()) throw Error("select", "dataset is empty");
    std::vector<int> labels;
    labels.reserve(dataset.size());
    for (const auto& rec : dataset.records) {
        if (!rec.binary_label) throw Error("select", "unlabeled record");
        if (!rec.complete()) throw Error("select", "record with absent feature values (run drop_missing first)");
        labels.push_back(*rec.binary_label);
    }

    const auto& names = dataset.schema.numeric_names();
    std::vector<FeatureScore> scores(names.size());
    parallel_chunks(names.size(), workers, [&](std::size_t begin, std::size_t end, std::size_t) {
        std::vector<double> column(dataset.size());
        for (std::size_t f = begin; f < end; ++f) {
            for (std::size_t i = 0; i < dataset.size(); ++i) column[i] = *dataset.records[i].features[f];
            auto disc = discretize(column, bins);
            ContingencyTable table(disc.bin_count(), 2);
            for (std::size_t i = 0; i < column.size(); ++i) table.add(disc.bins[i], static_cast<std::size_t>(labels[i]));
            scores[f] = FeatureScore{names[f], chi_square(table), 0.0, 0};
        }
    });

    std::sort(scores.begin(), scores.end(), [](const FeatureScore& a, const FeatureScore& b) {
        if (a.chi2 != b.chi2) return a.chi2 > b.chi2;
        return a.feature_name < b.feature_name;
    });
    const double top = scores.empty() ? 0.0 : scores.front().chi2;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i].rank = i + 1;
        scores[i].weight = top > 0 ? scores[i].chi2 / top : 0.0;
    }
    return scores;
}

Selection select_top_k(const std::vector<FeatureScore>& scores, std::size_t k, const FeatureSchema& schema) {
    if (k < 1 || k > scores.size())
        throw Error("select", "top_k " + std::to_string(k) + " out of range [1, " + std::to_string(scores.size()) + "]");
    std::vector<const FeatureScore*> ordered;
    for (const auto& s : scores) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->rank < b->rank; });
    Selection sel;
    for (std::size_t i = 0; i < k; ++i) sel.names.push_back(ordered[i]->feature_name);
    sel.schema = schema.project(sel.names);
    return sel;
}

void write_scores_csv(const std::vector<FeatureScore>& scores, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("select", "cannot write " + path.string());
    csv::write_row(out, {"feature", "weight", "chi2", "rank"});
    for (const auto& s : scores)
        csv::write_row(out, {s.feature_name, csv::format_double(s.weight), csv::format_double(s.chi2), std::to_string(s.rank)});
    if (!out) throw Error("select", "write failed: " + path.string());
}

std::vector<FeatureScore> read_scores_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("select", "feature scores not found: " + path.string());
    auto header = csv::next_line(in);
    if (!header || csv::split_line(*header) != std::vector<std::string>{"feature", "weight", "chi2", "rank"})
        throw Error("select", path.string() + ": expected header feature,weight,chi2,rank");
    std::vector<FeatureScore> scores;
    while (auto line = csv::next_line(in)) {
        auto f = csv::split_line(*line);
        auto bad = [&] { return Error("select", path.string() + ": malformed row '" + *line + "'"); };
        if (f.size() != 4) throw bad();
        auto weight = csv::parse_double(f[1]);
        auto chi2 = csv::parse_double(f[2]);
        auto rank = csv::parse_integer(f[3]);
        if (!weight || !chi2 || !rank || *rank < 1) throw bad();
        scores.push_back(FeatureScore{f[0], *chi2, *weight, static_cast<std::size_t>(*rank)});
    }
    return scores;
}

}  // namespace nf
