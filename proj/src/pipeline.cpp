#include "netforensic/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "netforensic/aggregate.hpp"
#include "netforensic/csv.hpp"
#include "netforensic/error.hpp"
#include "netforensic/ingest.hpp"
#include "netforensic/random.hpp"

namespace nf {

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw Error("config", key + ": expected a boolean, got '" + v + "'");
}

std::uint64_t parse_count(const std::string& key, const std::string& v) {
    std::string digits;
    for (char c : v)
        if (c != '_' && c != '\'') digits.push_back(c);  // allow 100_000
    auto n = csv::parse_integer(digits);
    if (!n || *n < 0) throw Error("config", key + ": expected a non-negative integer, got '" + v + "'");
    return static_cast<std::uint64_t>(*n);
}

double parse_real(const std::string& key, const std::string& v) {
    auto x = csv::parse_double(v);
    if (!x) throw Error("config", key + ": expected a number, got '" + v + "'");
    return *x;
}

// Runs one stage, tagging untagged failures with the stage name.
template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(name, e.what());
    }
}

std::string bandwidth_text(const BandwidthPolicy& b) {
    switch (b.kind) {
        case BandwidthPolicy::Kind::fixed: return csv::format_double(b.sigma);
        case BandwidthPolicy::Kind::automatic: return "auto";
        case BandwidthPolicy::Kind::silverman_pooled: return "pooled";
    }
    return "auto";
}

ExperimentRun run_one(const ExperimentConfig& config, const Dataset& clean, std::size_t size,
                      const std::filesystem::path& dir) {
    ExperimentRun run;
    run.requested_size = size;
    run.artifact_dir = dir;
    std::filesystem::create_directories(dir);

    Dataset sample = size == 0 ? clean : stage("sample", [&] {
        return srs_sample(clean, size, derive_seed(config.seed, "sample/" + std::to_string(size)));
    });

    run.feature_scores = stage("select", [&] { return score_features(sample, config.bins, config.workers); });
    auto selection = stage("select", [&] { return select_top_k(run.feature_scores, config.top_k, sample.schema); });
    run.selected = selection.names;
    write_scores_csv(run.feature_scores, dir / "features.csv");

    Dataset projected = project(sample, run.selected);
    run.split = stage("split", [&] {
        return split_normal_records(projected, config.train_fraction, derive_seed(config.seed, "split"));
    });
    Dataset train = subset(projected, run.split.train);
    Dataset test = subset(projected, run.split.test);

    run.baseline = stage("fit", [&] { return fit_baseline(train, run.selected, config.bandwidth); });
    run.baseline.training_checksum = index_checksum(run.split.train);
    save_baseline(run.baseline, dir / "baseline.txt");
    {
        std::ostringstream idx;
        for (auto i : run.split.train) idx << i << '\n';
        write_text_file(dir / "train_indices.txt", idx.str(), "fit");
    }

    auto scored = stage("score", [&] { return score_batch(test, run.baseline, config.multiplier, config.workers); });
    write_scored_csv(scored, dir / "scores.csv");

    auto roc = stage("roc", [&] { return roc_from_scores(scored, run.baseline.sd_corpy, default_multiplier_grid()); });
    write_roc_csv(roc, dir / "roc.csv");

    run.report = stage("eval", [&] { return build_report(scored, std::move(roc), sample.size()); });
    write_text_file(dir / "report.txt", format_report_text(run.report), "eval");
    write_text_file(dir / "report.csv", format_report_csv(run.report), "eval");
    write_text_file(dir / "evidence.txt", format_evidence_report(evidence_report(scored, config.evidence_top_n)), "eval");

    std::ostringstream prov;
    prov << "dataset: " << sample.provenance << '\n';
    prov << "records: " << sample.size() << " (train " << run.split.train.size() << ", test " << run.split.test.size()
         << ")\n";
    prov << "selected:";
    for (const auto& n : run.selected) prov << ' ' << n;
    prov << '\n';
    for (const auto& w : run.baseline.warnings) prov << "warning: " << w << '\n';
    write_text_file(dir / "provenance.txt", prov.str(), "eval");
    return run;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (bins < 2) throw Error("config", "bins must be at least 2");
    if (top_k < 1) throw Error("config", "top_k must be at least 1");
    if (!(multiplier >= 0) || !std::isfinite(multiplier)) throw Error("config", "multiplier must be non-negative");
    if (!(train_fraction > 0 && train_fraction < 1)) throw Error("config", "train_fraction must lie in (0, 1)");
    if (bandwidth.kind == BandwidthPolicy::Kind::fixed && !(bandwidth.sigma > 0 && std::isfinite(bandwidth.sigma)))
        throw Error("config", "sigma must be positive");
    for (auto n : sample_sizes)
        if (n == 0) throw Error("config", "sample sizes must be positive");
    if (workers == 0) throw Error("config", "workers must be at least 1");
    if (output_dir.empty()) throw Error("config", "output directory not set");
}

void apply_setting(ExperimentConfig& c, const std::string& raw_key, const std::string& raw_value,
                   const std::filesystem::path& base_dir) {
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    };
    if (key == "input") {
        c.inputs.clear();
        for (const auto& p : split_list(value)) c.inputs.push_back(resolve(p));
    } else if (key == "schema") {
        c.schema = value;
    } else if (key == "has_header") {
        c.has_header = parse_bool(key, value);
    } else if (key == "sample_size" || key == "n") {
        c.sample_sizes.clear();
        if (value != "all")
            for (const auto& v : split_list(value)) c.sample_sizes.push_back(parse_count(key, v));
    } else if (key == "seed") {
        c.seed = parse_count(key, value);
    } else if (key == "dedup") {
        c.dedup = parse_bool(key, value);
    } else if (key == "bins") {
        c.bins = parse_count(key, value);
    } else if (key == "top_k") {
        c.top_k = parse_count(key, value);
    } else if (key == "sigma") {
        if (value == "auto") c.bandwidth = BandwidthPolicy::automatic_rule();
        else if (value == "pooled") c.bandwidth = {BandwidthPolicy::Kind::silverman_pooled, 0.0};
        else c.bandwidth = BandwidthPolicy::fixed_sigma(parse_real(key, value));
    } else if (key == "multiplier") {
        c.multiplier = parse_real(key, value);
    } else if (key == "train_fraction") {
        c.train_fraction = parse_real(key, value);
    } else if (key == "output") {
        c.output_dir = resolve(value);
    } else if (key == "workers") {
        c.workers = static_cast<unsigned>(parse_count(key, value));
    } else if (key == "evidence_top_n") {
        c.evidence_top_n = parse_count(key, value);
    } else {
        throw Error("config", "unknown key '" + key + "'");
    }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("config", "config not found: " + path.string());
    ExperimentConfig c;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("config", path.string() + ":" + std::to_string(line_no) + ": expected key = value");
        apply_setting(c, line.substr(0, eq), line.substr(eq + 1), path.parent_path());
    }
    return c;
}

std::string config_to_text(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "input =";
    for (std::size_t i = 0; i < c.inputs.size(); ++i) out << (i ? ", " : " ") << c.inputs[i].string();
    out << "\nschema = " << c.schema << "\nhas_header = " << (c.has_header ? "true" : "false") << "\nsample_size =";
    if (c.sample_sizes.empty()) out << " all";
    for (std::size_t i = 0; i < c.sample_sizes.size(); ++i) out << (i ? ", " : " ") << c.sample_sizes[i];
    out << "\nseed = " << c.seed << "\ndedup = " << (c.dedup ? "true" : "false") << "\nbins = " << c.bins
        << "\ntop_k = " << c.top_k << "\nsigma = " << bandwidth_text(c.bandwidth)
        << "\nmultiplier = " << csv::format_double(c.multiplier)
        << "\ntrain_fraction = " << csv::format_double(c.train_fraction) << "\noutput = " << c.output_dir.string()
        << "\nevidence_top_n = " << c.evidence_top_n << '\n';
    return out.str();
}

std::string index_checksum(const std::vector<std::size_t>& indices) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (auto i : indices) {
        auto v = static_cast<std::uint64_t>(i);
        for (int b = 0; b < 8; ++b) h = (h ^ ((v >> (8 * b)) & 0xFF)) * 0x100000001B3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Split split_normal_records(const Dataset& dataset, double train_fraction, std::uint64_t seed) {
    std::vector<std::size_t> normals;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& label = dataset.records[i].binary_label;
        if (!label) throw Error("split", "unlabeled record " + std::to_string(i));
        if (*label == 0) normals.push_back(i);
    }
    auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(normals.size())));
    n_train = std::max<std::size_t>(n_train, 2);
    if (n_train > normals.size())
        throw Error("split", "need at least 2 normal records, found " + std::to_string(normals.size()));
    Split s;
    for (auto pick : srs_indices(normals.size(), n_train, seed)) s.train.push_back(normals[pick]);
    std::size_t t = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (t < s.train.size() && s.train[t] == i) {
            ++t;
            continue;
        }
        s.test.push_back(i);
    }
    return s;
}

Dataset subset(const Dataset& dataset, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.schema = dataset.schema;
    out.provenance = dataset.provenance;
    out.records.reserve(indices.size());
    for (auto i : indices) out.records.push_back(dataset.records.at(i));
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    if (config.inputs.empty()) throw Error("config", "no input files");
    IngestOptions opts;
    opts.has_header = config.has_header;
    Dataset data;
    IngestStats stats;
    stage("ingest", [&] {
        for (std::size_t i = 0; i < config.inputs.size(); ++i) {
            auto part = load_any(config.inputs[i], config.schema, opts);
            stats += part.stats;
            if (i == 0) {
                data = std::move(part.dataset);
                continue;
            }
            if (!(part.dataset.schema == data.schema)) throw Error("ingest", "inputs disagree on schema");
            data.provenance += ";" + part.dataset.provenance;
            data.records.insert(data.records.end(), std::make_move_iterator(part.dataset.records.begin()),
                                std::make_move_iterator(part.dataset.records.end()));
        }
        return 0;
    });
    std::filesystem::create_directories(config.output_dir);
    std::ostringstream ingest;
    ingest << "rows_read " << stats.rows_read << "\nrows_dropped " << stats.rows_dropped << '\n';
    for (const auto& [reason, n] : stats.drop_reasons) ingest << "drop " << reason << ' ' << n << '\n';
    write_text_file(config.output_dir / "ingest_stats.txt", ingest.str(), "ingest");
    return run_experiment(config, data);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& dataset) {
    config.validate();
    Dataset clean = stage("clean", [&] {
        Dataset d = drop_missing(dataset).dataset;
        if (config.dedup) d = deduplicate(d).dataset;
        return d;
    });

    std::filesystem::create_directories(config.output_dir);
    write_text_file(config.output_dir / "config_used.conf", config_to_text(config), "config");

    ExperimentResult result;
    std::vector<std::size_t> sizes = config.sample_sizes;
    if (sizes.empty()) sizes.push_back(0);
    for (auto size : sizes) {
        auto dir = sizes.size() == 1 ? config.output_dir : config.output_dir / ("n_" + std::to_string(size));
        result.runs.push_back(run_one(config, clean, size, dir));
    }
    std::vector<EvalReport> reports;
    for (const auto& r : result.runs) reports.push_back(r.report);
    result.summary = format_summary_table(reports);
    write_text_file(config.output_dir / "summary.txt", result.summary, "eval");
    return result;
}

}  // namespace nf
