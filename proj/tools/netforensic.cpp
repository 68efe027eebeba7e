// netforensic: command-line front end for the flow forensics pipeline.
//
// Data goes to files named by --output; stdout carries short summaries and
// stderr a one-line diagnostic on failure.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "netforensic/aggregate.hpp"
#include "netforensic/detector.hpp"
#include "netforensic/error.hpp"
#include "netforensic/eval.hpp"
#include "netforensic/feature_select.hpp"
#include "netforensic/ingest.hpp"
#include "netforensic/pipeline.hpp"

namespace {

struct InputOptions {
    std::vector<std::string> inputs;
    std::string schema = "unsw-nb15";
    bool has_header = false;
    std::string on_bad_row = "skip";
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("--input", in.inputs, "Flow CSV file(s) or a dataset snapshot")->required()->delimiter(',');
    cmd->add_option("--schema", in.schema, "Column layout: unsw-nb15 or auto (from the header row)")
        ->check(CLI::IsMember({"unsw-nb15", "auto"}));
    cmd->add_flag("--has-header", in.has_header, "CSV input starts with a header row");
    cmd->add_option("--on-bad-row", in.on_bad_row, "skip or fail on malformed rows")->check(CLI::IsMember({"skip", "fail"}));
}

nf::IngestResult load_inputs(const InputOptions& in) {
    nf::IngestOptions opts;
    opts.has_header = in.has_header;
    opts.on_bad_row = in.on_bad_row == "fail" ? nf::BadRowPolicy::fail : nf::BadRowPolicy::skip;
    nf::IngestResult total;
    for (std::size_t i = 0; i < in.inputs.size(); ++i) {
        auto part = nf::load_any(in.inputs[i], in.schema, opts);
        if (i == 0) {
            total = std::move(part);
            continue;
        }
        if (!(part.dataset.schema == total.dataset.schema)) throw nf::Error("ingest", "inputs disagree on schema");
        total.stats += part.stats;
        total.dataset.provenance += ";" + part.dataset.provenance;
        auto& dst = total.dataset.records;
        dst.insert(dst.end(), std::make_move_iterator(part.dataset.records.begin()),
                   std::make_move_iterator(part.dataset.records.end()));
    }
    return total;
}

nf::BandwidthPolicy bandwidth_from(const std::optional<double>& sigma) {
    return sigma ? nf::BandwidthPolicy::fixed_sigma(*sigma) : nf::BandwidthPolicy::automatic_rule();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flow forensics: ingest, aggregate, sample, select, fit, score and evaluate"};
    app.require_subcommand(1);
    unsigned workers = 1;
    app.add_option("--workers", workers, "Worker threads for intra-stage parallelism (results do not depend on it)")
        ->check(CLI::PositiveNumber);

    // ingest
    InputOptions ingest_in;
    std::string ingest_out;
    auto* ingest = app.add_subcommand("ingest", "Parse flow CSV files into a dataset snapshot");
    add_input_options(ingest, ingest_in);
    ingest->add_option("--output", ingest_out, "Snapshot path")->required();

    // sample
    InputOptions sample_in;
    std::string sample_out;
    std::size_t sample_n = 0;
    std::uint64_t sample_seed = 1;
    bool sample_dedup = false, sample_drop_missing = false;
    auto* sample = app.add_subcommand("sample", "Simple random sample without replacement");
    add_input_options(sample, sample_in);
    sample->add_option("--n", sample_n, "Sample size")->required()->check(CLI::PositiveNumber);
    sample->add_option("--seed", sample_seed, "Sampling seed");
    sample->add_flag("--dedup", sample_dedup, "Remove duplicate records before sampling");
    sample->add_flag("--drop-missing", sample_drop_missing, "Remove records with absent values before sampling");
    sample->add_option("--output", sample_out, "Snapshot path")->required();

    // aggregate
    InputOptions agg_in;
    std::string agg_keys, agg_out;
    auto* aggregate = app.add_subcommand("aggregate", "Count flows grouped by identifier fields");
    add_input_options(aggregate, agg_in);
    aggregate->add_option("--keys", agg_keys, "Comma-separated subset of srcip,sport,dstip,dsport,proto")->required();
    aggregate->add_option("--output", agg_out, "CSV path")->required();

    // select
    InputOptions sel_in;
    std::string sel_out;
    std::size_t sel_bins = nf::kDefaultBins, sel_top_k = 8;
    auto* select = app.add_subcommand("select", "Chi-square feature ranking");
    add_input_options(select, sel_in);
    select->add_option("--bins", sel_bins, "Equal-frequency bins per feature")->check(CLI::Range(2, 1 << 20));
    select->add_option("--top-k", sel_top_k, "Number of features to report as selected")->check(CLI::PositiveNumber);
    select->add_option("--output", sel_out, "CSV path (feature,weight,chi2,rank)")->required();

    // fit
    InputOptions fit_in;
    std::string fit_features, fit_out;
    std::size_t fit_top_k = 8;
    std::optional<double> fit_sigma;
    bool fit_sigma_auto = false;
    double fit_train_fraction = 1.0;
    std::uint64_t fit_seed = 1;
    auto* fit = app.add_subcommand("fit", "Fit the normal-traffic baseline");
    add_input_options(fit, fit_in);
    fit->add_option("--features", fit_features, "Feature ranking written by `select`")->required();
    fit->add_option("--top-k", fit_top_k, "Number of top-ranked features to use")->check(CLI::PositiveNumber);
    auto* sigma_opt = fit->add_option("--sigma", fit_sigma, "Fixed kernel bandwidth")->check(CLI::PositiveNumber);
    fit->add_flag("--sigma-auto", fit_sigma_auto, "Rule-of-thumb bandwidth (default)")->excludes(sigma_opt);
    fit->add_option("--train-fraction", fit_train_fraction, "Share of normal records used for fitting")
        ->check(CLI::Range(0.0, 1.0));
    fit->add_option("--seed", fit_seed, "Seed for the training subset");
    fit->add_option("--output", fit_out, "Baseline path")->required();

    // score
    InputOptions score_in;
    std::string score_baseline, score_out, score_evidence;
    double score_mult = nf::kDefaultMultiplier;
    std::size_t score_top_n = 20;
    auto* score = app.add_subcommand("score", "Score flows against a baseline");
    add_input_options(score, score_in);
    score->add_option("--baseline", score_baseline, "Baseline written by `fit`")->required();
    score->add_option("--multiplier", score_mult, "Attack threshold in standard deviations")->check(CLI::NonNegativeNumber);
    score->add_option("--output", score_out, "Scores CSV path")->required();
    score->add_option("--evidence", score_evidence, "Optional evidence report path");
    score->add_option("--top-n", score_top_n, "Rows in the evidence report");

    // eval
    std::string eval_scores, eval_out, eval_csv;
    auto* eval = app.add_subcommand("eval", "Accuracy, FAR and per-class accuracy of a scores file");
    eval->add_option("--input", eval_scores, "Scores CSV written by `score`")->required();
    eval->add_option("--output", eval_out, "Text report path")->required();
    eval->add_option("--csv", eval_csv, "Optional machine-readable report path");

    // roc
    InputOptions roc_in;
    std::string roc_baseline, roc_out;
    std::vector<double> roc_grid;
    auto* roc = app.add_subcommand("roc", "Detection/false-positive rates over threshold multipliers");
    add_input_options(roc, roc_in);
    roc->add_option("--baseline", roc_baseline, "Baseline written by `fit`")->required();
    roc->add_option("--multipliers", roc_grid, "Multiplier grid (default 0 to 6 step 0.1)")->delimiter(',');
    roc->add_option("--output", roc_out, "CSV path")->required();

    // run
    std::string run_config;
    std::vector<std::string> run_inputs;
    std::optional<std::string> run_schema, run_output, run_n;
    std::optional<std::uint64_t> run_seed;
    std::optional<std::size_t> run_bins, run_top_k;
    std::optional<double> run_sigma, run_mult;
    bool run_sigma_auto = false;
    auto* run = app.add_subcommand("run", "End-to-end experiment from a config file");
    run->add_option("--config", run_config, "Experiment config (key = value lines)");
    run->add_option("--input", run_inputs, "Override inputs")->delimiter(',');
    run->add_option("--schema", run_schema, "Override schema");
    run->add_option("--output", run_output, "Override output directory");
    run->add_option("--n", run_n, "Override sample size(s), comma-separated");
    run->add_option("--seed", run_seed, "Override seed");
    run->add_option("--bins", run_bins, "Override bins");
    run->add_option("--top-k", run_top_k, "Override top_k");
    auto* run_sigma_opt = run->add_option("--sigma", run_sigma, "Fixed kernel bandwidth")->check(CLI::PositiveNumber);
    run->add_flag("--sigma-auto", run_sigma_auto, "Rule-of-thumb bandwidth")->excludes(run_sigma_opt);
    run->add_option("--multiplier", run_mult, "Override threshold multiplier");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            auto r = load_inputs(ingest_in);
            auto bytes = nf::save_snapshot(r.dataset, ingest_out);
            std::cout << "rows read " << r.stats.rows_read << ", kept " << r.dataset.size() << ", dropped "
                      << r.stats.rows_dropped << '\n';
            for (const auto& [reason, n] : r.stats.drop_reasons) std::cout << "  dropped (" << reason << "): " << n << '\n';
            std::cout << "wrote " << bytes << " bytes to " << ingest_out << '\n';
        } else if (*sample) {
            auto ds = load_inputs(sample_in).dataset;
            if (sample_drop_missing) ds = nf::drop_missing(ds).dataset;
            if (sample_dedup) ds = nf::deduplicate(ds).dataset;
            auto out = nf::srs_sample(ds, sample_n, sample_seed);
            nf::save_snapshot(out, sample_out);
            std::cout << "sampled " << out.size() << " of " << ds.size() << " records (seed " << sample_seed << ")\n";
        } else if (*aggregate) {
            auto ds = load_inputs(agg_in).dataset;
            auto table = nf::count_flows(ds, nf::AggregationSpec::parse(agg_keys), workers);
            nf::write_flow_counts_csv(table, agg_out);
            std::cout << table.rows.size() << " groups over " << table.total << " flows\n";
        } else if (*select) {
            auto ds = nf::drop_missing(load_inputs(sel_in).dataset).dataset;
            auto scores = nf::score_features(ds, sel_bins, workers);
            auto chosen = nf::select_top_k(scores, std::min(sel_top_k, scores.size()), ds.schema);
            nf::write_scores_csv(scores, sel_out);
            std::cout << "selected:";
            for (const auto& n : chosen.names) std::cout << ' ' << n;
            std::cout << '\n';
        } else if (*fit) {
            auto scores = nf::read_scores_csv(fit_features);
            auto ds = nf::drop_missing(load_inputs(fit_in).dataset).dataset;
            auto chosen = nf::select_top_k(scores, fit_top_k, ds.schema);
            auto projected = nf::project(ds, chosen.names);
            std::vector<std::size_t> train;
            if (fit_train_fraction < 1.0) {
                train = nf::split_normal_records(projected, fit_train_fraction, fit_seed).train;
            } else {
                for (std::size_t i = 0; i < projected.size(); ++i)
                    if (projected.records[i].binary_label.value_or(0) == 0) train.push_back(i);
            }
            auto baseline = nf::fit_baseline(nf::subset(projected, train), chosen.names, bandwidth_from(fit_sigma));
            baseline.training_checksum = nf::index_checksum(train);
            nf::save_baseline(baseline, fit_out);
            std::cout << "fitted on " << baseline.n_train << " normal records (seed " << fit_seed << "): sigma "
                      << baseline.kernel.sigma() << ", mu " << baseline.mu_corpy << ", sd " << baseline.sd_corpy << '\n';
            for (const auto& w : baseline.warnings) std::cerr << "warning: " << w << '\n';
        } else if (*score) {
            auto baseline = nf::load_baseline(score_baseline);
            auto ds = load_inputs(score_in).dataset;
            auto scored = nf::score_batch(ds, baseline, score_mult, workers);
            nf::write_scored_csv(scored, score_out);
            if (!score_evidence.empty())
                nf::write_text_file(score_evidence, nf::format_evidence_report(nf::evidence_report(scored, score_top_n)),
                                    "score");
            auto flagged = std::count_if(scored.begin(), scored.end(), [](const auto& s) { return s.score.attack; });
            std::cout << "scored " << scored.size() << " flows, " << flagged << " flagged as attack\n";
        } else if (*eval) {
            auto scored = nf::read_scored_csv(eval_scores);
            auto report = nf::build_report(scored, {}, scored.size());
            nf::write_text_file(eval_out, nf::format_report_text(report), "eval");
            if (!eval_csv.empty()) nf::write_text_file(eval_csv, nf::format_report_csv(report), "eval");
            std::cout << "accuracy " << report.accuracy * 100 << "%, FAR " << report.far * 100 << "%\n";
        } else if (*roc) {
            auto baseline = nf::load_baseline(roc_baseline);
            auto ds = load_inputs(roc_in).dataset;
            auto points = nf::roc_sweep(ds, baseline, roc_grid.empty() ? nf::default_multiplier_grid() : roc_grid, workers);
            nf::write_roc_csv(points, roc_out);
            std::cout << points.size() << " ROC points\n";
        } else if (*run) {
            nf::ExperimentConfig cfg = run_config.empty() ? nf::ExperimentConfig{} : nf::load_config(run_config);
            if (!run_inputs.empty()) {
                cfg.inputs.clear();
                for (const auto& p : run_inputs) cfg.inputs.emplace_back(p);
            }
            if (run_schema) cfg.schema = *run_schema;
            if (run_output) cfg.output_dir = *run_output;
            if (run_n) nf::apply_setting(cfg, "sample_size", *run_n);
            if (run_seed) cfg.seed = *run_seed;
            if (run_bins) cfg.bins = *run_bins;
            if (run_top_k) cfg.top_k = *run_top_k;
            if (run_sigma) cfg.bandwidth = nf::BandwidthPolicy::fixed_sigma(*run_sigma);
            if (run_sigma_auto) cfg.bandwidth = nf::BandwidthPolicy::automatic_rule();
            if (run_mult) cfg.multiplier = *run_mult;
            cfg.workers = workers;
            auto result = nf::run_experiment(cfg);
            std::cout << result.summary;
            std::cout << "artifacts in " << cfg.output_dir.string() << '\n';
        }
    } catch (const nf::Error& e) {
        std::cerr << "netforensic: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "netforensic: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
