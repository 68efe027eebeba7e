#include "netforensic/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "netforensic/csv.hpp"
#include "netforensic/error.hpp"

namespace nf {

namespace {

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
    return buf;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string class_of(const ScoredFlow& s) {
    if (s.class_label) return *s.class_label;
    if (!s.binary_label) throw Error("eval", "record without class or binary label");
    return *s.binary_label == 0 ? "Normal" : "Attack";
}

const std::vector<std::string> kScoredHeader = {"srcip", "sport",     "dstip",     "dsport",     "proto", "label",
                                                "attack_cat", "corpy", "deviation", "risk_level", "decision"};

}  // namespace

ConfusionCounts confusion(const std::vector<ScoredFlow>& scored) {
    ConfusionCounts c;
    for (const auto& s : scored) {
        if (!s.binary_label) throw Error("eval", "unlabeled record in evaluation set");
        bool attack = *s.binary_label == 1;
        if (attack && s.score.attack) ++c.tp;
        else if (!attack && !s.score.attack) ++c.tn;
        else if (!attack) ++c.fp;
        else ++c.fn;
    }
    return c;
}

Metrics metrics(const ConfusionCounts& c) {
    const auto total = c.total();
    if (total == 0) throw Error("eval", "metrics of an empty confusion matrix");
    const auto n = static_cast<double>(total);
    return Metrics{static_cast<double>(c.tp + c.tn) / n, static_cast<double>(c.fp + c.fn) / n};
}

PerClassResult per_class_accuracy(const std::vector<ScoredFlow>& scored) {
    std::map<std::string, ClassAccuracy> groups;
    for (const auto& s : scored) {
        auto name = class_of(s);
        auto& g = groups[name];
        g.name = name;
        ++g.total;
        bool correct = name == "Normal" ? !s.score.attack : s.score.attack;
        if (correct) ++g.correct;
    }
    PerClassResult out;
    // Missing groups are only worth a note when the data uses the known categories.
    const auto& order = unsw_class_order();
    bool known = std::any_of(order.begin() + 1, order.end(), [&](const auto& n) { return groups.count(n) > 0; });
    for (const auto& name : order) {
        auto it = groups.find(name);
        if (it == groups.end()) {
            if (known) out.warnings.push_back("no records of class " + name);
            continue;
        }
        out.classes.push_back(it->second);
        groups.erase(it);
    }
    for (auto& [name, g] : groups) out.classes.push_back(g);
    for (auto& g : out.classes) g.accuracy = static_cast<double>(g.correct) / static_cast<double>(g.total);
    return out;
}

std::vector<double> default_multiplier_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 60; ++i) grid.push_back(i / 10.0);
    return grid;
}

std::vector<RocPoint> roc_from_scores(const std::vector<ScoredFlow>& scored, double sd_corpy,
                                      const std::vector<double>& multipliers) {
    if (multipliers.empty()) throw Error("roc", "empty multiplier list");
    std::uint64_t pos = 0, neg = 0;
    for (const auto& s : scored) {
        if (!s.binary_label) throw Error("roc", "unlabeled record");
        (*s.binary_label == 1 ? pos : neg)++;
    }
    if (pos == 0 || neg == 0) throw Error("roc", "dataset must contain both normal and attack records");
    std::vector<RocPoint> out;
    out.reserve(multipliers.size());
    for (double k : multipliers) {
        if (k < 0) throw Error("roc", "multipliers must be non-negative");
        std::uint64_t tp = 0, fp = 0;
        for (const auto& s : scored) {
            if (!is_attack(s.score.deviation, sd_corpy, k)) continue;
            (*s.binary_label == 1 ? tp : fp)++;
        }
        out.push_back(RocPoint{k, static_cast<double>(tp) / static_cast<double>(pos),
                               static_cast<double>(fp) / static_cast<double>(neg)});
    }
    return out;
}

std::vector<RocPoint> roc_sweep(const Dataset& dataset, const NormalBaseline& baseline,
                                const std::vector<double>& multipliers, unsigned workers) {
    return roc_from_scores(score_batch(dataset, baseline, kDefaultMultiplier, workers), baseline.sd_corpy, multipliers);
}

std::vector<ScoredFlow> evidence_report(const std::vector<ScoredFlow>& scored, std::size_t top_n) {
    std::vector<ScoredFlow> rows(scored);
    std::stable_sort(rows.begin(), rows.end(), [](const ScoredFlow& a, const ScoredFlow& b) {
        if (a.score.risk_level != b.score.risk_level) return a.score.risk_level > b.score.risk_level;
        return a.key < b.key;
    });
    if (rows.size() > top_n) rows.resize(top_n);
    return rows;
}

std::string format_evidence_report(const std::vector<ScoredFlow>& rows) {
    std::ostringstream out;
    out << "srcip\tsport\tdstip\tdsport\tproto\tlabel\tRL\n";
    for (const auto& r : rows) {
        out << r.key.src_ip << '\t' << r.key.src_port << '\t' << r.key.dst_ip << '\t' << r.key.dst_port << '\t'
            << r.key.proto << '\t' << (r.binary_label ? std::to_string(*r.binary_label) : "-") << '\t'
            << fixed(r.score.risk_level, 2) << '\n';
    }
    return out.str();
}

EvalReport build_report(const std::vector<ScoredFlow>& scored, std::vector<RocPoint> roc, std::uint64_t sample_size) {
    EvalReport r;
    r.confusion = confusion(scored);
    auto m = metrics(r.confusion);
    r.accuracy = m.accuracy;
    r.far = m.far;
    auto pc = per_class_accuracy(scored);
    r.per_class = std::move(pc.classes);
    r.warnings = std::move(pc.warnings);
    r.roc = std::move(roc);
    r.sample_size = sample_size;
    return r;
}

std::string format_report_text(const EvalReport& r) {
    std::ostringstream out;
    out << "Sample size\tAccuracy\tFAR\n";
    out << r.sample_size << '\t' << percent(r.accuracy) << '\t' << percent(r.far) << "\n\n";
    out << "Confusion (attack = positive): TP " << r.confusion.tp << ", TN " << r.confusion.tn << ", FP "
        << r.confusion.fp << ", FN " << r.confusion.fn << "\n\n";
    out << "Vector type\tAccuracy\tCorrect/Total\n";
    for (const auto& c : r.per_class)
        out << c.name << '\t' << percent(c.accuracy) << '\t' << c.correct << '/' << c.total << '\n';
    for (const auto& w : r.warnings) out << "note: " << w << '\n';
    return out.str();
}

std::string format_report_csv(const EvalReport& r) {
    std::ostringstream out;
    csv::write_row(out, {"section", "name", "value"});
    auto row = [&](const std::string& section, const std::string& name, const std::string& value) {
        csv::write_row(out, {section, name, value});
    };
    row("summary", "sample_size", std::to_string(r.sample_size));
    row("summary", "tp", std::to_string(r.confusion.tp));
    row("summary", "tn", std::to_string(r.confusion.tn));
    row("summary", "fp", std::to_string(r.confusion.fp));
    row("summary", "fn", std::to_string(r.confusion.fn));
    row("summary", "accuracy", csv::format_double(r.accuracy));
    row("summary", "far", csv::format_double(r.far));
    for (const auto& c : r.per_class) row("class", c.name, csv::format_double(c.accuracy));
    return out.str();
}

std::string format_summary_table(const std::vector<EvalReport>& reports) {
    std::ostringstream out;
    out << "Sample size\tAccuracy\tFAR\n";
    for (const auto& r : reports) out << r.sample_size << '\t' << percent(r.accuracy) << '\t' << percent(r.far) << '\n';
    return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text, const std::string& stage) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(stage, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(stage, "write failed: " + path.string());
}

void write_roc_csv(const std::vector<RocPoint>& roc, const std::filesystem::path& path) {
    std::ostringstream out;
    csv::write_row(out, {"multiplier", "detection_rate", "false_positive_rate"});
    for (const auto& p : roc)
        csv::write_row(out, {csv::format_double(p.multiplier), csv::format_double(p.detection_rate),
                             csv::format_double(p.false_positive_rate)});
    write_text_file(path, out.str(), "roc");
}

void write_scored_csv(const std::vector<ScoredFlow>& scored, const std::filesystem::path& path) {
    std::ostringstream out;
    csv::write_row(out, kScoredHeader);
    for (const auto& s : scored) {
        csv::write_row(out, {s.key.src_ip, std::to_string(s.key.src_port), s.key.dst_ip, std::to_string(s.key.dst_port),
                             s.key.proto, s.binary_label ? std::to_string(*s.binary_label) : "",
                             s.class_label.value_or(""), csv::format_double(s.score.corpy),
                             csv::format_double(s.score.deviation), csv::format_double(s.score.risk_level),
                             s.score.attack ? "attack" : "normal"});
    }
    write_text_file(path, out.str(), "score");
}

std::vector<ScoredFlow> read_scored_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("eval", "scores not found: " + path.string());
    auto header = csv::next_line(in);
    if (!header || csv::split_line(*header) != kScoredHeader) throw Error("eval", path.string() + ": not a scores file");
    std::vector<ScoredFlow> out;
    std::size_t line_no = 1;
    while (auto line = csv::next_line(in)) {
        ++line_no;
        auto f = csv::split_line(*line);
        auto bad = [&] { return Error("eval", path.string() + ": malformed row " + std::to_string(line_no)); };
        if (f.size() != kScoredHeader.size()) throw bad();
        ScoredFlow s;
        auto sport = csv::parse_integer(f[1]);
        auto dport = csv::parse_integer(f[3]);
        auto corpy = csv::parse_double(f[7]);
        auto dev = csv::parse_double(f[8]);
        auto rl = csv::parse_double(f[9]);
        if (!sport || !dport || !corpy || !dev || !rl || (f[10] != "attack" && f[10] != "normal")) throw bad();
        s.key = FlowKey{f[0], static_cast<int>(*sport), f[2], static_cast<int>(*dport), f[4]};
        if (!f[5].empty()) {
            auto label = csv::parse_integer(f[5]);
            if (!label) throw bad();
            s.binary_label = static_cast<int>(*label);
        }
        if (!f[6].empty()) s.class_label = f[6];
        s.score = RiskScore{*corpy, *dev, *rl, f[10] == "attack"};
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace nf
