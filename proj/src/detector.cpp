#include "netforensic/detector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "netforensic/csv.hpp"
#include "netforensic/error.hpp"
#include "netforensic/parallel.hpp"

namespace nf {

namespace {

constexpr const char* kBaselineMagic = "netforensic-baseline";
constexpr int kBaselineVersion = 1;

double sample_mean(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<double> extract(const FlowRecord& record, const std::vector<std::size_t>& index) {
    std::vector<double> raw;
    raw.reserve(index.size());
    for (auto i : index) {
        if (i >= record.features.size() || !record.features[i]) throw Error("score", "record is missing a baseline feature");
        raw.push_back(*record.features[i]);
    }
    return raw;
}

std::vector<std::size_t> feature_index(const FeatureSchema& schema, const std::vector<std::string>& names) {
    std::vector<std::size_t> idx;
    for (const auto& name : names) {
        auto i = schema.numeric_index(name);
        if (!i) throw Error("score", "dataset lacks baseline feature '" + name + "'");
        idx.push_back(*i);
    }
    return idx;
}

}  // namespace

KernelParams::KernelParams(double sigma) : sigma_(sigma) {
    if (!(sigma > 0) || !std::isfinite(sigma)) throw Error("detector", "kernel sigma must be positive and finite");
}

double gaussian_kernel(double x, double sigma) {
    if (!(sigma > 0)) throw Error("detector", "kernel sigma must be positive");
    return std::exp(-(x * x) / (2.0 * sigma * sigma)) / (std::sqrt(2.0 * std::numbers::pi) * sigma);
}

double correntropy(std::span<const double> a, std::span<const double> b, const KernelParams& kernel) {
    if (a.size() != b.size()) throw Error("detector", "correntropy dimension mismatch");
    if (a.empty()) throw Error("detector", "correntropy of empty vectors");
    const double s = kernel.sigma();
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * s);
    const double inv2s2 = 1.0 / (2.0 * s * s);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        sum += std::exp(-d * d * inv2s2);
    }
    return norm * sum / static_cast<double>(a.size());
}

std::vector<double> NormalBaseline::scale(std::span<const double> raw) const {
    if (raw.size() != dimension()) throw Error("score", "dimension mismatch");
    std::vector<double> out(raw.size());
    for (std::size_t j = 0; j < raw.size(); ++j) {
        double range = scale_max[j] - scale_min[j];
        out[j] = range > 0 ? std::clamp((raw[j] - scale_min[j]) / range, 0.0, 1.0) : 0.0;
    }
    return out;
}

NormalBaseline fit_baseline(const Dataset& normal_records, const std::vector<std::string>& feature_names,
                            const BandwidthPolicy& bandwidth) {
    if (feature_names.empty()) throw Error("fit", "no features selected");
    if (normal_records.size() < 2) throw Error("fit", "at least 2 normal records are required");
    const auto idx = feature_index(normal_records.schema, feature_names);
    const std::size_t dim = idx.size();

    std::vector<std::vector<double>> raw;
    raw.reserve(normal_records.size());
    for (const auto& rec : normal_records.records) {
        if (rec.binary_label.value_or(0) != 0) throw Error("fit", "attack-labeled record in normal training data");
        raw.push_back(extract(rec, idx));
    }

    NormalBaseline b;
    b.feature_names = feature_names;
    b.scale_min.assign(dim, 0.0);
    b.scale_max.assign(dim, 0.0);
    for (std::size_t j = 0; j < dim; ++j) {
        auto [lo, hi] = std::minmax_element(raw.begin(), raw.end(), [j](const auto& x, const auto& y) { return x[j] < y[j]; });
        b.scale_min[j] = (*lo)[j];
        b.scale_max[j] = (*hi)[j];
        if (b.scale_max[j] == b.scale_min[j])
            b.warnings.push_back("constant feature '" + feature_names[j] + "' scaled to 0");
    }

    std::vector<std::vector<double>> scaled;
    scaled.reserve(raw.size());
    for (const auto& r : raw) scaled.push_back(b.scale(r));
    b.reference.assign(dim, 0.0);
    for (const auto& s : scaled)
        for (std::size_t j = 0; j < dim; ++j) b.reference[j] += s[j];
    for (auto& v : b.reference) v /= static_cast<double>(scaled.size());

    double sigma = bandwidth.sigma;
    if (bandwidth.kind != BandwidthPolicy::Kind::fixed) {
        std::vector<double> pool;
        pool.reserve(scaled.size() * dim);
        for (const auto& s : scaled)
            for (std::size_t j = 0; j < dim; ++j) pool.push_back(s[j] - b.reference[j]);
        double spread = sample_sd(pool, sample_mean(pool));
        double m = bandwidth.kind == BandwidthPolicy::Kind::automatic ? static_cast<double>(dim)
                                                                      : static_cast<double>(pool.size());
        sigma = std::max(1.06 * spread * std::pow(m, -0.2), kMinBandwidth);
    }
    b.kernel = KernelParams(sigma);

    std::vector<double> corpy;
    corpy.reserve(scaled.size());
    for (const auto& s : scaled) corpy.push_back(correntropy(s, b.reference, b.kernel));
    b.mu_corpy = sample_mean(corpy);
    b.sd_corpy = sample_sd(corpy, b.mu_corpy);
    b.n_train = scaled.size();
    return b;
}

bool is_attack(double deviation, double sd_corpy, double multiplier) {
    if (sd_corpy > 0) return deviation >= multiplier * sd_corpy;
    return deviation > 0;
}

RiskScore score_vector(std::span<const double> raw, const NormalBaseline& baseline, double multiplier) {
    if (raw.size() != baseline.dimension()) throw Error("score", "dimension mismatch");
    RiskScore r;
    r.corpy = correntropy(baseline.scale(raw), baseline.reference, baseline.kernel);
    r.deviation = baseline.mu_corpy - r.corpy;
    r.attack = is_attack(r.deviation, baseline.sd_corpy, multiplier);
    const double sd = baseline.sd_corpy;
    if (sd > 0) {
        r.risk_level = std::clamp(r.deviation / (4.0 * sd), 0.0, 1.0);
        // Keep RL >= 0.5 exactly equivalent to the default 2-sd decision.
        if (r.risk_level >= 0.5 && !is_attack(r.deviation, sd, kDefaultMultiplier))
            r.risk_level = std::nextafter(0.5, 0.0);
    } else {
        r.risk_level = r.deviation > 0 ? 1.0 : 0.0;
    }
    return r;
}

RiskScore score(const FlowRecord& record, const FeatureSchema& schema, const NormalBaseline& baseline,
                double multiplier) {
    return score_vector(extract(record, feature_index(schema, baseline.feature_names)), baseline, multiplier);
}

std::vector<ScoredFlow> score_batch(const Dataset& dataset, const NormalBaseline& baseline, double threshold_multiplier,
                                    unsigned workers) {
    if (threshold_multiplier < 0 || !std::isfinite(threshold_multiplier))
        throw Error("score", "threshold multiplier must be non-negative");
    std::vector<ScoredFlow> out(dataset.size());
    if (dataset.empty()) return out;
    const auto idx = feature_index(dataset.schema, baseline.feature_names);
    parallel_chunks(dataset.size(), workers, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto& rec = dataset.records[i];
            out[i] = ScoredFlow{rec.key, rec.binary_label, rec.class_label,
                                score_vector(extract(rec, idx), baseline, threshold_multiplier)};
        }
    });
    return out;
}

std::string baseline_to_text(const NormalBaseline& b) {
    std::ostringstream out;
    auto vec = [&](const char* key, const std::vector<double>& v) {
        out << key;
        for (double x : v) out << ' ' << csv::format_double(x);
        out << '\n';
    };
    out << kBaselineMagic << ' ' << kBaselineVersion << '\n';
    out << "features";
    for (const auto& f : b.feature_names) out << ' ' << f;
    out << '\n';
    vec("scale_min", b.scale_min);
    vec("scale_max", b.scale_max);
    vec("reference", b.reference);
    out << "sigma " << csv::format_double(b.kernel.sigma()) << '\n';
    out << "mu_corpy " << csv::format_double(b.mu_corpy) << '\n';
    out << "sd_corpy " << csv::format_double(b.sd_corpy) << '\n';
    out << "n_train " << b.n_train << '\n';
    out << "training_checksum " << (b.training_checksum.empty() ? "-" : b.training_checksum) << '\n';
    for (const auto& w : b.warnings) out << "warning " << w << '\n';
    return out.str();
}

NormalBaseline baseline_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error("baseline", "empty baseline document");
    {
        std::istringstream head(line);
        std::string magic;
        int version = 0;
        head >> magic >> version;
        if (magic != kBaselineMagic) throw Error("baseline", "not a baseline document");
        if (version != kBaselineVersion)
            throw Error("baseline", "version mismatch: " + std::to_string(version) + " (expected " +
                                        std::to_string(kBaselineVersion) + ")");
    }
    NormalBaseline b;
    std::optional<double> sigma, mu, sd;
    bool have_n = false;
    auto numbers = [](std::istringstream& ls) {
        std::vector<double> v;
        std::string tok;
        while (ls >> tok) {
            auto x = csv::parse_double(tok);
            if (!x) throw Error("baseline", "malformed number '" + tok + "'");
            v.push_back(*x);
        }
        return v;
    };
    auto scalar = [&](std::istringstream& ls, const std::string& key) {
        auto v = numbers(ls);
        if (v.size() != 1) throw Error("baseline", "expected one value for " + key);
        return v.front();
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "features") {
            std::string f;
            while (ls >> f) b.feature_names.push_back(f);
        } else if (key == "scale_min") b.scale_min = numbers(ls);
        else if (key == "scale_max") b.scale_max = numbers(ls);
        else if (key == "reference") b.reference = numbers(ls);
        else if (key == "sigma") sigma = scalar(ls, key);
        else if (key == "mu_corpy") mu = scalar(ls, key);
        else if (key == "sd_corpy") sd = scalar(ls, key);
        else if (key == "n_train") {
            if (!(ls >> b.n_train)) throw Error("baseline", "malformed n_train");
            have_n = true;
        } else if (key == "training_checksum") {
            ls >> b.training_checksum;
            if (b.training_checksum == "-") b.training_checksum.clear();
        } else if (key == "warning") {
            std::string rest;
            std::getline(ls >> std::ws, rest);
            b.warnings.push_back(rest);
        } else {
            throw Error("baseline", "unknown key '" + key + "'");
        }
    }
    const auto dim = b.feature_names.size();
    if (dim == 0 || !sigma || !mu || !sd || !have_n) throw Error("baseline", "incomplete baseline document");
    if (b.scale_min.size() != dim || b.scale_max.size() != dim || b.reference.size() != dim)
        throw Error("baseline", "vector lengths disagree with the feature list");
    if (*sd < 0) throw Error("baseline", "negative sd_corpy");
    if (b.n_train < 2) throw Error("baseline", "n_train below 2");
    b.kernel = KernelParams(*sigma);
    b.mu_corpy = *mu;
    b.sd_corpy = *sd;
    return b;
}

void save_baseline(const NormalBaseline& baseline, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("baseline", "cannot write " + path.string());
    out << baseline_to_text(baseline);
    if (!out) throw Error("baseline", "write failed: " + path.string());
}

NormalBaseline load_baseline(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("baseline", "baseline not found: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return baseline_from_text(ss.str());
}

}  // namespace nf
