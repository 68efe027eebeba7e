#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

#include "netforensic/flow_model.hpp"

namespace nf::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("nf_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

    std::filesystem::path write(const std::string& name, const std::string& content) const {
        auto p = path_ / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

private:
    std::filesystem::path path_;
};

/// Identifiers, `dim` numeric features named f1.., attack_cat and label.
inline FeatureSchema small_schema(std::size_t dim) {
    std::vector<Column> cols = {
        {"srcip", ColumnRole::identifier, "", std::nullopt}, {"sport", ColumnRole::identifier, "", std::nullopt},
        {"dstip", ColumnRole::identifier, "", std::nullopt}, {"dsport", ColumnRole::identifier, "", std::nullopt},
        {"proto", ColumnRole::identifier, "", std::nullopt},
    };
    for (std::size_t j = 0; j < dim; ++j) cols.push_back({"f" + std::to_string(j + 1), ColumnRole::numeric, "", std::nullopt});
    cols.push_back({"attack_cat", ColumnRole::label_class, "", std::nullopt});
    cols.push_back({"label", ColumnRole::label_binary, "", std::nullopt});
    return FeatureSchema(std::move(cols));
}

inline FlowRecord make_record(std::string src, std::string dst, std::vector<double> features, int label = 0,
                              int sport = 1000, int dport = 80, std::string proto = "tcp") {
    FlowRecord r;
    r.key = FlowKey{std::move(src), sport, std::move(dst), dport, std::move(proto)};
    for (double v : features) r.features.emplace_back(v);
    r.binary_label = label;
    r.class_label = label == 0 ? "Normal" : "Exploits";
    return r;
}

/// Random dataset over a small identifier alphabet so groups collide.
inline Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t dim, double absent_rate = 0.0) {
    Dataset ds;
    ds.schema = small_schema(dim);
    ds.provenance = "random";
    std::uniform_int_distribution<int> ip(0, 3), port(0, 4), proto(0, 1), label(0, 1), small(0, 5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        FlowRecord r;
        r.key = FlowKey{"10.0.0." + std::to_string(ip(rng)), 1000 + port(rng), "10.0.1." + std::to_string(ip(rng)),
                        80 + port(rng), proto(rng) ? "tcp" : "udp"};
        for (std::size_t j = 0; j < dim; ++j) {
            if (u(rng) < absent_rate) r.features.emplace_back(std::nullopt);
            else r.features.emplace_back(static_cast<double>(small(rng)) * 0.5);
        }
        r.binary_label = label(rng);
        r.class_label = *r.binary_label == 0 ? "Normal" : "DoS";
        ds.records.push_back(std::move(r));
    }
    return ds;
}

}  // namespace nf::testing
