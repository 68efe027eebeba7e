#include "netforensic/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "netforensic/random.hpp"

namespace nf {

double standard_normal(std::mt19937_64& rng) {
    double u1 = 1.0 - uniform_unit(rng);  // (0, 1]
    double u2 = uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Dataset make_separation_dataset(const SeparationSpec& spec) {
    std::vector<Column> cols = {
        {"srcip", ColumnRole::identifier, "", KeyField::src_ip},
        {"sport", ColumnRole::identifier, "", KeyField::src_port},
        {"dstip", ColumnRole::identifier, "", KeyField::dst_ip},
        {"dsport", ColumnRole::identifier, "", KeyField::dst_port},
        {"proto", ColumnRole::identifier, "", KeyField::proto},
    };
    for (std::size_t j = 0; j < spec.dimension; ++j)
        cols.push_back({"f" + std::to_string(j + 1), ColumnRole::numeric, "", std::nullopt});
    cols.push_back({"attack_cat", ColumnRole::label_class, "", std::nullopt});
    cols.push_back({"label", ColumnRole::label_binary, "", std::nullopt});

    Dataset ds;
    ds.schema = FeatureSchema(std::move(cols));
    ds.provenance = "synthetic(n_normal=" + std::to_string(spec.n_normal) + ",n_attack=" + std::to_string(spec.n_attack) +
                    ",dim=" + std::to_string(spec.dimension) + ",seed=" + std::to_string(spec.seed) + ")";
    std::mt19937_64 rng(spec.seed);
    auto make = [&](bool attack, std::size_t i) {
        FlowRecord r;
        if (attack) {
            r.key = FlowKey{"175.45.176." + std::to_string(i % 4), static_cast<int>(1024 + i % 60000),
                            "149.171.126." + std::to_string(10 + i % 10), 80, "tcp"};
        } else {
            r.key = FlowKey{"59.166.0." + std::to_string(i % 10), static_cast<int>(1024 + i % 60000),
                            "149.171.126." + std::to_string(i % 10), i % 3 == 0 ? 53 : 443, i % 3 == 0 ? "udp" : "tcp"};
        }
        for (std::size_t j = 0; j < spec.dimension; ++j)
            r.features.emplace_back(standard_normal(rng) + (attack ? spec.attack_shift : 0.0));
        r.binary_label = attack ? 1 : 0;
        r.class_label = attack ? "Exploits" : "Normal";
        return r;
    };
    ds.records.reserve(spec.n_normal + spec.n_attack);
    for (std::size_t i = 0; i < spec.n_normal; ++i) ds.records.push_back(make(false, i));
    for (std::size_t i = 0; i < spec.n_attack; ++i) ds.records.push_back(make(true, i));
    return ds;
}

}  // namespace nf
