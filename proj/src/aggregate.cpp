#include "netforensic/aggregate.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "netforensic/csv.hpp"
#include "netforensic/error.hpp"
#include "netforensic/parallel.hpp"
#include "netforensic/random.hpp"

namespace nf {

namespace {

bool is_port(KeyField f) { return f == KeyField::src_port || f == KeyField::dst_port; }

std::string field_text(const FlowKey& key, KeyField f) {
    switch (f) {
        case KeyField::src_ip: return key.src_ip;
        case KeyField::src_port: return std::to_string(key.src_port);
        case KeyField::dst_ip: return key.dst_ip;
        case KeyField::dst_port: return std::to_string(key.dst_port);
        case KeyField::proto: return key.proto;
    }
    return {};
}

// Compares key tuples field by field in spec order; ports numerically.
bool key_less(const std::vector<std::string>& a, const std::vector<std::string>& b, const std::vector<KeyField>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (a[i] == b[i]) continue;
        if (is_port(fields[i])) return std::stoi(a[i]) < std::stoi(b[i]);
        return a[i] < b[i];
    }
    return false;
}

void hash_combine(std::size_t& seed, std::size_t v) {
    seed ^= v + 0x9E3779B97F4A7C15ull + (seed << 6) + (seed >> 2);
}

struct RecordHash {
    std::size_t operator()(const FlowRecord* r) const {
        std::size_t h = 0;
        std::hash<std::string> hs;
        hash_combine(h, hs(r->key.src_ip));
        hash_combine(h, hs(r->key.dst_ip));
        hash_combine(h, hs(r->key.proto));
        hash_combine(h, static_cast<std::size_t>(r->key.src_port) * 65537u + static_cast<std::size_t>(r->key.dst_port));
        for (const auto& f : r->features) {
            if (!f) {
                hash_combine(h, 0x5bd1e995u);
                continue;
            }
            double v = *f == 0.0 ? 0.0 : *f;  // -0.0 == 0.0
            hash_combine(h, std::bit_cast<std::uint64_t>(v));
        }
        for (const auto& m : r->metadata) hash_combine(h, hs(m));
        hash_combine(h, static_cast<std::size_t>(r->binary_label.value_or(-1) + 2));
        if (r->class_label) hash_combine(h, hs(*r->class_label));
        return h;
    }
};

struct RecordEq {
    bool operator()(const FlowRecord* a, const FlowRecord* b) const { return *a == *b; }
};

}  // namespace

AggregationSpec::AggregationSpec(std::vector<KeyField> fields) : fields_(std::move(fields)) {
    if (fields_.empty()) throw Error("aggregate", "empty key_fields");
    std::set<KeyField> seen(fields_.begin(), fields_.end());
    if (seen.size() != fields_.size()) throw Error("aggregate", "duplicate key field");
}

AggregationSpec AggregationSpec::parse(std::string_view list) {
    std::vector<KeyField> fields;
    std::stringstream ss{std::string(list)};
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto f = parse_key_field(item);
        if (!f) throw Error("aggregate", "unknown key field '" + item + "'");
        fields.push_back(*f);
    }
    return AggregationSpec(std::move(fields));
}

FlowCountTable count_flows(const Dataset& dataset, const AggregationSpec& spec, unsigned workers) {
    const auto& fields = spec.fields();
    const auto& recs = dataset.records;
    auto project = [&](const FlowKey& key) {
        std::vector<std::string> out;
        out.reserve(fields.size());
        for (auto f : fields) out.push_back(field_text(key, f));
        return out;
    };

    // Per-chunk partial maps, merged after; counts are integers so the merge
    // is exact regardless of partitioning.
    unsigned chunks = chunk_count(recs.size(), workers);
    std::vector<std::map<std::vector<std::string>, std::uint64_t>> partial(chunks);
    parallel_chunks(recs.size(), workers, [&](std::size_t begin, std::size_t end, std::size_t c) {
        auto& m = partial[c];
        for (std::size_t i = begin; i < end; ++i) ++m[project(recs[i].key)];
    });
    std::map<std::vector<std::string>, std::uint64_t> merged;
    for (auto& m : partial)
        for (auto& [k, v] : m) merged[k] += v;

    FlowCountTable table;
    table.key_fields = fields;
    table.rows.reserve(merged.size());
    for (auto& [k, v] : merged) {
        table.rows.push_back(FlowCountRow{k, v});
        table.total += v;
    }
    std::sort(table.rows.begin(), table.rows.end(), [&](const FlowCountRow& a, const FlowCountRow& b) {
        if (a.flows != b.flows) return a.flows > b.flows;
        return key_less(a.key, b.key, fields);
    });
    return table;
}

void write_flow_counts_csv(const FlowCountTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("aggregate", "cannot write " + path.string());
    std::vector<std::string> header;
    for (auto f : table.key_fields) header.emplace_back(key_field_name(f));
    header.emplace_back("flows");
    csv::write_row(out, header);
    for (const auto& row : table.rows) {
        auto fields = row.key;
        fields.push_back(std::to_string(row.flows));
        csv::write_row(out, fields);
    }
    if (!out) throw Error("aggregate", "write failed: " + path.string());
}

FilterResult deduplicate(const Dataset& dataset) {
    FilterResult out;
    out.dataset.schema = dataset.schema;
    out.dataset.provenance = dataset.provenance;
    std::unordered_set<const FlowRecord*, RecordHash, RecordEq> seen;
    seen.reserve(dataset.records.size());
    for (const auto& rec : dataset.records) {
        if (seen.insert(&rec).second) out.dataset.records.push_back(rec);
        else ++out.removed;
    }
    out.dataset.provenance += ";deduplicate(removed=" + std::to_string(out.removed) + ")";
    return out;
}

FilterResult drop_missing(const Dataset& dataset) {
    FilterResult out;
    out.dataset.schema = dataset.schema;
    out.dataset.provenance = dataset.provenance;
    for (const auto& rec : dataset.records) {
        if (rec.complete()) out.dataset.records.push_back(rec);
        else ++out.removed;
    }
    out.dataset.provenance += ";drop_missing(removed=" + std::to_string(out.removed) + ")";
    return out;
}

std::vector<std::size_t> srs_indices(std::size_t population, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw Error("sample", "sample size must be positive");
    if (n > population)
        throw Error("sample", "sample size " + std::to_string(n) + " exceeds population " + std::to_string(population));
    // Partial Fisher-Yates: the first n slots end up a uniform n-subset.
    std::vector<std::size_t> idx(population);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        auto j = i + static_cast<std::size_t>(uniform_below(rng, population - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    return idx;
}

Dataset srs_sample(const Dataset& dataset, std::size_t n, std::uint64_t seed) {
    auto idx = srs_indices(dataset.size(), n, seed);
    Dataset out;
    out.schema = dataset.schema;
    out.provenance = dataset.provenance + ";srs_sample(n=" + std::to_string(n) + ",seed=" + std::to_string(seed) + ")";
    out.records.reserve(n);
    for (auto i : idx) out.records.push_back(dataset.records[i]);
    return out;
}

}  // namespace nf
