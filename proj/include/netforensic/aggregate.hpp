#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "netforensic/flow_model.hpp"

namespace nf {

/// Ordered, duplicate-free, non-empty subset of the flow key fields.
class AggregationSpec {
public:
    explicit AggregationSpec(std::vector<KeyField> fields);
    /// Parses a comma-separated list such as "srcip,dstip".
    static AggregationSpec parse(std::string_view list);

    const std::vector<KeyField>& fields() const noexcept { return fields_; }

private:
    std::vector<KeyField> fields_;
};

struct FlowCountRow {
    std::vector<std::string> key;  // values of the spec fields, in spec order
    std::uint64_t flows = 0;

    friend bool operator==(const FlowCountRow&, const FlowCountRow&) = default;
};

struct FlowCountTable {
    std::vector<KeyField> key_fields;
    std::vector<FlowCountRow> rows;  // count descending, then key ascending
    std::uint64_t total = 0;
};

/// Group-by count over the spec's key fields. Ties on count are ordered by
/// key tuple, comparing ports numerically and other fields as strings.
FlowCountTable count_flows(const Dataset& dataset, const AggregationSpec& spec, unsigned workers = 1);

/// Header `<key fields...>,flows`.
void write_flow_counts_csv(const FlowCountTable& table, const std::filesystem::path& path);

struct FilterResult {
    Dataset dataset;
    std::size_t removed = 0;
};

/// Keeps the first occurrence of each fully identical record.
FilterResult deduplicate(const Dataset& dataset);

/// Drops records with at least one absent feature value.
FilterResult drop_missing(const Dataset& dataset);

/// Sorted record indices of a uniform sample of n out of N without replacement.
std::vector<std::size_t> srs_indices(std::size_t population, std::size_t n, std::uint64_t seed);

/// Simple random sample; records keep their input order.
Dataset srs_sample(const Dataset& dataset, std::size_t n, std::uint64_t seed);

}  // namespace nf
