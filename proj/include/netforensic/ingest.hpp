#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netforensic/flow_model.hpp"

namespace nf {

enum class BadRowPolicy { skip, fail };

struct IngestOptions {
    bool has_header = false;
    BadRowPolicy on_bad_row = BadRowPolicy::skip;
};

struct IngestStats {
    std::size_t rows_read = 0;
    std::size_t rows_dropped = 0;
    std::map<std::string, std::size_t> drop_reasons;

    IngestStats& operator+=(const IngestStats& other);
};

struct IngestResult {
    Dataset dataset;
    IngestStats stats;
};

/// Parses a comma-separated flow file against `schema`. When the file has a
/// header row its names are checked against the schema before any data is read.
IngestResult load_csv(const std::filesystem::path& path, const FeatureSchema& schema, const IngestOptions& options = {});

/// Reads the header row and derives the schema from it (see infer_schema).
IngestResult load_csv_inferred(const std::filesystem::path& path, BadRowPolicy on_bad_row = BadRowPolicy::skip);

/// Resolves `schema_name` ("unsw-nb15" or "auto") and loads each file in
/// order, concatenating the records. All files must share one schema.
IngestResult load_csv_files(const std::vector<std::filesystem::path>& paths, const std::string& schema_name,
                            const IngestOptions& options = {});

/// Writes a header row followed by one line per record; absent values are empty fields.
void write_csv(const Dataset& dataset, const std::filesystem::path& path);

/// Trims and canonicalizes an attack category (e.g. "Backdoors" -> "Backdoor").
std::string canonical_class_name(std::string_view raw);

// Snapshot container. Layout is described in docs/snapshot_format.md.
inline constexpr std::uint32_t kSnapshotVersion = 1;

std::uint64_t save_snapshot(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_snapshot(const std::filesystem::path& path);
bool is_snapshot(const std::filesystem::path& path);

/// Snapshot when the file carries the snapshot magic, CSV otherwise.
IngestResult load_any(const std::filesystem::path& path, const std::string& schema_name, const IngestOptions& options = {});

}  // namespace nf
