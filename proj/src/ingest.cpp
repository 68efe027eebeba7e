#include "netforensic/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "netforensic/csv.hpp"
#include "netforensic/error.hpp"

namespace nf {

namespace {

std::string lower_trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool header_matches(const std::string& header_name, const Column& col) {
    std::string h = lower_trim(header_name);
    if (col.role == ColumnRole::identifier) return parse_key_field(h) == col.key_field;
    if (h == col.name) return true;
    if (h == "smeansz" && col.name == "smean") return true;
    if (h == "dmeansz" && col.name == "dmean") return true;
    return false;
}

bool looks_like_header(const std::vector<std::string>& fields) {
    return !fields.empty() && (parse_key_field(fields.front()) || lower_trim(fields.front()) == "id");
}

// Parses one data row. Returns the drop reason on failure.
std::optional<std::string> parse_row(const std::vector<std::string>& fields, const FeatureSchema& schema,
                                     FlowRecord& out) {
    const auto& cols = schema.columns();
    if (fields.size() != cols.size()) return std::string("field count mismatch");
    out = FlowRecord{};
    out.features.reserve(schema.numeric_count());
    std::optional<std::string> raw_class;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const auto& col = cols[i];
        const std::string& field = fields[i];
        switch (col.role) {
            case ColumnRole::identifier: {
                std::string value = lower_trim(field);
                if (value.empty()) return std::string("empty identifier");
                switch (*col.key_field) {
                    case KeyField::src_ip: out.key.src_ip = value; break;
                    case KeyField::dst_ip: out.key.dst_ip = value; break;
                    case KeyField::proto: out.key.proto = value; break;
                    case KeyField::src_port:
                    case KeyField::dst_port: {
                        auto port = csv::parse_integer(value);
                        if (!port || *port < 0 || *port > 65535) return std::string("malformed identifier");
                        (*col.key_field == KeyField::src_port ? out.key.src_port : out.key.dst_port) = static_cast<int>(*port);
                        break;
                    }
                }
                break;
            }
            case ColumnRole::metadata: out.metadata.push_back(lower_trim(field)); break;
            case ColumnRole::numeric: {
                if (lower_trim(field).empty()) {
                    out.features.emplace_back(std::nullopt);
                    break;
                }
                auto v = csv::parse_double(field);
                if (!v) return std::string("unparseable numeric");
                out.features.emplace_back(*v);
                break;
            }
            case ColumnRole::label_binary: {
                auto v = csv::parse_integer(field);
                if (!v || (*v != 0 && *v != 1)) return std::string("invalid label");
                out.binary_label = static_cast<int>(*v);
                break;
            }
            case ColumnRole::label_class: {
                auto name = canonical_class_name(field);
                if (!name.empty()) raw_class = std::move(name);
                break;
            }
            case ColumnRole::ignored: break;
        }
    }
    if (schema.has_class_label() && out.binary_label) {
        if (raw_class) out.class_label = std::move(raw_class);
        else if (*out.binary_label == 0) out.class_label = "Normal";
    }
    if (auto violation = validate_record(out, schema)) return violation;
    return std::nullopt;
}

IngestResult read_rows(std::istream& in, const std::filesystem::path& path, const FeatureSchema& schema,
                       BadRowPolicy policy, std::size_t first_line_no, std::optional<std::string> pending) {
    IngestResult result;
    result.dataset.schema = schema;
    result.dataset.provenance = "csv:" + path.string();
    std::size_t line_no = first_line_no;
    FlowRecord rec;
    auto handle = [&](const std::string& line) {
        ++result.stats.rows_read;
        auto reason = parse_row(csv::split_line(line), schema, rec);
        if (!reason) {
            result.dataset.records.push_back(std::move(rec));
            return;
        }
        if (policy == BadRowPolicy::fail)
            throw Error("ingest", path.string() + ": row " + std::to_string(line_no) + ": " + *reason);
        ++result.stats.rows_dropped;
        ++result.stats.drop_reasons[*reason];
    };
    if (pending) {
        handle(*pending);
        ++line_no;
    }
    while (auto line = csv::next_line(in)) {
        handle(*line);
        ++line_no;
    }
    return result;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("ingest", "file not found: " + path.string());
    return in;
}

}  // namespace

IngestStats& IngestStats::operator+=(const IngestStats& other) {
    rows_read += other.rows_read;
    rows_dropped += other.rows_dropped;
    for (const auto& [reason, n] : other.drop_reasons) drop_reasons[reason] += n;
    return *this;
}

std::string canonical_class_name(std::string_view raw) {
    std::string key = lower_trim(raw);
    if (key.empty()) return {};
    if (key == "backdoors") key = "backdoor";
    for (const auto& name : unsw_class_order())
        if (lower_trim(name) == key) return name;
    std::string_view s = raw;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

IngestResult load_csv(const std::filesystem::path& path, const FeatureSchema& schema, const IngestOptions& options) {
    auto in = open_input(path);
    auto first = csv::next_line(in);
    if (!first) {
        IngestResult empty;
        empty.dataset.schema = schema;
        empty.dataset.provenance = "csv:" + path.string();
        return empty;
    }
    auto fields = csv::split_line(*first);
    if (fields.size() != schema.columns().size())
        throw Error("ingest", path.string() + ": arity mismatch: file has " + std::to_string(fields.size()) +
                                  " columns, schema has " + std::to_string(schema.columns().size()));
    bool header = options.has_header || looks_like_header(fields);
    if (header) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (!header_matches(fields[i], schema.columns()[i]))
                throw Error("ingest", path.string() + ": header column " + std::to_string(i + 1) + " '" + fields[i] +
                                          "' does not match schema column '" + schema.columns()[i].name + "'");
        }
        return read_rows(in, path, schema, options.on_bad_row, 2, std::nullopt);
    }
    return read_rows(in, path, schema, options.on_bad_row, 1, std::move(first));
}

IngestResult load_csv_inferred(const std::filesystem::path& path, BadRowPolicy on_bad_row) {
    auto in = open_input(path);
    auto first = csv::next_line(in);
    if (!first) throw Error("ingest", path.string() + ": missing header row");
    auto schema = infer_schema(csv::split_line(*first));
    return read_rows(in, path, schema, on_bad_row, 2, std::nullopt);
}

IngestResult load_csv_files(const std::vector<std::filesystem::path>& paths, const std::string& schema_name,
                            const IngestOptions& options) {
    if (paths.empty()) throw Error("ingest", "no input files");
    IngestResult total;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        IngestResult part;
        if (schema_name == "auto") part = load_csv_inferred(paths[i], options.on_bad_row);
        else if (schema_name == "unsw-nb15") part = load_csv(paths[i], unsw_nb15_schema(), options);
        else throw Error("ingest", "unknown schema '" + schema_name + "'");
        if (i == 0) {
            total = std::move(part);
            continue;
        }
        if (!(part.dataset.schema == total.dataset.schema))
            throw Error("ingest", paths[i].string() + ": schema differs from " + paths[0].string());
        total.stats += part.stats;
        total.dataset.provenance += ";" + part.dataset.provenance;
        auto& dst = total.dataset.records;
        dst.insert(dst.end(), std::make_move_iterator(part.dataset.records.begin()),
                   std::make_move_iterator(part.dataset.records.end()));
    }
    return total;
}

IngestResult load_any(const std::filesystem::path& path, const std::string& schema_name, const IngestOptions& options) {
    if (is_snapshot(path)) {
        IngestResult r;
        r.dataset = load_snapshot(path);
        r.stats.rows_read = r.dataset.size();
        return r;
    }
    return load_csv_files({path}, schema_name, options);
}

void write_csv(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("ingest", "cannot write " + path.string());
    std::vector<std::string> row;
    for (const auto& col : dataset.schema.columns()) row.push_back(col.name);
    csv::write_row(out, row);
    for (const auto& rec : dataset.records) {
        row.clear();
        std::size_t f = 0, m = 0;
        for (const auto& col : dataset.schema.columns()) {
            switch (col.role) {
                case ColumnRole::identifier:
                    switch (*col.key_field) {
                        case KeyField::src_ip: row.push_back(rec.key.src_ip); break;
                        case KeyField::src_port: row.push_back(std::to_string(rec.key.src_port)); break;
                        case KeyField::dst_ip: row.push_back(rec.key.dst_ip); break;
                        case KeyField::dst_port: row.push_back(std::to_string(rec.key.dst_port)); break;
                        case KeyField::proto: row.push_back(rec.key.proto); break;
                    }
                    break;
                case ColumnRole::metadata: row.push_back(rec.metadata[m++]); break;
                case ColumnRole::numeric: {
                    const auto& v = rec.features[f++];
                    row.push_back(v ? csv::format_double(*v) : std::string());
                    break;
                }
                case ColumnRole::label_binary:
                    row.push_back(rec.binary_label ? std::to_string(*rec.binary_label) : std::string());
                    break;
                case ColumnRole::label_class:
                    row.push_back(rec.class_label && *rec.class_label != "Normal" ? *rec.class_label : std::string());
                    break;
                case ColumnRole::ignored: row.emplace_back(); break;
            }
        }
        csv::write_row(out, row);
    }
    if (!out) throw Error("ingest", "write failed: " + path.string());
}

}  // namespace nf
