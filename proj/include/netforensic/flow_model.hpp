#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nf {

/// The five flow identifiers. Ports are held as plain ints so that an
/// out-of-range value survives long enough to be reported by validation.
struct FlowKey {
    std::string src_ip;
    int src_port = 0;
    std::string dst_ip;
    int dst_port = 0;
    std::string proto;

    friend bool operator==(const FlowKey&, const FlowKey&) = default;
    friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

enum class KeyField : std::uint8_t { src_ip, src_port, dst_ip, dst_port, proto };

inline constexpr KeyField kAllKeyFields[] = {KeyField::src_ip, KeyField::src_port, KeyField::dst_ip,
                                             KeyField::dst_port, KeyField::proto};

/// Canonical short names as used in flow exports: srcip, sport, dstip, dsport, proto.
std::string_view key_field_name(KeyField field);
/// Accepts the canonical names plus common spellings (src_ip, srcport, dport, ...).
std::optional<KeyField> parse_key_field(std::string_view name);

enum class ColumnRole : std::uint8_t {
    identifier,    // one of the FlowKey fields
    metadata,      // nominal column carried alongside the key (service, state)
    numeric,       // part of the feature vector
    label_binary,  // 0 = normal, 1 = attack
    label_class,   // attack category name
    ignored,       // parsed for arity only
};

std::string_view role_name(ColumnRole role);
std::optional<ColumnRole> parse_role(std::string_view name);

struct Column {
    std::string name;
    ColumnRole role = ColumnRole::numeric;
    std::string description;
    std::optional<KeyField> key_field;  // set iff role == identifier

    friend bool operator==(const Column&, const Column&) = default;
};

/// Ordered column layout of a flow file. Numeric columns define the feature
/// vector in the order they appear.
class FeatureSchema {
public:
    FeatureSchema() = default;
    /// Throws nf::Error when the column set breaks the schema invariants.
    explicit FeatureSchema(std::vector<Column> columns);

    const std::vector<Column>& columns() const noexcept { return columns_; }
    std::size_t numeric_count() const noexcept { return numeric_names_.size(); }
    const std::vector<std::string>& numeric_names() const noexcept { return numeric_names_; }
    std::vector<std::string> metadata_names() const;
    std::optional<std::size_t> numeric_index(std::string_view name) const;
    bool has_binary_label() const noexcept;
    bool has_class_label() const noexcept;

    /// Same identifier/metadata/label columns, numeric columns restricted to
    /// `names` in the given order.
    FeatureSchema project(const std::vector<std::string>& names) const;

    friend bool operator==(const FeatureSchema& a, const FeatureSchema& b) { return a.columns_ == b.columns_; }

private:
    std::vector<Column> columns_;
    std::vector<std::string> numeric_names_;
};

/// Built-in layout of the raw UNSW-NB15 part files (49 comma-separated fields,
/// no header row).
FeatureSchema unsw_nb15_schema();

/// Schema derived from a header row: known identifier names become
/// identifiers, `label` the binary label, `attack_cat` the class label,
/// `state`/`service` metadata, everything else numeric.
FeatureSchema infer_schema(const std::vector<std::string>& header);

/// Ten UNSW-NB15 classes in reporting order.
const std::vector<std::string>& unsw_class_order();

struct FlowRecord {
    FlowKey key;
    std::vector<std::optional<double>> features;  // nullopt marks an absent value
    std::vector<std::string> metadata;
    std::optional<int> binary_label;
    std::optional<std::string> class_label;

    bool complete() const noexcept;

    friend bool operator==(const FlowRecord&, const FlowRecord&) = default;
};

struct Dataset {
    FeatureSchema schema;
    std::vector<FlowRecord> records;
    std::string provenance;

    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Returns the first invariant violation, or nullopt when the record conforms.
std::optional<std::string> validate_record(const FlowRecord& record, const FeatureSchema& schema);

/// Lowercases and trims a protocol token.
std::string normalize_proto(std::string_view raw);

/// Copy of the dataset restricted to the named numeric features.
Dataset project(const Dataset& dataset, const std::vector<std::string>& feature_names);

}  // namespace nf
