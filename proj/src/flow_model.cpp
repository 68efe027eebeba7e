#include "netforensic/flow_model.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <unordered_map>

#include "netforensic/error.hpp"

namespace nf {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool valid_address(const std::string& addr) {
    std::array<unsigned char, 16> buf{};
    return inet_pton(AF_INET, addr.c_str(), buf.data()) == 1 || inet_pton(AF_INET6, addr.c_str(), buf.data()) == 1;
}

}  // namespace

std::string_view key_field_name(KeyField field) {
    switch (field) {
        case KeyField::src_ip: return "srcip";
        case KeyField::src_port: return "sport";
        case KeyField::dst_ip: return "dstip";
        case KeyField::dst_port: return "dsport";
        case KeyField::proto: return "proto";
    }
    return "?";
}

std::optional<KeyField> parse_key_field(std::string_view name) {
    static const std::unordered_map<std::string, KeyField> kNames = {
        {"srcip", KeyField::src_ip},     {"src_ip", KeyField::src_ip},       {"saddr", KeyField::src_ip},
        {"sport", KeyField::src_port},   {"srcport", KeyField::src_port},    {"src_port", KeyField::src_port},
        {"dstip", KeyField::dst_ip},     {"dst_ip", KeyField::dst_ip},       {"daddr", KeyField::dst_ip},
        {"dsport", KeyField::dst_port},  {"dport", KeyField::dst_port},      {"dstport", KeyField::dst_port},
        {"dst_port", KeyField::dst_port}, {"proto", KeyField::proto},        {"protocol", KeyField::proto},
    };
    auto it = kNames.find(lower(trim(name)));
    if (it == kNames.end()) return std::nullopt;
    return it->second;
}

std::string_view role_name(ColumnRole role) {
    switch (role) {
        case ColumnRole::identifier: return "identifier";
        case ColumnRole::metadata: return "metadata";
        case ColumnRole::numeric: return "numeric";
        case ColumnRole::label_binary: return "label-binary";
        case ColumnRole::label_class: return "label-class";
        case ColumnRole::ignored: return "ignored";
    }
    return "?";
}

std::optional<ColumnRole> parse_role(std::string_view name) {
    for (auto role : {ColumnRole::identifier, ColumnRole::metadata, ColumnRole::numeric, ColumnRole::label_binary,
                      ColumnRole::label_class, ColumnRole::ignored}) {
        if (role_name(role) == name) return role;
    }
    return std::nullopt;
}

FeatureSchema::FeatureSchema(std::vector<Column> columns) : columns_(std::move(columns)) {
    std::set<std::string> names;
    std::set<KeyField> keys;
    int binary_labels = 0;
    int class_labels = 0;
    for (auto& col : columns_) {
        if (col.name.empty()) throw Error("schema", "empty column name");
        if (!names.insert(col.name).second) throw Error("schema", "duplicate column name '" + col.name + "'");
        switch (col.role) {
            case ColumnRole::identifier:
                if (!col.key_field) col.key_field = parse_key_field(col.name);
                if (!col.key_field) throw Error("schema", "identifier column '" + col.name + "' maps to no flow key field");
                if (!keys.insert(*col.key_field).second)
                    throw Error("schema", "flow key field '" + std::string(key_field_name(*col.key_field)) + "' mapped twice");
                break;
            case ColumnRole::numeric:
                numeric_names_.push_back(col.name);
                col.key_field.reset();
                break;
            case ColumnRole::label_binary:
                ++binary_labels;
                col.key_field.reset();
                break;
            case ColumnRole::label_class:
                ++class_labels;
                col.key_field.reset();
                break;
            default:
                col.key_field.reset();
                break;
        }
    }
    if (keys.size() != std::size(kAllKeyFields)) throw Error("schema", "all five flow identifier columns are required");
    if (binary_labels > 1) throw Error("schema", "more than one label-binary column");
    if (class_labels > 1) throw Error("schema", "more than one label-class column");
    if (class_labels == 1 && binary_labels == 0) throw Error("schema", "label-class column without a label-binary column");
}

std::vector<std::string> FeatureSchema::metadata_names() const {
    std::vector<std::string> out;
    for (const auto& col : columns_)
        if (col.role == ColumnRole::metadata) out.push_back(col.name);
    return out;
}

std::optional<std::size_t> FeatureSchema::numeric_index(std::string_view name) const {
    auto it = std::find(numeric_names_.begin(), numeric_names_.end(), name);
    if (it == numeric_names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - numeric_names_.begin());
}

bool FeatureSchema::has_binary_label() const noexcept {
    return std::any_of(columns_.begin(), columns_.end(),
                       [](const Column& c) { return c.role == ColumnRole::label_binary; });
}

bool FeatureSchema::has_class_label() const noexcept {
    return std::any_of(columns_.begin(), columns_.end(),
                       [](const Column& c) { return c.role == ColumnRole::label_class; });
}

FeatureSchema FeatureSchema::project(const std::vector<std::string>& names) const {
    std::vector<Column> out;
    bool inserted = false;
    for (const auto& col : columns_) {
        if (col.role != ColumnRole::numeric) {
            out.push_back(col);
            continue;
        }
        // Selected features take the position of the first numeric column.
        if (!inserted) {
            for (const auto& name : names) {
                auto it = std::find_if(columns_.begin(), columns_.end(), [&](const Column& c) {
                    return c.role == ColumnRole::numeric && c.name == name;
                });
                if (it == columns_.end()) throw Error("schema", "unknown feature '" + name + "'");
                out.push_back(*it);
            }
            inserted = true;
        }
    }
    if (!inserted && !names.empty()) throw Error("schema", "unknown feature '" + names.front() + "'");
    return FeatureSchema(std::move(out));
}

FeatureSchema unsw_nb15_schema() {
    using R = ColumnRole;
    // Column names follow the dataset's feature list, lowercased; the mean
    // packet size columns use the short smean/dmean spelling.
    static const std::vector<std::tuple<const char*, R, const char*>> kLayout = {
        {"srcip", R::identifier, "source IP address"},
        {"sport", R::identifier, "source port number"},
        {"dstip", R::identifier, "destination IP address"},
        {"dsport", R::identifier, "destination port number"},
        {"proto", R::identifier, "transaction protocol"},
        {"state", R::metadata, "state and its dependent protocol"},
        {"dur", R::numeric, "record total duration"},
        {"sbytes", R::numeric, "source to destination bytes"},
        {"dbytes", R::numeric, "destination to source bytes"},
        {"sttl", R::numeric, "source to destination time to live"},
        {"dttl", R::numeric, "destination to source time to live"},
        {"sloss", R::numeric, "source packets retransmitted or dropped"},
        {"dloss", R::numeric, "destination packets retransmitted or dropped"},
        {"service", R::metadata, "application service"},
        {"sload", R::numeric, "source bits per second"},
        {"dload", R::numeric, "destination bits per second"},
        {"spkts", R::numeric, "source to destination packet count"},
        {"dpkts", R::numeric, "destination to source packet count"},
        {"swin", R::numeric, "source TCP window advertisement"},
        {"dwin", R::numeric, "destination TCP window advertisement"},
        {"stcpb", R::numeric, "source TCP sequence number"},
        {"dtcpb", R::numeric, "destination TCP sequence number"},
        {"smean", R::numeric, "mean of the flow packet size transmitted by the source"},
        {"dmean", R::numeric, "mean of the flow packet size transmitted by the destination"},
        {"trans_depth", R::numeric, "pipelined depth into the connection of http request/response"},
        {"res_bdy_len", R::numeric, "size of the data transferred from the server's http service"},
        {"sjit", R::numeric, "source jitter (ms)"},
        {"djit", R::numeric, "destination jitter (ms)"},
        {"stime", R::numeric, "record start time"},
        {"ltime", R::numeric, "record last time"},
        {"sintpkt", R::numeric, "source interpacket arrival time (ms)"},
        {"dintpkt", R::numeric, "destination interpacket arrival time (ms)"},
        {"tcprtt", R::numeric, "TCP connection setup round-trip time"},
        {"synack", R::numeric, "TCP connection setup time, SYN to SYN_ACK"},
        {"ackdat", R::numeric, "TCP connection setup time, SYN_ACK to ACK"},
        {"is_sm_ips_ports", R::numeric, "source and destination addresses and ports are equal"},
        {"ct_state_ttl", R::numeric, "count of records per state and TTL range"},
        {"ct_flw_http_mthd", R::numeric, "flows with http methods such as GET and POST"},
        {"is_ftp_login", R::numeric, "ftp session accessed with user and password"},
        {"ct_ftp_cmd", R::numeric, "flows with a command in an ftp session"},
        {"ct_srv_src", R::numeric, "connections with the same service and source address in 100 connections"},
        {"ct_srv_dst", R::numeric, "connections with the same service and destination address in 100 connections"},
        {"ct_dst_ltm", R::numeric, "connections with the same destination address in 100 connections"},
        {"ct_src_ltm", R::numeric, "connections with the same source address in 100 connections"},
        {"ct_src_dport_ltm", R::numeric, "connections with the same source address and destination port"},
        {"ct_dst_sport_ltm", R::numeric, "connections with the same destination address and source port"},
        {"ct_dst_src_ltm", R::numeric, "connections with the same source and destination address"},
        {"attack_cat", R::label_class, "attack category"},
        {"label", R::label_binary, "0 for normal and 1 for attack records"},
    };
    std::vector<Column> cols;
    cols.reserve(kLayout.size());
    for (const auto& [name, role, desc] : kLayout) cols.push_back(Column{name, role, desc, std::nullopt});
    return FeatureSchema(std::move(cols));
}

FeatureSchema infer_schema(const std::vector<std::string>& header) {
    std::vector<Column> cols;
    for (const auto& raw : header) {
        std::string name = lower(trim(raw));
        Column col{name, ColumnRole::numeric, "", std::nullopt};
        if (auto key = parse_key_field(name)) {
            col.role = ColumnRole::identifier;
            col.key_field = key;
        } else if (name == "label") {
            col.role = ColumnRole::label_binary;
        } else if (name == "attack_cat" || name == "class") {
            col.role = ColumnRole::label_class;
        } else if (name == "state" || name == "service") {
            col.role = ColumnRole::metadata;
        } else if (name == "smeansz") {
            col.name = "smean";
        } else if (name == "dmeansz") {
            col.name = "dmean";
        } else if (name == "id") {
            col.role = ColumnRole::ignored;
        }
        cols.push_back(std::move(col));
    }
    return FeatureSchema(std::move(cols));
}

const std::vector<std::string>& unsw_class_order() {
    static const std::vector<std::string> kOrder = {"Normal",  "Exploits", "Backdoor", "Shellcode", "Worms",
                                                    "DoS",     "Analysis", "Fuzzers",  "Reconnaissance", "Generic"};
    return kOrder;
}

bool FlowRecord::complete() const noexcept {
    return std::all_of(features.begin(), features.end(), [](const auto& v) { return v.has_value(); });
}

std::optional<std::string> validate_record(const FlowRecord& record, const FeatureSchema& schema) {
    const auto& key = record.key;
    if (key.src_ip.empty() || key.dst_ip.empty() || key.proto.empty()) return "empty identifier";
    if (key.src_port < 0 || key.src_port > 65535) return "src_port out of range";
    if (key.dst_port < 0 || key.dst_port > 65535) return "dst_port out of range";
    if (!valid_address(key.src_ip)) return "malformed src_ip";
    if (!valid_address(key.dst_ip)) return "malformed dst_ip";
    if (key.proto != normalize_proto(key.proto)) return "proto not a lowercase token";
    if (record.features.size() != schema.numeric_count()) return "feature arity mismatch";
    if (record.metadata.size() != schema.metadata_names().size()) return "metadata arity mismatch";
    if (record.binary_label && *record.binary_label != 0 && *record.binary_label != 1) return "binary label not 0 or 1";
    if (record.class_label) {
        if (!record.binary_label) return "class label without binary label";
        if ((*record.class_label == "Normal") != (*record.binary_label == 0)) return "class label contradicts binary label";
    }
    if (!schema.has_binary_label() && record.binary_label) return "label present but schema has no label column";
    return std::nullopt;
}

std::string normalize_proto(std::string_view raw) {
    return lower(trim(raw));
}

Dataset project(const Dataset& dataset, const std::vector<std::string>& feature_names) {
    std::vector<std::size_t> idx;
    idx.reserve(feature_names.size());
    for (const auto& name : feature_names) {
        auto i = dataset.schema.numeric_index(name);
        if (!i) throw Error("schema", "dataset has no feature '" + name + "'");
        idx.push_back(*i);
    }
    Dataset out;
    out.schema = dataset.schema.project(feature_names);
    out.provenance = dataset.provenance;
    out.records.reserve(dataset.records.size());
    for (const auto& rec : dataset.records) {
        FlowRecord r{rec.key, {}, rec.metadata, rec.binary_label, rec.class_label};
        r.features.reserve(idx.size());
        for (auto i : idx) r.features.push_back(rec.features[i]);
        out.records.push_back(std::move(r));
    }
    return out;
}

}  // namespace nf
