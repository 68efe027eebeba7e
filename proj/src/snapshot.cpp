#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "netforensic/error.hpp"
#include "netforensic/ingest.hpp"

namespace nf {

namespace {

constexpr char kMagic[8] = {'N', 'F', 'S', 'N', 'A', 'P', '\0', '\0'};
constexpr std::uint8_t kNoKeyField = 0xFF;

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

class Writer {
public:
    template <typename T>
    void put(T v) {
        char raw[sizeof(T)];
        std::memcpy(raw, &v, sizeof(T));
        buf_.append(raw, sizeof(T));
    }
    void put_str(std::string_view s) {
        put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
        buf_.append(s);
    }
    void put_raw(const char* p, std::size_t n) { buf_.append(p, n); }
    template <typename Get>
    void put_bitmap(std::size_t n, Get present) {
        std::string bits((n + 7) / 8, '\0');
        for (std::size_t i = 0; i < n; ++i)
            if (present(i)) bits[i / 8] = static_cast<char>(bits[i / 8] | (1u << (i % 8)));
        buf_ += bits;
    }
    std::string& buffer() { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    Reader(const std::string& buf, std::size_t end) : buf_(buf), end_(end) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, buf_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    std::string get_str() {
        auto n = get<std::uint32_t>();
        need(n);
        std::string s = buf_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::vector<bool> get_bitmap(std::size_t n) {
        std::size_t bytes = (n + 7) / 8;
        need(bytes);
        std::vector<bool> out(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = (static_cast<unsigned char>(buf_[pos_ + i / 8]) >> (i % 8)) & 1u;
        pos_ += bytes;
        return out;
    }
    std::size_t position() const { return pos_; }

private:
    void need(std::size_t n) const {
        if (end_ - pos_ < n) throw Error("snapshot", "truncated snapshot");
    }
    const std::string& buf_;
    std::size_t end_;
    std::size_t pos_ = 0;
};

std::uint32_t crc_of(const std::string& data, std::size_t n) {
    uLong crc = crc32(0L, Z_NULL, 0);
    const auto* p = reinterpret_cast<const Bytef*>(data.data());
    while (n > 0) {
        auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
        crc = crc32(crc, p, chunk);
        p += chunk;
        n -= chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::uint64_t save_snapshot(const Dataset& dataset, const std::filesystem::path& path) {
    const auto& recs = dataset.records;
    const std::size_t n = recs.size();
    Writer w;
    w.put_raw(kMagic, sizeof(kMagic));
    w.put<std::uint32_t>(kSnapshotVersion);
    w.put<std::uint64_t>(n);
    w.put_str(dataset.provenance);

    const auto& cols = dataset.schema.columns();
    w.put<std::uint32_t>(static_cast<std::uint32_t>(cols.size()));
    for (const auto& col : cols) {
        w.put<std::uint8_t>(static_cast<std::uint8_t>(col.role));
        w.put<std::uint8_t>(col.key_field ? static_cast<std::uint8_t>(*col.key_field) : kNoKeyField);
        w.put_str(col.name);
        w.put_str(col.description);
    }

    std::size_t f = 0, m = 0;
    for (const auto& col : cols) {
        switch (col.role) {
            case ColumnRole::identifier:
                for (const auto& r : recs) {
                    switch (*col.key_field) {
                        case KeyField::src_ip: w.put_str(r.key.src_ip); break;
                        case KeyField::dst_ip: w.put_str(r.key.dst_ip); break;
                        case KeyField::proto: w.put_str(r.key.proto); break;
                        case KeyField::src_port: w.put<std::int32_t>(r.key.src_port); break;
                        case KeyField::dst_port: w.put<std::int32_t>(r.key.dst_port); break;
                    }
                }
                break;
            case ColumnRole::metadata:
                for (const auto& r : recs) w.put_str(r.metadata.at(m));
                ++m;
                break;
            case ColumnRole::numeric:
                w.put_bitmap(n, [&](std::size_t i) { return recs[i].features.at(f).has_value(); });
                for (const auto& r : recs) w.put<double>(r.features[f].value_or(0.0));
                ++f;
                break;
            case ColumnRole::label_binary:
                w.put_bitmap(n, [&](std::size_t i) { return recs[i].binary_label.has_value(); });
                for (const auto& r : recs) w.put<std::uint8_t>(static_cast<std::uint8_t>(r.binary_label.value_or(0)));
                break;
            case ColumnRole::label_class:
                w.put_bitmap(n, [&](std::size_t i) { return recs[i].class_label.has_value(); });
                for (const auto& r : recs)
                    if (r.class_label) w.put_str(*r.class_label);
                break;
            case ColumnRole::ignored: break;
        }
    }
    auto& buf = w.buffer();
    w.put<std::uint32_t>(crc_of(buf, buf.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("snapshot", "cannot write " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error("snapshot", "write failed: " + path.string());
    return buf.size();
}

bool is_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    char head[sizeof(kMagic)];
    if (!in.read(head, sizeof(head))) return false;
    return std::memcmp(head, kMagic, sizeof(kMagic)) == 0;
}

Dataset load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("snapshot", "file not found: " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < sizeof(kMagic) + 4 + 4 || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
        throw Error("snapshot", path.string() + " is not a snapshot");

    std::uint32_t version;
    std::memcpy(&version, buf.data() + sizeof(kMagic), sizeof(version));
    if (version != kSnapshotVersion)
        throw Error("snapshot", "version mismatch: file has " + std::to_string(version) + ", expected " +
                                    std::to_string(kSnapshotVersion));

    const std::size_t body = buf.size() - 4;
    std::uint32_t stored;
    std::memcpy(&stored, buf.data() + body, sizeof(stored));
    if (crc_of(buf, body) != stored) throw Error("snapshot", "checksum mismatch (corrupt snapshot): " + path.string());

    Reader r(buf, body);
    for (std::size_t i = 0; i < sizeof(kMagic); ++i) r.get<char>();
    r.get<std::uint32_t>();
    const auto n = static_cast<std::size_t>(r.get<std::uint64_t>());
    Dataset ds;
    ds.provenance = r.get_str();

    auto ncols = r.get<std::uint32_t>();
    std::vector<Column> cols;
    for (std::uint32_t i = 0; i < ncols; ++i) {
        Column c;
        auto role = r.get<std::uint8_t>();
        auto key = r.get<std::uint8_t>();
        if (role > static_cast<std::uint8_t>(ColumnRole::ignored)) throw Error("snapshot", "invalid column role");
        c.role = static_cast<ColumnRole>(role);
        if (key != kNoKeyField) {
            if (key > static_cast<std::uint8_t>(KeyField::proto)) throw Error("snapshot", "invalid key field");
            c.key_field = static_cast<KeyField>(key);
        }
        c.name = r.get_str();
        c.description = r.get_str();
        cols.push_back(std::move(c));
    }
    ds.schema = FeatureSchema(std::move(cols));

    auto& recs = ds.records;
    recs.resize(n);
    for (auto& rec : recs) {
        rec.features.reserve(ds.schema.numeric_count());
    }
    for (const auto& col : ds.schema.columns()) {
        switch (col.role) {
            case ColumnRole::identifier:
                for (auto& rec : recs) {
                    switch (*col.key_field) {
                        case KeyField::src_ip: rec.key.src_ip = r.get_str(); break;
                        case KeyField::dst_ip: rec.key.dst_ip = r.get_str(); break;
                        case KeyField::proto: rec.key.proto = r.get_str(); break;
                        case KeyField::src_port: rec.key.src_port = r.get<std::int32_t>(); break;
                        case KeyField::dst_port: rec.key.dst_port = r.get<std::int32_t>(); break;
                    }
                }
                break;
            case ColumnRole::metadata:
                for (auto& rec : recs) rec.metadata.push_back(r.get_str());
                break;
            case ColumnRole::numeric: {
                auto present = r.get_bitmap(n);
                for (std::size_t i = 0; i < n; ++i) {
                    double v = r.get<double>();
                    recs[i].features.push_back(present[i] ? std::optional<double>(v) : std::nullopt);
                }
                break;
            }
            case ColumnRole::label_binary: {
                auto present = r.get_bitmap(n);
                for (std::size_t i = 0; i < n; ++i) {
                    auto v = r.get<std::uint8_t>();
                    if (present[i]) recs[i].binary_label = v;
                }
                break;
            }
            case ColumnRole::label_class: {
                auto present = r.get_bitmap(n);
                for (std::size_t i = 0; i < n; ++i)
                    if (present[i]) recs[i].class_label = r.get_str();
                break;
            }
            case ColumnRole::ignored: break;
        }
    }
    if (r.position() != body) throw Error("snapshot", "trailing bytes before checksum");
    return ds;
}

}  // namespace nf
