#include "quant/model.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace quant {

namespace {

constexpr std::array<char, 4> kMagic = {'Q', 'N', 'T', '1'};

std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        table[i] = c;
    }
    return table;
}

class ByteWriter {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes_.insert(bytes_.end(), s.begin(), s.end());
    }

    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() { return take(1)[0]; }
    std::uint32_t u32() {
        const auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        const auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const auto len = u32();
        const auto b = take(len);
        return std::string(reinterpret_cast<const char*>(b.data()), b.size());
    }

    bool done() const { return pos_ == bytes_.size(); }

private:
    std::span<const std::uint8_t> take(std::size_t count) {
        if (bytes_.size() - pos_ < count) throw std::runtime_error("truncated model payload");
        const auto out = bytes_.subspan(pos_, count);
        pos_ += count;
        return out;
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

void write_payload(ByteWriter& w, const Model& model) {
    const TransformConfig& tc = model.transform.config();
    w.u64(model.transform.series_length());
    w.u8(static_cast<std::uint8_t>(tc.depth));
    w.u32(static_cast<std::uint32_t>(tc.divisor));
    w.u32(static_cast<std::uint32_t>(tc.smoothing_window));
    w.u8(tc.representations.bits());
    w.u8(static_cast<std::uint8_t>(tc.mean_policy));

    const TrainConfig& fc = model.forest.config;
    w.u32(static_cast<std::uint32_t>(fc.num_trees));
    w.u8(static_cast<std::uint8_t>(fc.features_per_split.mode));
    w.f64(fc.features_per_split.fraction);
    w.u32(static_cast<std::uint32_t>(fc.min_samples_to_split));
    w.u32(static_cast<std::uint32_t>(fc.max_depth));
    w.u64(fc.master_seed);

    w.u32(static_cast<std::uint32_t>(model.class_names.size()));
    for (const auto& name : model.class_names) w.str(name);

    const auto& schema = model.transform.schema();
    w.u64(schema.size());
    for (const auto& col : schema) {
        w.u8(static_cast<std::uint8_t>(col.representation));
        w.u32(col.interval_begin);
        w.u32(col.interval_end);
        w.u32(col.quantile_index);
        w.u8(col.mean_subtracted ? 1 : 0);
    }

    w.u32(static_cast<std::uint32_t>(model.forest.trees.size()));
    for (const auto& tree : model.forest.trees) {
        w.u32(static_cast<std::uint32_t>(tree.nodes.size()));
        for (const auto& node : tree.nodes) {
            w.i32(node.feature);
            w.f64(node.threshold);
            w.i32(node.left);
            w.i32(node.right);
            w.i32(node.leaf);
        }
        w.u32(static_cast<std::uint32_t>(tree.leaf_counts.size()));
        for (const auto c : tree.leaf_counts) w.u32(c);
    }
}

Model read_payload(ByteReader& r) {
    const std::uint64_t series_length = r.u64();
    TransformConfig tc;
    tc.depth = r.u8();
    tc.divisor = static_cast<int>(r.u32());
    tc.smoothing_window = static_cast<int>(r.u32());
    tc.representations = RepSet::from_bits(r.u8());
    const auto policy = r.u8();
    if (policy > 2) throw std::runtime_error("model payload: unknown mean policy");
    tc.mean_policy = static_cast<MeanPolicy>(policy);

    TrainConfig fc;
    fc.num_trees = static_cast<int>(r.u32());
    const auto mode = r.u8();
    if (mode > 1) throw std::runtime_error("model payload: unknown split-candidate mode");
    fc.features_per_split.mode = static_cast<SplitCandidates::Mode>(mode);
    fc.features_per_split.fraction = r.f64();
    fc.min_samples_to_split = static_cast<int>(r.u32());
    fc.max_depth = static_cast<int>(r.u32());
    fc.master_seed = r.u64();

    Model model;
    const auto num_classes = r.u32();
    if (num_classes == 0) throw std::runtime_error("model payload: no classes");
    model.class_names.reserve(num_classes);
    for (std::uint32_t i = 0; i < num_classes; ++i) model.class_names.push_back(r.str());

    const std::uint64_t num_features = r.u64();
    std::vector<FeatureColumn> schema;
    schema.reserve(num_features);
    for (std::uint64_t i = 0; i < num_features; ++i) {
        FeatureColumn col;
        const auto rep = r.u8();
        if (rep > 3) throw std::runtime_error("model payload: unknown representation id");
        col.representation = static_cast<RepresentationId>(rep);
        col.interval_begin = r.u32();
        col.interval_end = r.u32();
        col.quantile_index = r.u32();
        col.mean_subtracted = r.u8() != 0;
        schema.push_back(col);
    }

    // the transform is a pure function of (length, config); rebuild and check
    // the stored schema against it so stale or foreign files fail loudly
    model.transform = fit_transform(series_length, tc);
    if (model.transform.schema() != schema) {
        throw std::runtime_error("model payload: stored feature schema does not match the "
                                 "transform for this configuration");
    }

    model.forest.config = fc;
    model.forest.num_classes = num_classes;
    model.forest.num_features = num_features;
    const auto num_trees = r.u32();
    model.forest.trees.reserve(num_trees);
    for (std::uint32_t t = 0; t < num_trees; ++t) {
        Tree tree;
        const auto num_nodes = r.u32();
        tree.nodes.reserve(num_nodes);
        for (std::uint32_t i = 0; i < num_nodes; ++i) {
            Tree::Node node;
            node.feature = r.i32();
            node.threshold = r.f64();
            node.left = r.i32();
            node.right = r.i32();
            node.leaf = r.i32();
            tree.nodes.push_back(node);
        }
        const auto num_counts = r.u32();
        tree.leaf_counts.reserve(num_counts);
        for (std::uint32_t i = 0; i < num_counts; ++i) tree.leaf_counts.push_back(r.u32());
        if (tree.leaf_counts.size() % num_classes != 0) {
            throw std::runtime_error("model payload: leaf counts not a multiple of class count");
        }
        model.forest.trees.push_back(std::move(tree));
    }
    if (!r.done()) throw std::runtime_error("model payload: trailing bytes");
    return model;
}

} // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
    static const auto table = make_crc_table();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (const auto b : bytes) crc = table[(crc ^ b) & 0xFFu] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

void save_model(const std::filesystem::path& path, const Model& model) {
    ByteWriter payload;
    write_payload(payload, model);

    ByteWriter file;
    for (const char c : kMagic) file.u8(static_cast<std::uint8_t>(c));
    file.u32(kModelVersion);
    file.u64(payload.bytes().size());

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file " + path.string());
    out.write(reinterpret_cast<const char*>(file.bytes().data()),
              static_cast<std::streamsize>(file.bytes().size()));
    out.write(reinterpret_cast<const char*>(payload.bytes().data()),
              static_cast<std::streamsize>(payload.bytes().size()));
    const std::uint32_t checksum = crc32(payload.bytes());
    std::array<std::uint8_t, 4> tail;
    for (int i = 0; i < 4; ++i) tail[i] = static_cast<std::uint8_t>(checksum >> (8 * i));
    out.write(reinterpret_cast<const char*>(tail.data()), tail.size());
    if (!out) throw std::runtime_error("failed writing model file " + path.string());
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());

    constexpr std::size_t header_size = 4 + 4 + 8;
    if (bytes.size() < header_size) {
        throw std::runtime_error("truncated model file " + path.string());
    }
    if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
        throw std::runtime_error(path.string() + " is not a model file (bad magic bytes)");
    }

    const std::span<const std::uint8_t> all(bytes);
    ByteReader header(all.subspan(4, header_size - 4));
    const std::uint32_t version = header.u32();
    if (version != kModelVersion) {
        throw std::runtime_error("unsupported model version " + std::to_string(version) +
                                 " in " + path.string() + "; this build reads version " +
                                 std::to_string(kModelVersion));
    }
    const std::uint64_t payload_size = header.u64();
    if (bytes.size() != header_size + payload_size + 4) {
        throw std::runtime_error("truncated model file " + path.string());
    }

    const auto payload = all.subspan(header_size, payload_size);
    ByteReader tail(all.subspan(header_size + payload_size, 4));
    if (crc32(payload) != tail.u32()) {
        throw std::runtime_error("model file " + path.string() +
                                 " failed its checksum (corrupted file)");
    }

    ByteReader reader(payload);
    return read_payload(reader);
}

} // namespace quant
