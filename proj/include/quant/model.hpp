#pragma once

#include "quant/forest.hpp"
#include "quant/transform.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace quant {

/// Everything needed to reproduce predictions: the fitted transform, the
/// trained forest, and the class-id -> label-string table.
struct Model {
    FittedTransform transform;
    Forest forest;
    std::vector<std::string> class_names;
};

inline constexpr std::uint32_t kModelVersion = 1;

/// Binary model file: magic "QNT1", version, length-prefixed payload, CRC-32
/// of the payload. Byte layout documented in docs/model-format.md.
void save_model(const std::filesystem::path& path, const Model& model);

/// Errors distinguish bad magic, unsupported version, truncation, and
/// checksum mismatch. load(save(m)) reproduces predictions bit-exactly.
Model load_model(const std::filesystem::path& path);

/// IEEE CRC-32 (reflected, polynomial 0xEDB88320) as used by the model file.
std::uint32_t crc32(std::span<const std::uint8_t> bytes);

} // namespace quant
