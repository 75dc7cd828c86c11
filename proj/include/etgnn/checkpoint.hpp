#pragma once

#include "etgnn/types.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace etgnn {

struct NamedTensor {
    std::string name;
    Matrix value;
};

/// A set of named tensors plus string metadata.
///
/// Stored as two files: `<stem>.manifest` (text: header, `meta key value`
/// lines, `tensor name rows cols offset` lines) and `<stem>.bin` (raw
/// little-endian float64 payload, row-major, at the listed byte offsets).
struct TensorArchive {
    std::map<std::string, std::string> meta;
    std::vector<NamedTensor> tensors;

    const Matrix& tensor(const std::string& name) const;
};

void save_archive(const TensorArchive& archive, const std::filesystem::path& stem);
TensorArchive load_archive(const std::filesystem::path& stem);

std::filesystem::path manifest_path(const std::filesystem::path& stem);
std::filesystem::path payload_path(const std::filesystem::path& stem);

}  // namespace etgnn
