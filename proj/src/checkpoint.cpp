#include "etgnn/checkpoint.hpp"

#include "etgnn/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace etgnn {

namespace {

constexpr const char* kHeader = "etgnn-tensor-archive 1";

std::uint64_t to_little_endian(std::uint64_t bits) {
    if constexpr (std::endian::native == std::endian::little) {
        return bits;
    } else {
        std::uint64_t out = 0;
        for (int i = 0; i < 8; ++i) {
            out = (out << 8) | ((bits >> (8 * i)) & 0xffU);
        }
        return out;
    }
}

}  // namespace

std::filesystem::path manifest_path(const std::filesystem::path& stem) {
    return std::filesystem::path(stem.string() + ".manifest");
}

std::filesystem::path payload_path(const std::filesystem::path& stem) {
    return std::filesystem::path(stem.string() + ".bin");
}

const Matrix& TensorArchive::tensor(const std::string& name) const {
    for (const auto& t : tensors) {
        if (t.name == name) {
            return t.value;
        }
    }
    throw SchemaError("archive has no tensor named '" + name + "'");
}

void save_archive(const TensorArchive& archive, const std::filesystem::path& stem) {
    std::ofstream manifest(manifest_path(stem), std::ios::binary);
    std::ofstream payload(payload_path(stem), std::ios::binary);
    if (!manifest || !payload) {
        throw IoError("cannot write checkpoint '" + stem.string() + "'");
    }
    manifest << kHeader << '\n';
    for (const auto& [key, value] : archive.meta) {
        if (key.find_first_of(" \t\n") != std::string::npos || value.find('\n') != std::string::npos) {
            throw ValidationError("checkpoint meta entry '" + key + "' contains whitespace or newlines");
        }
        manifest << "meta " << key << ' ' << value << '\n';
    }
    std::uint64_t offset = 0;
    for (const auto& t : archive.tensors) {
        manifest << "tensor " << t.name << ' ' << t.value.rows() << ' ' << t.value.cols() << ' ' << offset << '\n';
        for (Index i = 0; i < t.value.size(); ++i) {
            const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(t.value.data()[i]));
            payload.write(reinterpret_cast<const char*>(&bits), sizeof bits);
        }
        offset += static_cast<std::uint64_t>(t.value.size()) * sizeof(double);
    }
    if (!manifest || !payload) {
        throw IoError("write failed for checkpoint '" + stem.string() + "'");
    }
}

TensorArchive load_archive(const std::filesystem::path& stem) {
    std::ifstream manifest(manifest_path(stem));
    std::ifstream payload(payload_path(stem), std::ios::binary);
    if (!manifest || !payload) {
        throw IoError("cannot open checkpoint '" + stem.string() + "'");
    }
    std::string line;
    if (!std::getline(manifest, line) || line != kHeader) {
        throw SchemaError("'" + manifest_path(stem).string() + "' is not a tensor archive manifest");
    }
    TensorArchive archive;
    while (std::getline(manifest, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string kind;
        row >> kind;
        if (kind == "meta") {
            std::string key;
            row >> key;
            std::string value;
            std::getline(row >> std::ws, value);
            archive.meta[key] = value;
        } else if (kind == "tensor") {
            NamedTensor t;
            Index rows = 0;
            Index cols = 0;
            std::uint64_t offset = 0;
            if (!(row >> t.name >> rows >> cols >> offset) || rows < 0 || cols < 0) {
                throw SchemaError("malformed manifest line: " + line);
            }
            t.value.resize(rows, cols);
            payload.seekg(static_cast<std::streamoff>(offset));
            for (Index i = 0; i < t.value.size(); ++i) {
                std::uint64_t bits = 0;
                payload.read(reinterpret_cast<char*>(&bits), sizeof bits);
                t.value.data()[i] = std::bit_cast<double>(to_little_endian(bits));
            }
            if (!payload) {
                throw SchemaError("checkpoint payload truncated at tensor '" + t.name + "'");
            }
            archive.tensors.push_back(std::move(t));
        } else {
            throw SchemaError("malformed manifest line: " + line);
        }
    }
    return archive;
}

}  // namespace etgnn
