#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace afmpi {

/// 64-bit FNV-1a. Used for content fingerprints in run manifests, not for
/// anything security-related.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string to_hex(std::uint64_t value);

std::string read_file(const std::filesystem::path &path);
std::uint64_t file_digest(const std::filesystem::path &path);

} // namespace afmpi
