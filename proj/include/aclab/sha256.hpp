#pragma once

#include <cstdint>
#include <string>

namespace aclab {

// Minimal SHA-256 (FIPS 180-4); used for config digests and output content
// hashes in run manifests.
std::string sha256_hex(const void* data, std::size_t len);
inline std::string sha256_hex(const std::string& s) { return sha256_hex(s.data(), s.size()); }

}  // namespace aclab
