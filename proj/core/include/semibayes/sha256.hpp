#pragma once

#include <cstdint>
#include <string>

namespace semibayes {

// FIPS 180-4 SHA-256; used for the RunManifest input digests.
std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& s);
std::string sha256_file_hex(const std::string& path);  // throws invalid_input on I/O failure

}  // namespace semibayes
