#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gridseer {

// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(const std::uint8_t* data, std::size_t len);
std::string sha256_hex(const std::vector<std::uint8_t>& data);
std::string sha256_hex(const std::string& data);

}  // namespace gridseer
