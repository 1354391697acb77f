#pragma once

#include <cstdint>
#include <string>

namespace flexgrid {

// SHA-256 digest as a lowercase hex string (FIPS 180-4).
std::string sha256_hex(const std::string& data);

}  // namespace flexgrid
