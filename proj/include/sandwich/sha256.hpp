#pragma once

#include <string>
#include <string_view>

namespace sandwich::io {

// SHA-256 digest as lowercase hex; used to fingerprint input files in run
// reports.
std::string sha256_hex(std::string_view data);
std::string sha256_hex_file(const std::string& path);

}  // namespace sandwich::io
