#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace maat {

/// SHA-256 as a lowercase hex string.
std::string sha256_hex(std::string_view data);

/// SHA-256 of a file's contents; throws IoError if the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace maat
