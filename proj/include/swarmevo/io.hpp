#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace swarmevo::io {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

double parse_double(std::string_view token);
std::uint64_t parse_u64(std::string_view token);

/// Splits on runs of spaces/tabs.
std::vector<std::string_view> split_fields(std::string_view line);

std::string join(std::span<const double> values, char sep);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

std::string read_text(const std::filesystem::path& path);

/// Opens for writing and throws std::runtime_error when that fails.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace swarmevo::io
