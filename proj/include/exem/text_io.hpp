#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace exem {

std::vector<std::string> read_lines(const std::filesystem::path& path);

// Writes to "<path>.partial" and renames into place, so an interrupted run
// never leaves a truncated file behind under the final name.
void write_text_atomic(const std::filesystem::path& path, std::string_view text);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_whitespace(std::string_view s);
std::vector<std::string_view> split_on(std::string_view s, char sep);

// Shortest round-trip decimal form (std::to_chars), so rewriting a file from
// parsed values reproduces it byte for byte.
std::string format_double(double value);

double parse_double(std::string_view text, std::string_view what);
std::uint64_t parse_u64(std::string_view text, std::string_view what);

}  // namespace exem
