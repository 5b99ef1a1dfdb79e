// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dynmod::io {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Shortest representation that parses back to the same double.
std::string format_double(double v);

// Parses a whole field as a double; accepts "inf", "-inf", "nan".
bool parse_double(std::string_view field, double& out);

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

} // namespace dynmod::io
