// SPDX-License-Identifier: Apache-2.0
#include "dynmod/io.hpp"

#include "dynmod/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dynmod::io {

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw io_error("read failed on '" + path.string() + "'");
    }
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw io_error("cannot open '" + path.string() + "' for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
        throw io_error("write failed on '" + path.string() + "'");
    }
}

std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

bool parse_double(std::string_view field, double& out)
{
    field = trim(field);
    if (field.empty()) {
        return false;
    }
    if (field == "inf" || field == "+inf") {
        out = INFINITY;
        return true;
    }
    if (field == "-inf") {
        out = -INFINITY;
        return true;
    }
    if (field == "nan") {
        out = NAN;
        return true;
    }
    const char* first = field.data();
    if (*first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, field.data() + field.size(), out);
    return ec == std::errc() && ptr == field.data() + field.size();
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        std::size_t next = line.find(sep, pos);
        if (next == std::string_view::npos) {
            parts.push_back(line.substr(pos));
            return parts;
        }
        parts.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
}

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

} // namespace dynmod::io
