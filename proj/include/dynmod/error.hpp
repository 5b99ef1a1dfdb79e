// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dynmod {

// Base for every error raised by the library. Messages carry enough context
// (parameter name, path, line number) to be shown to a user verbatim.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class invalid_parameter : public error {
public:
    using error::error;
};

class out_of_range : public error {
public:
    using error::error;
};

class degenerate_antenna : public error {
public:
    using error::error;
};

class unsteerable_angle : public error {
public:
    using error::error;
};

class length_mismatch : public error {
public:
    using error::error;
};

class io_error : public error {
public:
    using error::error;
};

class parse_error : public error {
public:
    parse_error(const std::string& source, std::size_t line, const std::string& what)
        : error(source + ":" + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace dynmod
