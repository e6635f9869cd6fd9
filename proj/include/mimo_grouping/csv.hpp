// SPDX-License-Identifier: Apache-2.0
//
// mimo-grouping: directional node grouping for massive MIMO
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

// Minimal RFC 4180 reader and writer.

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mimo_grouping::csv {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

inline std::string quote(std::string_view field)
{
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        out << quote(fields[i]);
    }
    out << "\r\n";
}

/// Shortest round-trip decimal; empty for NaN.
inline std::string number(double x)
{
    if (std::isnan(x)) {
        return {};
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return ec == std::errc{} ? std::string(buf, end) : std::string{};
}

struct Record {
    std::size_t line = 0; ///< 1-based line on which the record starts
    std::vector<std::string> fields;
};

/// Splits a whole document into records. Accepts LF or CRLF line endings.
inline std::vector<Record> parse(std::string_view text)
{
    std::vector<Record> records;
    std::size_t line = 1;
    std::size_t i = 0;
    while (i < text.size()) {
        Record rec;
        rec.line = line;
        std::string field;
        bool in_quotes = false;
        bool quoted_field = false;
        bool done = false;
        while (!done) {
            if (i >= text.size()) {
                if (in_quotes) {
                    throw ParseError(rec.line, "unterminated quoted field");
                }
                rec.fields.push_back(std::move(field));
                break;
            }
            const char c = text[i++];
            if (in_quotes) {
                if (c == '"') {
                    if (i < text.size() && text[i] == '"') {
                        field += '"';
                        ++i;
                    } else {
                        in_quotes = false;
                    }
                } else {
                    if (c == '\n') {
                        ++line;
                    }
                    field += c;
                }
                continue;
            }
            switch (c) {
            case '"':
                if (!field.empty() || quoted_field) {
                    throw ParseError(line, "quote inside unquoted field");
                }
                in_quotes = true;
                quoted_field = true;
                break;
            case ',':
                rec.fields.push_back(std::move(field));
                field.clear();
                quoted_field = false;
                break;
            case '\r':
                if (i < text.size() && text[i] == '\n') {
                    ++i;
                }
                [[fallthrough]];
            case '\n':
                rec.fields.push_back(std::move(field));
                ++line;
                done = true;
                break;
            default:
                if (quoted_field) {
                    throw ParseError(line, "characters after closing quote");
                }
                field += c;
            }
        }
        if (!(rec.fields.size() == 1 && rec.fields[0].empty())) {
            records.push_back(std::move(rec));
        }
    }
    return records;
}

inline double to_double(const std::string& s, std::size_t line, std::string_view column)
{
    if (s.empty()) {
        return std::nan("");
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(line, "column " + std::string(column) + ": '" + s + "' is not a number");
    }
    return v;
}

inline std::uint64_t to_uint(const std::string& s, std::size_t line, std::string_view column)
{
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(line, "column " + std::string(column) + ": '" + s + "' is not an unsigned integer");
    }
    return v;
}

} // namespace mimo_grouping::csv
