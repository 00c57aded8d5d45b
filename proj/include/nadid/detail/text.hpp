#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "nadid/error.hpp"

namespace nadid::detail {

/// Shortest round-trip decimal form of a double (same spelling everywhere:
/// CSV, JSON, and text reports must agree bit-for-bit).
inline std::string fmt_double(double x) {
    char buf[32];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == x) break;
    }
    return buf;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    for (auto& f : fields) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.pop_back();
    }
    return fields;
}

inline int parse_int(const std::string& text, const std::string& what, std::size_t line_no) {
    int value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ValidationError("line " + std::to_string(line_no) + ": cannot parse " + what +
                              " value '" + text + "' as an integer");
    }
    return value;
}

inline double parse_double(const std::string& text, const std::string& what,
                           std::size_t line_no) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ValidationError("line " + std::to_string(line_no) + ": cannot parse " + what +
                              " value '" + text + "' as a number");
    }
    return value;
}

}  // namespace nadid::detail
