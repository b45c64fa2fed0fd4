// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#include "csv.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "error.hpp"

namespace hybridtess::csv {

std::vector<std::string> split(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string num(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    const auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && blank(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && blank(s.back())) {
        s.remove_suffix(1);
    }
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    require(res.ec == std::errc{} && res.ptr == s.data() + s.size() && !s.empty(), ErrorKind::Parse,
            "not a number: '" + std::string(s) + "'");
    return v;
}

namespace {

int digits(std::string_view s, std::size_t pos, std::size_t len) {
    require(pos + len <= s.size(), ErrorKind::Parse, "truncated timestamp '" + std::string(s) + "'");
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        require(s[i] >= '0' && s[i] <= '9', ErrorKind::Parse, "bad timestamp '" + std::string(s) + "'");
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

}  // namespace

std::int64_t parse_iso8601(std::string_view s) {
    while (!s.empty() && s.front() == ' ') {
        s.remove_prefix(1);
    }
    require(s.size() >= 19, ErrorKind::Parse, "bad timestamp '" + std::string(s) + "'");
    require(s[4] == '-' && s[7] == '-' && (s[10] == 'T' || s[10] == ' ') && s[13] == ':' && s[16] == ':',
            ErrorKind::Parse, "bad timestamp '" + std::string(s) + "'");
    using namespace std::chrono;
    const year_month_day ymd{year{digits(s, 0, 4)}, month{static_cast<unsigned>(digits(s, 5, 2))},
                             day{static_cast<unsigned>(digits(s, 8, 2))}};
    require(ymd.ok(), ErrorKind::Parse, "invalid date '" + std::string(s) + "'");
    const int hh = digits(s, 11, 2);
    const int mm = digits(s, 14, 2);
    const int ss = digits(s, 17, 2);
    require(hh < 24 && mm < 60 && ss < 61, ErrorKind::Parse, "invalid time '" + std::string(s) + "'");
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return static_cast<std::int64_t>(days) * 86400 + hh * 3600 + mm * 60 + ss;
}

std::string format_iso8601(std::int64_t utc_seconds) {
    using namespace std::chrono;
    std::int64_t days = utc_seconds / 86400;
    std::int64_t rem = utc_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                  static_cast<int>(rem / 60 % 60), static_cast<int>(rem % 60));
    return buf;
}

}  // namespace hybridtess::csv
