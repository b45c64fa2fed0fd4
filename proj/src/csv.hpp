// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hybridtess::csv {

/// Split one RFC-4180 record (no embedded newlines).
std::vector<std::string> split(std::string_view line);

/// Quote a field if it contains a comma, quote or newline.
std::string escape(std::string_view field);

/// Shortest round-trip formatting of a double.
std::string num(double v);

double parse_double(std::string_view s);

/// `YYYY-MM-DD[T ]HH:MM:SS[.fff][Z]` as UTC seconds since the epoch.
std::int64_t parse_iso8601(std::string_view s);

/// `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_iso8601(std::int64_t utc_seconds);

}  // namespace hybridtess::csv
