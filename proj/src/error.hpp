// Copyright 2026 The hybridtess Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace hybridtess {

enum class ErrorKind {
    Domain,           ///< argument outside an operation's precondition
    Parse,            ///< malformed textual input (geohash, CSV field, timestamp)
    UndefinedMetric,  ///< metric has no value for the given inputs (0/0)
    Io,
    Config,
    Data,
    Numeric,
};

inline const char* kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Domain:
            return "domain";
        case ErrorKind::Parse:
            return "parse";
        case ErrorKind::UndefinedMetric:
            return "undefined_metric";
        case ErrorKind::Io:
            return "io";
        case ErrorKind::Config:
            return "config";
        case ErrorKind::Data:
            return "data";
        case ErrorKind::Numeric:
            return "numeric";
    }
    return "unknown";
}

/// Single exception type for the core; the C API maps `kind()` onto status codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) {
        fail(kind, what);
    }
}

}  // namespace hybridtess
