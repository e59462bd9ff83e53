#pragma once

#include <stdexcept>
#include <string>

namespace sbw {

/// Invalid physical or filter parameter (violated invariant at construction).
class ParamError : public std::invalid_argument {
public:
    explicit ParamError(const std::string& what) : std::invalid_argument(what) {}
};

/// Matrix/vector dimension disagreement.
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerically singular innovation covariance or similar filter breakdown.
class FilterDegenerateError : public std::runtime_error {
public:
    explicit FilterDegenerateError(const std::string& what) : std::runtime_error(what) {}
};

/// Config file syntax, unknown key, or unparsable value.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0, std::string key = {})
        : std::runtime_error(what), line_number(line), key(std::move(key)) {}
    int line_number;
    std::string key;
};

/// File read/write failure, carries the offending path in the message.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Degenerate analysis input (zero signal, constant true signal, ...).
class AnalysisError : public std::invalid_argument {
public:
    explicit AnalysisError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace sbw
