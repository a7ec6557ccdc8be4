#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace sislab {

/// Short numeric text for error messages (%.6g).
inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Malformed input: expression syntax, bad configuration values, invalid
/// mesh parameters. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public ConfigError {
public:
    ParseError(const std::string& what, std::size_t offset)
        : ConfigError(what + " at byte " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// A numerical method failed to converge or hit a singular system.
/// Maps to CLI exit code 3.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A mathematical hypothesis required by a limit problem does not hold for the
/// supplied data (e.g. q = 0 for a problem that needs advection).
class HypothesisError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// A computed quantity broke an invariant it must satisfy (positivity, mass
/// identity, ...). Maps to CLI exit code 4.
class InvariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sislab
