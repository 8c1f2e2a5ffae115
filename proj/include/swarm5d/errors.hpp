// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace swarm5d {

/// Invalid value passed to a library call (bad length, out-of-range count, ...).
class InvalidArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Waveform does not fit into the fast-time grid of one PRI.
class WaveformOverrunError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Target range reached zero (or below) inside the simulated interval.
class TargetOverrunError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Spherical angles are undefined (conversion of the origin).
class UndefinedAnglesError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Array/cube dimensions do not match what an operation requires.
class DimensionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bin or element index outside the valid range.
class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Configuration file problem. Carries the offending key where known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(key.empty() ? message : key + ": " + message),
          key_(std::move(key)) {}
    explicit ConfigError(const std::string& message) : ConfigError("", message) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Failure inside a processing stage (named in the message).
class ProcessingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace swarm5d
