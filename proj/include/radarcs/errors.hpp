#pragma once

#include <stdexcept>
#include <string>

namespace radarcs {

// Bad inputs: configuration, dimensions, indices, parameter ranges.
// The CLI maps these to exit code 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : ValidationError {
    explicit ConfigError(const std::string& what) : ValidationError(what) {}
};

struct DimensionError : ValidationError {
    explicit DimensionError(const std::string& what) : ValidationError(what) {}
};

struct IndexError : ValidationError {
    explicit IndexError(const std::string& what) : ValidationError(what) {}
};

struct ParamError : ValidationError {
    explicit ParamError(const std::string& what) : ValidationError(what) {}
};

// Filesystem / decode failures. CLI exit code 3.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace radarcs
