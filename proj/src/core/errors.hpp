#pragma once

#include <stdexcept>
#include <string>

namespace narxprune {

// Malformed or inconsistent input data (files, series, manifests).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: rank exhaustion, singular designs, divergence.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem failure while reading or writing artifacts.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace narxprune
