#pragma once

#include <stdexcept>
#include <string>

namespace uwr {

// Bad or inconsistent input: missing files, dimension mismatches, invalid values.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A numeric routine failed: non-finite objective, diverging optimization.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace uwr
