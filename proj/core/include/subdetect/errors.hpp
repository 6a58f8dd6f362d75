#pragma once

#include <stdexcept>
#include <string>

namespace subdetect {

/// Bad or inconsistent user input (config files, CLI values). CLI exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Scenario cannot be run as requested (solver failure, enumeration budget,
/// band too small). CLI exit code 3.
class infeasible_error : public std::runtime_error {
public:
    explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace subdetect
