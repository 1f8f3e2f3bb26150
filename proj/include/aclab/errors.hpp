#pragma once

#include <stdexcept>
#include <string>

namespace aclab {

// Exit-code mapping used by the CLI: config errors -> 2, capacity errors -> 3,
// numerical failures -> 4. Library code throws; only the CLI translates.

struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct capacity_error : std::runtime_error {
    explicit capacity_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg, double condition = 0.0)
        : std::runtime_error(msg), condition_estimate(condition) {}
    double condition_estimate;
};

}  // namespace aclab
