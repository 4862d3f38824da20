#pragma once

#include <stdexcept>
#include <string>

namespace mfc {

/// Invalid configuration value (gains, periods, bounds, presets, file syntax).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A NaN or infinity reached a controller or estimator input.
class NonFiniteError : public std::domain_error {
public:
    explicit NonFiniteError(const std::string& what) : std::domain_error(what) {}
};

/// The plant state became non-finite; the scenario cannot continue.
class SimulationFault : public std::runtime_error {
public:
    explicit SimulationFault(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mfc
