#pragma once

#include <stdexcept>
#include <string>

namespace fdtwrc {

/// Loop gain |w^H H_RR v| at or above the stability limit.
struct LoopUnstableError : std::runtime_error {
    explicit LoopUnstableError(const std::string& what) : std::runtime_error(what) {}
};

struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

struct DimensionMismatchError : std::invalid_argument {
    explicit DimensionMismatchError(const std::string& what) : std::invalid_argument(what) {}
};

/// A required null space is empty or a projection collapsed to rank zero.
struct RankDeficientError : std::runtime_error {
    explicit RankDeficientError(const std::string& what) : std::runtime_error(what) {}
};

/// A closed-form scaling step has no positive solution along its direction.
struct InfeasibleDirectionError : std::runtime_error {
    explicit InfeasibleDirectionError(const std::string& what) : std::runtime_error(what) {}
};

/// A beamforming direction is numerically zero where a nonzero one is required.
struct DegenerateDirectionError : std::runtime_error {
    explicit DegenerateDirectionError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fdtwrc
