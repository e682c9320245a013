#pragma once

#include <stdexcept>
#include <string>

namespace remaug {

/// Invalid user input: bad configuration, malformed files, violated preconditions.
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure: divergence, singular systems, non-finite intermediates.
class ComputeError : public std::runtime_error {
public:
    explicit ComputeError(const std::string& what) : std::runtime_error(what) {}
};

/// Target lies outside the convex hull of the sample locations.
class OutsideHull : public ComputeError {
public:
    explicit OutsideHull(const std::string& what) : ComputeError(what) {}
};

}  // namespace remaug
