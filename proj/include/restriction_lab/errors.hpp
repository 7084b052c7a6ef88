#pragma once

#include <stdexcept>
#include <string>

namespace restriction_lab {

/// Raised when a numerical routine cannot reach its stated resolution
/// (panel budget exhausted, sampling step too coarse, aliasing, ...).
class resolution_error : public std::runtime_error {
public:
    explicit resolution_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an experiment's verification predicate fails.
class invariant_violation : public std::runtime_error {
public:
    explicit invariant_violation(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent experiment configuration.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace restriction_lab
