#pragma once

#include <stdexcept>
#include <string>

namespace spin7 {

/// Input outside the domain of a formula (nonpositive metric coefficient,
/// parameter out of range, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A matrix (h.lambda) Id - dPhi that must be inverted while refining a
/// generalised power series is (numerically) singular.
class ResonanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integrator gave up (step size underflow) or another numerical failure.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A trajectory converged to a fixed point that the family cannot reach.
class AnomalyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Horizon exhausted before the trajectory was classified.
class UndecidedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace spin7
