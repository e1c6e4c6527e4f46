#pragma once

#include <stdexcept>
#include <string>

namespace fpc {

/// Field/path length does not match the grid it is paired with.
class DimensionMismatch : public std::invalid_argument {
public:
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// Advective CFL bound dt*max|b|/dx > 1 violated.
class CflViolation : public std::runtime_error {
public:
    explicit CflViolation(const std::string& what) : std::runtime_error(what) {}
};

class SingularTridiagonal : public std::runtime_error {
public:
    explicit SingularTridiagonal(const std::string& what) : std::runtime_error(what) {}
};

/// Pushforward shift |sigma0 * W_t| exceeds the configured domain margin.
class ShiftOutOfDomain : public std::runtime_error {
public:
    explicit ShiftOutOfDomain(const std::string& what) : std::runtime_error(what) {}
};

/// Perturbed control gamma + eps*h leaves the control set G.
class InadmissiblePerturbation : public std::invalid_argument {
public:
    explicit InadmissiblePerturbation(const std::string& what) : std::invalid_argument(what) {}
};

class TimeGridMismatch : public std::invalid_argument {
public:
    explicit TimeGridMismatch(const std::string& what) : std::invalid_argument(what) {}
};

class NegativeInput : public std::invalid_argument {
public:
    explicit NegativeInput(const std::string& what) : std::invalid_argument(what) {}
};

class ControlOutOfRange : public std::invalid_argument {
public:
    explicit ControlOutOfRange(const std::string& what) : std::invalid_argument(what) {}
};

class SolverFailure : public std::runtime_error {
public:
    explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fpc
