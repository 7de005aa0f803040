#pragma once

#include <stdexcept>
#include <string>

namespace penreg {

// Base class for numerical/domain failures. The CLI maps these to exit
// code 3; malformed input and usage problems are reported separately.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteError : Error {
    NonFiniteError() : Error("input contains non-finite values") {}
};

struct ZeroVarianceColumn : Error {
    explicit ZeroVarianceColumn(int col)
        : Error("column " + std::to_string(col) + " has zero variance"), column(col) {}
    int column;
};

struct SingularGram : Error {
    SingularGram() : Error("X'X is numerically singular") {}
};

struct DegenerateTrace : Error {
    DegenerateTrace() : Error("GCV trace is degenerate (n <= p with lambda = 0)") {}
};

struct IterationLimit : Error {
    explicit IterationLimit(int sweeps_)
        : Error("solver hit the sweep cap (" + std::to_string(sweeps_) + ")"), sweeps(sweeps_) {}
    int sweeps;
};

struct InvalidGamma : Error {
    using Error::Error;
};

struct FoldTooSmall : Error {
    FoldTooSmall() : Error("a cross-validation fold has fewer than 2 observations") {}
};

struct EmptyGroup : Error {
    EmptyGroup() : Error("cannot aggregate an empty group of records") {}
};

}  // namespace penreg
