#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polyreg {

// Error taxonomy shared by all modules.  The CLI maps these onto exit codes:
// ConfigError -> 1 (usage / configuration), DataError -> 2 (malformed or
// inconsistent input data), NumericalError -> 3 (numerical failure).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A symmetric matrix failed its factorization pivot test.  `pivot` is the
// zero-based diagonal index at which elimination broke down.
struct NotPositiveDefinite : NumericalError {
    NotPositiveDefinite(const std::string& what, std::size_t pivot_index)
        : NumericalError(what), pivot(pivot_index) {}
    std::size_t pivot;
};

// Point cloud spans an affine subspace of too low a dimension for the
// requested operation.  `rank` is the affine rank actually found.
struct DegenerateInput : NumericalError {
    DegenerateInput(const std::string& what, std::size_t rank_found)
        : NumericalError(what), rank(rank_found) {}
    std::size_t rank;
};

// Structured refusal: hull construction is capped at a fixed dimension.
struct DimensionTooHigh : ConfigError {
    DimensionTooHigh(const std::string& what, std::size_t dimension, std::size_t limit_)
        : ConfigError(what), dim(dimension), limit(limit_) {}
    std::size_t dim;
    std::size_t limit;
};

// Iterative routine exceeded its iteration budget.
struct NumericalStall : NumericalError {
    NumericalStall(const std::string& what, std::size_t iteration_count)
        : NumericalError(what), iterations(iteration_count) {}
    std::size_t iterations;
};

// A rolling score window was used before any score was pushed.
struct EmptyWindow : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace polyreg
