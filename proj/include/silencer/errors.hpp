#ifndef SILENCER_ERRORS_HPP
#define SILENCER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace silencer {

// Bad input: malformed files, out-of-range parameters, shape mismatches.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Solver blew up: NaN/Inf in a factor matrix, degenerate objective.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace silencer

#endif
