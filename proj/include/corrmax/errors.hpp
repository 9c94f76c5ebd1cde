#pragma once

#include <stdexcept>

namespace corrmax {

// Zero-variance columns and similar data degeneracies (CLI exit 3).
struct DegenerateDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A Monte Carlo routine declined to produce an estimate it cannot back
// statistically, e.g. too few expected hits (CLI exit 5).
struct RefusalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace corrmax
