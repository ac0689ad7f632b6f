#pragma once

#include <stdexcept>

namespace bellsim {

// Base class for all typed simulator errors.
struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid, out-of-domain, duplicated or unknown configuration input.
struct ConfigError : SimError {
    using SimError::SimError;
};

// A correlation was requested from a table holding zero coincidences.
// The caller must widen the window or increase the event count.
struct EmptyTableError : SimError {
    using SimError::SimError;
};

// A normalized state lost its normalization; signals corrupted state.
struct DegenerateStateError : SimError {
    using SimError::SimError;
};

} // namespace bellsim
