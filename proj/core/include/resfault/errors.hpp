#pragma once

#include <stdexcept>

namespace resfault {

// Bad input (missing file, unreadable repository, malformed config);
// maps to exit code 1 in the CLI. Anything else is exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace resfault
