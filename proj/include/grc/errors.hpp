#pragma once

#include <stdexcept>
#include <string>

namespace grc {

// Domain failure: the input graph/matrix violates a mathematical
// precondition (disconnected where connectivity is required, isolated
// nodes, dependent set, non-convergence, ...).
struct ComputeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File-level failure: missing file, malformed header, out-of-range ids.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace grc
