#pragma once

#include <stdexcept>

namespace inertial {

// Vector/matrix extents disagree with the game's action count.
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A point failed simplex membership beyond tolerance.
struct SimplexViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A point's total mass does not match the game's.
struct MassMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Finite-difference stencil would leave the nonnegative orthant.
struct StepTooLarge : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A redistribution policy emitted more outflow than the available mass.
struct BoundViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Operation requires per-action utilities u_i(x_i).
struct NonSeparable : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Reserved for utility families without a closed-form slope bound.
struct UnboundedSlope : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Minimum off-diagonal switching cost is zero; step-size rules divide by it.
struct ZeroCMin : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// All utilities are flat; step-size rules divide by the Lipschitz bound.
struct ZeroLipschitz : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidGraph : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidSpec : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed input file (JSON or CSV).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace inertial
