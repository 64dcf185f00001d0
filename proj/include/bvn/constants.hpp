#pragma once

// Frozen numeric tolerances. Internal consistency checks and the test
// suites all read from this table; nothing else may restate these values.

namespace bvn::tol {

inline constexpr double pmf_normalization = 1e-9;   // mass-function sums over full support vs 1
inline constexpr double pmf_pointwise     = 1e-10;  // pointwise identities between mass functions
inline constexpr double algebraic         = 1e-12;  // closed-form algebraic identities
inline constexpr double dual_form_gamma   = 1e-10;  // simplified vs full-likelihood Gibbs conditional
inline constexpr double support_epsilon   = 1e-12;  // clamp distance from open-support endpoints

}  // namespace bvn::tol
