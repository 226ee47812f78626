#pragma once

#include "cathsim/rod/cosserat.hpp"

namespace cathsim::rod::detail {

// Damped Newton on the six base strains with a forward-difference Jacobian.
// The base node has p = 0, R = I, q = w = 0.
RodState shoot(const RodParams &params, const BdfCoeffs &coeffs, std::span<const HistoryTerms> history,
               const TipLoad &load, const Vec6 &guess);

} // namespace cathsim::rod::detail
