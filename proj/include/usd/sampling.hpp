// Exact-distribution discrete samplers (no normal approximations).
// Binomial draws use CDF inversion for small n*p and the BTPE
// acceptance-rejection algorithm (Kachitvichyanukul & Schmeiser 1988)
// otherwise; both are exact up to floating-point rounding.
#pragma once

#include <cstdint>

#include "usd/rng.hpp"

namespace usd {

// One draw from Binomial(n, p).
std::uint64_t binomial(Rng& rng, std::uint64_t n, double p);

}  // namespace usd
