#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "greenroute/error.hpp"

namespace greenroute::learn {

inline constexpr double kDefaultEpsilon = 3.0;

/// 100 (1 - |tv - pv| / tv), clamped to [0, 100]. The formula is undefined at
/// tv = 0; there a prediction within eps of zero scores 100, anything else 0.
inline double prediction_accuracy(double tv, double pv, double eps = kDefaultEpsilon) {
    if (!(tv >= 0.0)) throw ValidationError("true value must be >= 0");
    if (tv == 0.0) return std::abs(pv) <= eps ? 100.0 : 0.0;
    return std::clamp(100.0 * (1.0 - std::abs(tv - pv) / tv), 0.0, 100.0);
}

inline double size_reduction(std::size_t k, std::size_t n) {
    return 100.0 * (1.0 - static_cast<double>(k) / static_cast<double>(n));
}

/// Baseline-relative speedup for N energy-saving evaluations.
inline double speedup(std::size_t evaluations) {
    if (evaluations == 0) throw ValidationError("speedup needs at least one evaluation");
    return 100.0 / static_cast<double>(evaluations);
}

}  // namespace greenroute::learn
