#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rotfactor/point.hpp"

namespace rotfactor {

// coeffs . y <= bound, over real y in R^n (n <= kMaxDim).
struct LinearInequality {
    std::array<std::int64_t, kMaxDim> coeffs{};
    std::int64_t bound = 0;
};

// coeffs . y == value.
struct LinearEquation {
    std::array<std::int64_t, kMaxDim> coeffs{};
    std::int64_t value = 0;
};

// Decides whether a closed system of linear constraints with integer data has
// a real solution, by exact Fourier-Motzkin elimination. Rows are kept
// integral and primitive; parallel rows are merged keeping the tighter bound.
// Throws ArithmeticOverflow if an intermediate row leaves the 64-bit range.
bool is_feasible(std::span<const LinearInequality> inequalities, std::span<const LinearEquation> equations,
                 int num_vars);

} // namespace rotfactor
