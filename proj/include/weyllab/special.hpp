#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "errors.hpp"

namespace weyllab {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Volume of the unit ball in R^n.
inline double sigma_n(int n)
{
    if (n < 1) throw DomainError("sigma_n: dimension must be >= 1");
    const double h = 0.5 * n;
    return 2.0 * std::pow(pi, h) / (n * std::tgamma(h));
}

// Weyl constant sigma_n / (2 pi)^n.
inline double weyl_constant(int n) { return sigma_n(n) / std::pow(two_pi, n); }

// vol(S^n) = (n+1) sigma_{n+1}.
inline double sphere_volume(int n) { return (n + 1) * sigma_n(n + 1); }

// Dimension of degree-k spherical harmonics on S^n:
// (2k+n-1)(k+n-2)! / (k!(n-1)!).
inline std::uint64_t sphere_multiplicity(std::int64_t k, int n)
{
    if (k == 0) return 1;
    // C(k+n-2, n-2), built incrementally so every intermediate is an integer.
    unsigned __int128 c = 1;
    for (int i = 1; i <= n - 2; ++i) c = c * static_cast<unsigned __int128>(k + i) / static_cast<unsigned __int128>(i);
    const unsigned __int128 m = c * static_cast<unsigned __int128>(2 * k + n - 1) / static_cast<unsigned __int128>(n - 1);
    if (m > static_cast<unsigned __int128>(UINT64_MAX)) throw ResourceError("sphere multiplicity overflows 64 bits");
    return static_cast<std::uint64_t>(m);
}

// Gegenbauer C_k^alpha(t) normalized by C_k^alpha(1), by the three-term recurrence
// (k+1) C_{k+1} = 2(k+alpha) t C_k - (k+2alpha-1) C_{k-1}.
inline double gegenbauer_normalized(std::int64_t k, double alpha, double t)
{
    if (k == 0) return 1.0;
    // Divide by C_j(1) on the fly: with R_j = C_j(t)/C_j(1) and
    // C_{j+1}(1)/C_j(1) = (j+2alpha)/(j+1) the recurrence stays O(1).
    double rm1 = 1.0, r = t;
    for (std::int64_t j = 1; j < k; ++j) {
        const double jj = static_cast<double>(j);
        const double a = 2.0 * (jj + alpha) / (jj + 2.0 * alpha);
        const double b = jj / (jj + 2.0 * alpha);
        const double rp1 = a * t * r - b * rm1;
        rm1 = r;
        r = rp1;
    }
    return r;
}

} // namespace weyllab
