// Probability lower bounds for computing the homology of nodal domains
// correctly on an M-grid, and the scaling laws for trigonometric polynomials.
//
// Moments are in integer-frequency units (A_l = sum k^(2l) a_k^2); the factors
// of pi and L come from differentiating cos(2 pi k x / L).
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "nodal/random_fields.hpp"

namespace nodal {

struct BoundResult {
    double bound = 0.0;
    std::map<std::string, double> constants;
    std::size_t M = 0;
    bool leading_only = false;  // an O(1/M^3) remainder is dropped

    bool vacuous() const noexcept { return bound <= 0.0; }
};

namespace detail {

inline void require_M(std::size_t M) {
    if (M < 1) throw std::invalid_argument("M must be at least 1");
}

inline double m2(std::size_t M) { return static_cast<double>(M) * static_cast<double>(M); }

}  // namespace detail

/// (A0 A2 - A1^2) / (A0^(3/2) A1^(1/2)).
inline double moment_ratio_1d(const SpectralMoments1D& m) {
    const double A0 = m[0], A1 = m[1], A2 = m[2];
    const double gap = A0 * A2 - A1 * A1;
    if (!(A0 > 0.0 && A1 > 0.0 && gap > 0.0))
        throw std::invalid_argument("moments need A0 > 0, A1 > 0 and A0 A2 > A1^2");
    return gap / (std::pow(A0, 1.5) * std::sqrt(A1));
}

/// (A20 + A11 + A02)^2 / sqrt(A00 A01 A10 A11).
inline double moment_ratio_2d(const SpectralMoments2D& m) {
    const double den = m.at(0, 0) * m.at(0, 1) * m.at(1, 0) * m.at(1, 1);
    if (!(den > 0.0)) throw std::invalid_argument("moments A00, A01, A10, A11 must be positive");
    const double s = m.at(2, 0) + m.at(1, 1) + m.at(0, 2);
    return s * s / std::sqrt(den);
}

inline double c0_periodic(const SpectralMoments1D& m, double L) {
    detail::require_domain_length(L);
    return std::numbers::pi * std::numbers::pi / (16.0 * L * L * L) * moment_ratio_1d(m);
}

/// 1 - 8 C0 (b - a)^3 / (3 M^2).
inline BoundResult bound_1d_generic(double C0, double length, std::size_t M) {
    if (!(C0 > 0.0)) throw std::invalid_argument("C0 must be positive");
    if (!(length > 0.0)) throw std::invalid_argument("interval length must be positive");
    detail::require_M(M);
    BoundResult b;
    b.M = M;
    b.constants = {{"C0", C0}, {"length", length}};
    b.bound = 1.0 - 8.0 * C0 * length * length * length / (3.0 * detail::m2(M));
    return b;
}

/// Leading term 1 - (pi^2 / 6 M^2) * ratio.
inline BoundResult bound_1d_periodic(const SpectralMoments1D& m, std::size_t M) {
    detail::require_M(M);
    const double ratio = moment_ratio_1d(m);
    BoundResult b;
    b.M = M;
    b.leading_only = true;
    b.constants = {{"ratio", ratio}};
    b.bound = 1.0 - std::numbers::pi * std::numbers::pi / (6.0 * detail::m2(M)) * ratio;
    return b;
}

struct C1C2 {
    double C1 = 0.0;
    double C2 = 0.0;
};

inline C1C2 c1_c2_periodic(const SpectralMoments2D& m, double L) {
    detail::require_domain_length(L);
    const double X = moment_ratio_2d(m);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return {41.0 * pi2 / (12.0 * L * L * L) * X, 115.0 * pi2 / (24.0 * L * L * L * L) * X};
}

/// 1 - (24 C1 L^3 + 20 C2 L^4) / (3 M^2).
inline BoundResult bound_2d_generic(double C1, double C2, double L, std::size_t M) {
    if (!(C1 >= 0.0 && C2 >= 0.0)) throw std::invalid_argument("C1 and C2 must be nonnegative");
    detail::require_domain_length(L);
    detail::require_M(M);
    BoundResult b;
    b.M = M;
    b.constants = {{"C1", C1}, {"C2", C2}};
    b.bound = 1.0 - (24.0 * C1 * L * L * L + 20.0 * C2 * L * L * L * L) / (3.0 * detail::m2(M));
    return b;
}

/// Leading term 1 - (1067 pi^2 / 18 M^2) * X.
inline BoundResult bound_2d_periodic(const SpectralMoments2D& m, std::size_t M) {
    detail::require_M(M);
    const double X = moment_ratio_2d(m);
    BoundResult b;
    b.M = M;
    b.leading_only = true;
    b.constants = {{"ratio", X}};
    b.bound = 1.0 - 1067.0 * std::numbers::pi * std::numbers::pi / (18.0 * detail::m2(M)) * X;
    return b;
}

/// Periodic boundary conditions: only interior-type squares, 1 - 4 C2 L^4 / M^2.
inline BoundResult bound_2d_torus(double C2, double L, std::size_t M) {
    if (!(C2 > 0.0)) throw std::invalid_argument("C2 must be positive");
    detail::require_domain_length(L);
    detail::require_M(M);
    BoundResult b;
    b.M = M;
    b.constants = {{"C2", C2}};
    b.bound = 1.0 - 4.0 * C2 * L * L * L * L / detail::m2(M);
    return b;
}

/// Moment ratio of the degree-N trigonometric polynomial in closed form.
inline double closed_form_scaling(int dim, std::size_t N) {
    if (N < 2) throw std::invalid_argument("N must be at least 2");
    const double n = static_cast<double>(N);
    if (dim == 1) return std::sqrt(6.0) / 180.0 * (n - 1.0) * (8.0 * n + 11.0) * std::sqrt((n + 1.0) * (2.0 * n + 1.0));
    if (dim == 2) {
        const double p = 46.0 * n * n + 51.0 * n - 7.0;
        return p * p / 900.0;
    }
    throw std::invalid_argument("dim must be 1 or 2");
}

/// Least M >= 1 with bound_fn(M) >= target, for bound_fn nondecreasing in M.
inline std::size_t min_M(const std::function<double(std::size_t)>& bound_fn, double target) {
    if (!(target < 1.0)) throw std::invalid_argument("target must be below 1");
    std::size_t hi = 1;
    while (bound_fn(hi) < target) {
        if (hi > (std::numeric_limits<std::size_t>::max() >> 2)) throw std::runtime_error("bound never reaches target");
        hi *= 2;
    }
    std::size_t lo = hi / 2;  // bound_fn(lo) < target, or lo == 0
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        (bound_fn(mid) >= target ? hi : lo) = mid;
    }
    return hi;
}

inline void to_json(nlohmann::json& j, const BoundResult& b) {
    j = {{"bound", b.bound}, {"constants", b.constants}, {"M", b.M}, {"leading_only", b.leading_only},
         {"vacuous", b.vacuous()}};
}

}  // namespace nodal
