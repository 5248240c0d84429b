// Double crossovers, dyadic admissibility and the 1D / 2D validation criteria.
//
// Admissibility quantifies over every dyadic level; here it is checked up to a
// finite depth D. All sign information comes from one lattice of spacing
// delta / 2^(D+1), on which every dyadic stencil and every half-side shift of a
// dyadic subsquare lands exactly.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nodal/cubical.hpp"
#include "nodal/patterns.hpp"
#include "nodal/random_fields.hpp"

namespace nodal {

/// sigma * (left, mid, right) has signs (>= 0, <= 0, >= 0) for some sigma.
inline bool double_crossover(double v_left, double v_mid, double v_right) noexcept {
    const bool up = v_left >= 0.0 && v_mid <= 0.0 && v_right >= 0.0;
    const bool down = v_left <= 0.0 && v_mid >= 0.0 && v_right <= 0.0;
    return up || down;
}

enum class ValidationStatus { Certified, NotCertified, Degenerate };

inline const char* to_string(ValidationStatus s) {
    switch (s) {
        case ValidationStatus::Certified: return "certified";
        case ValidationStatus::NotCertified: return "not_certified";
        case ValidationStatus::Degenerate: return "degenerate";
    }
    return "unknown";
}

struct Violation {
    std::size_t square = 0;  // grid interval / square index (2D: k2 * M + k1)
    int level = 0;           // dyadic level n
    std::size_t sub = 0;     // subinterval / subsquare index within the level (2D: b * 2^n + a)
    int shift = -1;          // -1: J* itself; 0..3: shifted by +x1, -x1, +x2, -x2
    std::string pattern_id;

    bool operator==(const Violation&) const = default;
};

struct ValidationOutcome {
    ValidationStatus status = ValidationStatus::Certified;
    int max_depth_checked = 0;
    std::vector<Violation> violations;
    std::size_t zero_flag_count = 0;
    std::size_t stencils_checked = 0;

    bool certified() const noexcept { return status == ValidationStatus::Certified; }
};

namespace detail {

struct ViolationSink {
    ValidationOutcome& out;
    std::size_t max_violations;  // 0 = unlimited

    bool full() const noexcept { return max_violations != 0 && out.violations.size() >= max_violations; }
    void add(Violation v) {
        out.status = ValidationStatus::NotCertified;
        out.violations.push_back(std::move(v));
    }
};

inline double snap(double v, double zero_tol) noexcept { return std::abs(v) <= zero_tol ? 0.0 : v; }

inline void require_depth(int D) {
    if (D < 0 || D > 20) throw std::invalid_argument("depth D must be in [0, 20]");
}

// Checks the dyadic subintervals of one interval whose 2^(D+1)+1 lattice
// values start at vals[offset].
inline void check_interval(const std::vector<double>& vals, std::size_t offset, int D, std::size_t index,
                           ViolationSink& sink) {
    for (int n = 0; n <= D; ++n) {
        const std::size_t half = std::size_t{1} << (D - n);
        const std::size_t count = std::size_t{1} << n;
        for (std::size_t b = 0; b < count; ++b) {
            const std::size_t s = offset + 2 * half * b;
            ++sink.out.stencils_checked;
            if (double_crossover(vals[s], vals[s + half], vals[s + 2 * half])) {
                sink.add({index, n, b, -1, "crossover"});
                if (sink.full()) return;
            }
        }
    }
}

// Sign lattice with (n+1)^2 points, index iy * (n+1) + ix.
struct SignLattice {
    std::size_t n = 0;
    std::vector<std::uint8_t> plus;
    std::size_t zeros = 0;

    StencilCode code(std::size_t x0, std::size_t y0, std::size_t step) const {
        StencilCode c = 0;
        const std::size_t w = n + 1;
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < 3; ++i)
                if (plus[(y0 + j * step) * w + x0 + i * step]) c |= StencilCode(1u << (j * 3 + i));
        return c;
    }
};

inline SignLattice make_sign_lattice(std::size_t n, const std::vector<double>& values, double zero_tol) {
    SignLattice lat{n, std::vector<std::uint8_t>(values.size(), 0), 0};
    for (std::size_t k = 0; k < values.size(); ++k) {
        const Sign s = classify(values[k], zero_tol);
        lat.plus[k] = s == Sign::Plus;
        lat.zeros += s == Sign::Zero;
    }
    return lat;
}

inline std::string first_match(StencilCode code, const PatternLibrary& lib) {
    for (const auto& e : lib.closure)
        if (e.pattern.matches(code)) return e.id;
    return {};
}

// Square with lower-left lattice corner (cx, cy) and side 2^(D+1) lattice units.
inline void check_square_b(const SignLattice& lat, std::size_t cx, std::size_t cy, int D, std::size_t index,
                           const PatternLibrary& lib, ViolationSink& sink) {
    for (int n = 0; n <= D; ++n) {
        const std::size_t step = std::size_t{1} << (D - n);
        const std::size_t count = std::size_t{1} << n;
        for (std::size_t b = 0; b < count; ++b)
            for (std::size_t a = 0; a < count; ++a) {
                const StencilCode code = lat.code(cx + 2 * step * a, cy + 2 * step * b, step);
                ++sink.out.stencils_checked;
                if (lib.forbids(code)) {
                    sink.add({index, n, b * count + a, -1, first_match(code, lib)});
                    if (sink.full()) return;
                }
            }
    }
}

// As check_square_b, but every subsquare is checked together with its four
// half-side shifts. Requires cx, cy >= 2^D and room on the far side.
inline void check_square_i(const SignLattice& lat, std::size_t cx, std::size_t cy, int D, std::size_t index,
                           const PatternLibrary& lib, ViolationSink& sink) {
    for (int n = 0; n <= D; ++n) {
        const std::size_t step = std::size_t{1} << (D - n);
        const std::size_t count = std::size_t{1} << n;
        for (std::size_t b = 0; b < count; ++b)
            for (std::size_t a = 0; a < count; ++a) {
                const std::size_t x0 = cx + 2 * step * a, y0 = cy + 2 * step * b;
                const std::size_t xs[5] = {x0, x0 + step, x0 - step, x0, x0};
                const std::size_t ys[5] = {y0, y0, y0, y0 + step, y0 - step};
                for (int s = 0; s < 5; ++s) {
                    const StencilCode code = lat.code(xs[s], ys[s], step);
                    ++sink.out.stencils_checked;
                    if (lib.forbids(code)) {
                        sink.add({index, n, b * count + a, s - 1, first_match(code, lib)});
                        if (sink.full()) return;
                    }
                }
            }
    }
}

inline void require_interval(double alpha, double beta, double L) {
    if (!(alpha >= 0.0 && beta <= L && alpha < beta)) throw std::domain_error("interval must satisfy 0 <= alpha < beta <= L");
}

}  // namespace detail

/// Dyadic admissibility of [alpha, beta] up to depth D.
inline ValidationOutcome interval_admissible(const Realization1D& r, double alpha, double beta, int D,
                                             double zero_tol = 0.0) {
    detail::require_depth(D);
    detail::require_interval(alpha, beta, r.coeffs.L);
    const std::size_t units = std::size_t{1} << (D + 1);
    std::vector<double> vals(units + 1);
    for (std::size_t j = 0; j <= units; ++j) {
        const double x = j == units ? beta : alpha + (beta - alpha) * static_cast<double>(j) / static_cast<double>(units);
        vals[j] = detail::snap(detail::evaluate_unchecked(r, x), zero_tol);
    }
    ValidationOutcome out;
    out.max_depth_checked = D;
    detail::ViolationSink sink{out, 0};
    detail::check_interval(vals, 0, D, 0, sink);
    return out;
}

/// 1D criterion: no grid sample zero-flagged and every [x_k, x_{k+1}]
/// admissible to depth D. max_violations > 0 stops after that many.
inline ValidationOutcome validate_1d(const Realization1D& r, std::size_t M, int D, double zero_tol = 0.0,
                                     std::size_t max_violations = 0) {
    if (M < 1) throw std::invalid_argument("M must be at least 1");
    detail::require_depth(D);
    const std::size_t units = std::size_t{1} << (D + 1);
    std::vector<double> vals = sample_lattice(r, M * units);
    for (double& v : vals) v = detail::snap(v, zero_tol);
    ValidationOutcome out;
    out.max_depth_checked = D;
    for (std::size_t k = 0; k <= M; ++k) out.zero_flag_count += vals[k * units] == 0.0;
    if (out.zero_flag_count > 0) {
        out.status = ValidationStatus::Degenerate;
        return out;
    }
    detail::ViolationSink sink{out, max_violations};
    for (std::size_t k = 0; k < M && !sink.full(); ++k) detail::check_interval(vals, k * units, D, k, sink);
    return out;
}

/// Axis-parallel square [x1, x1 + side] x [x2, x2 + side].
struct Square {
    double x1 = 0.0;
    double x2 = 0.0;
    double side = 1.0;
};

namespace detail {

// Local sign lattice of spacing side / 2^(D+1) over the square enlarged by
// `margin` lattice units on every side.
inline SignLattice local_lattice(const Realization2D& r, const Square& sq, int D, std::size_t margin, double zero_tol) {
    const std::size_t units = std::size_t{1} << (D + 1);
    const std::size_t n = units + 2 * margin;
    const double h = sq.side / static_cast<double>(units);
    std::vector<double> vals((n + 1) * (n + 1));
    for (std::size_t j = 0; j <= n; ++j)
        for (std::size_t i = 0; i <= n; ++i) {
            const double x = sq.x1 + h * (static_cast<double>(i) - static_cast<double>(margin));
            const double y = sq.x2 + h * (static_cast<double>(j) - static_cast<double>(margin));
            vals[j * (n + 1) + i] = evaluate(r, x, y);
        }
    return make_sign_lattice(n, vals, zero_tol);
}

inline void require_square(const Square& sq, double L, double margin) {
    if (!(sq.side > 0.0)) throw std::invalid_argument("square side must be positive");
    if (sq.x1 - margin < 0.0 || sq.x2 - margin < 0.0 || sq.x1 + sq.side + margin > L || sq.x2 + sq.side + margin > L)
        throw std::domain_error(margin > 0.0 ? "the half-side neighborhood of the square leaves [0, L]^2"
                                             : "square is not contained in [0, L]^2");
}

inline StencilCode square_stencil(const Realization2D& r, const Square& sq, double zero_tol) {
    require_square(sq, r.coeffs.L, 0.0);
    std::array<Sign, kStencilSize> s{};
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            s[static_cast<std::size_t>(j * 3 + i)] =
                classify(evaluate(r, sq.x1 + 0.5 * sq.side * i, sq.x2 + 0.5 * sq.side * j), zero_tol);
            if (s[static_cast<std::size_t>(j * 3 + i)] == Sign::Zero)
                throw std::domain_error("zero-flagged stencil sample");
        }
    return encode_stencil(s);
}

}  // namespace detail

inline ValidationOutcome b_admissible(const Realization2D& r, const Square& sq, int D, double zero_tol = 0.0,
                                      const PatternSet& patterns = default_patterns()) {
    detail::require_depth(D);
    detail::require_square(sq, r.coeffs.L, 0.0);
    const auto lat = detail::local_lattice(r, sq, D, 0, zero_tol);
    ValidationOutcome out;
    out.max_depth_checked = D;
    out.zero_flag_count = lat.zeros;
    if (lat.zeros) {
        out.status = ValidationStatus::Degenerate;
        return out;
    }
    detail::ViolationSink sink{out, 0};
    detail::check_square_b(lat, 0, 0, D, 0, patterns.B, sink);
    return out;
}

/// Level-0 check of the square's own stencil. Throws std::domain_error on a
/// zero-flagged sample.
inline bool i4_admissible(const Realization2D& r, const Square& sq, double zero_tol = 0.0,
                          const PatternSet& patterns = default_patterns()) {
    return !patterns.I4.forbids(detail::square_stencil(r, sq, zero_tol));
}

inline bool i5_admissible(const Realization2D& r, const Square& sq, double zero_tol = 0.0,
                          const PatternSet& patterns = default_patterns()) {
    return !patterns.I5.forbids(detail::square_stencil(r, sq, zero_tol));
}

inline ValidationOutcome i_admissible(const Realization2D& r, const Square& sq, int D, double zero_tol = 0.0,
                                      const PatternSet& patterns = default_patterns()) {
    detail::require_depth(D);
    detail::require_square(sq, r.coeffs.L, 0.5 * sq.side);
    const std::size_t margin = std::size_t{1} << D;
    const auto lat = detail::local_lattice(r, sq, D, margin, zero_tol);
    ValidationOutcome out;
    out.max_depth_checked = D;
    out.zero_flag_count = lat.zeros;
    if (lat.zeros) {
        out.status = ValidationStatus::Degenerate;
        return out;
    }
    detail::ViolationSink sink{out, 0};
    detail::check_square_i(lat, margin, margin, D, 0, patterns.I, sink);
    return out;
}

inline bool is_boundary_square(std::size_t k1, std::size_t k2, std::size_t M) noexcept {
    return k1 == 0 || k2 == 0 || k1 + 1 == M || k2 + 1 == M;
}

/// 2D criterion on the M x M squares of side L / M: boundary squares must be
/// B-admissible and interior squares I-admissible, all to depth D, with no
/// zero-flagged sample anywhere on the lattice.
inline ValidationOutcome validate_2d(const Realization2D& r, std::size_t M, int D, double zero_tol = 0.0,
                                     std::size_t max_violations = 0, const PatternSet& patterns = default_patterns()) {
    if (M < 3) throw std::invalid_argument("2D validation needs M >= 3");
    detail::require_depth(D);
    const std::size_t units = std::size_t{1} << (D + 1);
    const std::size_t n = M * units;
    const auto lat = detail::make_sign_lattice(n, sample_lattice(r, n), zero_tol);
    ValidationOutcome out;
    out.max_depth_checked = D;
    out.zero_flag_count = lat.zeros;
    if (lat.zeros) {
        out.status = ValidationStatus::Degenerate;
        return out;
    }
    detail::ViolationSink sink{out, max_violations};
    for (std::size_t k2 = 0; k2 < M && !sink.full(); ++k2)
        for (std::size_t k1 = 0; k1 < M && !sink.full(); ++k1) {
            const std::size_t index = k2 * M + k1;
            if (is_boundary_square(k1, k2, M))
                detail::check_square_b(lat, k1 * units, k2 * units, D, index, patterns.B, sink);
            else
                detail::check_square_i(lat, k1 * units, k2 * units, D, index, patterns.I, sink);
        }
    return out;
}

inline void to_json(nlohmann::json& j, const Violation& v) {
    j = {{"square", v.square}, {"level", v.level}, {"sub", v.sub}, {"shift", v.shift}, {"pattern", v.pattern_id}};
}

inline void to_json(nlohmann::json& j, const ValidationOutcome& o) {
    j = {{"status", to_string(o.status)},
         {"max_depth_checked", o.max_depth_checked},
         {"zero_flag_count", o.zero_flag_count},
         {"stencils_checked", o.stencils_checked},
         {"violations", o.violations}};
}

}  // namespace nodal
