// Random periodic Fourier series on [0, L] and [0, L]^2 with independent
// standard normal weights, their spectral moments and covariance functions.
//
//   1D:  u(x) = sum_k a_k (g_{2k} cos(2 pi k x / L) + g_{2k-1} sin(2 pi k x / L))
//   2D:  u(x) = sum_{k,l} a_{k,l} (g_{k,l,1} cc + g_{k,l,2} cs + g_{k,l,3} sc + g_{k,l,4} ss)
//
// Coefficient sequences are finite (truncation order K is recorded).
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nodal/rng.hpp"

namespace nodal {

struct CoeffSeq1D {
    double L = 1.0;
    std::vector<double> a;  // a[k], k = 0..K

    std::size_t K() const noexcept { return a.empty() ? 0 : a.size() - 1; }

    std::size_t max_frequency() const noexcept {
        for (std::size_t k = a.size(); k-- > 0;)
            if (a[k] != 0.0) return k;
        return 0;
    }
};

struct CoeffSeq2D {
    double L = 1.0;
    std::size_t K = 0;
    std::vector<double> a;  // (K+1)^2 entries, a[k * (K+1) + l]

    double at(std::size_t k, std::size_t l) const { return a[k * (K + 1) + l]; }

    std::size_t max_frequency() const noexcept {
        std::size_t m = 0;
        for (std::size_t k = 0; k <= K; ++k)
            for (std::size_t l = 0; l <= K; ++l)
                if (at(k, l) != 0.0) m = std::max(m, std::max(k, l));
        return m;
    }
};

namespace detail {

inline void require_domain_length(double L) {
    if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("domain length L must be positive and finite");
}

inline void require_finite(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace detail

/// True when at least two coefficients are nonzero.
inline bool satisfies_nondegeneracy(const CoeffSeq1D& c) {
    std::size_t nonzero = 0;
    for (double v : c.a) nonzero += (v != 0.0);
    return nonzero >= 2;
}

/// Two nonzero coefficients at (k1,l1), (k2,l2) with k1,l1 >= 1, k1 != k2,
/// l1 != l2 and k1^2 + l1^2 != k2^2 + l2^2.
inline bool satisfies_nondegeneracy(const CoeffSeq2D& c) {
    for (std::size_t k1 = 1; k1 <= c.K; ++k1)
        for (std::size_t l1 = 1; l1 <= c.K; ++l1) {
            if (c.at(k1, l1) == 0.0) continue;
            for (std::size_t k2 = 0; k2 <= c.K; ++k2)
                for (std::size_t l2 = 0; l2 <= c.K; ++l2)
                    if (c.at(k2, l2) != 0.0 && k1 != k2 && l1 != l2 && k1 * k1 + l1 * l1 != k2 * k2 + l2 * l2)
                        return true;
        }
    return false;
}

inline CoeffSeq1D make_coeffs_1d(double L, std::vector<double> a) {
    detail::require_domain_length(L);
    detail::require_finite(a, "coefficients");
    CoeffSeq1D c{L, std::move(a)};
    if (!satisfies_nondegeneracy(c)) throw std::invalid_argument("at least two coefficients a_k must be nonzero");
    return c;
}

inline CoeffSeq2D make_coeffs_2d(double L, const std::vector<std::vector<double>>& rows) {
    detail::require_domain_length(L);
    if (rows.empty()) throw std::invalid_argument("coefficient array is empty");
    CoeffSeq2D c;
    c.L = L;
    c.K = rows.size() - 1;
    c.a.assign((c.K + 1) * (c.K + 1), 0.0);
    for (std::size_t k = 0; k <= c.K; ++k) {
        if (rows[k].size() != c.K + 1) throw std::invalid_argument("coefficient array must be square");
        detail::require_finite(rows[k], "coefficients");
        for (std::size_t l = 0; l <= c.K; ++l) c.a[k * (c.K + 1) + l] = rows[k][l];
    }
    if (!satisfies_nondegeneracy(c))
        throw std::invalid_argument("coefficients violate the 2D nondegeneracy condition");
    return c;
}

/// Random trigonometric polynomial of degree N: a_k = 1 for 1 <= k <= N, L = 2 pi.
inline CoeffSeq1D trig_coeffs_1d(std::size_t N, double L = 2.0 * std::numbers::pi) {
    if (N < 2) throw std::invalid_argument("trigonometric polynomial degree N must be at least 2");
    std::vector<double> a(N + 1, 1.0);
    a[0] = 0.0;
    return make_coeffs_1d(L, std::move(a));
}

/// Bivariate trigonometric polynomial: a_{k,l} = 1 for 1 <= k,l <= N.
inline CoeffSeq2D trig_coeffs_2d(std::size_t N, double L = 2.0 * std::numbers::pi) {
    if (N < 2) throw std::invalid_argument("trigonometric polynomial degree N must be at least 2");
    std::vector<std::vector<double>> rows(N + 1, std::vector<double>(N + 1, 0.0));
    for (std::size_t k = 1; k <= N; ++k)
        for (std::size_t l = 1; l <= N; ++l) rows[k][l] = 1.0;
    return make_coeffs_2d(L, rows);
}

struct Realization1D {
    CoeffSeq1D coeffs;
    std::vector<double> g;  // g_0 .. g_{2K}
    std::uint64_t seed = 0;
};

struct Realization2D {
    CoeffSeq2D coeffs;
    std::vector<double> g;  // g[((k * (K+1)) + l) * 4 + (m-1)], m = 1..4
    std::uint64_t seed = 0;

    double weight(std::size_t k, std::size_t l, int m) const { return g[((k * (coeffs.K + 1)) + l) * 4 + (m - 1)]; }
};

inline Realization1D make_realization(CoeffSeq1D coeffs, std::vector<double> g, std::uint64_t seed = 0) {
    if (g.size() != 2 * coeffs.K() + 1) throw std::invalid_argument("realization needs exactly 2K+1 weights");
    return {std::move(coeffs), std::move(g), seed};
}

inline Realization2D make_realization(CoeffSeq2D coeffs, std::vector<double> g, std::uint64_t seed = 0) {
    if (g.size() != 4 * (coeffs.K + 1) * (coeffs.K + 1))
        throw std::invalid_argument("realization needs exactly 4(K+1)^2 weights");
    return {std::move(coeffs), std::move(g), seed};
}

/// Weights are the first 2K+1 (resp. 4(K+1)^2) normals of CounterStream(seed, 0).
inline Realization1D draw_realization(const CoeffSeq1D& coeffs, std::uint64_t seed) {
    rng::CounterStream stream(seed);
    std::vector<double> g(2 * coeffs.K() + 1);
    stream.fill_normal(g);
    return {coeffs, std::move(g), seed};
}

inline Realization2D draw_realization(const CoeffSeq2D& coeffs, std::uint64_t seed) {
    rng::CounterStream stream(seed);
    std::vector<double> g(4 * (coeffs.K + 1) * (coeffs.K + 1));
    stream.fill_normal(g);
    return {coeffs, std::move(g), seed};
}

namespace detail {

inline double evaluate_unchecked(const Realization1D& r, double x) {
    const double w = 2.0 * std::numbers::pi * x / r.coeffs.L;
    double sum = 0.0;
    for (std::size_t k = 0; k <= r.coeffs.K(); ++k) {
        const double ak = r.coeffs.a[k];
        if (ak == 0.0) continue;
        const double t = w * static_cast<double>(k);
        double term = r.g[2 * k] * std::cos(t);
        if (k > 0) term += r.g[2 * k - 1] * std::sin(t);
        sum += ak * term;
    }
    return sum;
}

inline double evaluate_unchecked(const Realization2D& r, double x1, double x2) {
    const auto& c = r.coeffs;
    const double w1 = 2.0 * std::numbers::pi * x1 / c.L;
    const double w2 = 2.0 * std::numbers::pi * x2 / c.L;
    double sum = 0.0;
    for (std::size_t k = 0; k <= c.K; ++k) {
        const double ck = std::cos(w1 * k), sk = std::sin(w1 * k);
        for (std::size_t l = 0; l <= c.K; ++l) {
            const double akl = c.at(k, l);
            if (akl == 0.0) continue;
            const double cl = std::cos(w2 * l), sl = std::sin(w2 * l);
            sum += akl * (r.weight(k, l, 1) * ck * cl + r.weight(k, l, 2) * ck * sl + r.weight(k, l, 3) * sk * cl +
                          r.weight(k, l, 4) * sk * sl);
        }
    }
    return sum;
}

inline void require_in_domain(double x, double L) {
    if (!(x >= 0.0 && x <= L)) throw std::domain_error("evaluation point outside [0, L]");
}

// cos/sin(2 pi j / n) for j = 0..n-1; frequencies are reduced mod n so lattice
// samples are exactly periodic.
struct RootTable {
    explicit RootTable(std::size_t n) : n(n), c(n), s(n) {
        for (std::size_t j = 0; j < n; ++j) {
            const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
            c[j] = std::cos(t);
            s[j] = std::sin(t);
        }
    }
    std::size_t n;
    std::vector<double> c, s;
};

}  // namespace detail

inline double evaluate(const Realization1D& r, double x) {
    detail::require_in_domain(x, r.coeffs.L);
    return detail::evaluate_unchecked(r, x);
}

inline double evaluate(const Realization2D& r, double x1, double x2) {
    detail::require_in_domain(x1, r.coeffs.L);
    detail::require_in_domain(x2, r.coeffs.L);
    return detail::evaluate_unchecked(r, x1, x2);
}

/// Values at x_i = i L / n, i = 0..n.
inline std::vector<double> sample_lattice(const Realization1D& r, std::size_t n) {
    if (n == 0) throw std::invalid_argument("lattice needs at least one interval");
    const detail::RootTable roots(n);
    std::vector<double> out(n + 1, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
        double sum = 0.0;
        for (std::size_t k = 0; k <= r.coeffs.K(); ++k) {
            const double ak = r.coeffs.a[k];
            if (ak == 0.0) continue;
            const std::size_t j = (k * i) % n;
            double term = r.g[2 * k] * roots.c[j];
            if (k > 0) term += r.g[2 * k - 1] * roots.s[j];
            sum += ak * term;
        }
        out[i] = sum;
    }
    return out;
}

/// Values at (i1 L / n, i2 L / n), stored at index i2 * (n+1) + i1.
inline std::vector<double> sample_lattice(const Realization2D& r, std::size_t n) {
    if (n == 0) throw std::invalid_argument("lattice needs at least one interval");
    const auto& c = r.coeffs;
    const std::size_t K = c.K;
    const detail::RootTable roots(n);
    std::vector<double> out((n + 1) * (n + 1), 0.0);
    std::vector<double> cos_part(K + 1), sin_part(K + 1);  // indexed by l, fixed x1
    for (std::size_t i1 = 0; i1 <= n; ++i1) {
        for (std::size_t l = 0; l <= K; ++l) {
            double p = 0.0, q = 0.0;
            for (std::size_t k = 0; k <= K; ++k) {
                const double akl = c.at(k, l);
                if (akl == 0.0) continue;
                const std::size_t j = (k * i1) % n;
                p += akl * (r.weight(k, l, 1) * roots.c[j] + r.weight(k, l, 3) * roots.s[j]);
                q += akl * (r.weight(k, l, 2) * roots.c[j] + r.weight(k, l, 4) * roots.s[j]);
            }
            cos_part[l] = p;
            sin_part[l] = q;
        }
        for (std::size_t i2 = 0; i2 <= n; ++i2) {
            double sum = 0.0;
            for (std::size_t l = 0; l <= K; ++l) {
                const std::size_t j = (l * i2) % n;
                sum += cos_part[l] * roots.c[j] + sin_part[l] * roots.s[j];
            }
            out[i2 * (n + 1) + i1] = sum;
        }
    }
    return out;
}

struct SpectralMoments1D {
    std::array<double, 4> A{};  // A_l = sum k^{2l} a_k^2, l = 0..3
    double operator[](std::size_t l) const { return A.at(l); }
};

struct SpectralMoments2D {
    // A_{p,q} = sum k^{2p} l^{2q} a_{k,l}^2 for p + q <= 2 (other slots unused)
    std::array<std::array<double, 3>, 3> A{};
    double at(std::size_t p, std::size_t q) const {
        if (p + q > 2) throw std::out_of_range("moments are stored for p + q <= 2");
        return A[p][q];
    }
};

inline SpectralMoments1D spectral_moments(const CoeffSeq1D& c) {
    SpectralMoments1D m;
    for (std::size_t k = 0; k < c.a.size(); ++k) {
        const double a2 = c.a[k] * c.a[k];
        const double k2 = static_cast<double>(k * k);
        double w = 1.0;
        for (std::size_t l = 0; l < 4; ++l, w *= k2) m.A[l] += w * a2;
    }
    return m;
}

inline SpectralMoments2D spectral_moments(const CoeffSeq2D& c) {
    SpectralMoments2D m;
    for (std::size_t k = 0; k <= c.K; ++k)
        for (std::size_t l = 0; l <= c.K; ++l) {
            const double a2 = c.at(k, l) * c.at(k, l);
            if (a2 == 0.0) continue;
            const double k2 = static_cast<double>(k * k), l2 = static_cast<double>(l * l);
            for (std::size_t p = 0; p <= 2; ++p)
                for (std::size_t q = 0; p + q <= 2; ++q) m.A[p][q] += std::pow(k2, p) * std::pow(l2, q) * a2;
        }
    return m;
}

/// r(lag) = sum_k a_k^2 cos(2 pi k lag / L).
template <class T = double>
T covariance(const CoeffSeq1D& c, T lag) {
    const T w = T(2) * std::numbers::pi_v<T> * lag / T(c.L);
    T sum = 0;
    for (std::size_t k = 0; k < c.a.size(); ++k) {
        const T ak = c.a[k];
        sum += ak * ak * std::cos(w * T(k));
    }
    return sum;
}

/// r(lag) = sum a_{k,l}^2 cos(2 pi k lag_1 / L) cos(2 pi l lag_2 / L).
template <class T = double>
T covariance(const CoeffSeq2D& c, T lag1, T lag2) {
    const T w1 = T(2) * std::numbers::pi_v<T> * lag1 / T(c.L);
    const T w2 = T(2) * std::numbers::pi_v<T> * lag2 / T(c.L);
    std::vector<T> cl(c.K + 1);
    for (std::size_t l = 0; l <= c.K; ++l) cl[l] = std::cos(w2 * T(l));
    T sum = 0;
    for (std::size_t k = 0; k <= c.K; ++k) {
        const T ck = std::cos(w1 * T(k));
        for (std::size_t l = 0; l <= c.K; ++l) {
            const T akl = c.at(k, l);
            sum += akl * akl * ck * cl[l];
        }
    }
    return sum;
}

// ---- JSON -----------------------------------------------------------------

inline void to_json(nlohmann::json& j, const CoeffSeq1D& c) {
    j = {{"dim", 1}, {"L", c.L}, {"K", c.K()}, {"a", c.a}};
}

inline void to_json(nlohmann::json& j, const CoeffSeq2D& c) {
    std::vector<std::vector<double>> rows(c.K + 1, std::vector<double>(c.K + 1));
    for (std::size_t k = 0; k <= c.K; ++k)
        for (std::size_t l = 0; l <= c.K; ++l) rows[k][l] = c.at(k, l);
    j = {{"dim", 2}, {"L", c.L}, {"K", c.K}, {"a", rows}};
}

inline int coeff_dim(const nlohmann::json& j) {
    const int dim = j.at("dim").get<int>();
    if (dim != 1 && dim != 2) throw std::invalid_argument("dim must be 1 or 2");
    return dim;
}

inline CoeffSeq1D coeffs_1d_from_json(const nlohmann::json& j) {
    if (coeff_dim(j) != 1) throw std::invalid_argument("expected a 1D coefficient file");
    auto c = make_coeffs_1d(j.at("L").get<double>(), j.at("a").get<std::vector<double>>());
    if (j.contains("K") && j.at("K").get<std::size_t>() != c.K()) throw std::invalid_argument("K does not match a");
    return c;
}

inline CoeffSeq2D coeffs_2d_from_json(const nlohmann::json& j) {
    if (coeff_dim(j) != 2) throw std::invalid_argument("expected a 2D coefficient file");
    auto c = make_coeffs_2d(j.at("L").get<double>(), j.at("a").get<std::vector<std::vector<double>>>());
    if (j.contains("K") && j.at("K").get<std::size_t>() != c.K) throw std::invalid_argument("K does not match a");
    return c;
}

inline void to_json(nlohmann::json& j, const Realization1D& r) {
    to_json(j, r.coeffs);
    j["seed"] = r.seed;
    j["g"] = r.g;
}

inline void to_json(nlohmann::json& j, const Realization2D& r) {
    to_json(j, r.coeffs);
    j["seed"] = r.seed;
    const std::size_t K = r.coeffs.K;
    nlohmann::json g = nlohmann::json::array();
    for (std::size_t k = 0; k <= K; ++k) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t l = 0; l <= K; ++l)
            row.push_back({r.weight(k, l, 1), r.weight(k, l, 2), r.weight(k, l, 3), r.weight(k, l, 4)});
        g.push_back(std::move(row));
    }
    j["g"] = std::move(g);
}

inline Realization1D realization_1d_from_json(const nlohmann::json& j) {
    return make_realization(coeffs_1d_from_json(j), j.at("g").get<std::vector<double>>(),
                            j.value("seed", std::uint64_t{0}));
}

inline Realization2D realization_2d_from_json(const nlohmann::json& j) {
    auto coeffs = coeffs_2d_from_json(j);
    const auto nested = j.at("g").get<std::vector<std::vector<std::vector<double>>>>();
    std::vector<double> g;
    g.reserve(4 * (coeffs.K + 1) * (coeffs.K + 1));
    if (nested.size() != coeffs.K + 1) throw std::invalid_argument("g shape does not match coefficients");
    for (const auto& row : nested) {
        if (row.size() != coeffs.K + 1) throw std::invalid_argument("g shape does not match coefficients");
        for (const auto& quad : row) {
            if (quad.size() != 4) throw std::invalid_argument("g entries must hold 4 weights");
            g.insert(g.end(), quad.begin(), quad.end());
        }
    }
    return make_realization(std::move(coeffs), std::move(g), j.value("seed", std::uint64_t{0}));
}

}  // namespace nodal
