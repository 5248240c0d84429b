// Sign grids on the equidistant M-discretization and the cubical
// approximations Q_M^+ / Q_M^- built from them.
//
// Index-space convention: grid point k in {0..M}^d owns the unit cell
// prod_l [k_l, k_l + 1], so the cells tile [0, M+1]^d and a set with M+1
// samples per axis has (M+1)^d candidate cells.
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nodal/random_fields.hpp"

namespace nodal {

enum class Sign : std::int8_t { Minus = -1, Zero = 0, Plus = 1 };

inline Sign classify(double value, double zero_tol) noexcept {
    if (value > zero_tol) return Sign::Plus;
    if (value < -zero_tol) return Sign::Minus;
    return Sign::Zero;
}

inline char sign_char(Sign s) noexcept { return s == Sign::Plus ? '+' : (s == Sign::Minus ? '-' : '0'); }

/// Samples of sign(u) at the (M+1)^dim grid points. 2D storage is row-major
/// in x2: index k2 * (M+1) + k1.
struct SignGrid {
    int dim = 1;
    std::size_t M = 1;
    std::vector<Sign> signs;
    std::size_t zero_count = 0;

    std::size_t side() const noexcept { return M + 1; }
    Sign at(std::size_t k) const { return signs.at(k); }
    Sign at(std::size_t k1, std::size_t k2) const { return signs.at(k2 * side() + k1); }

    bool operator==(const SignGrid&) const = default;
};

inline SignGrid make_sign_grid(int dim, std::size_t M, std::vector<Sign> signs) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("sign grids are 1D or 2D");
    if (M < 1) throw std::invalid_argument("M must be at least 1");
    const std::size_t expected = dim == 1 ? M + 1 : (M + 1) * (M + 1);
    if (signs.size() != expected) throw std::invalid_argument("sign grid must have (M+1)^dim entries");
    SignGrid g{dim, M, std::move(signs), 0};
    for (Sign s : g.signs) g.zero_count += (s == Sign::Zero);
    return g;
}

inline SignGrid sign_grid_from_values(int dim, std::size_t M, const std::vector<double>& values, double zero_tol) {
    std::vector<Sign> s(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) s[i] = classify(values[i], zero_tol);
    return make_sign_grid(dim, M, std::move(s));
}

inline SignGrid sign_grid(const Realization1D& r, std::size_t M, double zero_tol = 0.0) {
    if (M < 1) throw std::invalid_argument("M must be at least 1");
    if (zero_tol < 0.0) throw std::invalid_argument("zero_tol must be nonnegative");
    return sign_grid_from_values(1, M, sample_lattice(r, M), zero_tol);
}

inline SignGrid sign_grid(const Realization2D& r, std::size_t M, double zero_tol = 0.0) {
    if (M < 1) throw std::invalid_argument("M must be at least 1");
    if (zero_tol < 0.0) throw std::invalid_argument("zero_tol must be nonnegative");
    return sign_grid_from_values(2, M, sample_lattice(r, M), zero_tol);
}

inline SignGrid negate(SignGrid g) {
    for (Sign& s : g.signs) s = static_cast<Sign>(-static_cast<int>(s));
    return g;
}

/// Top-dimensional cells of Q_M^sigma, as a membership mask over {0..M}^dim
/// using the same indexing as SignGrid.
struct CubicalSet {
    int dim = 1;
    std::size_t M = 1;
    std::vector<std::uint8_t> member;

    std::size_t side() const noexcept { return M + 1; }
    bool contains(std::size_t k) const { return member.at(k) != 0; }
    bool contains(std::size_t k1, std::size_t k2) const { return member.at(k2 * side() + k1) != 0; }

    std::size_t size() const noexcept {
        std::size_t n = 0;
        for (auto m : member) n += m;
        return n;
    }

    /// Cell indices in storage order; 2D entries are (k1, k2).
    std::vector<std::vector<std::size_t>> cells() const {
        std::vector<std::vector<std::size_t>> out;
        for (std::size_t i = 0; i < member.size(); ++i) {
            if (!member[i]) continue;
            if (dim == 1)
                out.push_back({i});
            else
                out.push_back({i % side(), i / side()});
        }
        return out;
    }

    bool operator==(const CubicalSet&) const = default;
};

/// sigma = +1 keeps Plus and Zero samples, sigma = -1 keeps Minus and Zero.
inline CubicalSet cubical_approx(const SignGrid& grid, int sigma) {
    if (sigma != 1 && sigma != -1) throw std::invalid_argument("sigma must be +1 or -1");
    const Sign keep = sigma > 0 ? Sign::Plus : Sign::Minus;
    CubicalSet cs{grid.dim, grid.M, std::vector<std::uint8_t>(grid.signs.size(), 0)};
    for (std::size_t i = 0; i < grid.signs.size(); ++i)
        cs.member[i] = (grid.signs[i] == keep || grid.signs[i] == Sign::Zero) ? 1 : 0;
    return cs;
}

// ---- JSON -----------------------------------------------------------------

/// {dim, M, rows}: 1D has one row; 2D row j is k2 = j, character i is k1 = i.
inline void to_json(nlohmann::json& j, const SignGrid& g) {
    std::vector<std::string> rows;
    const std::size_t n = g.side();
    const std::size_t nrows = g.dim == 1 ? 1 : n;
    for (std::size_t r = 0; r < nrows; ++r) {
        std::string row(n, '0');
        for (std::size_t i = 0; i < n; ++i) row[i] = sign_char(g.signs[r * n + i]);
        rows.push_back(std::move(row));
    }
    j = {{"dim", g.dim}, {"M", g.M}, {"rows", rows}, {"zero_count", g.zero_count}};
}

inline SignGrid sign_grid_from_json(const nlohmann::json& j) {
    const int dim = j.at("dim").get<int>();
    const auto M = j.at("M").get<std::size_t>();
    std::vector<Sign> signs;
    for (const auto& row : j.at("rows").get<std::vector<std::string>>())
        for (char ch : row) {
            switch (ch) {
                case '+': signs.push_back(Sign::Plus); break;
                case '-': signs.push_back(Sign::Minus); break;
                case '0': signs.push_back(Sign::Zero); break;
                default: throw std::invalid_argument(std::string("invalid sign character '") + ch + "'");
            }
        }
    return make_sign_grid(dim, M, std::move(signs));
}

inline void to_json(nlohmann::json& j, const CubicalSet& cs) {
    j = {{"dim", cs.dim}, {"M", cs.M}, {"cells", cs.cells()}};
}

}  // namespace nodal
