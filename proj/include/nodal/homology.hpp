// Betti numbers of cubical sets in one and two dimensions.
//
// Homology is taken with field coefficients. A planar cubical complex has no
// torsion and no H_2, so beta_0 (components of the vertex-edge graph) and the
// Euler characteristic V - E + F determine everything: beta_1 = beta_0 - chi.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "nodal/cubical.hpp"

namespace nodal {

/// Face closure of a CubicalSet, stored as presence masks.
///   1D: vertices 0..M+1, edges [e, e+1] for e = 0..M.
///   2D: vertices (M+2)^2 at index j*(M+2)+i; x-edges [i,i+1]x{j} at j*(M+1)+i
///       (i <= M, j <= M+1); y-edges {i}x[j,j+1] at j*(M+2)+i (i <= M+1, j <= M);
///       faces follow CubicalSet indexing.
struct CubicalComplex {
    int dim = 1;
    std::size_t M = 1;
    std::vector<std::uint8_t> vertices, x_edges, y_edges, faces;

    static std::size_t count(const std::vector<std::uint8_t>& v) {
        return static_cast<std::size_t>(std::count(v.begin(), v.end(), std::uint8_t{1}));
    }
    std::size_t num_vertices() const { return count(vertices); }
    std::size_t num_edges() const { return count(x_edges) + count(y_edges); }
    std::size_t num_faces() const { return count(faces); }
    long euler_characteristic() const {
        return static_cast<long>(num_vertices()) - static_cast<long>(num_edges()) + static_cast<long>(num_faces());
    }
};

struct BettiVector {
    std::size_t b0 = 0;
    std::size_t b1 = 0;
    bool operator==(const BettiVector&) const = default;
};

struct BettiPair {
    BettiVector plus;
    BettiVector minus;
    bool operator==(const BettiPair&) const = default;
};

inline CubicalComplex close_faces(const CubicalSet& cs) {
    CubicalComplex cx;
    cx.dim = cs.dim;
    cx.M = cs.M;
    const std::size_t n = cs.M + 1;  // cells per axis
    if (cs.dim == 1) {
        cx.vertices.assign(n + 1, 0);
        cx.x_edges.assign(n, 0);
        for (std::size_t k = 0; k < n; ++k) {
            if (!cs.member[k]) continue;
            cx.x_edges[k] = 1;
            cx.vertices[k] = cx.vertices[k + 1] = 1;
        }
        return cx;
    }
    const std::size_t nv = n + 1;
    cx.vertices.assign(nv * nv, 0);
    cx.x_edges.assign(nv * n, 0);
    cx.y_edges.assign(n * nv, 0);
    cx.faces = cs.member;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            if (!cs.member[j * n + i]) continue;
            cx.vertices[j * nv + i] = cx.vertices[j * nv + i + 1] = 1;
            cx.vertices[(j + 1) * nv + i] = cx.vertices[(j + 1) * nv + i + 1] = 1;
            cx.x_edges[j * n + i] = cx.x_edges[(j + 1) * n + i] = 1;
            cx.y_edges[j * nv + i] = cx.y_edges[j * nv + i + 1] = 1;
        }
    return cx;
}

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::uint8_t> rank_;
};

}  // namespace detail

inline BettiVector betti(const CubicalComplex& cx) {
    detail::UnionFind uf(cx.vertices.size());
    const std::size_t n = cx.M + 1;
    if (cx.dim == 1) {
        for (std::size_t e = 0; e < cx.x_edges.size(); ++e)
            if (cx.x_edges[e]) uf.unite(e, e + 1);
    } else {
        const std::size_t nv = n + 1;
        for (std::size_t j = 0; j < nv; ++j)
            for (std::size_t i = 0; i < n; ++i)
                if (cx.x_edges[j * n + i]) uf.unite(j * nv + i, j * nv + i + 1);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < nv; ++i)
                if (cx.y_edges[j * nv + i]) uf.unite(j * nv + i, (j + 1) * nv + i);
    }
    BettiVector b;
    for (std::size_t v = 0; v < cx.vertices.size(); ++v)
        if (cx.vertices[v] && uf.find(v) == v) ++b.b0;
    if (cx.dim == 2) {
        const long chi = cx.euler_characteristic();
        b.b1 = static_cast<std::size_t>(static_cast<long>(b.b0) - chi);
    }
    return b;
}

inline BettiVector betti(const CubicalSet& cs) { return betti(close_faces(cs)); }

inline BettiPair betti_pair(const SignGrid& grid) {
    return {betti(cubical_approx(grid, +1)), betti(cubical_approx(grid, -1))};
}

inline bool homology_match(const BettiPair& a, const BettiPair& b) { return a.plus == b.plus && a.minus == b.minus; }

struct ReferenceBetti {
    BettiPair betti;
    std::size_t M_ref = 0;
    bool resolved = false;
};

/// Fine-grid reference resolution: max(8 M, 16 * largest frequency).
inline std::size_t default_reference_resolution(std::size_t M, std::size_t max_frequency) {
    return std::max<std::size_t>(8 * M, 16 * std::max<std::size_t>(max_frequency, 1));
}

/// Betti numbers of Q_{M_ref}^{+/-}, accepted only when they agree with
/// Q_{2 M_ref}^{+/-} and no reference sample is zero-flagged.
template <class Realization>
ReferenceBetti reference_betti(const Realization& r, std::size_t M_ref, double zero_tol = 0.0) {
    if (M_ref < 1) throw std::invalid_argument("M_ref must be at least 1");
    const SignGrid coarse = sign_grid(r, M_ref, zero_tol);
    const SignGrid fine = sign_grid(r, 2 * M_ref, zero_tol);
    ReferenceBetti ref;
    ref.M_ref = M_ref;
    ref.betti = betti_pair(coarse);
    ref.resolved = coarse.zero_count == 0 && fine.zero_count == 0 && homology_match(ref.betti, betti_pair(fine));
    return ref;
}

inline void to_json(nlohmann::json& j, const BettiPair& p) {
    j = {{"plus", {p.plus.b0, p.plus.b1}}, {"minus", {p.minus.b0, p.minus.b1}}};
}

inline BettiPair betti_pair_from_json(const nlohmann::json& j) {
    const auto p = j.at("plus").get<std::vector<std::size_t>>();
    const auto m = j.at("minus").get<std::vector<std::size_t>>();
    if (p.size() != 2 || m.size() != 2) throw std::invalid_argument("Betti entries must be [b0, b1]");
    return {{p[0], p[1]}, {m[0], m[1]}};
}

}  // namespace nodal
