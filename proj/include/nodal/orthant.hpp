// Gaussian orthant probabilities P{s_j Z_j >= 0 for all j} for the sign
// patterns of small stencils, and the small-delta spectral asymptotics of their
// covariance matrices.
//
// Estimators:
//   exact   n <= 3, arcsine formulas.
//   mc      plain Monte Carlo: Z = F g with F the Cholesky factor of C.
//   ray     radial integration. Writing z = t y with y on the unit simplex and
//           integrating t in closed form gives
//             P = Gamma(n/2) / (2 pi^(n/2) (n-1)! sqrt(det C)) * E[q(y)^(-n/2)],
//           q(y) = y^T S C^{-1} S y, y ~ uniform on the simplex.
//           The integrand is bounded by (n lambda_max)^(n/2), so the relative
//           error stays controlled when P itself is tiny, where mc is useless.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nodal/random_fields.hpp"
#include "nodal/rng.hpp"

namespace nodal {

using real_t = long double;
using CovMatrix = Eigen::Matrix<real_t, Eigen::Dynamic, Eigen::Dynamic>;
using RealVector = Eigen::Matrix<real_t, Eigen::Dynamic, 1>;
using FieldCoeffs = std::variant<CoeffSeq1D, CoeffSeq2D>;

struct Offset {
    double x1 = 0.0;
    double x2 = 0.0;
};

/// C[i][j] = r(p_i - p_j).
inline CovMatrix pattern_cov(const FieldCoeffs& coeffs, const std::vector<Offset>& points) {
    if (points.empty()) throw std::invalid_argument("pattern needs at least one point");
    const auto n = static_cast<Eigen::Index>(points.size());
    CovMatrix C(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            const real_t d1 = real_t(points[i].x1) - real_t(points[j].x1);
            const real_t d2 = real_t(points[i].x2) - real_t(points[j].x2);
            real_t v;
            if (const auto* c1 = std::get_if<CoeffSeq1D>(&coeffs)) {
                if (d2 != 0) throw std::invalid_argument("1D pattern points must have x2 = 0");
                v = covariance<real_t>(*c1, d1);
            } else {
                v = covariance<real_t>(std::get<CoeffSeq2D>(coeffs), d1, d2);
            }
            C(i, j) = C(j, i) = v;
        }
    return C;
}

struct OrthantEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
};

namespace detail {

inline void require_query(const std::vector<int>& signs, const CovMatrix& C) {
    if (signs.empty()) throw std::invalid_argument("orthant query needs at least one sign");
    if (C.rows() != static_cast<Eigen::Index>(signs.size()) || C.cols() != C.rows())
        throw std::invalid_argument("signs and covariance dimensions disagree");
    for (int s : signs)
        if (s != 1 && s != -1) throw std::invalid_argument("signs must be +1 or -1");
    const real_t scale = C.cwiseAbs().maxCoeff();
    if (!((C - C.transpose()).cwiseAbs().maxCoeff() <= 1e-12L * scale))
        throw std::invalid_argument("covariance matrix is not symmetric");
}

// Factor F with F F^T = C: Cholesky, falling back to the symmetric square root
// for positive semi-definite C.
inline Eigen::MatrixXd sampling_factor(const CovMatrix& C) {
    const Eigen::MatrixXd Cd = C.cast<double>();
    Eigen::LLT<Eigen::MatrixXd> llt(Cd);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Cd);
    const double lmax = es.eigenvalues().maxCoeff();
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < -1e-12 * std::max(lmax, 1.0))
        throw std::runtime_error("covariance matrix is not positive semi-definite");
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

inline real_t prop41_constant(std::size_t n) {
    const real_t nn = static_cast<real_t>(n);
    return std::tgamma(nn / 2) / (2 * std::pow(std::numbers::pi_v<real_t>, nn / 2) * std::tgamma(nn));
}

}  // namespace detail

/// Plain Monte Carlo. Samples are drawn in batches of 65536 from
/// CounterStream(seed, batch); the batch tallies are summed in order.
inline OrthantEstimate orthant_mc(const std::vector<int>& signs, const CovMatrix& C, std::size_t samples,
                                  std::uint64_t seed) {
    detail::require_query(signs, C);
    if (samples == 0) throw std::invalid_argument("samples must be positive");
    const Eigen::MatrixXd F = detail::sampling_factor(C);
    const auto n = C.rows();
    constexpr std::size_t kBatch = 65536;
    std::size_t hits = 0;
    Eigen::VectorXd g(n), z(n);
    for (std::size_t start = 0, batch = 0; start < samples; start += kBatch, ++batch) {
        rng::CounterStream stream(seed, batch);
        const std::size_t stop = std::min(samples, start + kBatch);
        for (std::size_t s = start; s < stop; ++s) {
            for (Eigen::Index i = 0; i < n; ++i) g[i] = stream.normal();
            z.noalias() = F * g;
            bool in = true;
            for (Eigen::Index i = 0; i < n && in; ++i) in = signs[static_cast<std::size_t>(i)] * z[i] >= 0.0;
            hits += in;
        }
    }
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

/// Radial estimator; requires C positive definite.
inline OrthantEstimate orthant_ray(const std::vector<int>& signs, const CovMatrix& C, std::size_t samples,
                                   std::uint64_t seed) {
    detail::require_query(signs, C);
    if (samples < 2) throw std::invalid_argument("samples must be at least 2");
    Eigen::SelfAdjointEigenSolver<CovMatrix> es(C);
    if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > 0))
        throw std::runtime_error("covariance matrix is not positive definite");
    const auto n = C.rows();
    const std::size_t nn = static_cast<std::size_t>(n);
    // q(y) = sum_k (v_k . S y)^2 / lambda_k; fold S into the eigenvectors.
    CovMatrix W = es.eigenvectors().transpose();
    for (Eigen::Index j = 0; j < n; ++j) W.col(j) *= real_t(signs[static_cast<std::size_t>(j)]);
    const RealVector inv_lambda = es.eigenvalues().cwiseInverse();
    real_t log_det = 0;
    for (Eigen::Index k = 0; k < n; ++k) log_det += std::log(es.eigenvalues()[k]);

    constexpr std::size_t kBatch = 65536;
    real_t sum = 0, sum_sq = 0;
    RealVector y(n), w(n);
    for (std::size_t start = 0, batch = 0; start < samples; start += kBatch, ++batch) {
        rng::CounterStream stream(seed, batch);
        const std::size_t stop = std::min(samples, start + kBatch);
        real_t bsum = 0, bsq = 0;
        for (std::size_t s = start; s < stop; ++s) {
            real_t total = 0;
            for (Eigen::Index i = 0; i < n; ++i) total += (y[i] = stream.exponential());
            y /= total;
            w.noalias() = W * y;
            const real_t q = w.cwiseAbs2().dot(inv_lambda);
            const real_t f = std::pow(q, -real_t(nn) / 2);
            bsum += f;
            bsq += f * f;
        }
        sum += bsum;
        sum_sq += bsq;
    }
    const real_t m = sum / real_t(samples);
    const real_t var = std::max<real_t>(0, (sum_sq / real_t(samples) - m * m) * real_t(samples) / real_t(samples - 1));
    const real_t K = detail::prop41_constant(nn) * std::exp(-log_det / 2);
    return {static_cast<double>(K * m), static_cast<double>(K * std::sqrt(var / real_t(samples)))};
}

/// n = 1: 1/2; n = 2: 1/4 + asin(r)/(2 pi); n = 3: 1/8 + sum asin(r_ij)/(4 pi),
/// with r_ij = s_i s_j corr(i, j).
inline real_t orthant_exact_small(const std::vector<int>& signs, const CovMatrix& C) {
    detail::require_query(signs, C);
    const auto n = C.rows();
    if (n > 3) throw std::invalid_argument("exact orthant probabilities are available for n <= 3");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(C(i, i) > 0)) throw std::invalid_argument("variances must be positive");
    if (n == 1) return real_t(0.5);
    auto rho = [&](Eigen::Index i, Eigen::Index j) {
        const real_t r = C(i, j) / std::sqrt(C(i, i) * C(j, j));
        if (!(std::abs(r) < 1)) throw std::invalid_argument("degenerate covariance: |correlation| = 1");
        return real_t(signs[static_cast<std::size_t>(i)] * signs[static_cast<std::size_t>(j)]) * r;
    };
    const real_t pi = std::numbers::pi_v<real_t>;
    if (n == 2) return real_t(0.25) + std::asin(rho(0, 1)) / (2 * pi);
    return real_t(0.125) + (std::asin(rho(0, 1)) + std::asin(rho(0, 2)) + std::asin(rho(1, 2))) / (4 * pi);
}

/// Gamma(n/2) / (2 pi^(n/2) (n-1)!) * |prod v_j|^(-1); needs s_j v_j > 0.
inline real_t prop41_limit(const std::vector<int>& signs, const std::vector<double>& v1) {
    if (signs.size() != v1.size() || v1.empty()) throw std::invalid_argument("signs and v1 dimensions disagree");
    real_t norm = 0, prod = 1;
    for (double v : v1) {
        if (v == 0.0) throw std::invalid_argument("limit eigenvector has a zero entry");
        norm += real_t(v) * real_t(v);
        prod *= real_t(v);
    }
    if (std::abs(norm - 1) > 1e-9L) throw std::invalid_argument("limit eigenvector must have unit norm");
    bool aligned = true, opposite = true;
    for (std::size_t j = 0; j < v1.size(); ++j) {
        aligned = aligned && signs[j] * v1[j] > 0.0;
        opposite = opposite && signs[j] * v1[j] < 0.0;
    }
    if (!aligned && !opposite) throw std::invalid_argument("sign pattern does not match the limit eigenvector");
    return detail::prop41_constant(signs.size()) / std::abs(prod);
}

// ---- stencils and their expansions -------------------------------------------

/// Leading terms det C = c delta^e, lambda_k = c_k delta^(e_k). Index 0 is the
/// branch whose eigenvector tends to v1_limit.
struct SpectralExpansion {
    int det_exponent = 0;
    std::optional<double> det_coefficient;
    std::vector<int> eigen_exponents;
    std::vector<std::optional<double>> eigen_coefficients;
    std::vector<double> v1_limit;
};

struct Stencil {
    std::string name;
    int dim = 1;
    std::vector<Offset> points;  // in units of delta
    std::vector<int> signs;

    std::vector<Offset> scaled(double delta) const {
        std::vector<Offset> out(points);
        for (auto& p : out) p = {p.x1 * delta, p.x2 * delta};
        return out;
    }
};

inline const std::vector<std::string>& stencil_names() {
    static const std::vector<std::string> names = {"crossover1d", "table1", "table1t", "table2", "table3",
                                                   "table4",      "table4t", "table5",  "table5t", "table6"};
    return names;
}

inline Stencil named_stencil(const std::string& name) {
    auto transpose = [](Stencil s, std::string n) {
        for (auto& p : s.points) std::swap(p.x1, p.x2);
        s.name = std::move(n);
        return s;
    };
    if (name == "crossover1d") return {name, 1, {{0, 0}, {0.5, 0}, {1, 0}}, {1, -1, 1}};
    if (name == "table1") return {name, 2, {{0, 0}, {0, 0.5}, {0, 1}}, {1, -1, 1}};
    if (name == "table1t") return transpose(named_stencil("table1"), name);
    if (name == "table2") return {name, 2, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {1, -1, 1, -1}};
    if (name == "table3") return {name, 2, {{0, 0}, {0.5, 0}, {0.5, 0.5}, {0, 0.5}}, {1, -1, 1, -1}};
    if (name == "table4") return {name, 2, {{0, 0}, {0.5, 0}, {1, 0.5}, {0.5, 0.5}}, {1, -1, 1, -1}};
    if (name == "table4t") return transpose(named_stencil("table4"), name);
    if (name == "table5") return {name, 2, {{0, 0}, {0.5, 0}, {1, 1}, {0.5, 1}}, {1, -1, 1, -1}};
    if (name == "table5t") return transpose(named_stencil("table5"), name);
    if (name == "table6") return {name, 2, {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}}, {1, 1, 1, 1, -1}};
    throw std::invalid_argument("unknown stencil '" + name + "'");
}

/// Expected leading terms for a named stencil, in terms of the scaled moments
/// R = (2 pi / L)^(2 order) A. Coefficients are left empty where no reliable
/// closed form is available.
inline SpectralExpansion expected_expansion(const std::string& name, const FieldCoeffs& coeffs) {
    using std::nullopt;
    const double inv_sqrt6 = 1.0 / std::sqrt(6.0);
    const std::vector<double> v3 = {inv_sqrt6, -2.0 * inv_sqrt6, inv_sqrt6};
    const std::vector<double> v4 = {0.5, -0.5, 0.5, -0.5};
    if (name == "crossover1d") {
        const auto* c = std::get_if<CoeffSeq1D>(&coeffs);
        if (!c) throw std::invalid_argument("crossover1d needs 1D coefficients");
        const auto m = spectral_moments(*c);
        const double w = 2.0 * std::numbers::pi / c->L;
        const double R0 = m[0], R1 = w * w * m[1], R2 = std::pow(w, 4) * m[2];
        const double gap = R0 * R2 - R1 * R1;
        return {6, R1 * gap / 64.0, {4, 2, 0}, {gap / (96.0 * R0), R1 / 2.0, 3.0 * R0}, v3};
    }
    const auto* c = std::get_if<CoeffSeq2D>(&coeffs);
    if (!c) throw std::invalid_argument(name + " needs 2D coefficients");
    const auto m = spectral_moments(*c);
    const double w2 = std::pow(2.0 * std::numbers::pi / c->L, 2);
    const bool t = name.size() > 6 && name.back() == 't';  // transposed variant swaps the axes
    auto R = [&](std::size_t p, std::size_t q) {
        if (t) std::swap(p, q);
        return std::pow(w2, static_cast<double>(p + q)) * m.at(p, q);
    };
    const double R00 = R(0, 0), R01 = R(0, 1), R10 = R(1, 0), R11 = R(1, 1), R02 = R(0, 2), R20 = R(2, 0);
    if (name == "table1" || name == "table1t") {
        const double gap = R00 * R02 - R01 * R01;
        return {6, R01 * gap / 64.0, {4, 2, 0}, {gap / (96.0 * R00), R01 / 2.0, 3.0 * R00}, v3};
    }
    if (name == "table2") return {8, R00 * R01 * R10 * R11, {4, 2, 2, 0}, {R11 / 4.0, nullopt, nullopt, 4.0 * R00}, v4};
    if (name == "table3")
        return {8, R00 * R01 * R10 * R11 / 256.0, {4, 2, 2, 0}, {R11 / 64.0, nullopt, nullopt, 4.0 * R00}, v4};
    if (name == "table4" || name == "table4t") {
        const double g = R00 * R11 + R00 * R20 - R10 * R10;
        const double root = std::sqrt(R01 * R01 + 4.0 * R10 * R10);
        return {8,
                R01 * R10 * g / 256.0,
                {4, 2, 2, 0},
                {g / (64.0 * R00), R01 * R10 / (2.0 * R01 + 4.0 * R10 + 2.0 * root), (R01 + 2.0 * R10 + root) / 8.0,
                 4.0 * R00},
                v4};
    }
    if (name == "table5" || name == "table5t") {
        const double g = 4.0 * R00 * R11 + R00 * R20 - R10 * R10;
        return {8, R01 * R10 * g / 64.0, {4, 2, 2, 0}, {g / (64.0 * R00), nullopt, nullopt, 4.0 * R00}, v4};
    }
    if (name == "table6") {
        const double Rs = R00 * (R02 + 2.0 * R11 + R20) - (R01 + R10) * (R01 + R10);
        const double s = 1.0 / (2.0 * std::sqrt(5.0));
        return {12,
                R01 * R10 * R11 * Rs / 64.0,
                {4, 4, 2, 2, 0},
                {Rs / (80.0 * R00), R11 / 4.0, nullopt, nullopt, 5.0 * R00},
                {s, s, s, s, -4.0 * s}};
    }
    throw std::invalid_argument("unknown stencil '" + name + "'");
}

struct EigenBranch {
    std::vector<real_t> values;  // one per delta
    RealVector last_vector;      // eigenvector at the smallest delta
    double slope = 0.0;
    double coefficient = 0.0;    // value / delta^round(slope) at the smallest delta
};

struct ExpansionReport {
    std::vector<double> deltas;
    std::vector<real_t> dets;
    double det_slope = 0.0;
    double det_coefficient = 0.0;
    std::vector<EigenBranch> branches;  // branch 0 tracks v1_limit, rest by decreasing slope
    double v1_error = 0.0;
    bool ambiguous = false;
    bool exponents_ok = false;
    bool coefficients_ok = false;
    bool v1_ok = false;
    std::vector<std::string> notes;

    bool ok() const noexcept { return exponents_ok && coefficients_ok && v1_ok && !ambiguous; }
};

namespace detail {

inline double fit_slope(const std::vector<double>& deltas, const std::vector<real_t>& values) {
    const std::size_t n = deltas.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(deltas[i]);
        const double y = static_cast<double>(std::log(values[i]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

inline const std::vector<double>& default_delta_sequence() {
    static const std::vector<double> deltas = [] {
        std::vector<double> d;
        for (int j = 0; j < 6; ++j) d.push_back(0.1 * std::ldexp(1.0, -j));
        return d;
    }();
    return deltas;
}

/// Fits det C(delta) and the eigenvalue branches over a decreasing delta
/// sequence. Branches are followed by maximal eigenvector overlap, since the
/// sorted order can swap between deltas.
inline ExpansionReport expansion_check(const FieldCoeffs& coeffs, const Stencil& st, const std::vector<double>& deltas,
                                       const SpectralExpansion& expected, double slope_tol = 0.1,
                                       double coef_tol = 0.02, double v1_tol = 1e-2) {
    if (deltas.size() < 2) throw std::invalid_argument("need at least two delta values");
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i - 1])) throw std::invalid_argument("delta sequence must be decreasing");
    const auto n = static_cast<Eigen::Index>(st.points.size());
    if (expected.eigen_exponents.size() != st.points.size() || expected.v1_limit.size() != st.points.size())
        throw std::invalid_argument("expected expansion does not match the stencil size");

    ExpansionReport rep;
    rep.deltas = deltas;
    rep.branches.assign(static_cast<std::size_t>(n), {});
    std::vector<RealVector> prev;
    for (double d : deltas) {
        Eigen::SelfAdjointEigenSolver<CovMatrix> es(pattern_cov(coeffs, st.scaled(d)));
        if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > 0))
            throw std::runtime_error("covariance is not positive definite at delta = " + std::to_string(d));
        real_t det = 1;
        for (Eigen::Index k = 0; k < n; ++k) det *= es.eigenvalues()[k];
        rep.dets.push_back(det);
        std::vector<int> assign(static_cast<std::size_t>(n), -1);
        if (prev.empty()) {
            for (Eigen::Index k = 0; k < n; ++k) assign[static_cast<std::size_t>(k)] = static_cast<int>(k);
        } else {
            // Greedy matching on |overlap|, largest first.
            std::vector<bool> used_b(static_cast<std::size_t>(n)), used_k(static_cast<std::size_t>(n));
            for (Eigen::Index step = 0; step < n; ++step) {
                real_t best = -1;
                Eigen::Index bb = 0, bk = 0;
                for (Eigen::Index b = 0; b < n; ++b) {
                    if (used_b[static_cast<std::size_t>(b)]) continue;
                    for (Eigen::Index k = 0; k < n; ++k) {
                        if (used_k[static_cast<std::size_t>(k)]) continue;
                        const real_t ov = std::abs(prev[static_cast<std::size_t>(b)].dot(es.eigenvectors().col(k)));
                        if (ov > best) {
                            best = ov;
                            bb = b;
                            bk = k;
                        }
                    }
                }
                if (best < 0.5) rep.ambiguous = true;
                used_b[static_cast<std::size_t>(bb)] = used_k[static_cast<std::size_t>(bk)] = true;
                assign[static_cast<std::size_t>(bb)] = static_cast<int>(bk);
            }
        }
        prev.assign(static_cast<std::size_t>(n), RealVector());
        for (Eigen::Index b = 0; b < n; ++b) {
            const Eigen::Index k = assign[static_cast<std::size_t>(b)];
            rep.branches[static_cast<std::size_t>(b)].values.push_back(es.eigenvalues()[k]);
            prev[static_cast<std::size_t>(b)] = es.eigenvectors().col(k);
        }
    }
    if (rep.ambiguous) rep.notes.push_back("eigenvalue branches cross within the delta range; shrink delta");

    const double dmin = deltas.back();
    for (std::size_t b = 0; b < rep.branches.size(); ++b) {
        auto& br = rep.branches[b];
        br.last_vector = prev[b];
        br.slope = detail::fit_slope(deltas, br.values);
        br.coefficient = static_cast<double>(br.values.back()) / std::pow(dmin, std::round(br.slope));
    }
    rep.det_slope = detail::fit_slope(deltas, rep.dets);
    rep.det_coefficient = static_cast<double>(rep.dets.back()) / std::pow(dmin, expected.det_exponent);

    // Branch 0 is the one aligned with v1_limit; the rest by decreasing slope.
    RealVector v1(n);
    for (Eigen::Index i = 0; i < n; ++i) v1[i] = expected.v1_limit[static_cast<std::size_t>(i)];
    std::size_t best = 0;
    real_t best_ov = -1;
    for (std::size_t b = 0; b < rep.branches.size(); ++b) {
        const real_t ov = std::abs(rep.branches[b].last_vector.dot(v1));
        if (ov > best_ov) {
            best_ov = ov;
            best = b;
        }
    }
    std::swap(rep.branches[0], rep.branches[best]);
    std::stable_sort(rep.branches.begin() + 1, rep.branches.end(),
                     [](const EigenBranch& a, const EigenBranch& b) { return a.slope > b.slope; });
    const RealVector& w = rep.branches[0].last_vector;
    rep.v1_error = static_cast<double>(std::min((w - v1).norm(), (w + v1).norm()));
    rep.v1_ok = rep.v1_error <= v1_tol;

    // Exponents: branch 0 against entry 0, the rest as sorted multisets.
    std::vector<int> rest_expected(expected.eigen_exponents.begin() + 1, expected.eigen_exponents.end());
    std::vector<std::size_t> order(rest_expected.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i + 1;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return expected.eigen_exponents[a] > expected.eigen_exponents[b]; });
    rep.exponents_ok = std::abs(rep.det_slope - expected.det_exponent) <= slope_tol &&
                       std::abs(rep.branches[0].slope - expected.eigen_exponents[0]) <= slope_tol;
    for (std::size_t i = 0; i < order.size(); ++i)
        if (std::abs(rep.branches[i + 1].slope - expected.eigen_exponents[order[i]]) > slope_tol) rep.exponents_ok = false;

    // Coefficients: det, branch 0, and the remaining branches grouped by
    // exponent (within a group, sorted coefficients are compared).
    auto close = [&](double got, double want) { return std::abs(got / want - 1.0) <= coef_tol; };
    rep.coefficients_ok = true;
    if (expected.det_coefficient && !close(rep.det_coefficient, *expected.det_coefficient)) {
        rep.coefficients_ok = false;
        rep.notes.push_back("determinant coefficient mismatch");
    }
    if (expected.eigen_coefficients.size() == st.points.size()) {
        auto coef_at = [&](std::size_t b, int e) {
            return static_cast<double>(rep.branches[b].values.back()) / std::pow(dmin, e);
        };
        if (expected.eigen_coefficients[0] && !close(coef_at(0, expected.eigen_exponents[0]), *expected.eigen_coefficients[0])) {
            rep.coefficients_ok = false;
            rep.notes.push_back("lambda_1 coefficient mismatch");
        }
        for (std::size_t i = 0; i < order.size();) {
            std::size_t j = i;
            const int e = expected.eigen_exponents[order[i]];
            while (j < order.size() && expected.eigen_exponents[order[j]] == e) ++j;
            std::vector<double> got, want;
            bool complete = true;
            for (std::size_t k = i; k < j; ++k) {
                got.push_back(coef_at(k + 1, e));
                const auto& c = expected.eigen_coefficients[order[k]];
                if (c) want.push_back(*c);
                else complete = false;
            }
            if (complete) {
                std::sort(got.begin(), got.end());
                std::sort(want.begin(), want.end());
                for (std::size_t k = 0; k < got.size(); ++k)
                    if (!close(got[k], want[k])) {
                        rep.coefficients_ok = false;
                        rep.notes.push_back("coefficient mismatch for exponent " + std::to_string(e));
                    }
            }
            i = j;
        }
    }
    return rep;
}

enum class OrthantMethod { Auto, Exact, MonteCarlo, Ray };

struct FunctionalResult {
    double delta = 0.0;
    double probability = 0.0;
    double stderr_ = 0.0;     // of the probability; 0 for the exact method
    double functional = 0.0;  // P sqrt(det C / lambda_1^n)
    double functional_stderr = 0.0;
    double lambda1 = 0.0;
    double det = 0.0;
};

/// P(delta) sqrt(det C(delta) / lambda_1(delta)^n), where lambda_1 is the
/// eigenvalue whose eigenvector is closest to v1_limit. Auto uses the exact
/// formula for n <= 3 and the radial estimator otherwise.
inline FunctionalResult asymptotic_functional(const FieldCoeffs& coeffs, const Stencil& st,
                                              const std::vector<double>& v1_limit, double delta,
                                              OrthantMethod method = OrthantMethod::Auto, std::size_t samples = 200000,
                                              std::uint64_t seed = 0) {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    const CovMatrix C = pattern_cov(coeffs, st.scaled(delta));
    const auto n = C.rows();
    if (v1_limit.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("v1_limit has the wrong size");
    Eigen::SelfAdjointEigenSolver<CovMatrix> es(C);
    if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > 0))
        throw std::runtime_error("covariance is not positive definite");
    RealVector v1(n);
    for (Eigen::Index i = 0; i < n; ++i) v1[i] = v1_limit[static_cast<std::size_t>(i)];
    Eigen::Index k1 = 0;
    real_t best = -1, det = 1;
    for (Eigen::Index k = 0; k < n; ++k) {
        det *= es.eigenvalues()[k];
        const real_t ov = std::abs(es.eigenvectors().col(k).dot(v1));
        if (ov > best) {
            best = ov;
            k1 = k;
        }
    }
    const real_t lambda1 = es.eigenvalues()[k1];
    if (method == OrthantMethod::Auto) method = n <= 3 ? OrthantMethod::Exact : OrthantMethod::Ray;
    FunctionalResult out;
    out.delta = delta;
    out.lambda1 = static_cast<double>(lambda1);
    out.det = static_cast<double>(det);
    real_t p = 0, se = 0;
    switch (method) {
        case OrthantMethod::Exact: p = orthant_exact_small(st.signs, C); break;
        case OrthantMethod::MonteCarlo: {
            const auto e = orthant_mc(st.signs, C, samples, seed);
            p = e.estimate;
            se = e.stderr_;
            break;
        }
        default: {
            const auto e = orthant_ray(st.signs, C, samples, seed);
            p = e.estimate;
            se = e.stderr_;
        }
    }
    const real_t factor = std::sqrt(det / std::pow(lambda1, static_cast<real_t>(n)));
    out.probability = static_cast<double>(p);
    out.stderr_ = static_cast<double>(se);
    out.functional = static_cast<double>(p * factor);
    out.functional_stderr = static_cast<double>(se * factor);
    return out;
}

inline OrthantMethod parse_orthant_method(const std::string& s) {
    if (s == "auto") return OrthantMethod::Auto;
    if (s == "exact") return OrthantMethod::Exact;
    if (s == "mc") return OrthantMethod::MonteCarlo;
    if (s == "ray") return OrthantMethod::Ray;
    throw std::invalid_argument("unknown orthant method '" + s + "'");
}

}  // namespace nodal
