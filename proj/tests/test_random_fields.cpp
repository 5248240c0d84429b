#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "nodal/random_fields.hpp"
#include "nodal/rng.hpp"

using namespace nodal;

namespace {

// Independent moment oracle: plain loops over the coefficient table.
double brute_moment_1d(const CoeffSeq1D& c, int l) {
    double s = 0;
    for (std::size_t k = 0; k < c.a.size(); ++k) s += std::pow(double(k), 2 * l) * c.a[k] * c.a[k];
    return s;
}

double brute_moment_2d(const CoeffSeq2D& c, int p, int q) {
    double s = 0;
    for (std::size_t k = 0; k <= c.K; ++k)
        for (std::size_t l = 0; l <= c.K; ++l) s += std::pow(double(k), 2 * p) * std::pow(double(l), 2 * q) * c.at(k, l) * c.at(k, l);
    return s;
}

Realization1D single_cosine(double L) {
    return {CoeffSeq1D{L, {0.0, 1.0}}, {0.0, 0.0, 1.0}, 0};
}

}  // namespace

TEST(TrigCoeffs, OneDimensional) {
    const auto c = trig_coeffs_1d(3);
    EXPECT_EQ(c.a, (std::vector<double>{0, 1, 1, 1}));
    EXPECT_DOUBLE_EQ(c.L, 2.0 * std::numbers::pi);
    EXPECT_EQ(c.K(), 3u);
}

TEST(TrigCoeffs, TwoDimensional) {
    const auto c = trig_coeffs_2d(2);
    EXPECT_EQ(c.K, 2u);
    for (std::size_t k = 0; k <= 2; ++k)
        for (std::size_t l = 0; l <= 2; ++l) EXPECT_EQ(c.at(k, l), (k >= 1 && l >= 1) ? 1.0 : 0.0);
}

TEST(TrigCoeffs, RejectsDegreeBelowTwo) {
    EXPECT_THROW(trig_coeffs_1d(1), std::invalid_argument);
    EXPECT_THROW(trig_coeffs_2d(1), std::invalid_argument);
}

TEST(Coeffs, NondegeneracyChecks) {
    EXPECT_THROW(make_coeffs_1d(1.0, {0.0, 1.0}), std::invalid_argument);
    EXPECT_NO_THROW(make_coeffs_1d(1.0, {0.5, 1.0}));
    EXPECT_THROW(make_coeffs_1d(0.0, {1.0, 1.0}), std::invalid_argument);
    // Only a diagonal pair: k1 != k2 and l1 != l2 hold, but 1+4 == 4+1.
    EXPECT_THROW(make_coeffs_2d(1.0, {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}}), std::invalid_argument);
    EXPECT_NO_THROW(make_coeffs_2d(1.0, {{0, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
    EXPECT_THROW(make_coeffs_2d(1.0, {{1, 0}, {0}}), std::invalid_argument);
}

TEST(Realization, DeterministicForSeed) {
    const auto c = trig_coeffs_2d(3);
    const auto a = draw_realization(c, 99), b = draw_realization(c, 99), d = draw_realization(c, 100);
    EXPECT_EQ(a.g, b.g);
    EXPECT_NE(a.g, d.g);
    EXPECT_EQ(a.g.size(), 4u * 16u);
    EXPECT_EQ(draw_realization(trig_coeffs_1d(4), 1).g.size(), 9u);
}

TEST(Realization, WeightsAreStandardNormal) {
    // 10^6 draws: mean within (-0.004, 0.004), variance within (0.994, 1.006).
    const CoeffSeq1D c{1.0, std::vector<double>(500001, 1.0)};
    const auto r = draw_realization(c, 2024);
    ASSERT_EQ(r.g.size(), 1000001u);
    double m = 0, v = 0;
    for (double g : r.g) m += g;
    m /= double(r.g.size());
    for (double g : r.g) v += (g - m) * (g - m);
    v /= double(r.g.size() - 1);
    EXPECT_GT(m, -0.004);
    EXPECT_LT(m, 0.004);
    EXPECT_GT(v, 0.994);
    EXPECT_LT(v, 1.006);
}

TEST(Evaluate, ZeroWeightsGiveZero) {
    Realization1D r{trig_coeffs_1d(4), std::vector<double>(9, 0.0), 0};
    for (double x : {0.0, 1.0, 3.0, 2.0 * std::numbers::pi}) EXPECT_EQ(evaluate(r, x), 0.0);
}

TEST(Evaluate, SingleCosine) {
    const auto r = single_cosine(2.0);
    EXPECT_DOUBLE_EQ(evaluate(r, 0.0), 1.0);
    EXPECT_NEAR(evaluate(r, 1.0), -1.0, 1e-15);
}

TEST(Evaluate, Periodic) {
    const auto r1 = draw_realization(trig_coeffs_1d(7), 3);
    EXPECT_NEAR(evaluate(r1, 0.0), evaluate(r1, r1.coeffs.L), 1e-12 * std::abs(evaluate(r1, 0.0)) + 1e-13);
    const auto r2 = draw_realization(trig_coeffs_2d(3), 3);
    const double L = r2.coeffs.L;
    EXPECT_NEAR(evaluate(r2, 0.0, 0.3), evaluate(r2, L, 0.3), 1e-12);
    EXPECT_NEAR(evaluate(r2, 0.7, 0.0), evaluate(r2, 0.7, L), 1e-12);
}

TEST(Evaluate, RejectsOutsideDomain) {
    const auto r = draw_realization(trig_coeffs_1d(3), 1);
    EXPECT_THROW(evaluate(r, -0.1), std::domain_error);
    EXPECT_THROW(evaluate(r, 7.0), std::domain_error);
    const auto r2 = draw_realization(trig_coeffs_2d(3), 1);
    EXPECT_THROW(evaluate(r2, 1.0, -1e-9), std::domain_error);
}

TEST(Evaluate, LatticeMatchesPointwise) {
    const auto r1 = draw_realization(trig_coeffs_1d(6), 8);
    const auto v1 = sample_lattice(r1, 37);
    for (std::size_t i = 0; i <= 37; ++i) EXPECT_NEAR(v1[i], evaluate(r1, i * r1.coeffs.L / 37), 1e-12);
    const auto r2 = draw_realization(trig_coeffs_2d(3), 8);
    const auto v2 = sample_lattice(r2, 11);
    const double h = r2.coeffs.L / 11;
    for (std::size_t j = 0; j <= 11; ++j)
        for (std::size_t i = 0; i <= 11; ++i) EXPECT_NEAR(v2[j * 12 + i], evaluate(r2, i * h, j * h), 1e-12);
}

TEST(Moments, TrigOneDimensional) {
    const auto m = spectral_moments(trig_coeffs_1d(3));
    EXPECT_DOUBLE_EQ(m[0], 3);
    EXPECT_DOUBLE_EQ(m[1], 14);
    EXPECT_DOUBLE_EQ(m[2], 98);
    EXPECT_DOUBLE_EQ(m[3], 794);
    for (std::size_t N = 2; N <= 20; ++N) EXPECT_DOUBLE_EQ(spectral_moments(trig_coeffs_1d(N))[0], double(N));
}

TEST(Moments, TrigTwoDimensional) {
    const auto m = spectral_moments(trig_coeffs_2d(3));
    EXPECT_DOUBLE_EQ(m.at(0, 0), 9);
    EXPECT_DOUBLE_EQ(m.at(1, 0), 42);
    EXPECT_DOUBLE_EQ(m.at(0, 1), 42);
    EXPECT_DOUBLE_EQ(m.at(1, 1), 196);
    EXPECT_DOUBLE_EQ(m.at(2, 0), 294);
    EXPECT_DOUBLE_EQ(m.at(0, 2), 294);
    EXPECT_THROW(m.at(2, 1), std::out_of_range);
}

TEST(Moments, AgreeWithBruteForceOnRandomCoefficients) {
    rng::CounterStream s(17);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> a(8);
        for (double& v : a) v = s.normal();
        const CoeffSeq1D c1{3.0, a};
        const auto m1 = spectral_moments(c1);
        for (int l = 0; l < 4; ++l) EXPECT_NEAR(m1[l], brute_moment_1d(c1, l), 1e-12 * brute_moment_1d(c1, l));
        CoeffSeq2D c2{2.0, 5, std::vector<double>(36)};
        for (double& v : c2.a) v = s.normal();
        const auto m2 = spectral_moments(c2);
        for (int p = 0; p <= 2; ++p)
            for (int q = 0; p + q <= 2; ++q)
                EXPECT_NEAR(m2.at(p, q), brute_moment_2d(c2, p, q), 1e-12 * brute_moment_2d(c2, p, q));
    }
}

TEST(Moments, StrictCauchySchwarz) {
    const auto m = spectral_moments(trig_coeffs_1d(5));
    EXPECT_GT(m[0] * m[2] - m[1] * m[1], 0.0);
}

TEST(Covariance, AtZeroAndEven) {
    const auto c1 = trig_coeffs_1d(4);
    EXPECT_DOUBLE_EQ(covariance(c1, 0.0), spectral_moments(c1)[0]);
    EXPECT_EQ(covariance(c1, 0.37), covariance(c1, -0.37));
    const auto c2 = trig_coeffs_2d(3);
    EXPECT_DOUBLE_EQ(covariance(c2, 0.0, 0.0), 9.0);
    EXPECT_EQ(covariance(c2, 0.2, -0.5), covariance(c2, -0.2, 0.5));
}

TEST(Covariance, TaylorRemainderIsSixthOrder) {
    const auto c = trig_coeffs_1d(3);
    const auto m = spectral_moments(c);
    auto rem = [&](long double d) {
        return covariance<long double>(c, d) - (m[0] - m[1] * d * d / 2 + m[2] * d * d * d * d / 24);
    };
    // r - taylor4 = -A3 d^6 / 720 + O(d^8)
    for (long double d : {2e-2L, 1e-2L}) {
        const long double ratio = rem(d) / std::pow(d, 6);
        EXPECT_NEAR(static_cast<double>(ratio), -794.0 / 720.0, 1e-2);
    }
}

TEST(Covariance, EmpiricalCovarianceMatches) {
    const auto c = trig_coeffs_1d(4);
    const std::size_t T = 10000;
    const double xs[][2] = {{0.1, 0.4}, {1.0, 2.5}, {3.0, 3.1}, {0.0, 6.0}, {2.2, 5.9},
                            {4.4, 0.3}, {1.7, 1.7}, {5.5, 2.0}, {0.9, 4.1}, {3.3, 6.2}};
    std::vector<double> uxs[10], uys[10];
    for (std::size_t t = 0; t < T; ++t) {
        const auto r = draw_realization(c, rng::substream_seed(5, t));
        for (int p = 0; p < 10; ++p) {
            uxs[p].push_back(evaluate(r, xs[p][0]));
            uys[p].push_back(evaluate(r, xs[p][1]));
        }
    }
    for (int p = 0; p < 10; ++p) {
        double m = 0, m2 = 0;
        for (std::size_t t = 0; t < T; ++t) {
            const double v = uxs[p][t] * uys[p][t];
            m += v;
            m2 += v * v;
        }
        m /= T;
        const double se = std::sqrt((m2 / T - m * m) / T);
        EXPECT_NEAR(m, covariance(c, xs[p][0] - xs[p][1]), 5 * se) << "pair " << p;
    }
}

TEST(Json, RoundTrip) {
    const auto c2 = trig_coeffs_2d(3);
    nlohmann::json j = c2;
    EXPECT_EQ(j.at("dim"), 2);
    const auto back = coeffs_2d_from_json(j);
    EXPECT_EQ(back.a, c2.a);
    const auto r = draw_realization(c2, 4);
    nlohmann::json jr = r;
    const auto rb = realization_2d_from_json(jr);
    EXPECT_EQ(rb.g, r.g);
    EXPECT_EQ(rb.seed, 4u);
    const auto r1 = draw_realization(trig_coeffs_1d(5), 6);
    nlohmann::json j1 = r1;
    EXPECT_EQ(realization_1d_from_json(j1).g, r1.g);
}
