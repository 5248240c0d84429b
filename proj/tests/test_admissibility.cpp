#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "nodal/admissibility.hpp"
#include "nodal/homology.hpp"
#include "nodal/random_fields.hpp"

using namespace nodal;

namespace {

Realization1D unit_cosine() { return {CoeffSeq1D{1.0, {0.0, 1.0}}, {0.0, 0.0, 1.0}, 0}; }

// 2D field on [0,1]^2 with K = 1 from cos-cos weights c(k,l) for k,l in {0,1}.
Realization2D cos_field(double c00, double c10, double c01, double c11) {
    CoeffSeq2D c{1.0, 1, {1.0, 1.0, 1.0, 1.0}};
    std::vector<double> g(16, 0.0);
    g[0] = c00;
    g[4] = c01;
    g[8] = c10;
    g[12] = c11;
    return {c, g, 0};
}

Realization2D negated(Realization2D r) {
    for (double& v : r.g) v = -v;
    return r;
}

// Mirror x1 -> L - x1: sine factors in x1 change sign.
Realization2D mirrored(Realization2D r) {
    const std::size_t K = r.coeffs.K;
    for (std::size_t k = 0; k <= K; ++k)
        for (std::size_t l = 0; l <= K; ++l) {
            r.g[(k * (K + 1) + l) * 4 + 2] *= -1;
            r.g[(k * (K + 1) + l) * 4 + 3] *= -1;
        }
    return r;
}

std::size_t pow4_sum(int D) {
    std::size_t s = 0;
    for (int n = 0; n <= D; ++n) s += std::size_t{1} << (2 * n);
    return s;
}

}  // namespace

TEST(DoubleCrossover, Examples) {
    EXPECT_TRUE(double_crossover(1, -1, 1));
    EXPECT_FALSE(double_crossover(1, 1, 1));
    EXPECT_TRUE(double_crossover(-0.2, 0.5, -0.3));
    EXPECT_TRUE(double_crossover(0, 0, 0));
    EXPECT_FALSE(double_crossover(1, 0.5, -1));
}

TEST(IntervalAdmissible, MonotoneFieldIsCertified) {
    // cos(2 pi x) is monotone on [0, 1/2].
    for (int D = 0; D <= 8; ++D) EXPECT_TRUE(interval_admissible(unit_cosine(), 0.01, 0.49, D).certified());
}

TEST(IntervalAdmissible, CosineOverTrough) {
    const auto out = interval_admissible(unit_cosine(), 0.2, 0.8, 0);
    EXPECT_EQ(out.status, ValidationStatus::NotCertified);
    ASSERT_FALSE(out.violations.empty());
    EXPECT_EQ(out.violations.front().level, 0);
    EXPECT_THROW(interval_admissible(unit_cosine(), 0.5, 0.2, 0), std::domain_error);
    EXPECT_THROW(interval_admissible(unit_cosine(), 0.0, 0.5, -1), std::invalid_argument);
}

TEST(IntervalAdmissible, DepthMonotonicity) {
    const auto c = trig_coeffs_1d(8);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto r = draw_realization(c, seed);
        for (double a = 0.0; a + 0.6 <= c.L; a += 0.6) {
            bool deeper = interval_admissible(r, a, a + 0.6, 5).certified();
            for (int D = 4; D >= 0; --D) {
                const bool here = interval_admissible(r, a, a + 0.6, D).certified();
                if (deeper) EXPECT_TRUE(here) << "seed " << seed << " a " << a << " D " << D;
                deeper = here;
            }
        }
    }
}

TEST(Validate1D, CosineIsCertified) {
    const auto r = unit_cosine();
    const auto out = validate_1d(r, 3, 6);
    EXPECT_TRUE(out.certified());
    EXPECT_EQ(out.max_depth_checked, 6);
    EXPECT_EQ(out.stencils_checked, 3 * 127u);
    EXPECT_TRUE(homology_match(betti_pair(sign_grid(r, 3)), reference_betti(r, 64).betti));
}

TEST(Validate1D, SingleIntervalSeesTheTrough) {
    const auto out = validate_1d(unit_cosine(), 1, 6);
    EXPECT_EQ(out.status, ValidationStatus::NotCertified);
    EXPECT_EQ(out.violations.front().level, 0);
}

TEST(Validate1D, ConstantFieldIsCertified) {
    const Realization1D r{CoeffSeq1D{1.0, {1.0}}, {0.7}, 0};
    for (std::size_t M : {1u, 2u, 7u, 30u})
        for (int D : {0, 3, 6}) EXPECT_TRUE(validate_1d(r, M, D).certified());
}

TEST(Validate1D, ZeroSampleIsDegenerate) {
    const auto out = validate_1d(unit_cosine(), 4, 3, 1e-12);
    EXPECT_EQ(out.status, ValidationStatus::Degenerate);
    EXPECT_EQ(out.zero_flag_count, 2u);
}

TEST(Validate1D, ViolationLimit) {
    const auto r = draw_realization(trig_coeffs_1d(20), 3);
    const auto all = validate_1d(r, 4, 6);
    ASSERT_GT(all.violations.size(), 2u);
    EXPECT_EQ(validate_1d(r, 4, 6, 0.0, 2).violations.size(), 2u);
}

TEST(Validate1D, CertifiedPositiveIntervalsStayPositive) {
    // Dense sampling between positive endpoints of a certified interval.
    const auto c = trig_coeffs_1d(10);
    const std::size_t M = 40;
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto r = draw_realization(c, seed);
        const double h = c.L / M;
        for (std::size_t k = 0; k < M; ++k) {
            const double a = k * h, b = (k + 1) * h;
            const double ua = evaluate(r, a), ub = evaluate(r, std::min(b, c.L));
            if (ua <= 0 || ub <= 0 || !interval_admissible(r, a, std::min(b, c.L), 6).certified()) continue;
            ++checked;
            for (int i = 0; i <= 1000; ++i) ASSERT_GE(evaluate(r, std::min(a + (b - a) * i / 1000.0, c.L)), 0.0);
        }
    }
    EXPECT_GT(checked, 500u);
}

TEST(Validate2D, ConstantFieldIsCertified) {
    const auto r = cos_field(1, 0, 0, 0);
    const auto out = validate_2d(r, 4, 3);
    EXPECT_TRUE(out.certified());
    // 12 boundary squares with sum 4^n stencils, 4 interior squares with 5x that.
    EXPECT_EQ(out.stencils_checked, 12 * pow4_sum(3) + 4 * 5 * pow4_sum(3));
    EXPECT_THROW(validate_2d(r, 2, 3), std::invalid_argument);
}

TEST(Validate2D, VerticalBands) {
    const auto r = cos_field(0, 1, 0, 0);
    const auto out = validate_2d(r, 8, 4);
    EXPECT_TRUE(out.certified()) << (out.violations.empty() ? "" : out.violations.front().pattern_id);
    const auto bp = betti_pair(sign_grid(r, 8));
    EXPECT_EQ(bp, (BettiPair{{2, 0}, {1, 0}}));
    EXPECT_TRUE(homology_match(bp, reference_betti(r, 64).betti));
}

TEST(Validate2D, BoundarySquareCount) {
    for (std::size_t M = 3; M <= 20; ++M) {
        std::size_t boundary = 0;
        for (std::size_t k2 = 0; k2 < M; ++k2)
            for (std::size_t k1 = 0; k1 < M; ++k1) boundary += is_boundary_square(k1, k2, M);
        EXPECT_EQ(boundary, M * M - (M - 2) * (M - 2));
    }
}

TEST(Validate2D, PolarityEquivariance) {
    const auto c = trig_coeffs_2d(3);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto r = draw_realization(c, seed);
        const auto a = validate_2d(r, 6, 2), b = validate_2d(negated(r), 6, 2);
        EXPECT_EQ(a.status, b.status);
        ASSERT_EQ(a.violations.size(), b.violations.size());
        for (std::size_t i = 0; i < a.violations.size(); ++i) {
            EXPECT_EQ(a.violations[i].square, b.violations[i].square);
            EXPECT_EQ(a.violations[i].level, b.violations[i].level);
            EXPECT_EQ(a.violations[i].shift, b.violations[i].shift);
        }
    }
}

TEST(Validate2D, MirrorEquivariance) {
    const auto c = trig_coeffs_2d(3);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto r = draw_realization(c, seed);
        const auto a = validate_2d(r, 6, 2), b = validate_2d(mirrored(r), 6, 2);
        EXPECT_EQ(a.status, b.status) << "seed " << seed;
        std::multiset<std::pair<std::size_t, int>> va, vb;
        for (const auto& v : a.violations) va.insert({(v.square / 6) * 6 + (5 - v.square % 6), v.level});
        for (const auto& v : b.violations) vb.insert({v.square, v.level});
        EXPECT_EQ(va, vb) << "seed " << seed;
    }
}

TEST(BAdmissible, ConstantField) {
    const auto out = b_admissible(cos_field(1, 0, 0, 0), Square{0.1, 0.2, 0.3}, 4);
    EXPECT_TRUE(out.certified());
    EXPECT_EQ(out.stencils_checked, pow4_sum(4));
    EXPECT_THROW(b_admissible(cos_field(1, 0, 0, 0), Square{0.8, 0.2, 0.3}, 1), std::domain_error);
}

TEST(BAdmissible, AlternatingCornersFailAtLevelZero) {
    // cos(2 pi x1) cos(2 pi x2) on [0.1, 0.6]^2: corners +, -, +, - around the square.
    const auto r = cos_field(0, 0, 0, 1);
    const auto out = b_admissible(r, Square{0.1, 0.1, 0.5}, 3);
    EXPECT_EQ(out.status, ValidationStatus::NotCertified);
    bool level0 = false;
    for (const auto& v : out.violations) level0 |= v.level == 0 && v.sub == 0;
    EXPECT_TRUE(level0);
}

TEST(BAdmissible, DepthMonotonicity) {
    const auto c = trig_coeffs_2d(4);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto r = draw_realization(c, seed);
        const Square sq{1.0, 2.0, 0.5};
        bool deeper = b_admissible(r, sq, 4).certified();
        for (int D = 3; D >= 0; --D) {
            const bool here = b_admissible(r, sq, D).certified();
            if (deeper) EXPECT_TRUE(here);
            deeper = here;
        }
    }
}

TEST(IAdmissible, FivePointPattern) {
    // 1 + cos(2 pi x1) + cos(2 pi x2) on [0,1]^2: corners 3, edge midpoints 1, center -1.
    const auto r = cos_field(1, 1, 1, 0);
    const Square sq{0.0, 0.0, 1.0};
    EXPECT_FALSE(i5_admissible(r, sq));
    EXPECT_TRUE(i4_admissible(r, sq));
    const auto one = cos_field(1, 0, 0, 0);
    EXPECT_TRUE(i4_admissible(one, sq));
    EXPECT_TRUE(i5_admissible(one, sq));
}

TEST(IAdmissible, ConstantFieldAndCount) {
    const auto one = cos_field(1, 0, 0, 0);
    for (int D = 0; D <= 4; ++D) {
        const auto out = i_admissible(one, Square{0.25, 0.25, 0.25}, D);
        EXPECT_TRUE(out.certified());
        EXPECT_EQ(out.stencils_checked, 5 * pow4_sum(D));
    }
    EXPECT_THROW(i_admissible(one, Square{0.0, 0.0, 1.0}, 1), std::domain_error);
}

TEST(IAdmissible, CertifiedImpliesLevelZeroChecks) {
    const auto c = trig_coeffs_2d(3);
    const double L = c.L;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto r = draw_realization(c, seed);
        const Square sq{L / 3, L / 3, L / 6};
        if (!i_admissible(r, sq, 3).certified()) continue;
        EXPECT_TRUE(i4_admissible(r, sq));
        EXPECT_TRUE(i5_admissible(r, sq));
    }
}

TEST(IAdmissible, ShiftedSquareViolationIsReported) {
    // D = 0 lattice of 5 x 5 points, square J* at lattice corner (1, 1) with
    // side 2. All plus except (3, 2): J* itself only carries a single minus on
    // its right edge, the +x1 shift sees corners + and center -.
    detail::SignLattice lat{4, std::vector<std::uint8_t>(25, 1), 0};
    lat.plus[2 * 5 + 3] = 0;
    ValidationOutcome out;
    detail::ViolationSink sink{out, 0};
    detail::check_square_i(lat, 1, 1, 0, 0, default_patterns().I, sink);
    ASSERT_EQ(out.violations.size(), 1u);
    EXPECT_EQ(out.violations[0].shift, 0);
    EXPECT_EQ(out.violations[0].pattern_id.rfind("I5:", 0), 0u);
    EXPECT_EQ(out.stencils_checked, 5u);
    EXPECT_FALSE(default_patterns().I.forbids(lat.code(1, 1, 1)));
}

TEST(ValidationOutcome, Json) {
    const auto out = validate_1d(unit_cosine(), 1, 2);
    nlohmann::json j = out;
    EXPECT_EQ(j.at("status"), "not_certified");
    EXPECT_EQ(j.at("max_depth_checked"), 2);
    EXPECT_FALSE(j.at("violations").empty());
}
