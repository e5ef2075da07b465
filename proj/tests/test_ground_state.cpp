#include <gtest/gtest.h>

#include <cmath>

#include "xyflow/errors.hpp"
#include "xyflow/ground_state.hpp"

using namespace xyflow;

namespace {

// Interior stationary point of the three-term potential:
// 8 h^3 c^2 + 4 h^2 c - delta = 0, positive-discriminant root.
double analytic_c(double h, double delta) {
    return (-4 * h * h + std::sqrt(16 * h * h * h * h + 32 * h * h * h * delta)) / (16 * h * h * h);
}


}  // namespace

TEST(SitePotential, ClosedFormValues) {
    const double t = std::log(10.0);
    const auto sp = SitePotential::restricted(0.2, t);
    EXPECT_NEAR(site_potential(Angle(kPi / 2), sp), 0.0, 1e-17);
    EXPECT_NEAR(site_potential(Angle(0.0), sp), -0.02 - 8.0 / 3.0 * 1e-3, 1e-15);
    EXPECT_NEAR(site_potential(Angle(0.0), sp), -0.0226667, 1e-7);
    for (int k = 0; k < 1024; ++k) {
        const double th = kTwoPi * k / 1024;
        EXPECT_NEAR(site_potential(Angle(th), sp), site_potential(Angle(kTwoPi - th), sp), 1e-16);
    }
    EXPECT_THROW(SitePotential::restricted(0.2, 0.9), DomainError);
    EXPECT_THROW(SitePotential::full_log(0.2, 0.2), DomainError);
}

TEST(SitePotential, FullLogWithinRestBound) {
    for (double t : {1.0, 2.0, 4.0}) {
        const auto a = SitePotential::restricted(0.3, t);
        const auto b = SitePotential::full_log(0.3, t);
        for (int k = 0; k < 512; ++k) {
            const double th = kTwoPi * k / 512;
            EXPECT_LE(std::abs(site_potential(Angle(th), a) - site_potential(Angle(th), b)), a.coeffs.rest_bound);
            // The Chebyshev representation reproduces the direct log kernel.
            EXPECT_NEAR(site_potential_c(std::cos(th), b), site_potential(Angle(th), b), 1e-14);
        }
    }
}

TEST(SitePotential, DerivativeMatchesFiniteDifference) {
    for (bool full : {false, true}) {
        const auto sp = full ? SitePotential::full_log(0.4, 0.6) : SitePotential::restricted(0.4, 1.2);
        for (double c : {-0.9, -0.2, 0.0, 0.5, 0.95}) {
            const double h = 1e-6;
            const double fd = (site_potential_c(c + h, sp) - site_potential_c(c - h, sp)) / (2 * h);
            EXPECT_NEAR(site_potential_dc(c, sp), fd, 1e-8);
        }
    }
}

TEST(Maximizers, CompensatedFieldGivesRightAngles) {
    const double t = std::log(10.0);
    const auto rep = find_maximizers(SitePotential::restricted(0.2, t));
    ASSERT_TRUE(rep.degenerate);
    ASSERT_EQ(rep.maximizers.size(), 2u);
    EXPECT_NEAR(rep.maximizers[0].radians(), kPi / 2, 1e-9);
    EXPECT_NEAR(rep.maximizers[1].radians(), 3 * kPi / 2, 1e-9);
    EXPECT_NEAR(rep.epsilon_t, 0.0, 1e-9);
    EXPECT_FALSE(rep.best_effort);
}

TEST(Maximizers, EpsilonMatchesStationarityQuadratic) {
    const double h = 0.1, t = std::log(10.0);
    for (double delta : {1e-3, 1e-4, -1e-3}) {
        const auto rep = find_maximizers(SitePotential::restricted(2 * h + delta, t));
        ASSERT_TRUE(rep.degenerate);
        EXPECT_NEAR(rep.epsilon_t, std::asin(analytic_c(h, delta)), 1e-10);
        // First-order term with its quadratic correction bound.
        EXPECT_NEAR(rep.epsilon_t, delta / (4 * h * h), 1.1 * delta * delta / (8 * h * h * h));
    }
    const auto rep = find_maximizers(SitePotential::restricted(0.2 + 1e-3, t));
    EXPECT_NEAR(rep.epsilon_t, 0.025, 2e-4);
}

TEST(Maximizers, FieldDominatedIsUnique) {
    const auto rep = find_maximizers(SitePotential::restricted(1.0, std::log(100.0)));
    EXPECT_FALSE(rep.degenerate);
    ASSERT_EQ(rep.maximizers.size(), 1u);
    EXPECT_NEAR(rep.maximizers[0].radians(), 0.0, 1e-12);
    EXPECT_EQ(rep.epsilon_t, 0.0);
}

TEST(Maximizers, ZeroFieldPointsAgainstTheConditioning) {
    for (double t : {1.0, 2.0, 5.0}) {
        const auto rep = find_maximizers(SitePotential::restricted(0.0, t));
        EXPECT_FALSE(rep.degenerate);
        ASSERT_EQ(rep.maximizers.size(), 1u);
        EXPECT_NEAR(rep.maximizers[0].radians(), kPi, 1e-12);
    }
    EXPECT_THROW(transition_window(1.0, 0.0, 1.0, 10.0), DomainError);
}

TEST(Maximizers, ReflectionPairing) {
    for (double bh : {0.15, 0.2, 0.25}) {
        for (double t : {2.2, 2.3, 2.4}) {
            const auto sp = SitePotential::restricted(bh, t);
            const auto rep = find_maximizers(sp);
            if (!rep.degenerate) continue;
            ASSERT_EQ(rep.maximizers.size(), 2u);
            EXPECT_NEAR(rep.maximizers[0].radians(), kTwoPi - rep.maximizers[1].radians(), 1e-15);
            EXPECT_NEAR(site_potential(rep.maximizers[0], sp), site_potential(rep.maximizers[1], sp), 1e-12);
        }
    }
}

TEST(Maximizers, AgreeWithBruteForceGrid) {
    Rng rng = make_rng(77);
    const int n = 1000000;
    for (int rep = 0; rep < 20; ++rep) {
        const double t = 1.0 + 4.0 * uniform01(rng);
        const double h = std::exp(-t);
        const double bh = 2 * h + (uniform01(rng) - 0.5) * 8 * h * h;
        const bool full = rep % 2 == 1;
        const auto sp = full ? SitePotential::full_log(bh, t) : SitePotential::restricted(bh, t);
        const auto res = find_maximizers(sp);
        double best = -1e300, arg = 0.0;
        for (int k = 0; k < n; ++k) {
            const double th = kTwoPi * k / n;
            const double c = std::cos(th);
            const double g = site_potential_c(c, sp);
            if (g > best) best = g, arg = th;
        }
        EXPECT_GE(res.g_max, best - 1e-15);
        double nearest = 1e9;
        for (const auto& m : res.maximizers) nearest = std::min(nearest, circular_distance(m.radians(), arg));
        EXPECT_LE(nearest, kTwoPi / n + 1e-13) << "t=" << t << " bh=" << bh;
    }
}

TEST(Maximizers, FullLogCloseToThreeTerm) {
    for (double t : {2.0, 2.3, 3.0}) {
        const double h = std::exp(-t);
        const double bh = 2 * h + 0.5 * h * h;
        const auto a = SitePotential::restricted(bh, t);
        const auto b = SitePotential::full_log(bh, t);
        const auto ra = find_maximizers(a), rb = find_maximizers(b);
        ASSERT_TRUE(ra.degenerate && rb.degenerate);
        const double th = ra.maximizers[0].radians();
        const double e = 1e-4;
        const double g2 = std::abs(site_potential(Angle(th + e), a) - 2 * site_potential(Angle(th), a) +
                                   site_potential(Angle(th - e), a)) /
                          (e * e);
        EXPECT_LE(std::abs(ra.maximizers[0].radians() - rb.maximizers[0].radians()),
                  std::sqrt(a.coeffs.rest_bound / g2) + 1e-13);
    }
}

TEST(Window, ContainsDeepestDegeneracy) {
    const auto w = transition_window(1.0, 0.2, 1.0, 10.0);
    ASSERT_TRUE(w);
    EXPECT_LT(w->t0, std::log(10.0));
    EXPECT_GT(w->t1, std::log(10.0));
    const auto cf = closed_form_window(0.2);
    ASSERT_TRUE(cf);
    EXPECT_NEAR(w->t0, cf->t0, 1e-4);
    EXPECT_NEAR(w->t1, cf->t1, 1e-4);
    // Same window for any split of beta h.
    const auto w2 = transition_window(4.0, 0.05, 1.0, 10.0);
    ASSERT_TRUE(w2);
    EXPECT_NEAR(w2->t0, w->t0, 1e-6);
}

TEST(Window, StrongFieldLeavesEarly) {
    // For beta h = 1 the interior maximizer exists only while
    // 8 h^3 + 4 h^2 + 2 h >= 1, i.e. for t up to about 1.303.
    const auto w = transition_window(1.0, 1.0, 1.0, 10.0);
    ASSERT_TRUE(w);
    EXPECT_NEAR(w->t0, 1.0, 1e-9);
    const auto cf = closed_form_window(1.0);
    ASSERT_TRUE(cf);
    EXPECT_NEAR(w->t1, cf->t1, 1e-4);
    EXPECT_NEAR(w->t1, 1.3027, 1e-3);
    EXPECT_FALSE(transition_window(1.0, 1.0, 1.5, 10.0));
    EXPECT_FALSE(transition_window(1.0, 1.0, 1.5, 10.0, true));
}

TEST(Window, FirstOrderExitMatchesScan) {
    // beta h = 0.5: the stationary point merges before reaching c = -1, so
    // the window opens where the interior maximum ties the endpoint.
    const auto w = transition_window(1.0, 0.5, 1.0, 10.0);
    const auto cf = closed_form_window(0.5);
    ASSERT_TRUE(w && cf);
    EXPECT_GT(std::exp(-cf->t0), 0.25);
    EXPECT_NEAR(w->t0, cf->t0, 1e-4);
    EXPECT_NEAR(w->t1, cf->t1, 1e-4);
    const double inside = cf->t0 + 1e-3, outside = cf->t0 - 1e-3;
    EXPECT_TRUE(find_maximizers(SitePotential::restricted(0.5, inside)).degenerate);
    EXPECT_FALSE(find_maximizers(SitePotential::restricted(0.5, outside)).degenerate);
}

TEST(Window, FullLogVariantNearThreeTerm) {
    const auto a = transition_window(1.0, 0.2, 1.0, 10.0, false);
    const auto b = transition_window(1.0, 0.2, 1.0, 10.0, true);
    ASSERT_TRUE(a && b);
    EXPECT_NEAR(a->t0, b->t0, 0.05);
    EXPECT_NEAR(a->t1, b->t1, 0.05);
    EXPECT_LT(b->t0, std::log(10.0));
    EXPECT_GT(b->t1, std::log(10.0));
}

TEST(Window, MonotoneExit) {
    for (double bh : {0.5, 0.2, 0.05, 0.01}) {
        const double late = std::log(2.0 / bh) + 3.0;
        const auto sp = SitePotential::restricted(bh, late);
        EXPECT_FALSE(find_maximizers(sp).degenerate) << "bh=" << bh;
    }
}

TEST(Sweep, Rows) {
    const std::vector<double> ts{1.5, std::log(10.0), 4.0};
    const auto rows = ground_state_sweep(2.0, 0.1, ts);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_FALSE(rows[0].degenerate);
    EXPECT_TRUE(rows[1].degenerate);
    EXPECT_NEAR(rows[1].theta_star, kPi / 2, 1e-9);
    EXPECT_FALSE(rows[2].degenerate);
    EXPECT_NEAR(rows[2].theta_star, 0.0, 1e-12);
}
