#include <doctest.h>

#include <cmath>

#include "gapbench/quadrature.hpp"
#include "gapbench/rng.hpp"
#include "gapbench/spaces.hpp"

using namespace gapbench;

TEST_CASE("depth growth supremum") {
    CHECK(DepthGrowth::constant(3)(5) == 3);
    CHECK(DepthGrowth::constant(3).sup() == 3);
    CHECK(DepthGrowth::table({2, 2, 5}).sup() == 5);
    CHECK(DepthGrowth::table({2, 2, 5})(1) == 2);
    CHECK(DepthGrowth::table({2, 2, 5})(100) == 5);
    CHECK(DepthGrowth::affine(1, 1).sup() == kInf);
    CHECK(DepthGrowth::affine(1, 1)(4) == 5);
    CHECK_THROWS(DepthGrowth::table({5, 2}));
}

TEST_CASE("theoretical rate formula") {
    SpaceParams sp{2.0, 2.0, 2, DepthGrowth::constant(3)};
    CHECK(theoretical_rate(sp) == doctest::Approx(0.5 + 0.5 * (2.0 / 3.0)));

    // large alpha, sup norm: rate tends to 1/d
    SpaceParams sup_case{1e6, kInf, 4, DepthGrowth::constant(3)};
    CHECK(theoretical_rate(sup_case) == doctest::Approx(0.25).epsilon(1e-5));

    // unbounded depth kills the dimension term
    SpaceParams deep{7.0, 2.0, 3, DepthGrowth::affine(1, 1)};
    CHECK(theoretical_rate(deep) == 0.5);

    SpaceParams shallow{1.0, 2.0, 1, DepthGrowth::constant(2)};
    CHECK_THROWS_AS(theoretical_rate(shallow), std::invalid_argument);
}

TEST_CASE("theoretical rate monotonicity") {
    auto rate = [](double alpha, double p, std::size_t d, double es) {
        return theoretical_rate(SpaceParams{alpha, p, d, DepthGrowth::constant(es)});
    };
    CHECK(rate(2, 2, 2, 3) > rate(2, 2, 3, 3));   // nonincreasing in d
    CHECK(rate(2, 2, 2, 3) > rate(2, 2, 2, 5));   // nonincreasing in ell*
    CHECK(rate(3, 2, 2, 3) > rate(2, 2, 2, 3));   // nondecreasing in alpha
    CHECK(rate(1e6, 2, 2, 3) ==
          doctest::Approx(0.5 + 0.5).epsilon(1e-5));  // alpha -> inf limit 1/p + 1/d
}

TEST_CASE("adversarial amplitude") {
    SpaceParams sp{1.0, 2.0, 1, DepthGrowth::constant(3)};
    CHECK(adversarial_amplitude(sp, 16.0, 1.0) == doctest::Approx(0.25));
    CHECK(adversarial_amplitude(sp, 1.0, 0.7) == doctest::Approx(0.7));
    SpaceParams deep{1.0, 2.0, 1, DepthGrowth::affine(1, 3)};
    CHECK(adversarial_amplitude(deep, 64.0, 0.9) == doctest::Approx(0.9));
}

TEST_CASE("membership checks budget, depth, and magnitude") {
    Matrix a1(3, 1);
    a1(0, 0) = 1;
    a1(1, 0) = 1;
    a1(2, 0) = 1;
    Matrix a2(1, 3);
    a2(0, 0) = 1;
    a2(0, 1) = -2;
    a2(0, 2) = 1;
    Network hat({Layer{a1, Vec{1, 0, -1}}, Layer{a2, Vec{0}}});

    SpaceParams sp{2.0, 2.0, 1, DepthGrowth::constant(3)};
    const auto rep = sigma_membership(hat, 8, sp);
    CHECK_FALSE(rep.ok);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].find("magnitude") != std::string::npos);

    Matrix z(1, 1);
    Network zero({Layer{z, Vec{0}}});
    CHECK(sigma_membership(zero, 0, sp).ok);
}

TEST_CASE("bump network: unit steepness is the plain hat") {
    BumpInfo info;
    Network bump = bump_network(BumpSpec{1, 1.0, 8, 1 << 20}, 2, 1.0, &info);
    CHECK(bump.evaluate_scalar(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bump.evaluate_scalar(1.0) == 0.0);
    CHECK(bump.evaluate_scalar(-1.0) == 0.0);
    CHECK(bump.evaluate_scalar(0.5) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("bump network: two-dimensional support predicate") {
    Network bump = bump_network(BumpSpec{2, 4.0, 8, 1 << 20}, 2, 1.0);
    CHECK(bump.evaluate_scalar(Vec{0.3, 0.0}) == 0.0);  // |x|_inf >= 1/4
    CHECK(bump.evaluate_scalar(Vec{0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bump.evaluate_scalar(Vec{0.1, 0.05}) > 0.0);
}

TEST_CASE("bump network: support, range, membership") {
    Rng rng(101);
    for (std::size_t d : {1, 2}) {
        for (double m : {4.0, 8.0, 16.0, 32.0}) {
            BumpSpec spec{d, m, 16, 1 << 20};
            BumpInfo info;
            Network bump = bump_network(spec, 4, 1.0, &info);
            Network::Evaluator ev(bump);

            CHECK(info.center_value == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(stats(bump).weight_sup <= 1.0);

            // exactly zero outside the open support cube
            for (int i = 0; i < 2000; ++i) {
                Vec x(d);
                std::size_t far_axis = rng.below(d);
                for (std::size_t j = 0; j < d; ++j) {
                    x[j] = rng.uniform(-2.0, 2.0);
                    if (j == far_axis)
                        x[j] = (rng.sign() > 0 ? 1.0 : -1.0) * rng.uniform(1.0 / m, 3.0);
                }
                CHECK(ev.scalar(x) == 0.0);
            }
            // range within [0,1]
            for (int i = 0; i < 2000; ++i) {
                Vec x(d);
                for (std::size_t j = 0; j < d; ++j) x[j] = rng.uniform(-1.0 / m, 1.0 / m);
                const double v = ev.scalar(x);
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }

            SpaceParams sp{2.0, 2.0, d, DepthGrowth::constant(8)};
            CHECK(sigma_membership(bump, info.declared_budget, sp).ok);
            // membership persists for every larger budget
            CHECK(sigma_membership(bump, 2 * info.declared_budget, sp).ok);
            CHECK(sigma_membership(bump, 10 * info.declared_budget, sp).ok);
        }
    }
}

TEST_CASE("bump norm scaling is steepness-free") {
    // closed-form sanity for the unclipped mass
    CHECK(bump_lp_mass_unclipped(1, 0.5, 1.0) == doctest::Approx(2 * 0.5 / 2.0));
    CHECK(bump_lp_mass_unclipped(2, 0.25, 1.0) == doctest::Approx(8 * 0.25 * 0.25 / 6.0));
    CHECK(bump_lp_mass_unclipped(2, 0.25, 2.0) == doctest::Approx(8 * 0.25 * 0.25 / 12.0));

    for (std::size_t d : {1, 2}) {
        for (double p : {1.0, 2.0}) {
            double lo = kInf, hi = 0.0;
            for (double m : {2.0, 4.0, 8.0, 16.0, 32.0}) {
                BumpSpec spec{d, m, 16, 1 << 20};
                BumpInfo info;
                Network bump = bump_network(spec, 3, 1.0, &info);
                const double mass = bump_lp_mass_unclipped(d, info.half_width, p);
                const double norm = std::pow(mass, 1.0 / p) * std::pow(m, double(d) / p);
                lo = std::min(lo, norm);
                hi = std::max(hi, norm);

                // quadrature agrees with the closed form
                Vec center(d, 0.5);
                Network shifted = affine_precompose(bump, Matrix::identity(d), Vec(d, -0.5));
                Network::Evaluator ev(shifted);
                QuadratureSpec quad;
                quad.d = d;
                quad.base_cells = 16;
                quad.refine_cells = d == 1 ? 512 : 128;
                quad.supports = {SupportCube{center, 1.0 / m}};
                const double qnorm =
                    lp_norm([&](std::span<const double> x) { return ev.scalar(x); }, p, quad);
                CHECK(qnorm == doctest::Approx(std::pow(mass, 1.0 / p)).epsilon(0.01));
            }
            CHECK(hi / lo <= 1.1);
        }
    }
}

TEST_CASE("bump rejects infeasible budgets and reports the max steepness") {
    BumpSpec spec{2, 64.0, 16, 4};
    try {
        (void)bump_network(spec, 1, 1.0);
        FAIL("expected a budget error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("maximal achievable M") != std::string::npos);
    }
    CHECK_THROWS_AS(bump_network(BumpSpec{2, 4.0, 3, 1 << 20}, 4, 1.0), std::invalid_argument);
}

TEST_CASE("localized instance: peak, support, norms, membership") {
    Rng rng(7);
    SpaceParams sp{2.0, 2.0, 2, DepthGrowth::constant(3)};
    const Vec y{0.4, 0.6};

    double prev_scaled = -1.0;
    for (double m : {4.0, 8.0, 16.0}) {
        BumpInfo info;
        Network g = make_localized_network(sp, m, y, 1.0, +1, &info);
        CHECK(stats(g).weight_sup <= 1.0);

        const double amplitude = adversarial_amplitude(sp, m, 1.0);
        CHECK(info.center_value == doctest::Approx(amplitude).epsilon(1e-12));
        CHECK(g.evaluate_scalar(y) == info.center_value);

        Network::Evaluator ev(g);
        for (int i = 0; i < 5000; ++i) {
            Vec x(2);
            std::size_t far_axis = rng.below(2);
            for (std::size_t j = 0; j < 2; ++j) {
                x[j] = rng.next_double();
                if (j == far_axis) {
                    const double off = rng.uniform(1.0 / m, 1.0);
                    x[j] = rng.sign() > 0 ? std::min(1.0, y[j] + off) : std::max(0.0, y[j] - off);
                    if (std::abs(x[j] - y[j]) < 1.0 / m) x[j] = y[j] + 1.0 / m;
                }
            }
            if (std::abs(x[0] - y[0]) >= 1.0 / m || std::abs(x[1] - y[1]) >= 1.0 / m)
                CHECK(ev.scalar(x) == 0.0);
        }

        // ||g||_p * M^{d/p} / amplitude constant across M within 5%
        QuadratureSpec quad;
        quad.d = 2;
        quad.base_cells = 16;
        quad.refine_cells = 128;
        quad.supports = {SupportCube{y, 1.0 / m}};
        const double norm =
            lp_norm([&](std::span<const double> x) { return ev.scalar(x); }, 2.0, quad);
        const double scaled = norm * m / amplitude;
        if (prev_scaled > 0) CHECK(scaled == doctest::Approx(prev_scaled).epsilon(0.05));
        prev_scaled = scaled;

        SpaceParams budget_sp{2.0, 2.0, 2, DepthGrowth::constant(8)};
        BumpInfo binfo;
        Network certified = make_localized_network(budget_sp, m, y, 1.0, +1, &binfo);
        CHECK(sigma_membership(certified, binfo.declared_budget, budget_sp).ok);
    }

    // sign folds into the output layer
    BumpInfo info;
    Network neg = make_localized_network(sp, 8.0, y, 1.0, -1, &info);
    CHECK(neg.evaluate_scalar(y) < 0.0);
    CHECK(std::abs(neg.evaluate_scalar(y)) ==
          make_localized_network(sp, 8.0, y, 1.0, +1).evaluate_scalar(y));

    CHECK_THROWS_AS(make_localized_network(sp, 8.0, Vec{0.5, 1.5}, 1.0), std::invalid_argument);
    // kappa too large for the weight-magnitude constraint
    CHECK_THROWS_AS(make_localized_network(sp, 1.0, y, 2.0), std::invalid_argument);
}

TEST_CASE("tent power integral closed form") {
    // full tent, p = 1: area = h
    CHECK(tent_power_integral_1d(0.5, 0.25, 1.0, 1.0, 0.0, 1.0) == doctest::Approx(0.25));
    // clipped at the domain edge: half the mass
    CHECK(tent_power_integral_1d(0.0, 0.25, 1.0, 1.0, 0.0, 1.0) == doctest::Approx(0.125));
    // p = 2 full tent: 2h/3
    CHECK(tent_power_integral_1d(0.5, 0.3, 1.0, 2.0, 0.0, 1.0) == doctest::Approx(0.2));
    // amplitude scales as a^p
    CHECK(tent_power_integral_1d(0.5, 0.25, 0.5, 2.0, 0.0, 1.0) ==
          doctest::Approx(0.25 * tent_power_integral_1d(0.5, 0.25, 1.0, 2.0, 0.0, 1.0)));
}
