#include <doctest.h>

#include <cmath>

#include "gapbench/encoders.hpp"

using namespace gapbench;

TEST_CASE("cosine-moment encoder recovers coefficients affinely") {
    auto mu = RandomFieldMeasure::cosine(256, 8);
    const std::size_t d = 2;
    DeepONetEncoder enc = deeponet_encoder_build(mu, d, 0.0, FunctionalFamily::CosineMoments);
    CHECK(enc.achieved_delta < 1e-10);

    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const auto fs = sample_measure(mu, rng);
        const Vec z = enc.apply(fs.u);
        for (std::size_t j = 0; j < d; ++j) {
            const double expect = (fs.z[j] + mu.half_widths[j]) / (2.0 * mu.half_widths[j]);
            CHECK(z[j] == doctest::Approx(expect).epsilon(1e-10));
            CHECK(z[j] >= -1e-12);
            CHECK(z[j] <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("point-evaluation encoder achieves a small dual error") {
    auto mu = RandomFieldMeasure::cosine(512, 8);
    DeepONetEncoder enc =
        deeponet_encoder_build(mu, 2, 0.05, FunctionalFamily::PointEvaluations, 64);
    CHECK(enc.achieved_delta <= 0.05);

    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const auto fs = sample_measure(mu, rng);
        const Vec z = enc.apply(fs.u);
        for (std::size_t j = 0; j < 2; ++j) {
            const double expect = (fs.z[j] + mu.half_widths[j]) / (2.0 * mu.half_widths[j]);
            CHECK(std::abs(z[j] - expect) <= enc.margin + 1e-9);
        }
    }

    // an unachievable accuracy request is refused with the best value
    CHECK_THROWS(deeponet_encoder_build(mu, 2, 1e-18, FunctionalFamily::PointEvaluations, 8));
}

TEST_CASE("pushforward certification: uniform, constant, perturbed") {
    auto mu = RandomFieldMeasure::cosine(128, 4);
    DeepONetEncoder enc = deeponet_encoder_build(mu, 2, 0.0, FunctionalFamily::CosineMoments);

    const auto cert = pushforward_certify(enc.fn(), mu, 2, 5, 50000, 1);
    CHECK(cert.pass);
    CHECK(cert.c_hat > 0.8);
    CHECK(cert.min_bin_lower_bound > 0.0);

    // constant encoder fails
    FieldEncoder constant = [](const GridFunction&) { return Vec{0.5, 0.5}; };
    const auto bad = pushforward_certify(constant, mu, 2, 5, 5000, 2);
    CHECK_FALSE(bad.pass);
    CHECK(bad.c_hat == 0.0);

    // small perturbation keeps every bin populated
    FieldEncoder wobbly = [&enc](const GridFunction& u) {
        Vec z = enc.apply(u);
        z[0] = std::clamp(z[0] + 0.03 * std::sin(6.0 * z[1]), 0.0, 1.0 - 1e-9);
        return z;
    };
    const auto pert = pushforward_certify(wobbly, mu, 2, 5, 50000, 3);
    CHECK(pert.pass);
    CHECK(pert.c_hat > 0.0);

    CHECK_THROWS(pushforward_certify(enc.fn(), mu, 2, 50, 1000, 4));  // too few samples
}

TEST_CASE("contraction coverage: identity, contraction, collapse") {
    BoxDomain v{Vec{0.0, 0.0}, Vec{1.0, 1.0}};

    BoxMap identity = [](const Vec& y) { return y; };
    const auto rep = contraction_coverage_check(identity, v, 10, 200000, 5);
    CHECK(rep.applicable);
    CHECK(rep.pass);
    CHECK(rep.bins_missed == 0);
    const double pi = 3.14159265358979323846;
    CHECK(rep.eps0 == doctest::Approx(0.125));
    CHECK(rep.c0 == doctest::Approx((pi * 0.125 * 0.125) * (4.0 / 9.0)));
    CHECK(rep.min_density_ratio >= 1.0);

    // ||F - id||: values ~ 0.028, Jacobian deviation ~ 0.06, total below 1/8
    BoxMap squeeze = [](const Vec& y) {
        return Vec{y[0] + 0.02 * std::sin(3.0 * y[1]), y[1] - 0.02 * std::sin(2.0 * y[0])};
    };
    const auto rep2 = contraction_coverage_check(squeeze, v, 10, 200000, 6);
    CHECK(rep2.applicable);
    CHECK(rep2.pass);

    BoxMap collapse = [](const Vec& y) { return Vec{y[0], 0.0}; };
    const auto rep3 = contraction_coverage_check(collapse, v, 10, 1000, 7);
    CHECK_FALSE(rep3.applicable);  // hypothesis unmet, not a failure

    // supplied norm bound skips the finite-difference estimate
    const auto rep4 = contraction_coverage_check(identity, v, 10, 100000, 8, 0.0);
    CHECK(rep4.applicable);
    CHECK(rep4.pass);
}
