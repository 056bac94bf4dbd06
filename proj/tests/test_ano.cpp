#include <doctest.h>

#include <cmath>

#include "gapbench/ano.hpp"

using namespace gapbench;

namespace {

Network random_net(Rng& rng, std::size_t d_in, std::size_t depth, std::size_t max_width) {
    std::vector<Layer> layers;
    std::size_t prev = d_in;
    for (std::size_t l = 0; l < depth; ++l) {
        const std::size_t w = (l + 1 == depth) ? 1 : 1 + rng.below(max_width);
        Matrix a(w, prev);
        Vec b(w);
        for (double& v : a.data) v = rng.uniform(-1.0, 1.0);
        for (double& v : b) v = rng.uniform(-1.0, 1.0);
        layers.push_back(Layer{std::move(a), std::move(b)});
        prev = w;
    }
    return Network(std::move(layers));
}

// lifting (eta, x) -> eta as a depth-2 network
Network eta_lift() {
    Matrix a1(2, 2);
    a1(0, 0) = 1;   // eta
    a1(1, 0) = -1;  // -eta
    Matrix a2(1, 2);
    a2(0, 0) = 1;
    a2(0, 1) = -1;
    return Network({Layer{a1, Vec{0, 0}}, Layer{a2, Vec{0}}});
}

}  // namespace

TEST_CASE("ano_apply: averaging layer on a constant-free lifting") {
    // one hidden layer, W = 0, b = 0: output is relu(mean u) everywhere
    Ano psi;
    psi.lifting = eta_lift();
    psi.hidden.emplace_back(Matrix(1, 1), Vec(1, 0.0));
    Matrix q(1, 1);
    q(0, 0) = 1;
    psi.projection = Network({Layer{q, Vec{0}}, Layer{q, Vec{0}}});

    GridFunction u;
    u.values = {0.2, 0.4, 0.6, 0.8};
    const GridFunction out = ano_apply(psi, u);
    for (double v : out.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));

    GridFunction neg;
    neg.values = {-1.0, -2.0, -3.0, -4.0};
    for (double v : ano_apply(psi, neg).values) CHECK(v == 0.0);
}

TEST_CASE("ano_apply: identity weights double a constant channel") {
    Ano psi;
    psi.lifting = eta_lift();
    psi.hidden.emplace_back(Matrix::identity(1), Vec(1, 0.0));
    Matrix q(1, 1);
    q(0, 0) = 1;
    psi.projection = Network({Layer{q, Vec{0}}, Layer{q, Vec{0}}});
    GridFunction u;
    u.values.assign(8, 0.7);
    for (double v : ano_apply(psi, u).values) CHECK(v == doctest::Approx(1.4).epsilon(1e-12));
}

TEST_CASE("ano stats aggregate all parameter groups") {
    Ano psi;
    psi.lifting = eta_lift();
    Matrix w = Matrix::identity(1);
    psi.hidden.emplace_back(w, Vec(1, 0.25));
    Matrix q(1, 1);
    q(0, 0) = 0.5;
    psi.projection = Network({Layer{q, Vec{0}}, Layer{q, Vec{0}}});
    const AnoStats s = ano_stats(psi);
    CHECK(s.depth == 1);
    CHECK(s.weight_count == stats(psi.lifting).weight_count + 2 + 2);
    CHECK(s.weight_sup == 1.0);
}

TEST_CASE("ramp unit reproduces the identity on its certified range") {
    Network ramp = ano_ramp_unit(2.0);
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const double eta = rng.uniform(-2.0, 2.0);
        CHECK(ramp.evaluate_scalar(eta) == doctest::Approx(eta).epsilon(1e-15));
    }
}

TEST_CASE("ano encoder: slopes, recovery, and network equivalence") {
    auto mu = RandomFieldMeasure::cosine(256, 8);
    const std::size_t d = 2;
    const double bprime = estimate_sup_bound(mu, 100, 5);
    const double eps = 0.05;
    AnoEncoder enc = ano_encoder_build(mu, d, bprime, eps);
    CHECK(enc.met_target);
    CHECK(enc.achieved_eps <= eps);

    // eta-slope of the raw channels approximates the dual on average
    Rng rng(7);
    const double fd = 1e-6;
    double slope_err = 0.0;
    const int probes = 64;
    for (int i = 0; i < probes; ++i) {
        const double x = rng.next_double();
        const double eta = rng.uniform(-bprime / 2, bprime / 2);
        const auto& ch = enc.channels[0];
        auto p_of = [&](double t) {
            const double pos = (t - ch.t0) / ch.step;
            const auto m = ch.knot_values.size() - 1;
            const double cl = std::clamp(pos, 0.0, double(m) - 1e-12);
            const auto idx = static_cast<std::size_t>(cl);
            return ch.knot_values[idx] +
                   (cl - double(idx)) * (ch.knot_values[idx + 1] - ch.knot_values[idx]);
        };
        const double raw_lo = (p_of(x + ch.gamma * (eta - fd)) - p_of(x)) / ch.gamma;
        const double raw_hi = (p_of(x + ch.gamma * (eta + fd)) - p_of(x)) / ch.gamma;
        const double dual = 2.0 * std::cos(3.14159265358979323846 * x);
        slope_err += std::abs((raw_hi - raw_lo) / (2 * fd) - dual);
    }
    CHECK(slope_err / probes <= eps);

    // encoder recovers the normalized coefficients within the advertised margin
    for (int i = 0; i < 100; ++i) {
        const auto fs = sample_measure(mu, rng);
        const Vec z = enc.apply_fast(fs.u);
        for (std::size_t j = 0; j < d; ++j) {
            const double ideal = enc.norm_scale * fs.z[j] + enc.norm_shift;
            CHECK(std::abs(z[j] - ideal) <= enc.margin + 1e-9);
        }
    }

    // the fast tables and the genuine network agree
    for (int i = 0; i < 20; ++i) {
        const auto fs = sample_measure(mu, rng);
        const Vec fast = enc.apply_fast(fs.u);
        const Vec via_net = enc.apply_network(fs.u);
        for (std::size_t j = 0; j < d; ++j)
            CHECK(fast[j] == doctest::Approx(via_net[j]).epsilon(1e-9));
    }
}

TEST_CASE("embedding a network into an averaging operator is exact") {
    auto mu = RandomFieldMeasure::cosine(128, 8);
    const std::size_t d = 2;
    AnoEncoder enc = ano_encoder_build(mu, d, estimate_sup_bound(mu, 100, 9), 0.25);

    Rng rng(11);
    for (int rep = 0; rep < 100; ++rep) {
        Network psi = random_net(rng, d, 2 + rng.below(4), 4);  // depth 2..5
        const Ano op = embed_network_in_ano(psi, enc.lifting);
        const auto fs = sample_measure(mu, rng);
        const Vec encoded = enc.apply_network(fs.u);
        const double direct = psi.evaluate_scalar(encoded);
        const GridFunction out = ano_apply(op, fs.u);
        for (std::size_t i = 0; i < out.values.size(); i += 17)
            CHECK(std::abs(out.values[i] - direct) <= 1e-10 * (1.0 + std::abs(direct)));
    }

    // depth bookkeeping: hidden layers = depth(psi) - 2 (after padding to 3)
    Network psi5 = random_net(rng, d, 5, 3);
    CHECK(embed_network_in_ano(psi5, enc.lifting).hidden.size() == 3);
    Network psi3 = random_net(rng, d, 3, 3);
    CHECK(embed_network_in_ano(psi3, enc.lifting).hidden.size() == 1);
    Network psi2 = random_net(rng, d, 2, 3);
    CHECK(embed_network_in_ano(psi2, enc.lifting).hidden.size() == 1);  // padded
}

TEST_CASE("grid refinement changes smooth ano outputs slowly") {
    Ano psi;
    psi.lifting = eta_lift();
    Matrix w(1, 1);
    w(0, 0) = 0.5;
    psi.hidden.emplace_back(w, Vec(1, 0.1));
    Matrix q(1, 1);
    q(0, 0) = 1;
    psi.projection = Network({Layer{q, Vec{0}}, Layer{q, Vec{0}}});

    auto smooth = [](std::size_t g) {
        GridFunction u;
        u.values.resize(g);
        for (std::size_t i = 0; i < g; ++i)
            u.values[i] = std::sin(3.0 * grid_node(i, g)) + 0.5;
        return u;
    };
    const double coarse = grid_mean(ano_apply(psi, smooth(256)));
    const double fine = grid_mean(ano_apply(psi, smooth(512)));
    CHECK(std::abs(coarse - fine) <= 1e-3);
}
