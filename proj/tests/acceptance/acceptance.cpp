// Acceptance suite: one criterion per invocation (argv[1] in 1..11), printing
// a single PASS/FAIL line with the measured quantities. Runs everything when
// invoked without arguments.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "gapbench/ano.hpp"
#include "gapbench/operator_adversary.hpp"
#include "gapbench/smoothed_relu.hpp"

using namespace gapbench;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) {
        detail += (detail.empty() ? "" : "; ") + what;
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

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

// ---------------------------------------------------------------- criterion 1

Outcome criterion_void() {
    Outcome out;
    const std::size_t trials = 100000;
    std::size_t configs = 0;
    Rng layout_rng(2024, 1);

    auto check_config = [&](const std::string& label, const std::vector<Vec>& pts,
                            std::uint64_t seed) {
        const auto est = void_probability_estimate(pts, trials, seed);
        ++configs;
        out.require(est.estimate >= 0.49,
                    label + " estimate " + fmt(est.estimate) + " < 0.49");
    };

    std::size_t seed = 100;
    for (std::size_t d : {1, 2, 3})
        for (std::size_t n : {10, 100, 1000}) {
            check_config("grid d=" + std::to_string(d) + " N=" + std::to_string(n),
                         midpoint_grid_points(n, d), seed++);
            std::vector<Vec> iid(n, Vec(d));
            for (auto& p : iid)
                for (double& v : p) v = layout_rng.next_double();
            check_config("iid d=" + std::to_string(d) + " N=" + std::to_string(n), iid, seed++);
        }
    {
        std::vector<Vec> cluster(1000, Vec(3));
        for (auto& p : cluster)
            for (double& v : p) v = 0.03 * layout_rng.next_double();
        check_config("corner-cluster d=3 N=1000", cluster, seed++);
    }
    {
        std::vector<Vec> coincident(100, Vec{0.31, 0.64});
        check_config("coincident d=2 N=100", coincident, seed++);
    }
    out.note(std::to_string(configs) + " configurations");

    // exact reference: equispaced midpoints in d=1 at N=4 have void
    // probability exactly 1/2
    const auto exact = void_probability_estimate(midpoint_grid_points(4, 1), trials, seed);
    out.require(std::abs(exact.estimate - 0.5) <= 3 * exact.stderr_,
                "d=1 N=4 equispaced estimate " + fmt(exact.estimate) +
                    " not within 3 stderr of exactly 0.5");
    return out;
}

// ---------------------------------------------------------------- criterion 2

Outcome criterion_network_algebra() {
    Outcome out;
    Rng rng(7001);
    std::size_t checked = 0;
    for (int rep = 0; rep < 1000 && out.pass; ++rep) {
        const std::size_t d = 1 + rng.below(3);
        Network net = random_net(rng, d, 1 + rng.below(4), 5);
        const double r = rng.uniform(0.5, 8.0);
        Network scaled = homogeneous_rescale(net, r);

        Matrix c(d, d);
        Vec b(d);
        for (double& v : c.data) v = rng.uniform(-1, 1);
        for (double& v : b) v = rng.uniform(-1, 1);
        Network pre = affine_precompose(net, c, b);

        Network outer = random_net(rng, 1, 2, 4);
        Network chain = compose(outer, net);

        for (int q = 0; q < 5; ++q) {
            Vec x(d);
            for (double& v : x) v = rng.uniform(-2, 2);
            const double fx = net.evaluate_scalar(x);
            out.require(std::abs(r * scaled.evaluate_scalar(x) - fx) <=
                            1e-12 * (1 + std::abs(fx)),
                        "homogeneity violated");
            Vec cx = matvec(c, x);
            for (std::size_t j = 0; j < d; ++j) cx[j] += b[j];
            const double want = net.evaluate_scalar(cx);
            out.require(std::abs(pre.evaluate_scalar(x) - want) <= 1e-12 * (1 + std::abs(want)),
                        "affine precompose violated");
            const double seam = outer.evaluate_scalar(Vec{relu(fx)});
            out.require(std::abs(chain.evaluate_scalar(x) - seam) <=
                            1e-12 * (1 + std::abs(seam)),
                        "composition violated");
            ++checked;
        }
        out.require(stats(chain).depth == stats(outer).depth + stats(net).depth,
                    "depth additivity violated");
    }
    out.note(std::to_string(checked) + " identity checks on 1000 networks");

    std::size_t vectors = 0;
    for (std::size_t k : {2, 3, 4, 6, 8}) {
        Network mn = min_network(k);
        Network::Evaluator ev(mn);
        for (int i = 0; i < 2000; ++i) {
            Vec v(k);
            for (double& x : v) x = rng.uniform(-4, 4);
            double expect = v[0];
            for (double x : v) expect = std::min(expect, x);
            if (std::abs(ev.scalar(v) - expect) > 1e-12 * (1 + std::abs(expect))) {
                out.require(false, "min network mismatch at k=" + std::to_string(k));
                break;
            }
            ++vectors;
        }
    }
    out.note(std::to_string(vectors) + " min-tree vectors");
    return out;
}

// ---------------------------------------------------------------- criterion 3

Outcome criterion_bump_contract() {
    Outcome out;
    Rng rng(7003);
    SpaceParams membership_params{2.0, 2.0, 1, DepthGrowth::constant(8)};
    for (std::size_t d : {1, 2}) {
        membership_params.d = d;
        Vec y(d, 0.5);
        for (double m : {4.0, 8.0, 16.0, 32.0}) {
            BumpInfo info;
            Network g = make_localized_network(membership_params, m, y, 1.0, +1, &info);
            Network::Evaluator ev(g);

            // support and range, exactly
            for (int i = 0; i < 10000; ++i) {
                Vec x(d);
                const std::size_t far = rng.below(d);
                for (std::size_t j = 0; j < d; ++j) {
                    x[j] = rng.next_double();
                    if (j == far) {
                        const double off = rng.uniform(1.0 / m, 0.5);
                        x[j] = rng.sign() > 0 ? y[j] + off : y[j] - off;
                    }
                }
                if (ev.scalar(x) != 0.0) {
                    out.require(false, "support leak at M=" + fmt(m));
                    break;
                }
            }
            const double amplitude = adversarial_amplitude(membership_params, m, 1.0);
            for (int i = 0; i < 10000; ++i) {
                Vec x(d);
                for (std::size_t j = 0; j < d; ++j)
                    x[j] = y[j] + rng.uniform(-1.0 / m, 1.0 / m);
                const double v = ev.scalar(x);
                if (v < 0.0 || v > amplitude) {
                    out.require(false, "range violation at M=" + fmt(m));
                    break;
                }
            }

            const auto rep = sigma_membership(g, info.declared_budget, membership_params);
            out.require(rep.ok, "membership failed at d=" + std::to_string(d) +
                                    " M=" + fmt(m) +
                                    (rep.violations.empty() ? "" : ": " + rep.violations[0]));
        }

        // steepness-normalized norms are constant across M
        for (double p : {1.0, 2.0, kInf}) {
            double lo = kInf, hi = 0.0;
            for (double m : {4.0, 8.0, 16.0, 32.0}) {
                BumpInfo info;
                Network theta = bump_network(BumpSpec{d, m, 16, 1 << 20}, 4, 1.0, &info);
                Network centered = affine_precompose(theta, Matrix::identity(d), Vec(d, -0.5));
                Network::Evaluator tev(centered);
                QuadratureSpec quad;
                quad.d = d;
                quad.base_cells = 16;
                quad.refine_cells = d == 1 ? 512 : 96;
                quad.supports = {SupportCube{Vec(d, 0.5), 1.0 / m}};
                const double norm = lp_norm(
                    [&](std::span<const double> x) { return tev.scalar(x); }, p, quad);
                const double scaled =
                    std::isinf(p) ? norm : norm * std::pow(m, double(d) / p);
                lo = std::min(lo, scaled);
                hi = std::max(hi, scaled);
            }
            out.require(hi / lo <= 1.1, "norm ratio " + fmt(hi / lo) + " > 1.1 at d=" +
                                            std::to_string(d) + " p=" + fmt(p));
        }
    }
    return out;
}

// ------------------------------------------------------------- criteria 4 & 5

Outcome rate_criterion(bool baselines) {
    Outcome out;
    SpaceParams sp{2.0, 1.0, 2, DepthGrowth::constant(3)};
    RunOptions opts;
    opts.trials = 200;
    opts.seed = 2025;

    for (double p : {1.0, 2.0}) {
        sp.p = p;
        const double lambda = theoretical_rate(sp);
        std::vector<std::pair<std::string, AlgorithmPtr>> algs;
        if (!baselines) {
            algs.emplace_back("zero", zero_algorithm());
        } else {
            algs.emplace_back("nearest-neighbor-grid",
                              nearest_neighbor_algorithm(NnLayout::grid()));
            algs.emplace_back("multilinear", multilinear_interpolation_algorithm());
        }
        for (auto& [name, alg] : algs) {
            ErrorCurve curve;
            for (std::size_t n : {16, 32, 64, 128, 256, 512, 1024, 2048, 4096})
                curve.append(run_adversary(*alg, n, sp, opts));
            const RateFit fit = fit_rate(curve, 1000, 99);
            if (!baselines) {
                out.require(std::abs(fit.beta_hat - lambda) <= 0.05,
                            name + " p=" + fmt(p) + " beta_hat " + fmt(fit.beta_hat) +
                                " not within 0.05 of lambda " + fmt(lambda));
                out.note("p=" + fmt(p) + " beta_hat=" + fmt(fit.beta_hat) +
                         " lambda=" + fmt(lambda));
            } else {
                out.require(fit.beta_hat <= lambda + 0.15,
                            name + " p=" + fmt(p) + " beta_hat " + fmt(fit.beta_hat) +
                                " above lambda+0.15 = " + fmt(lambda + 0.15));
                out.require(fit.ci_high <= lambda + 0.25,
                            name + " p=" + fmt(p) + " ci_high " + fmt(fit.ci_high) +
                                " above lambda+0.25 = " + fmt(lambda + 0.25));
                out.note(name + " p=" + fmt(p) + " beta_hat=" + fmt(fit.beta_hat) +
                         " ci=[" + fmt(fit.ci_low) + "," + fmt(fit.ci_high) + "]");
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------- criterion 6

Outcome criterion_appendix() {
    Outcome out;
    double prev = kInf;
    for (std::size_t m : {8, 32, 128}) {
        Network net = shallow_smoothed_relu_net(m);
        Network::Evaluator ev(net);
        double sup_val = 0.0, sup_der = 0.0;
        const double fd = 1e-6;
        for (int i = 0; i <= 4000; ++i) {
            const double x = -2.0 + 4.0 * i / 4000.0;
            const auto target = smoothed_relu(x);
            sup_val = std::max(sup_val, std::abs(ev.scalar(x) - target.value));
            const double slope = (ev.scalar(x + fd) - ev.scalar(x - fd)) / (2 * fd);
            sup_der = std::max(sup_der, std::abs(slope - target.deriv));
        }
        const double bound = 3.0 / double(m) + 1e-3;
        const double err = std::max(sup_val, sup_der);
        out.require(err <= bound, "M=" + std::to_string(m) + " error " + fmt(err) +
                                      " above bound " + fmt(bound));
        out.require(err < prev, "error not decreasing at M=" + std::to_string(m));
        out.note("M=" + std::to_string(m) + " err=" + fmt(err) + " bound=" + fmt(bound));
        prev = err;
    }
    return out;
}

// ---------------------------------------------------------------- criterion 7

Outcome criterion_contraction() {
    Outcome out;
    for (std::size_t d : {1, 2}) {
        BoxDomain v{Vec(d, 0.0), Vec(d, 1.0)};
        const double eps0 = 0.125;  // min(1/2, (1/2)/4) for the unit box
        std::size_t passed = 0;
        for (std::size_t k = 0; k < 25; ++k) {
            Rng rng(5000 + d, k);
            std::vector<Vec> w(d, Vec(d));
            Vec phase(d);
            for (std::size_t i = 0; i < d; ++i) {
                double norm = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    w[i][j] = rng.uniform(-1, 1);
                    norm += w[i][j] * w[i][j];
                }
                norm = std::sqrt(std::max(norm, 1e-12));
                for (double& x : w[i]) x /= norm;
                phase[i] = rng.uniform(0.0, 6.28318);
            }
            const double amp =
                rng.uniform(0.2, 0.45) * eps0 / std::sqrt(static_cast<double>(d));
            BoxMap f = [&, amp](const Vec& y) {
                Vec z = y;
                for (std::size_t i = 0; i < d; ++i) {
                    double arg = phase[i];
                    for (std::size_t j = 0; j < d; ++j) arg += w[i][j] * y[j];
                    z[i] += amp * std::sin(arg);
                }
                return z;
            };
            const auto rep =
                contraction_coverage_check(f, v, 20, d == 1 ? 200000 : 400000, 9000 + k);
            if (rep.applicable && rep.pass) ++passed;
            out.require(rep.applicable, "perturbation misclassified as inapplicable");
            out.require(rep.pass, "coverage failed at d=" + std::to_string(d) + " k=" +
                                      std::to_string(k) + " (missed " +
                                      std::to_string(rep.bins_missed) + " bins)");
        }
        out.note("d=" + std::to_string(d) + ": " + std::to_string(passed) + "/25 covered");

        BoxMap collapse = [d](const Vec& y) {
            Vec z(d, 0.0);
            z[0] = y[0];
            return z;
        };
        const auto rep = contraction_coverage_check(collapse, v, 20, 2000, 77);
        if (d == 1) {
            // in one dimension the collapse map is the identity; skip
        } else {
            out.require(!rep.applicable, "collapse map should be NOT_APPLICABLE");
        }
    }
    return out;
}

// ---------------------------------------------------------------- criterion 8

Outcome criterion_encoders() {
    Outcome out;
    auto mu = RandomFieldMeasure::cosine(512, 32);
    const std::size_t d = 2;

    {
        DeepONetEncoder enc = deeponet_encoder_build(mu, d, 0.0, FunctionalFamily::CosineMoments);
        const auto cert = pushforward_certify(enc.fn(), mu, d, 10, 1000000, 42);
        out.require(cert.c_hat >= 0.8, "cosine encoder c_hat " + fmt(cert.c_hat) + " < 0.8");
        out.note("cosine c_hat=" + fmt(cert.c_hat));
    }
    {
        DeepONetEncoder enc =
            deeponet_encoder_build(mu, d, 0.05, FunctionalFamily::PointEvaluations, 64);
        out.require(enc.achieved_delta <= 0.05,
                    "point-evaluation delta " + fmt(enc.achieved_delta) + " > 0.05");
        const auto cert = pushforward_certify(enc.fn(), mu, d, 10, 200000, 43);
        out.require(cert.pass && cert.min_bin_lower_bound > 0.0,
                    "point-evaluation pushforward not certified positive");
        out.note("point-evals delta=" + fmt(enc.achieved_delta) +
                 " c_hat=" + fmt(cert.c_hat));
    }
    {
        double r = kInf;
        for (std::size_t j = 0; j < d; ++j) r = std::min(r, mu.half_widths[j]);
        const double eps0 = std::min(0.5, r / 4.0);
        const double eps = eps0 / (2.0 * static_cast<double>(d));
        AnoEncoder enc = ano_encoder_build(mu, d, estimate_sup_bound(mu, 200, 44), eps);
        out.require(enc.met_target, "averaging encoder missed its accuracy target");
        const auto cert = pushforward_certify(enc.fn(), mu, d, 5, 120000, 45);
        out.require(cert.pass && cert.min_bin_lower_bound > 0.0,
                    "averaging encoder pushforward not certified positive");
        out.note("ano eps=" + fmt(enc.achieved_eps) + "/" + fmt(eps) +
                 " c_hat=" + fmt(cert.c_hat));
    }
    return out;
}

// ---------------------------------------------------------------- criterion 9

Outcome criterion_embedding() {
    Outcome out;
    auto mu = RandomFieldMeasure::cosine(256, 16);
    const std::size_t d = 2;
    AnoEncoder enc = ano_encoder_build(mu, d, estimate_sup_bound(mu, 100, 46), 0.25);
    Rng rng(7009);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        Network psi = random_net(rng, d, 2 + rng.below(4), 4);
        const Ano op = embed_network_in_ano(psi, enc.lifting);
        const auto fs = sample_measure(mu, rng);
        const double direct = psi.evaluate_scalar(enc.apply_network(fs.u));
        const GridFunction y = ano_apply(op, fs.u);
        for (std::size_t i = 0; i < y.values.size(); i += 31) {
            const double rel =
                std::abs(y.values[i] - direct) / (1.0 + std::abs(direct));
            worst = std::max(worst, rel);
        }
    }
    out.require(worst <= 1e-10, "embedding deviation " + fmt(worst) + " > 1e-10");
    out.note("worst relative deviation " + fmt(worst));
    return out;
}

// --------------------------------------------------------------- criterion 10

Outcome criterion_operator_gap() {
    Outcome out;
    auto mu = RandomFieldMeasure::cosine(256, 16);
    SpaceParams sp{2.0, 2.0, 4, DepthGrowth::constant(4)};

    // linear-functional encoder route: effective depth ell* - 1
    SpaceParams eff = sp;
    eff.ell = DepthGrowth::constant(3);
    DeepONetEncoder enc = deeponet_encoder_build(mu, sp.d, 0.0, FunctionalFamily::CosineMoments);
    EncoderHandle handle = deeponet_encoder_handle(enc, mu, sp.d);

    const double target = theoretical_rate(eff);  // 1/2 + (1/4) alpha/(alpha+1)
    out.note("embedded-dimension bound " + fmt(target) + ", Monte-Carlo ceiling 1/p = " +
             fmt(1.0 / sp.p));

    OperatorRunOptions opts;
    opts.trials = 120;
    opts.mc_inputs = 2000;
    opts.seed = 2026;

    {
        auto zero = zero_operator_algorithm();
        ErrorCurve curve;
        for (std::size_t n : {16, 32, 64, 128, 256, 512, 1024})
            curve.append(operator_adversary_run(*zero, n, eff, mu, handle, opts));
        const RateFit fit = fit_rate(curve, 1000, 4);
        out.require(std::abs(fit.beta_hat - target) <= 0.07,
                    "zero-op beta_hat " + fmt(fit.beta_hat) + " not within 0.07 of " +
                        fmt(target));
        out.note("zero-op beta_hat=" + fmt(fit.beta_hat));
    }
    {
        auto nn = nearest_neighbor_encoded_algorithm(sp.d);
        ErrorCurve curve;
        for (std::size_t n : {16, 32, 64, 128, 256, 512, 1024})
            curve.append(operator_adversary_run(*nn, n, eff, mu, handle, opts));
        const RateFit fit = fit_rate(curve, 1000, 5);
        out.require(fit.beta_hat <= target + 0.15,
                    "encoded-NN beta_hat " + fmt(fit.beta_hat) + " above " +
                        fmt(target + 0.15));
        out.note("encoded-NN beta_hat=" + fmt(fit.beta_hat));
    }
    return out;
}

// --------------------------------------------------------------- criterion 11

Outcome criterion_protocol() {
    Outcome out;
    const std::string client = GAPBENCH_CLIENT_PATH;
    SpaceParams sp{2.0, 2.0, 1, DepthGrowth::constant(3)};
    RunOptions opts;
    opts.trials = 30;
    opts.seed = 77;
    opts.threads = 1;
    opts.quad_base_cells = 64;
    opts.quad_refine_cells = 64;

    auto spec = [&](const std::string& mode) {
        ExternalAlgorithmSpec s;
        s.command = {client, mode};
        s.name = "client-" + mode;
        s.timeout_ms = 20000;
        return s;
    };

    auto internal = zero_algorithm();
    auto external = external_algorithm(spec("echo-zero"));
    const CurveRow a = run_adversary(*internal, 8, sp, opts);
    const CurveRow b = run_adversary(*external, 8, sp, opts);
    out.require(a.trial_errors == b.trial_errors,
                "echo-zero client curve differs from the internal zero baseline");

    auto expect_code = [&](const std::string& mode, ProtocolCode code) {
        auto alg = external_algorithm(spec(mode));
        try {
            (void)run_adversary(*alg, 8, sp, opts);
            out.require(false, mode + " did not raise a protocol error");
        } catch (const ProtocolError& e) {
            out.require(e.code == code, mode + " raised " + e.what());
        }
    };
    expect_code("bad-count", ProtocolCode::PointCount);
    expect_code("bad-nan", ProtocolCode::NonFinite);
    expect_code("bad-json", ProtocolCode::Malformed);
    return out;
}

struct Criterion {
    int number;
    const char* name;
    double time_limit_s;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "void probability floor", 60, criterion_void},
    {2, "exact network algebra", 60, criterion_network_algebra},
    {3, "localized bump contract", 60, criterion_bump_contract},
    {4, "closed-form rate reproduction", 300, [] { return rate_criterion(false); }},
    {5, "baseline gap certification", 600, [] { return rate_criterion(true); }},
    {6, "shallow mollified-relu approximant", 60, criterion_appendix},
    {7, "contraction coverage", 120, criterion_contraction},
    {8, "encoder pushforward certification", 300, criterion_encoders},
    {9, "averaging-operator embedding exactness", 60, criterion_embedding},
    {10, "operator-learning gap", 900, criterion_operator_gap},
    {11, "external protocol conformance", 60, criterion_protocol},
};

int run_one(const Criterion& c) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = c.run();
    } catch (const std::exception& e) {
        out.pass = false;
        out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.time_limit_s) {
        out.pass = false;
        out.detail += (out.detail.empty() ? "" : "; ") + std::string("runtime ") + fmt(secs) +
                      "s above the " + fmt(c.time_limit_s) + "s limit";
    }
    std::printf("[%s] criterion %d (%s, %.1fs)%s%s\n", out.pass ? "PASS" : "FAIL", c.number,
                c.name, secs, out.detail.empty() ? "" : ": ", out.detail.c_str());
    std::fflush(stdout);
    return out.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) {
        const int which = std::atoi(argv[1]);
        for (const auto& c : kCriteria)
            if (c.number == which) return run_one(c);
        std::fprintf(stderr, "unknown criterion %s\n", argv[1]);
        return 2;
    }
    int failures = 0;
    for (const auto& c : kCriteria) failures += run_one(c);
    return failures == 0 ? 0 : 1;
}
