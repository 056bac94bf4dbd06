#include "gapbench/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "gapbench/ano.hpp"
#include "gapbench/config.hpp"
#include "gapbench/operator_adversary.hpp"
#include "gapbench/smoothed_relu.hpp"

#ifndef GAPBENCH_VERSION
#define GAPBENCH_VERSION "0.0.0-dev"
#endif

namespace gapbench {

namespace {

using nlohmann::json;

double json_p(const json& v) {
    if (v.is_string() && v.get<std::string>() == "inf") return kInf;
    return v.get<double>();
}

SpaceParams parse_space(const json& cfg, std::vector<std::string>& problems) {
    SpaceParams sp;
    if (!cfg.contains("space")) {
        problems.push_back("missing [space] section");
        return sp;
    }
    const json& s = cfg["space"];
    sp.alpha = s.value("alpha", 2.0);
    sp.p = s.contains("p") ? json_p(s["p"]) : 2.0;
    sp.d = s.value("d", 1);
    if (s.contains("ell")) {
        try {
            sp.ell = DepthGrowth::from_json(s["ell"]);
        } catch (const std::exception& e) {
            problems.push_back(std::string("space.ell: ") + e.what());
        }
    }
    if (!(sp.alpha > 0)) problems.push_back("space.alpha must be positive");
    if (!(sp.p >= 1)) problems.push_back("space.p must be >= 1 (\"inf\" allowed)");
    if (sp.d < 1) problems.push_back("space.d must be >= 1");
    return sp;
}

std::size_t effective_threads(const json& cfg) {
    if (const char* env = std::getenv("GAPBENCH_THREADS")) {
        const long v = std::atol(env);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return cfg.value("threads", 0);
}

RandomFieldMeasure parse_measure(const json& cfg) {
    const json m = cfg.value("measure", json::object());
    return RandomFieldMeasure::cosine(m.value("grid", 512), m.value("truncation", 32),
                                      m.value("scale", 1.0), m.value("decay", 2.0));
}

json curve_to_json(const std::string& name, const ErrorCurve& curve, bool with_trials) {
    json rows = json::array();
    for (const auto& r : curve.rows) {
        json row = {{"n", r.n_samples},
                    {"trials", r.trials},
                    {"mean", r.mean},
                    {"stderr", r.stderr_},
                    {"p", std::isinf(r.p) ? json("inf") : json(r.p)}};
        if (with_trials) row["trial_errors"] = r.trial_errors;
        rows.push_back(std::move(row));
    }
    return {{"algorithm", name}, {"rows", std::move(rows)}};
}

ErrorCurve curve_from_json(const json& cj) {
    ErrorCurve curve;
    for (const auto& row : cj.at("rows")) {
        CurveRow r;
        r.n_samples = row.at("n").get<std::size_t>();
        r.trials = row.at("trials").get<std::size_t>();
        r.mean = row.at("mean").get<double>();
        r.stderr_ = row.at("stderr").get<double>();
        r.p = row.at("p").is_string() ? kInf : row.at("p").get<double>();
        if (row.contains("trial_errors")) r.trial_errors = row["trial_errors"].get<Vec>();
        curve.append(std::move(r));
    }
    return curve;
}

json fit_to_json(const RateFit& fit) {
    return {{"beta_hat", fit.beta_hat},
            {"intercept", fit.intercept},
            {"r_squared", fit.r_squared},
            {"ci_low", fit.ci_low},
            {"ci_high", fit.ci_high}};
}

json certificate_json(const std::string& name, const CertificateReport& cert, double ci_slack,
                      bool ci_ok) {
    return {{"name", name},          {"pass", cert.pass && ci_ok},
            {"beta_hat", cert.beta_hat}, {"lambda", cert.lambda},
            {"slack", cert.slack},   {"ci_slack", ci_slack},
            {"fit", fit_to_json(cert.fit)}};
}

std::vector<std::pair<std::string, AlgorithmPtr>> build_algorithms(const json& adv,
                                                                   std::uint64_t seed) {
    std::vector<std::pair<std::string, AlgorithmPtr>> out;
    for (const auto& a : adv.value("algorithms", json::array({"zero"}))) {
        const std::string name = a.get<std::string>();
        if (name == "zero")
            out.emplace_back(name, zero_algorithm());
        else if (name == "nearest-neighbor-grid")
            out.emplace_back(name, nearest_neighbor_algorithm(NnLayout::grid()));
        else if (name == "nearest-neighbor-iid")
            out.emplace_back(name, nearest_neighbor_algorithm(NnLayout::iid(seed ^ 0x5eed)));
        else if (name == "multilinear")
            out.emplace_back(name, multilinear_interpolation_algorithm());
        else
            throw std::invalid_argument("unknown algorithm: " + name);
    }
    if (adv.contains("external")) {
        ExternalAlgorithmSpec spec;
        for (const auto& c : adv["external"].at("command")) spec.command.push_back(c);
        spec.timeout_ms = adv["external"].value("timeout_ms", 30000);
        spec.name = adv["external"].value("name", std::string("external"));
        if (adv["external"].contains("env"))
            for (const auto& e : adv["external"]["env"]) spec.env_allowlist.push_back(e);
        out.emplace_back(spec.name, external_algorithm(spec));
    }
    return out;
}

// ---------------------------------------------------------------- void-check

json run_void_check(const json& cfg, bool& pass) {
    const json vc = cfg.value("void", json::object());
    const auto layouts = vc.value("layouts", std::vector<std::string>{"grid", "iid",
                                                                      "corner-cluster",
                                                                      "coincident"});
    const auto dims = vc.value("dims", std::vector<std::size_t>{1, 2, 3});
    const auto n_values = vc.value("n_values", std::vector<std::size_t>{10, 100, 1000});
    const auto trials = vc.value("trials", std::size_t{100000});
    const auto seed = cfg.value("seed", std::uint64_t{1});
    const double floor_prob = vc.value("floor", 0.49);

    auto make_points = [&](const std::string& layout, std::size_t d,
                           std::size_t n) -> std::vector<Vec> {
        if (layout == "grid") {
            return midpoint_grid_points(n, d);
        }
        std::vector<Vec> pts(n, Vec(d));
        Rng rng(seed, 0x707, d, n);
        if (layout == "iid") {
            for (auto& pt : pts)
                for (double& v : pt) v = rng.next_double();
        } else if (layout == "corner-cluster") {
            for (auto& pt : pts)
                for (double& v : pt) v = 0.05 * rng.next_double();
        } else if (layout == "coincident") {
            Vec fixed(d);
            for (double& v : fixed) v = rng.next_double();
            for (auto& pt : pts) pt = fixed;
        } else {
            throw std::invalid_argument("unknown layout: " + layout);
        }
        return pts;
    };

    json table = json::array();
    pass = true;
    std::size_t idx = 0;
    for (const auto& layout : layouts)
        for (std::size_t d : dims)
            for (std::size_t n : n_values) {
                const auto pts = make_points(layout, d, n);
                const VoidEstimate est = void_probability_estimate(pts, trials, seed + idx);
                const bool ok = est.estimate >= floor_prob;
                pass = pass && ok;
                table.push_back({{"layout", layout},
                                 {"d", d},
                                 {"n", n},
                                 {"estimate", est.estimate},
                                 {"stderr", est.stderr_},
                                 {"radius", est.radius},
                                 {"pass", ok}});
                ++idx;
            }
    return {{"table", std::move(table)}};
}

// ---------------------------------------------------------------- finite-gap

json run_finite_gap(const json& cfg, bool& pass) {
    std::vector<std::string> problems;
    SpaceParams sp = parse_space(cfg, problems);
    if (problems.empty() && !(sp.ell_star() >= 3))
        problems.push_back("rate bound requires sup-depth ell* >= 3, got " +
                           std::to_string(sp.ell_star()));
    if (!problems.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw std::invalid_argument(msg);
    }

    const json adv = cfg.value("adversary", json::object());
    RunOptions opts;
    opts.trials = adv.value("trials", 200);
    opts.kappa = adv.value("kappa", 1.0);
    opts.seed = cfg.value("seed", std::uint64_t{1});
    opts.threads = effective_threads(cfg);
    const double slack = adv.value("slack", 0.15);
    const double ci_slack = adv.value("ci_slack", 0.25);
    std::vector<std::size_t> n_grid =
        adv.value("n_grid", std::vector<std::size_t>{16, 32, 64, 128, 256, 512, 1024, 2048, 4096});

    const double lambda = theoretical_rate(sp);
    json curves = json::array();
    json certs = json::array();
    pass = true;
    for (auto& [name, alg] : build_algorithms(adv, opts.seed)) {
        ErrorCurve curve;
        for (std::size_t n : n_grid) curve.append(run_adversary(*alg, n, sp, opts));
        const RateFit fit = fit_rate(curve, 1000, opts.seed ^ 0xf17);
        const CertificateReport cert = certify_gap(fit, sp, slack);
        const bool ci_ok = fit.ci_high <= lambda + ci_slack;
        pass = pass && cert.pass && ci_ok;
        curves.push_back(curve_to_json(name, curve, adv.value("keep_trials", false)));
        certs.push_back(certificate_json(name, cert, ci_slack, ci_ok));
    }
    return {{"lambda", lambda}, {"curves", std::move(curves)}, {"certificates", std::move(certs)}};
}

// --------------------------------------------------------------- operator-gap

json run_operator_gap(const json& cfg, bool& pass) {
    std::vector<std::string> problems;
    SpaceParams sp = parse_space(cfg, problems);
    const json op = cfg.value("operator", json::object());
    const std::string encoder_kind = op.value("encoder", std::string("deeponet"));
    if (problems.empty() && !(sp.ell_star() >= 4))
        problems.push_back("operator rate bound requires sup-depth ell* >= 4, got " +
                           std::to_string(sp.ell_star()));
    if (std::isinf(sp.p)) problems.push_back("operator error norm needs finite p");
    if (encoder_kind != "deeponet" && encoder_kind != "ano")
        problems.push_back("operator.encoder must be deeponet or ano");
    RandomFieldMeasure mu;
    try {
        mu = parse_measure(cfg);
    } catch (const std::exception& e) {
        problems.push_back(std::string("measure: ") + e.what());
    }
    if (problems.empty() && sp.d > mu.truncation)
        problems.push_back("embedded dimension exceeds the measure truncation");
    if (!problems.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw std::invalid_argument(msg);
    }

    OperatorRunOptions opts;
    opts.trials = op.value("trials", 100);
    opts.mc_inputs = op.value("mc_inputs", 2000);
    opts.kappa = op.value("kappa", 1.0);
    opts.seed = cfg.value("seed", std::uint64_t{1});
    opts.threads = effective_threads(cfg);
    const double slack = op.value("slack", 0.15);
    const double ci_slack = op.value("ci_slack", 0.25);
    std::vector<std::size_t> n_grid =
        op.value("n_grid", std::vector<std::size_t>{16, 32, 64, 128, 256, 512, 1024});

    // Depth bookkeeping per encoder route: the linear-functional encoder costs
    // one depth unit (effective sup-depth ell* - 1); the averaging-operator
    // route uses a fixed finite-dimensional budget of 3.
    SpaceParams eff = sp;
    EncoderHandle handle;
    if (encoder_kind == "deeponet") {
        eff.ell = DepthGrowth::constant(sp.ell_star() - 1.0);
        const std::string fam = op.value("functionals", std::string("cosine"));
        DeepONetEncoder enc =
            fam == "cosine"
                ? deeponet_encoder_build(mu, sp.d, 0.0, FunctionalFamily::CosineMoments)
                : deeponet_encoder_build(mu, sp.d, op.value("delta", 0.05),
                                         FunctionalFamily::PointEvaluations,
                                         op.value("functional_count", 64));
        handle = deeponet_encoder_handle(enc, mu, sp.d);
    } else {
        eff.ell = DepthGrowth::constant(3.0);
        double r = kInf;
        for (std::size_t j = 0; j < sp.d; ++j) r = std::min(r, mu.half_widths[j]);
        const double eps0 = std::min(0.5, r / 4.0);
        const double bprime = estimate_sup_bound(mu, 200, opts.seed);
        AnoEncoder enc =
            ano_encoder_build(mu, sp.d, bprime, eps0 / (2.0 * static_cast<double>(sp.d)));
        handle.fn = enc.fn();
        handle.kind = "ano";
        handle.margin = enc.margin;
        const double scale = enc.norm_scale, shift = enc.norm_shift;
        handle.nominal_inverse = [scale, shift](std::size_t, double z) {
            return (z - shift) / scale;
        };
    }

    const double lambda_eff = theoretical_rate(eff);
    const double ceiling = 1.0 / sp.p;
    json curves = json::array();
    json certs = json::array();
    pass = true;

    std::vector<std::pair<std::string, OperatorAlgorithmPtr>> algs;
    for (const auto& a : op.value("algorithms", json::array({"zero-op"}))) {
        const std::string name = a.get<std::string>();
        if (name == "zero-op")
            algs.emplace_back(name, zero_operator_algorithm());
        else if (name == "nearest-neighbor-encoded")
            algs.emplace_back(name, nearest_neighbor_encoded_algorithm(sp.d));
        else
            throw std::invalid_argument("unknown operator algorithm: " + name);
    }
    if (op.contains("external")) {
        ExternalAlgorithmSpec spec;
        for (const auto& c : op["external"].at("command")) spec.command.push_back(c);
        spec.timeout_ms = op["external"].value("timeout_ms", 30000);
        spec.name = op["external"].value("name", std::string("external-op"));
        algs.emplace_back(spec.name, external_operator_algorithm(spec));
    }

    for (auto& [name, alg] : algs) {
        ErrorCurve curve;
        for (std::size_t n : n_grid)
            curve.append(operator_adversary_run(*alg, n, eff, mu, handle, opts));
        const RateFit fit = fit_rate(curve, 1000, opts.seed ^ 0xf17);
        const CertificateReport cert = certify_gap(fit, eff, slack);
        const bool ci_ok = fit.ci_high <= lambda_eff + ci_slack;
        pass = pass && cert.pass && ci_ok;
        curves.push_back(curve_to_json(name, curve, op.value("keep_trials", false)));
        certs.push_back(certificate_json(name, cert, ci_slack, ci_ok));
    }
    // Uniform-norm mode is reported as the p-indexed family of certified
    // bounds; the sup-norm statement is their p,d -> infinity limit and no
    // separate sup-norm adversary is run.
    json uniform_family = json::array();
    for (double pp : {1.0, 2.0, 4.0, 8.0}) {
        SpaceParams fam = eff;
        fam.p = pp;
        uniform_family.push_back({{"p", pp}, {"bound", theoretical_rate(fam)}});
    }

    return {{"lambda", lambda_eff},
            {"monte_carlo_ceiling", ceiling},
            {"uniform_mode_bounds", std::move(uniform_family)},
            {"encoder", encoder_kind},
            {"curves", std::move(curves)},
            {"certificates", std::move(certs)}};
}

// -------------------------------------------------------------- encoder-check

json run_encoder_check(const json& cfg, bool& pass) {
    const RandomFieldMeasure mu = parse_measure(cfg);
    const json ec = cfg.value("encoder_check", json::object());
    const std::size_t d = ec.value("d", 2);
    const auto seed = cfg.value("seed", std::uint64_t{1});
    pass = true;
    json out;

    {
        DeepONetEncoder enc = deeponet_encoder_build(mu, d, 0.0, FunctionalFamily::CosineMoments);
        const auto cert = pushforward_certify(enc.fn(), mu, d, ec.value("bins", 10),
                                              ec.value("samples", std::size_t{1000000}), seed);
        const double min_c = ec.value("min_c_hat", 0.8);
        const bool ok = cert.pass && cert.c_hat >= min_c;
        pass = pass && ok;
        out["cosine"] = {{"c_hat", cert.c_hat},
                         {"min_bin_count", cert.min_bin_count},
                         {"delta", enc.achieved_delta},
                         {"pass", ok}};
    }
    {
        DeepONetEncoder enc =
            deeponet_encoder_build(mu, d, ec.value("delta", 0.05),
                                   FunctionalFamily::PointEvaluations,
                                   ec.value("functional_count", 64));
        const auto cert = pushforward_certify(enc.fn(), mu, d, ec.value("bins", 10),
                                              ec.value("point_samples", std::size_t{100000}),
                                              seed + 1);
        pass = pass && cert.pass;
        out["point_evals"] = {{"c_hat", cert.c_hat},
                              {"min_bin_count", cert.min_bin_count},
                              {"delta", enc.achieved_delta},
                              {"pass", cert.pass}};
    }
    {
        double r = kInf;
        for (std::size_t j = 0; j < d; ++j) r = std::min(r, mu.half_widths[j]);
        const double eps0 = std::min(0.5, r / 4.0);
        const double bprime = estimate_sup_bound(mu, 200, seed);
        AnoEncoder enc = ano_encoder_build(mu, d, bprime, eps0 / (2.0 * static_cast<double>(d)));
        const auto cert = pushforward_certify(enc.fn(), mu, d, ec.value("ano_bins", 5),
                                              ec.value("ano_samples", std::size_t{100000}),
                                              seed + 2);
        pass = pass && cert.pass && enc.met_target;
        out["ano"] = {{"c_hat", cert.c_hat},
                      {"min_bin_count", cert.min_bin_count},
                      {"achieved_eps", enc.achieved_eps},
                      {"target_eps", enc.target_eps},
                      {"pass", cert.pass && enc.met_target}};
    }
    return out;
}

// -------------------------------------------------------------- appendix-check

json run_appendix_check(const json& cfg, bool& pass) {
    const json ac = cfg.value("appendix", json::object());
    const auto m_values = ac.value("m_values", std::vector<std::size_t>{8, 32, 128});
    pass = true;
    json rows = json::array();
    double prev_err = kInf;
    for (std::size_t m : m_values) {
        const Network net = shallow_smoothed_relu_net(m);
        Network::Evaluator ev(net);
        double sup_val = 0.0, sup_der = 0.0;
        const double fd = 1e-6;
        for (int i = 0; i <= 2000; ++i) {
            const double x = -2.0 + 4.0 * static_cast<double>(i) / 2000.0;
            const auto target = smoothed_relu(x);
            sup_val = std::max(sup_val, std::abs(ev.scalar(x) - target.value));
            const double slope = (ev.scalar(x + fd) - ev.scalar(x - fd)) / (2.0 * fd);
            sup_der = std::max(sup_der, std::abs(slope - target.deriv));
        }
        const double bound = 3.0 / static_cast<double>(m) + 1e-3;
        const double err = std::max(sup_val, sup_der);
        const bool ok = err <= bound && err < prev_err;
        pass = pass && ok;
        prev_err = err;
        rows.push_back({{"m", m},
                        {"sup_value_error", sup_val},
                        {"sup_deriv_error", sup_der},
                        {"bound", bound},
                        {"pass", ok}});
    }
    return {{"rows", std::move(rows)}};
}

// ----------------------------------------------------------- contraction-check

json run_contraction_check(const json& cfg, bool& pass) {
    const json cc = cfg.value("contraction", json::object());
    const std::size_t d = cc.value("d", 2);
    const std::size_t perturbations = cc.value("perturbations", 50);
    const std::size_t samples = cc.value("samples", std::size_t{300000});
    const std::size_t bins = cc.value("bins", 20);
    const auto seed = cfg.value("seed", std::uint64_t{1});

    BoxDomain v{Vec(d, 0.0), Vec(d, 1.0)};
    pass = true;
    json rows = json::array();
    std::size_t applicable = 0;
    for (std::size_t k = 0; k < perturbations; ++k) {
        Rng rng(seed, 0xf0, k);
        // Smooth sinusoidal perturbation with W^{1,inf} norm well below eps0.
        std::vector<Vec> w(d, Vec(d));
        Vec phase(d);
        for (std::size_t i = 0; i < d; ++i) {
            double norm = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                w[i][j] = rng.uniform(-1.0, 1.0);
                norm += w[i][j] * w[i][j];
            }
            norm = std::sqrt(std::max(norm, 1e-12));
            for (double& x : w[i]) x /= norm;
            phase[i] = rng.uniform(0.0, 6.28318);
        }
        const double eps0 = std::min(0.5, 0.5 / 4.0);
        const double tau = rng.uniform(0.2, 0.45);
        const double amp = tau * eps0 / std::sqrt(static_cast<double>(d));
        BoxMap f = [&, amp](const Vec& y) {
            Vec z = y;
            for (std::size_t i = 0; i < d; ++i) {
                double arg = phase[i];
                for (std::size_t j = 0; j < d; ++j) arg += w[i][j] * y[j];
                z[i] += amp * std::sin(arg);
            }
            return z;
        };
        const ContractionReport rep = contraction_coverage_check(f, v, bins, samples, seed + k);
        pass = pass && rep.applicable && rep.pass;
        if (rep.applicable) ++applicable;
        rows.push_back({{"perturbation", k},
                        {"applicable", rep.applicable},
                        {"pass", rep.pass},
                        {"norm_estimate", rep.norm_estimate},
                        {"eps0", rep.eps0},
                        {"min_density_ratio", rep.min_density_ratio},
                        {"bins_missed", rep.bins_missed}});
    }

    // The collapsing counterexample must report NOT_APPLICABLE. In one
    // dimension zeroing later coordinates is vacuous, so collapse to a point.
    BoxMap collapse = [d](const Vec& y) {
        Vec z(d, 0.0);
        z[0] = d >= 2 ? y[0] : 0.5;
        return z;
    };
    const ContractionReport rep = contraction_coverage_check(collapse, v, bins, 1000, seed);
    const bool counterexample_ok = !rep.applicable;
    pass = pass && counterexample_ok;

    return {{"rows", std::move(rows)},
            {"applicable", applicable},
            {"collapse_not_applicable", counterexample_ok}};
}

}  // namespace

std::vector<std::string> experiment_kinds() {
    return {"void-check",    "finite-gap",     "operator-gap",
            "encoder-check", "appendix-check", "contraction-check"};
}

std::string describe_kind(const std::string& kind) {
    if (kind == "void-check")
        return "void-check: verifies that for any N sample points in [0,1]^d a uniform random "
               "center lands farther than (1/4)N^(-1/d) from all of them (sup-norm) with "
               "probability at least 1/2, for grid, iid, clustered, and coincident layouts.";
    if (kind == "finite-gap")
        return "finite-gap: runs the randomized localized-bump adversary against nonadaptive "
               "point-sample reconstruction algorithms on the unit ball of the ReLU "
               "approximation space over [0,1]^d and certifies that the fitted convergence "
               "rate beta_hat stays below lambda = 1/p + (1/d)*alpha/(alpha + floor(ell*/2)) "
               "plus slack. Requires sup-depth ell* >= 3.";
    if (kind == "operator-gap")
        return "operator-gap: certifies the operator-learning sampling ceiling: the fitted "
               "rate of any nonadaptive operator reconstruction in the Bochner L^p norm stays "
               "below the Monte-Carlo rate beta* <= 1/p; at embedded dimension d the certified "
               "bound is 1/p + (1/d)*alpha/(alpha + floor((ell*-1)/2)) for the linear-functional "
               "encoder route and 1/p + (1/d)*alpha/(alpha+1) for the averaging-operator route. "
               "Requires sup-depth ell* >= 4.";
    if (kind == "encoder-check")
        return "encoder-check: certifies encoder pushforward domination encoder#mu >= "
               "c*Unif([0,1]^d) by histogram occupancy, for exact cosine-moment encoders, "
               "least-squares point-evaluation encoders, and shallow averaging-lifting "
               "encoders.";
    if (kind == "appendix-check")
        return "appendix-check: verifies the shallow chord approximant of the mollified ReLU: "
               "W^{1,inf} error at most 3/M on M breakpoints, decreasing in M.";
    if (kind == "contraction-check")
        return "contraction-check: verifies that maps within eps0 = min(1/2, r/4) of the "
               "identity in W^{1,inf} push the uniform law onto the ball B(center, r/4) with "
               "per-bin density at least c0 = (|V0|/|V|)*(2/3)^d; maps violating the "
               "hypothesis report NOT_APPLICABLE.";
    throw std::invalid_argument("unknown experiment kind: " + kind + "; known kinds: " + [] {
        std::string s;
        for (const auto& k : experiment_kinds()) s += k + " ";
        return s;
    }());
}

ExperimentResult run_experiment(const nlohmann::json& config) {
    const auto start = std::chrono::steady_clock::now();
    if (!config.contains("kind")) throw std::invalid_argument("config needs a 'kind' key");
    const std::string kind = config["kind"].get<std::string>();

    bool pass = false;
    json results;
    if (kind == "void-check")
        results = run_void_check(config, pass);
    else if (kind == "finite-gap")
        results = run_finite_gap(config, pass);
    else if (kind == "operator-gap")
        results = run_operator_gap(config, pass);
    else if (kind == "encoder-check")
        results = run_encoder_check(config, pass);
    else if (kind == "appendix-check")
        results = run_appendix_check(config, pass);
    else if (kind == "contraction-check")
        results = run_contraction_check(config, pass);
    else
        describe_kind(kind);  // throws with suggestions

    const auto stop = std::chrono::steady_clock::now();
    ExperimentResult out;
    out.pass = pass;
    out.report = {{"kind", kind},
                  {"config", config},
                  {"config_hash", config_hash(config)},
                  {"version", GAPBENCH_VERSION},
                  {"results", std::move(results)},
                  {"pass", pass},
                  {"timing", {{"wall_seconds",
                               std::chrono::duration<double>(stop - start).count()}}}};
    return out;
}

void write_report_files(const nlohmann::json& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream f(fs::path(out_dir) / "report.json");
        f << report.dump(2) << "\n";
    }
    const json& results = report.at("results");
    if (!results.contains("curves")) return;
    const double lambda = results.value("lambda", 0.0);
    for (const auto& cj : results["curves"]) {
        const std::string name = cj.at("algorithm").get<std::string>();
        {
            std::ofstream f(fs::path(out_dir) / ("curve_" + name + ".csv"));
            f << "N,trials,mean,stderr\n";
            for (const auto& row : cj.at("rows"))
                f << row.at("n").get<std::size_t>() << "," << row.at("trials").get<std::size_t>()
                  << "," << row.at("mean").get<double>() << "," << row.at("stderr").get<double>()
                  << "\n";
        }
        {
            std::ofstream f(fs::path(out_dir) / ("plotdata_" + name + ".csv"));
            f << "N,mean,stderr,theory\n";
            double c0 = 0.0;
            bool have_c0 = false;
            for (const auto& row : cj.at("rows")) {
                const auto n = row.at("n").get<std::size_t>();
                const double mean = row.at("mean").get<double>();
                if (!have_c0 && mean > 0.0) {
                    c0 = mean * std::pow(static_cast<double>(n), lambda);
                    have_c0 = true;
                }
                const double theory = c0 * std::pow(static_cast<double>(n), -lambda);
                f << n << "," << mean << "," << row.at("stderr").get<double>() << "," << theory
                  << "\n";
            }
        }
    }
}

nlohmann::json recheck_report(const nlohmann::json& report) {
    json problems = json::array();
    const json& results = report.at("results");
    if (results.contains("curves") && results.contains("certificates")) {
        for (std::size_t i = 0; i < results["curves"].size(); ++i) {
            const json& cj = results["curves"][i];
            const json& cert = results["certificates"][i];
            try {
                const ErrorCurve curve = curve_from_json(cj);
                Vec lx, ly;
                for (const auto& r : curve.rows) {
                    lx.push_back(std::log(static_cast<double>(r.n_samples)));
                    ly.push_back(std::log(r.mean));
                }
                const double beta = -ols(lx, ly).slope;
                if (std::abs(beta - cert.at("beta_hat").get<double>()) > 1e-9)
                    problems.push_back("certificate " + cj.at("algorithm").get<std::string>() +
                                       ": beta_hat does not match the embedded curve");
                const bool should_pass = beta <= cert.at("lambda").get<double>() +
                                                     cert.at("slack").get<double>();
                const bool ci_ok = cert.at("fit").at("ci_high").get<double>() <=
                                   cert.at("lambda").get<double>() +
                                       cert.at("ci_slack").get<double>();
                if ((should_pass && ci_ok) != cert.at("pass").get<bool>())
                    problems.push_back("certificate " + cj.at("algorithm").get<std::string>() +
                                       ": pass flag inconsistent with curve data");
            } catch (const std::exception& e) {
                problems.push_back(std::string("recheck error: ") + e.what());
            }
        }
    }
    return {{"ok", problems.empty()}, {"problems", std::move(problems)}};
}

}  // namespace gapbench
