#include "gapbench/adversary.hpp"

#include <algorithm>
#include <cmath>

#include "gapbench/parallel.hpp"

namespace gapbench {

double min_linf_distance(const Vec& y, const std::vector<Vec>& points) {
    if (points.empty()) throw std::invalid_argument("min_linf_distance: empty point list");
    double best = kInf;
    for (const auto& pt : points) {
        if (pt.size() != y.size()) throw std::invalid_argument("point dimension mismatch");
        double d = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) d = std::max(d, std::abs(y[j] - pt[j]));
        best = std::min(best, d);
    }
    return best;
}

VoidEstimate void_probability_estimate(const std::vector<Vec>& points, std::size_t trials,
                                       std::uint64_t seed) {
    if (points.empty()) throw std::invalid_argument("void estimate needs points");
    if (trials < 1) throw std::invalid_argument("void estimate needs trials >= 1");
    const std::size_t d = points.front().size();
    const auto n = static_cast<double>(points.size());
    const double r = 0.25 * std::pow(n, -1.0 / static_cast<double>(d));

    std::size_t hits = 0;
    Rng rng(seed, 0xb01d, points.size());
    Vec y(d);
    for (std::size_t t = 0; t < trials; ++t) {
        for (std::size_t j = 0; j < d; ++j) y[j] = rng.next_double();
        bool voided = true;
        for (const auto& pt : points) {
            double dist = 0.0;
            for (std::size_t j = 0; j < d; ++j) dist = std::max(dist, std::abs(y[j] - pt[j]));
            if (dist <= r) {
                voided = false;
                break;
            }
        }
        if (voided) ++hits;
    }
    VoidEstimate est;
    est.trials = trials;
    est.radius = r;
    est.estimate = static_cast<double>(hits) / static_cast<double>(trials);
    est.stderr_ = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(trials));
    return est;
}

AdversarialInstance draw_instance(std::size_t n_samples, const SpaceParams& params, double kappa,
                                  Rng& rng) {
    if (n_samples < 1) throw std::invalid_argument("instance needs N >= 1");
    Vec y(params.d);
    for (std::size_t j = 0; j < params.d; ++j) y[j] = rng.next_double();
    const int sign = rng.sign();
    const double steepness =
        4.0 * std::pow(static_cast<double>(n_samples), 1.0 / static_cast<double>(params.d));
    BumpInfo info;
    Network net = make_localized_network(params, steepness, y, kappa, sign, &info);
    return AdversarialInstance{std::move(y),     sign,
                               steepness,        std::abs(info.center_value),
                               info.half_width,  info.declared_budget,
                               std::move(net)};
}

void ErrorCurve::append(CurveRow row) {
    if (!rows.empty() && row.n_samples <= rows.back().n_samples)
        throw std::invalid_argument("curve rows must have strictly increasing N");
    rows.push_back(std::move(row));
}

CurveRow run_adversary(ReconstructionAlgorithm& alg, std::size_t n_samples,
                       const SpaceParams& params, const RunOptions& opts) {
    params.validate();
    if (opts.trials < 30) throw std::invalid_argument("expected-error estimate needs >= 30 trials");
    const std::size_t d = params.d;

    std::vector<Vec> fixed_points;
    if (!alg.randomized()) {
        fixed_points = alg.plan(n_samples, d);
        if (fixed_points.size() != n_samples)
            throw ProtocolError(ProtocolCode::PointCount,
                                alg.name() + " planned " + std::to_string(fixed_points.size()) +
                                    " points, expected " + std::to_string(n_samples));
        for (const auto& pt : fixed_points)
            for (double v : pt)
                if (!std::isfinite(v))
                    throw ProtocolError(ProtocolCode::NonFinite, alg.name() + " planned point");
    }

    QuadratureSpec quad_base = QuadratureSpec::for_samples(d, n_samples);
    if (opts.quad_base_cells) quad_base.base_cells = opts.quad_base_cells;
    if (opts.quad_refine_cells) quad_base.refine_cells = opts.quad_refine_cells;

    Vec errors(opts.trials, 0.0);
    std::vector<double> trial_counts(opts.trials, static_cast<double>(n_samples));
    const bool serialize = !alg.thread_safe();

    parallel_for(opts.trials, serialize ? 1 : opts.threads, [&](std::size_t t) {
        Rng rng(opts.seed, n_samples, t, 1);
        AdversarialInstance inst = draw_instance(n_samples, params, opts.kappa, rng);

        const std::vector<Vec>* points = &fixed_points;
        std::vector<Vec> own_points;
        if (alg.randomized()) {
            Rng plan_rng(opts.seed, n_samples, t, 2);
            own_points = alg.plan_trial(n_samples, d, plan_rng);
            trial_counts[t] = static_cast<double>(own_points.size());
            points = &own_points;
        }

        Network::Evaluator ev(inst.net);
        Vec values(points->size());
        for (std::size_t i = 0; i < points->size(); ++i) values[i] = ev.scalar((*points)[i]);

        EvalFn fhat = alg.reconstruct(*points, values);

        QuadratureSpec quad = quad_base;
        quad.supports = {SupportCube{inst.y, 1.0 / inst.M}};
        Network::Evaluator gev(inst.net);
        EvalFn g = [&gev](std::span<const double> x) { return gev.scalar(x); };
        EvalFn fchecked = [&fhat, &alg](std::span<const double> x) {
            const double v = fhat(x);
            if (!std::isfinite(v))
                throw ProtocolError(ProtocolCode::NonFinite,
                                    alg.name() + " reconstruction value at a quadrature node");
            return v;
        };
        errors[t] = lp_error(fchecked, g, params.p, quad);
    });

    if (alg.randomized()) {
        const double mean_count = mean_stderr(trial_counts).mean;
        if (mean_count > static_cast<double>(n_samples) + 1e-9)
            throw ProtocolError(ProtocolCode::PointCount,
                                alg.name() + " used " + std::to_string(mean_count) +
                                    " points on average, budget " + std::to_string(n_samples));
    }

    const MeanStderr ms = mean_stderr(errors);
    CurveRow row;
    row.n_samples = n_samples;
    row.trials = opts.trials;
    row.mean = ms.mean;
    row.stderr_ = ms.stderr_;
    row.p = params.p;
    row.trial_errors = std::move(errors);
    return row;
}

RateFit fit_rate(const ErrorCurve& curve, std::size_t bootstrap_resamples, std::uint64_t seed) {
    if (curve.rows.size() < 3) throw std::invalid_argument("rate fit needs >= 3 curve rows");
    Vec lx, ly;
    for (const auto& row : curve.rows) {
        if (!(row.mean > 0.0))
            throw std::invalid_argument("rate fit needs positive mean errors");
        lx.push_back(std::log(static_cast<double>(row.n_samples)));
        ly.push_back(std::log(row.mean));
    }
    const OlsFit base = ols(lx, ly);
    RateFit fit;
    fit.beta_hat = -base.slope;
    fit.intercept = base.intercept;
    fit.r_squared = base.r_squared;

    Vec betas(bootstrap_resamples);
    Rng rng(seed, 0xb007);
    Vec ry(curve.rows.size());
    for (std::size_t r = 0; r < bootstrap_resamples; ++r) {
        for (std::size_t i = 0; i < curve.rows.size(); ++i) {
            const auto& row = curve.rows[i];
            double m;
            if (!row.trial_errors.empty()) {
                double sum = 0.0;
                for (std::size_t k = 0; k < row.trial_errors.size(); ++k)
                    sum += row.trial_errors[rng.below(row.trial_errors.size())];
                m = sum / static_cast<double>(row.trial_errors.size());
            } else {
                // No raw trials recorded; fall back to a normal approximation.
                const double u1 = std::max(rng.next_double(), 1e-16);
                const double u2 = rng.next_double();
                const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
                m = row.mean + row.stderr_ * z;
            }
            ry[i] = std::log(std::max(m, 1e-300));
        }
        betas[r] = -ols(lx, ry).slope;
    }
    std::sort(betas.begin(), betas.end());
    auto pick = [&](double q) {
        const double pos = q * static_cast<double>(betas.size() - 1);
        return betas[static_cast<std::size_t>(std::lround(pos))];
    };
    fit.ci_low = pick(0.025);
    fit.ci_high = pick(0.975);
    return fit;
}

CertificateReport certify_gap(const RateFit& fit, const SpaceParams& params, double slack) {
    if (!(slack >= 0.0)) throw std::invalid_argument("slack must be >= 0");
    CertificateReport rep;
    rep.fit = fit;
    rep.beta_hat = fit.beta_hat;
    rep.lambda = theoretical_rate(params);
    rep.slack = slack;
    rep.pass = fit.beta_hat <= rep.lambda + slack;
    return rep;
}

}  // namespace gapbench
