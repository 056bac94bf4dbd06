#pragma once

#include "gapbench/algorithm.hpp"
#include "gapbench/spaces.hpp"
#include "gapbench/stats.hpp"

namespace gapbench {

// One draw of the randomized adversary: a signed localized network with
// steepness M = 4 N^(1/d) centered at a uniform y.
struct AdversarialInstance {
    Vec y;
    int sign;
    double M;
    double amplitude;  // realized |value| at the center
    double half_width;
    std::size_t declared_budget;
    Network net;  // sign already applied
};

double min_linf_distance(const Vec& y, const std::vector<Vec>& points);

struct VoidEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t trials = 0;
    double radius = 0.0;
};

// Monte-Carlo estimate of Prob[min_j |y - x_j|_inf > (1/4) N^(-1/d)] for
// y ~ Unif([0,1]^d); at least 1/2 for every point configuration.
VoidEstimate void_probability_estimate(const std::vector<Vec>& points, std::size_t trials,
                                       std::uint64_t seed);

AdversarialInstance draw_instance(std::size_t n_samples, const SpaceParams& params, double kappa,
                                  Rng& rng);

struct CurveRow {
    std::size_t n_samples = 0;
    std::size_t trials = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
    double p = 2.0;
    Vec trial_errors;  // kept for bootstrap resampling
};

struct ErrorCurve {
    std::vector<CurveRow> rows;
    void append(CurveRow row);  // enforces strictly increasing N
};

struct RunOptions {
    std::size_t trials = 200;
    double kappa = 1.0;
    std::uint64_t seed = 0;
    std::size_t threads = 0;  // 0 = auto
    std::size_t quad_base_cells = 0;    // 0 = derived from N
    std::size_t quad_refine_cells = 0;  // 0 = default
};

// Monte-Carlo estimate of the expected reconstruction error against the
// randomized instance family, one curve row per call.
CurveRow run_adversary(ReconstructionAlgorithm& alg, std::size_t n_samples,
                       const SpaceParams& params, const RunOptions& opts);

struct RateFit {
    double beta_hat = 0.0;  // negated log-log slope
    double intercept = 0.0;
    double r_squared = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

RateFit fit_rate(const ErrorCurve& curve, std::size_t bootstrap_resamples = 1000,
                 std::uint64_t seed = 7);

struct CertificateReport {
    bool pass = false;
    double beta_hat = 0.0;
    double lambda = 0.0;
    double slack = 0.0;
    RateFit fit;
};

// PASS iff beta_hat <= theoretical rate + slack (boundary inclusive).
CertificateReport certify_gap(const RateFit& fit, const SpaceParams& params, double slack);

}  // namespace gapbench
