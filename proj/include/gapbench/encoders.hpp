#pragma once

#include <functional>

#include "gapbench/random_field.hpp"

namespace gapbench {

using FieldEncoder = std::function<Vec(const GridFunction&)>;

// Linear-plus-bias encoder: apply(u)_j = b_j + sum_k a_jk * l_k(u), where the
// l_k are fixed linear functionals held as grid representers.
struct DeepONetEncoder {
    std::vector<Vec> functional_weights;  // d0 rows of length G; l_k(u) = <w_k, u>
    Matrix coeff;                         // d x d0
    Vec bias;                             // d
    double achieved_delta = 0.0;          // worst dual-approximation error on the support
    double margin = 0.0;                  // sup deviation of the encoded box image

    Vec apply(const GridFunction& u) const;
    FieldEncoder fn() const;
};

enum class FunctionalFamily { CosineMoments, PointEvaluations };

// Builds the affine encoder whose nominal image of the coefficient box is
// [0,1]^d. Cosine moments recover the coefficients exactly (delta = 0); point
// evaluations solve a least-squares system over the basis and report the
// achieved dual error. Throws if the requested delta is unattainable.
DeepONetEncoder deeponet_encoder_build(const RandomFieldMeasure& mu, std::size_t d, double delta,
                                       FunctionalFamily family, std::size_t n_functionals = 0);

struct PushforwardCertificate {
    double c_hat = 0.0;
    std::size_t min_bin_count = 0;
    std::size_t min_bin_index = 0;
    double min_bin_lower_bound = 0.0;  // one-sided 95% lower bound on the bin mass
    std::size_t bins_per_axis = 0;
    std::size_t samples = 0;
    bool pass = false;
};

// Histogram check of encoder#mu >= c * Unif([0,1]^d): c_hat is the smallest
// bin occupancy relative to the uniform expectation.
PushforwardCertificate pushforward_certify(const FieldEncoder& encoder,
                                           const RandomFieldMeasure& mu, std::size_t d,
                                           std::size_t bins, std::size_t samples,
                                           std::uint64_t seed);

struct BoxDomain {
    Vec lo, hi;
    std::size_t dim() const { return lo.size(); }
};

using BoxMap = std::function<Vec(const Vec&)>;

struct ContractionReport {
    bool applicable = false;  // precondition ||F - id|| <= eps0 held
    bool pass = false;
    double eps0 = 0.0;
    double c0 = 0.0;
    double norm_estimate = 0.0;  // measured ||F - id||_{W^{1,inf}}
    double ball_radius = 0.0;    // radius of the covered ball V0
    std::size_t bins_checked = 0;
    std::size_t bins_missed = 0;
    double min_density_ratio = 0.0;  // min over bins of observed / required mass
};

// Checks that a near-identity map pushes Unif(V) onto a ball V0 = B(center,
// r/4) with per-bin density at least c0 = (|V0|/|V|) (2/3)^d. A map violating
// the closeness hypothesis reports NOT_APPLICABLE rather than failure.
ContractionReport contraction_coverage_check(const BoxMap& F, const BoxDomain& V,
                                             std::size_t bins, std::size_t samples,
                                             std::uint64_t seed,
                                             double supplied_norm_bound = -1.0);

}  // namespace gapbench
