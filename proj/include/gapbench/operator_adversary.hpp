#pragma once

#include "gapbench/adversary.hpp"
#include "gapbench/baselines.hpp"
#include "gapbench/encoders.hpp"
#include "gapbench/random_field.hpp"

namespace gapbench {

using OperatorEval = std::function<double(const GridFunction&)>;

// Nonadaptive operator reconstruction: the probe functions depend only on
// (N, measure) and are declared before any values are seen.
class OperatorAlgorithm {
  public:
    virtual ~OperatorAlgorithm() = default;
    virtual std::string name() const = 0;
    virtual std::vector<GridFunction> plan(std::size_t n, const RandomFieldMeasure& mu) = 0;
    virtual OperatorEval reconstruct(const std::vector<GridFunction>& inputs,
                                     const Vec& values) = 0;
    virtual bool thread_safe() const { return true; }
};

using OperatorAlgorithmPtr = std::shared_ptr<OperatorAlgorithm>;

OperatorAlgorithmPtr zero_operator_algorithm();
// Nearest-neighbor over the first `d` normalized dual pairings of the inputs.
OperatorAlgorithmPtr nearest_neighbor_encoded_algorithm(std::size_t d);
// Subprocess adapter for the operator-level wire protocol (function payloads).
OperatorAlgorithmPtr external_operator_algorithm(ExternalAlgorithmSpec spec);

// Encoder plus the affine pullback from encoded coordinates to coefficient
// space, used to stratify the error estimate around the instance support.
struct EncoderHandle {
    FieldEncoder fn;
    std::function<double(std::size_t axis, double z)> nominal_inverse;
    double margin = 0.0;  // enlargement of the pullback, in encoded units
    std::string kind;
};

// A realized operator instance: the finite-dimensional localized network
// composed with the encoder. Its value at u depends on u only through the
// encoded coordinates.
struct OperatorSample {
    AdversarialInstance instance;
    const EncoderHandle* encoder;

    double operator()(const GridFunction& u) const {
        return instance.net.evaluate_scalar(encoder->fn(u));
    }
    OperatorEval eval() const {
        const OperatorSample* self = this;
        return [self](const GridFunction& u) { return (*self)(u); };
    }
};

EncoderHandle deeponet_encoder_handle(const DeepONetEncoder& enc, const RandomFieldMeasure& mu,
                                      std::size_t d);

struct OperatorRunOptions {
    std::size_t trials = 100;
    std::size_t mc_inputs = 2000;
    double kappa = 1.0;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
};

// Expected Bochner-norm reconstruction error against the operator adversary
// psi o encoder at one sample budget. The L^p(mu) norm per trial is estimated
// by Monte-Carlo over fresh inputs, stratified on the pullback of the
// instance's support cube so the localized mass is always sampled.
CurveRow operator_adversary_run(OperatorAlgorithm& alg, std::size_t n_samples,
                                const SpaceParams& effective_params,
                                const RandomFieldMeasure& mu, const EncoderHandle& encoder,
                                const OperatorRunOptions& opts);

struct BochnerEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

// Plain Monte-Carlo E_{u~mu}[|G(u)|^p]^{1/p} with a delta-method stderr.
BochnerEstimate bochner_norm(const OperatorEval& op, const RandomFieldMeasure& mu, double p,
                             std::size_t mc_inputs, std::uint64_t seed);

}  // namespace gapbench
