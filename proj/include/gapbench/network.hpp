#pragma once

#include <nlohmann/json_fwd.hpp>

#include "gapbench/common.hpp"

namespace gapbench {

struct Layer {
    Matrix weights;  // d_j x d_{j-1}
    Vec bias;        // d_j
};

// An explicit ReLU network: ordered affine layers (A_j, b_j). The realization
// applies the activation between layers and never after the last one.
// Immutable after construction; evaluation is pure.
class Network {
  public:
    explicit Network(std::vector<Layer> layers);
    // Placeholder scalar identity, so network-holding aggregates stay valid
    // before assembly.
    Network() : Network(std::vector<Layer>{Layer{Matrix::identity(1), Vec(1, 0.0)}}) {}

    std::size_t depth() const { return layers_.size(); }
    std::size_t input_dim() const { return layers_.front().weights.cols; }
    std::size_t output_dim() const { return layers_.back().weights.rows; }
    const std::vector<Layer>& layers() const { return layers_; }

    Vec evaluate(std::span<const double> x) const;
    double evaluate_scalar(std::span<const double> x) const;
    double evaluate_scalar(double x) const { return evaluate_scalar(std::span(&x, 1)); }

    // Reusable workspace for hot loops; one per thread.
    class Evaluator {
      public:
        explicit Evaluator(const Network& net);
        double scalar(std::span<const double> x);
        double scalar(double x) { return scalar(std::span(&x, 1)); }
        std::span<const double> vector(std::span<const double> x);

      private:
        const Network* net_;
        Vec a_, b_;
    };

  private:
    std::vector<Layer> layers_;
};

struct NetworkStats {
    std::size_t depth = 0;
    std::size_t weight_count = 0;  // nonzero entries of all A_j and b_j
    double weight_sup = 0.0;       // max |entry| over all A_j and b_j
};

NetworkStats stats(const Network& net);

// Replaces the first layer by (A_1 C, A_1 b + b_1): the result evaluates the
// original network at Cx + b. Depth is unchanged.
Network affine_precompose(const Network& net, const Matrix& C, const Vec& b);

// Divides the first-layer weights and every bias by R; by positive homogeneity
// of the activation the realization is the original divided by R.
Network homogeneous_rescale(const Network& net, double R);

// Stacks inner below outer. The junction applies the activation to inner's
// output before outer's first affine map, so depth adds exactly.
Network compose(const Network& outer, const Network& inner);

// Activation-free junction: fuses inner's last affine map into outer's first.
// Depth is depth(inner) + depth(outer) - 1.
Network merge_affine(const Network& outer, const Network& inner);

// Exact minimum of k inputs from min(a,b) = ((a+b) - relu(a-b) - relu(b-a))/2,
// arranged as a balanced binary tree of depth 2*ceil(log2 k). Intermediate
// values travel as nonnegative rail pairs (p, n) with value p - n, so the
// activations between tree levels pass them through unchanged. All weight
// magnitudes are at most 1.
Network min_network(std::size_t k);

nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);

}  // namespace gapbench
