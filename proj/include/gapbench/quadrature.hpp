#pragma once

#include <functional>

#include "gapbench/common.hpp"

namespace gapbench {

using EvalFn = std::function<double(std::span<const double>)>;

struct SupportCube {
    Vec center;
    double half_width = 0.0;
};

// Tensor midpoint rule over [0,1]^d, with a finer grid stratified inside a
// declared support cube and the complement covered by slab boxes. For p =
// infinity the result is the max over all nodes plus the cube corners.
struct QuadratureSpec {
    std::size_t d = 1;
    std::size_t base_cells = 64;    // per unit length outside the cube
    std::size_t refine_cells = 64;  // per cube side inside it
    std::vector<SupportCube> supports;  // zero or one

    static QuadratureSpec for_samples(std::size_t d, std::size_t n_samples);
};

double lp_norm(const EvalFn& f, double p, const QuadratureSpec& quad);
double lp_error(const EvalFn& f, const EvalFn& g, double p, const QuadratureSpec& quad);

}  // namespace gapbench
