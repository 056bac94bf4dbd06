#pragma once

#include "gapbench/network.hpp"

namespace gapbench {

struct ValueDeriv {
    double value = 0.0;
    double deriv = 0.0;
};

// ReLU mollified by the parabolic kernel (3/4)(1 - t^2) on [-1, 1]: equals 0
// below -1 and the identity above 1, with an explicit quartic in between.
// C^1 everywhere; always >= plain ReLU.
ValueDeriv smoothed_relu(double x);

// Shallow chord-slope approximant sum_m c_m relu(x - x_m) on the breakpoints
// x_m = -1 + 2m/M, with c_m the increments of the mollified derivative.
// Its W^{1,inf} distance to the mollified ReLU is at most 3/M.
Network shallow_smoothed_relu_net(std::size_t m);

}  // namespace gapbench
