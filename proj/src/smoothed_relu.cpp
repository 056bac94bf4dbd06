#include "gapbench/smoothed_relu.hpp"

namespace gapbench {

ValueDeriv smoothed_relu(double x) {
    if (x <= -1.0) return {0.0, 0.0};
    if (x >= 1.0) return {x, 1.0};
    // integral of (x - t) (3/4)(1 - t^2) over t in [-1, x]
    const double x2 = x * x;
    const double value = 0.375 * x2 - 0.0625 * x2 * x2 + 0.5 * x + 0.1875;
    const double deriv = 0.75 * x - 0.25 * x2 * x + 0.5;
    return {value, deriv};
}

Network shallow_smoothed_relu_net(std::size_t m) {
    if (m < 1) throw std::invalid_argument("need at least one breakpoint interval");
    Matrix a1(m, 1);
    Vec b1(m);
    Matrix a2(1, m);
    double prev = smoothed_relu(-1.0).deriv;
    for (std::size_t i = 1; i <= m; ++i) {
        const double bp = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(m);
        a1(i - 1, 0) = 1.0;
        b1[i - 1] = -bp;
        const double cur = smoothed_relu(bp).deriv;
        a2(0, i - 1) = cur - prev;
        prev = cur;
    }
    return Network({Layer{std::move(a1), std::move(b1)}, Layer{std::move(a2), Vec(1, 0.0)}});
}

}  // namespace gapbench
