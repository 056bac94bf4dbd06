#include "gapbench/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace gapbench {

QuadratureSpec QuadratureSpec::for_samples(std::size_t d, std::size_t n_samples) {
    QuadratureSpec q;
    q.d = d;
    const double per_side = 2.0 * std::ceil(std::pow(static_cast<double>(n_samples),
                                                     1.0 / static_cast<double>(d)));
    const double cap = std::floor(std::pow(32768.0, 1.0 / static_cast<double>(d)));
    q.base_cells = static_cast<std::size_t>(std::clamp(per_side, 64.0, std::max(cap, 64.0)));
    q.refine_cells = d == 1 ? 1024 : 64;
    return q;
}

namespace {

struct Box {
    Vec lo, hi;
};

// Midpoint rule accumulation of |f|^p over a box (or max for p = inf).
void accumulate_box(const EvalFn& f, double p, const Box& box, std::size_t cells_per_unit,
                    std::size_t min_cells, double& acc, double& sup) {
    const std::size_t d = box.lo.size();
    std::vector<std::size_t> n(d);
    Vec step(d);
    double cell_vol = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double len = box.hi[j] - box.lo[j];
        if (len <= 0.0) return;
        n[j] = std::max<std::size_t>(min_cells,
                                     static_cast<std::size_t>(std::ceil(len * cells_per_unit)));
        step[j] = len / static_cast<double>(n[j]);
        cell_vol *= step[j];
    }
    std::vector<std::size_t> idx(d, 0);
    Vec x(d);
    const bool is_sup = std::isinf(p);
    while (true) {
        for (std::size_t j = 0; j < d; ++j)
            x[j] = box.lo[j] + (static_cast<double>(idx[j]) + 0.5) * step[j];
        const double v = f(x);
        if (!std::isfinite(v)) throw std::runtime_error("non-finite evaluation in quadrature");
        const double a = std::abs(v);
        if (is_sup)
            sup = std::max(sup, a);
        else
            acc += (p == 1.0 ? a : (p == 2.0 ? a * a : std::pow(a, p))) * cell_vol;
        std::size_t j = 0;
        while (j < d && ++idx[j] == n[j]) idx[j++] = 0;
        if (j == d) break;
    }
}

}  // namespace

double lp_norm(const EvalFn& f, double p, const QuadratureSpec& quad) {
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    if (quad.supports.size() > 1)
        throw std::invalid_argument("quadrature handles at most one support cube");
    const std::size_t d = quad.d;
    double acc = 0.0, sup = 0.0;

    if (quad.supports.empty()) {
        Box all{Vec(d, 0.0), Vec(d, 1.0)};
        accumulate_box(f, p, all, quad.base_cells, 1, acc, sup);
    } else {
        const auto& cube = quad.supports.front();
        if (cube.center.size() != d) throw std::invalid_argument("support cube dimension mismatch");
        Vec clo(d), chi(d);
        for (std::size_t j = 0; j < d; ++j) {
            clo[j] = std::clamp(cube.center[j] - cube.half_width, 0.0, 1.0);
            chi[j] = std::clamp(cube.center[j] + cube.half_width, 0.0, 1.0);
        }
        // Complement of the cube split into axis slabs; each slab keeps the
        // cube's extent on earlier axes and the full [0,1] on later ones.
        for (std::size_t j = 0; j < d; ++j) {
            for (int side = 0; side < 2; ++side) {
                Box slab{Vec(d), Vec(d)};
                for (std::size_t i = 0; i < d; ++i) {
                    if (i < j) {
                        slab.lo[i] = clo[i];
                        slab.hi[i] = chi[i];
                    } else if (i > j) {
                        slab.lo[i] = 0.0;
                        slab.hi[i] = 1.0;
                    }
                }
                slab.lo[j] = side == 0 ? 0.0 : chi[j];
                slab.hi[j] = side == 0 ? clo[j] : 1.0;
                accumulate_box(f, p, slab, quad.base_cells, 1, acc, sup);
            }
        }
        // The cube itself at the refined resolution.
        Box inner{clo, chi};
        const double side = 2.0 * cube.half_width;
        const auto cells_per_unit = static_cast<std::size_t>(
            std::ceil(static_cast<double>(quad.refine_cells) / std::max(side, 1e-300)));
        accumulate_box(f, p, inner, cells_per_unit, 2, acc, sup);

        if (std::isinf(p)) {
            // Corners and center of the cube are candidate extrema.
            Vec x(d);
            const std::size_t corners = std::size_t{1} << d;
            for (std::size_t mask = 0; mask <= corners; ++mask) {
                for (std::size_t j = 0; j < d; ++j)
                    x[j] = mask == corners ? std::clamp(cube.center[j], 0.0, 1.0)
                                           : ((mask >> j) & 1u ? chi[j] : clo[j]);
                sup = std::max(sup, std::abs(f(x)));
            }
        }
    }

    if (std::isinf(p)) return sup;
    return p == 1.0 ? acc : std::pow(acc, 1.0 / p);
}

double lp_error(const EvalFn& f, const EvalFn& g, double p, const QuadratureSpec& quad) {
    EvalFn diff = [&](std::span<const double> x) { return f(x) - g(x); };
    return lp_norm(diff, p, quad);
}

}  // namespace gapbench
