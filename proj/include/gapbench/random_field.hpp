#pragma once

#include "gapbench/common.hpp"
#include "gapbench/rng.hpp"

namespace gapbench {

// Function on [0,1] sampled at the G cell midpoints; the quadrature functional
// is the plain mean of the values.
struct GridFunction {
    Vec values;
    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

inline double grid_mean(const GridFunction& u) {
    double s = 0.0;
    for (double v : u.values) s += v;
    return s / static_cast<double>(u.values.size());
}

inline double grid_pairing(const GridFunction& u, const GridFunction& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) s += u.values[i] * w.values[i];
    return s / static_cast<double>(u.values.size());
}

inline double grid_node(std::size_t i, std::size_t g) {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(g);
}

// Random field u = sum_j Z_j e_j with cosine basis e_j(x) = cos(pi j x),
// explicit duals e*_j(x) = 2 cos(pi j x), and Z_j uniform on [-s_j, s_j] with
// s_j = scale * j^(-decay). Truncated at J terms.
struct RandomFieldMeasure {
    std::size_t grid = 512;
    std::size_t truncation = 32;
    double scale = 1.0;
    double decay = 2.0;
    std::vector<GridFunction> basis;        // e_1..e_J on the grid
    std::vector<GridFunction> duals;        // e*_1..e*_J
    Vec half_widths;                        // s_j

    static RandomFieldMeasure cosine(std::size_t grid, std::size_t truncation, double scale = 1.0,
                                     double decay = 2.0);
};

struct FieldSample {
    GridFunction u;
    Vec z;  // coefficient record Z_1..Z_J
};

FieldSample sample_measure(const RandomFieldMeasure& mu, Rng& rng);

// Biorthogonal split u = xi + sum_{j<=d} y_j e_j with y_j = pairing(u, e*_j).
struct Decomposition {
    Vec y;
    GridFunction xi;
};

Decomposition decompose(const GridFunction& u, const RandomFieldMeasure& mu, std::size_t d);

// Measure supported on the simplex spanned by d+1 linearly independent
// vertices: u = v_0 + sum_j y_j (v_j - v_0)/d with y ~ Unif([0,1]^d). Every
// sample is a convex combination of the vertices.
class SimplexMeasure {
  public:
    SimplexMeasure(std::vector<GridFunction> vertices, double gram_tolerance = 1e-10);

    struct Sample {
        GridFunction u;
        Vec y;        // the uniform coordinates
        Vec lambda;   // barycentric weights, nonnegative, summing to 1
    };
    Sample sample(Rng& rng) const;

    std::size_t dimension() const { return dirs_.size(); }
    double gram_determinant() const { return gram_det_; }
    const GridFunction& origin() const { return origin_; }
    const std::vector<GridFunction>& directions() const { return dirs_; }

  private:
    GridFunction origin_;
    std::vector<GridFunction> dirs_;  // e_j = (v_j - v_0)/d
    double gram_det_ = 0.0;
};

}  // namespace gapbench
