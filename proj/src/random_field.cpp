#include "gapbench/random_field.hpp"

#include <cmath>
#include <stdexcept>

namespace gapbench {

RandomFieldMeasure RandomFieldMeasure::cosine(std::size_t grid, std::size_t truncation,
                                              double scale, double decay) {
    if (grid < 16 * truncation)
        throw std::invalid_argument("grid must resolve the basis: need G >= 16*J");
    if (!(decay > 1.0))
        throw std::invalid_argument("coefficient decay must exceed 1 for a summable series");
    RandomFieldMeasure mu;
    mu.grid = grid;
    mu.truncation = truncation;
    mu.scale = scale;
    mu.decay = decay;
    constexpr double kPi = 3.14159265358979323846;
    for (std::size_t j = 1; j <= truncation; ++j) {
        GridFunction e, dual;
        e.values.resize(grid);
        dual.values.resize(grid);
        for (std::size_t i = 0; i < grid; ++i) {
            const double c = std::cos(kPi * static_cast<double>(j) * grid_node(i, grid));
            e.values[i] = c;
            dual.values[i] = 2.0 * c;
        }
        mu.basis.push_back(std::move(e));
        mu.duals.push_back(std::move(dual));
        mu.half_widths.push_back(scale * std::pow(static_cast<double>(j), -decay));
    }
    return mu;
}

FieldSample sample_measure(const RandomFieldMeasure& mu, Rng& rng) {
    FieldSample s;
    s.z.resize(mu.truncation);
    s.u.values.assign(mu.grid, 0.0);
    for (std::size_t j = 0; j < mu.truncation; ++j)
        s.z[j] = rng.uniform(-mu.half_widths[j], mu.half_widths[j]);
    for (std::size_t j = 0; j < mu.truncation; ++j) {
        const double zj = s.z[j];
        if (zj == 0.0) continue;
        const Vec& e = mu.basis[j].values;
        for (std::size_t i = 0; i < mu.grid; ++i) s.u.values[i] += zj * e[i];
    }
    return s;
}

Decomposition decompose(const GridFunction& u, const RandomFieldMeasure& mu, std::size_t d) {
    if (d > mu.truncation)
        throw std::invalid_argument("decomposition dimension exceeds the truncation level");
    Decomposition out;
    out.y.resize(d);
    out.xi = u;
    for (std::size_t j = 0; j < d; ++j) {
        out.y[j] = grid_pairing(u, mu.duals[j]);
        const Vec& e = mu.basis[j].values;
        for (std::size_t i = 0; i < u.values.size(); ++i) out.xi.values[i] -= out.y[j] * e[i];
    }
    return out;
}

namespace {

double gram_det(const std::vector<GridFunction>& vs) {
    const std::size_t n = vs.size();
    std::vector<Vec> g(n, Vec(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g[i][j] = grid_pairing(vs[i], vs[j]);
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(g[r][c]) > std::abs(g[piv][c])) piv = r;
        if (g[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(g[piv], g[c]);
            det = -det;
        }
        det *= g[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = g[r][c] / g[c][c];
            for (std::size_t k = c; k < n; ++k) g[r][k] -= f * g[c][k];
        }
    }
    return det;
}

}  // namespace

SimplexMeasure::SimplexMeasure(std::vector<GridFunction> vertices, double gram_tolerance) {
    if (vertices.size() < 2) throw std::invalid_argument("simplex measure needs >= 2 vertices");
    gram_det_ = gram_det(vertices);
    if (!(std::abs(gram_det_) > gram_tolerance))
        throw std::invalid_argument("vertices are (numerically) linearly dependent; |Gram| = " +
                                    std::to_string(gram_det_));
    origin_ = vertices.front();
    const auto d = static_cast<double>(vertices.size() - 1);
    for (std::size_t j = 1; j < vertices.size(); ++j) {
        GridFunction dir;
        dir.values.resize(origin_.size());
        for (std::size_t i = 0; i < origin_.size(); ++i)
            dir.values[i] = (vertices[j].values[i] - origin_.values[i]) / d;
        dirs_.push_back(std::move(dir));
    }
}

SimplexMeasure::Sample SimplexMeasure::sample(Rng& rng) const {
    Sample s;
    const std::size_t d = dirs_.size();
    s.y.resize(d);
    for (double& v : s.y) v = rng.next_double();
    s.u = origin_;
    for (std::size_t j = 0; j < d; ++j) {
        const double yj = s.y[j];
        for (std::size_t i = 0; i < s.u.values.size(); ++i)
            s.u.values[i] += yj * dirs_[j].values[i];
    }
    s.lambda.resize(d + 1);
    double sum_y = 0.0;
    for (double v : s.y) sum_y += v;
    s.lambda[0] = 1.0 - sum_y / static_cast<double>(d);
    for (std::size_t j = 0; j < d; ++j) s.lambda[j + 1] = s.y[j] / static_cast<double>(d);
    return s;
}

}  // namespace gapbench
