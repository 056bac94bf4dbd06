#include "gapbench/spaces.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace gapbench {

DepthGrowth DepthGrowth::constant(double value) {
    DepthGrowth g;
    g.kind_ = Kind::Constant;
    g.value_ = value;
    return g;
}

DepthGrowth DepthGrowth::table(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("depth table must be nonempty");
    if (!std::is_sorted(values.begin(), values.end()))
        throw std::invalid_argument("depth table must be nondecreasing");
    DepthGrowth g;
    g.kind_ = Kind::Table;
    g.table_ = std::move(values);
    return g;
}

DepthGrowth DepthGrowth::affine(double a, double b) {
    if (a < 0) throw std::invalid_argument("depth growth must be nondecreasing");
    DepthGrowth g;
    g.kind_ = Kind::Affine;
    g.a_ = a;
    g.b_ = b;
    return g;
}

double DepthGrowth::operator()(std::size_t n) const {
    switch (kind_) {
        case Kind::Constant: return value_;
        case Kind::Table: {
            if (n == 0) return table_.front();
            return n <= table_.size() ? table_[n - 1] : table_.back();
        }
        case Kind::Affine: return a_ * static_cast<double>(n) + b_;
    }
    return value_;
}

double DepthGrowth::sup() const {
    switch (kind_) {
        case Kind::Constant: return value_;
        case Kind::Table: return table_.back();
        case Kind::Affine: return a_ > 0 ? kInf : b_;
    }
    return value_;
}

nlohmann::json DepthGrowth::to_json() const {
    switch (kind_) {
        case Kind::Constant:
            return {{"kind", "constant"}, {"value", std::isinf(value_) ? nlohmann::json("inf")
                                                                       : nlohmann::json(value_)}};
        case Kind::Table: return {{"kind", "table"}, {"values", table_}};
        case Kind::Affine: return {{"kind", "affine"}, {"a", a_}, {"b", b_}};
    }
    return {};
}

DepthGrowth DepthGrowth::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    auto num = [](const nlohmann::json& v) {
        if (v.is_string()) {
            if (v.get<std::string>() == "inf") return kInf;
            throw std::invalid_argument("depth value must be a number or \"inf\"");
        }
        return v.get<double>();
    };
    if (kind == "constant") return constant(num(j.at("value")));
    if (kind == "table") {
        std::vector<double> vals;
        for (const auto& v : j.at("values")) vals.push_back(num(v));
        return table(std::move(vals));
    }
    if (kind == "affine") return affine(j.at("a").get<double>(), j.at("b").get<double>());
    throw std::invalid_argument("unknown depth growth kind: " + kind);
}

void SpaceParams::validate() const {
    if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
    if (!(p >= 1)) throw std::invalid_argument("p must be >= 1 (infinity allowed)");
    if (d < 1) throw std::invalid_argument("d must be >= 1");
}

std::size_t steepening_stages(const SpaceParams& params, std::size_t depth_cap) {
    const double es = params.ell_star();
    const std::size_t cap = std::max<std::size_t>(1, depth_cap / 2);
    if (std::isinf(es)) return cap;
    const auto s = static_cast<std::size_t>(std::floor(es / 2.0));
    return std::min(std::max<std::size_t>(1, s), cap);
}

double theoretical_rate(const SpaceParams& params) {
    params.validate();
    const double es = params.ell_star();
    if (!(es >= 3))
        throw std::invalid_argument("rate bound requires sup-depth ell* >= 3, got " +
                                    std::to_string(es));
    const double inv_p = std::isinf(params.p) ? 0.0 : 1.0 / params.p;
    if (std::isinf(es)) return inv_p;
    const double discount = std::floor(es / 2.0);
    return inv_p + (1.0 / static_cast<double>(params.d)) * params.alpha / (params.alpha + discount);
}

MembershipReport sigma_membership(const Network& net, std::size_t n, const SpaceParams& params) {
    if (net.input_dim() != params.d || net.output_dim() != 1)
        throw DimensionError("membership check expects a map from R^d to R", 0);
    MembershipReport rep;
    rep.measured = stats(net);
    if (rep.measured.weight_count > n) {
        rep.ok = false;
        rep.violations.push_back("weight count " + std::to_string(rep.measured.weight_count) +
                                 " > budget " + std::to_string(n));
    }
    const double max_depth = params.ell(n);
    if (static_cast<double>(rep.measured.depth) > max_depth) {
        rep.ok = false;
        rep.violations.push_back("depth " + std::to_string(rep.measured.depth) + " > ell(" +
                                 std::to_string(n) + ") = " + std::to_string(max_depth));
    }
    if (rep.measured.weight_sup > 1.0) {
        rep.ok = false;
        rep.violations.push_back("weight magnitude " + std::to_string(rep.measured.weight_sup) +
                                 " > 1");
    }
    return rep;
}

namespace {

constexpr double kSupportShave = 1e-12;  // keeps "zero outside the cube" exact in fp
constexpr double kRangeShave = 1e-13;    // keeps the range inside [0,1] despite rounding

std::size_t ceil_log2(std::size_t k) {
    std::size_t levels = 0, m = 1;
    while (m < k) {
        m *= 2;
        ++levels;
    }
    return levels;
}

std::size_t bump_base_depth(std::size_t d) { return 2 + (d >= 2 ? 2 * ceil_log2(d) : 0); }

// Appends one ReLU stage multiplying the scalar output by `factor` using k
// duplicated channels and row weights factor/k <= 1.
void append_scaling_stage(std::vector<Layer>& layers, double factor, std::size_t k) {
    Layer& last = layers.back();
    if (last.weights.rows != 1) throw std::logic_error("scaling stage expects a scalar output");
    Matrix dup(k, last.weights.cols);
    Vec dupb(k, last.bias[0]);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t c = 0; c < last.weights.cols; ++c) dup(i, c) = last.weights(0, c);
    last = Layer{std::move(dup), std::move(dupb)};
    Matrix sum(1, k);
    for (std::size_t i = 0; i < k; ++i) sum(0, i) = factor / static_cast<double>(k);
    layers.push_back(Layer{std::move(sum), Vec(1, 0.0)});
}

}  // namespace

Network bump_network(const BumpSpec& spec, std::size_t stages, double amplitude, BumpInfo* info) {
    if (spec.d < 1) throw std::invalid_argument("bump dimension must be >= 1");
    if (!(spec.M >= 1.0)) throw std::invalid_argument("bump steepness M must be >= 1");
    if (!(amplitude > 0.0 && amplitude <= 1.0))
        throw std::invalid_argument("bump amplitude must lie in (0,1]");
    if (stages < 1) throw std::invalid_argument("bump needs at least one scaling stage");

    const std::size_t need_depth = bump_base_depth(spec.d) + stages;
    if (need_depth > spec.depth_budget)
        throw std::invalid_argument("bump depth " + std::to_string(need_depth) +
                                    " exceeds budget " + std::to_string(spec.depth_budget));

    const double w = 0.5;
    const double h = (1.0 / spec.M) * (1.0 - kSupportShave);
    const double c = w * h;

    // Stage factor recovering 1/(w*h), shaved so the peak stays strictly below 1.
    const double total = amplitude * (1.0 - kRangeShave) / c;
    const double f = std::pow(total, 1.0 / static_cast<double>(stages));
    const auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(f)));
    if (k > spec.width_budget) {
        const double max_total = w * std::pow(static_cast<double>(spec.width_budget),
                                              static_cast<double>(stages));
        const double max_m = max_total * (1.0 - kSupportShave) / (amplitude * (1.0 - kRangeShave));
        throw std::invalid_argument("bump width " + std::to_string(k) + " exceeds budget " +
                                    std::to_string(spec.width_budget) +
                                    "; maximal achievable M for this budget is " +
                                    std::to_string(max_m));
    }

    const std::size_t d = spec.d;
    std::vector<Layer> layers;

    // Rails +-x_j/2, then hats c - |x_j|/2.
    Matrix t1(2 * d, d);
    for (std::size_t j = 0; j < d; ++j) {
        t1(2 * j, j) = w;
        t1(2 * j + 1, j) = -w;
    }
    layers.push_back(Layer{std::move(t1), Vec(2 * d, 0.0)});
    Matrix t2(d, 2 * d);
    for (std::size_t j = 0; j < d; ++j) {
        t2(j, 2 * j) = -1.0;
        t2(j, 2 * j + 1) = -1.0;
    }
    layers.push_back(Layer{std::move(t2), Vec(d, c)});

    Network net(std::move(layers));
    if (d >= 2) net = compose(min_network(d), net);

    std::vector<Layer> full = net.layers();
    for (std::size_t s = 0; s < stages; ++s) append_scaling_stage(full, f, k);
    Network result(std::move(full));

    if (info) {
        info->half_width = h;
        info->stages = stages;
        Vec origin(d, 0.0);
        info->center_value = result.evaluate_scalar(origin);
        info->declared_budget = stats(result).weight_count;
    }
    return result;
}

Network bump_network(const BumpSpec& spec, BumpInfo* info) {
    const std::size_t base = bump_base_depth(spec.d);
    if (spec.depth_budget <= base)
        throw std::invalid_argument("bump depth budget " + std::to_string(spec.depth_budget) +
                                    " leaves no room for scaling stages (base depth " +
                                    std::to_string(base) + ")");
    return bump_network(spec, spec.depth_budget - base, 1.0, info);
}

double adversarial_amplitude(const SpaceParams& params, double M, double kappa) {
    params.validate();
    if (!(M >= 1.0)) throw std::invalid_argument("M must be >= 1");
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    const double es = params.ell_star();
    const double exponent =
        std::isinf(es) ? 0.0 : params.alpha / (params.alpha + std::floor(es / 2.0));
    return kappa * std::pow(M, -exponent);
}

Network make_localized_network(const SpaceParams& params, double M, const Vec& y, double kappa,
                               int sign, BumpInfo* info) {
    params.validate();
    if (y.size() != params.d) throw std::invalid_argument("center dimension mismatch");
    for (double v : y)
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("center must lie in [0,1]^d");
    const double amplitude = adversarial_amplitude(params, M, kappa);
    if (amplitude > 1.0)
        throw std::invalid_argument("amplitude " + std::to_string(amplitude) +
                                    " > 1 cannot keep weight magnitudes <= 1; lower kappa");
    const std::size_t stages = steepening_stages(params);
    BumpSpec spec{params.d, M, bump_base_depth(params.d) + stages, 1 << 20};
    Network net = bump_network(spec, stages, amplitude, info);

    Vec shift(params.d);
    for (std::size_t j = 0; j < params.d; ++j) shift[j] = -y[j];
    net = affine_precompose(net, Matrix::identity(params.d), shift);

    if (sign < 0) {
        std::vector<Layer> layers = net.layers();
        for (double& v : layers.back().weights.data) v = -v;
        for (double& v : layers.back().bias) v = -v;
        net = Network(std::move(layers));
    }
    if (info) {
        info->center_value = net.evaluate_scalar(y);
        info->declared_budget = stats(net).weight_count;
    }
    return net;
}

double bump_lp_mass_unclipped(std::size_t d, double h, double p) {
    // integral over the cube of min_j tent^p = (2h)^d * d * Beta(d, p+1)
    const double dd = static_cast<double>(d);
    const double log_beta = std::lgamma(dd) + std::lgamma(p + 1.0) - std::lgamma(dd + p + 1.0);
    return std::pow(2.0 * h, dd) * dd * std::exp(log_beta);
}

double tent_power_integral_1d(double y, double h, double a, double p, double lo, double hi) {
    lo = std::max(lo, y - h);
    hi = std::min(hi, y + h);
    if (hi <= lo) return 0.0;
    // antiderivative of tent((x-y)/h)^p from y toward +h (and mirrored)
    auto from_center = [&](double t) {
        t = std::min(std::abs(t - y), h);
        return (h / (p + 1.0)) * (1.0 - std::pow(1.0 - t / h, p + 1.0));
    };
    double mass = 0.0;
    if (lo < y) mass += from_center(lo) - from_center(std::min(hi, y));
    if (hi > y) mass += from_center(hi) - from_center(std::max(lo, y));
    return std::pow(a, p) * mass;
}

}  // namespace gapbench
