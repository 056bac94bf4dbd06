#include "gapbench/ano.hpp"

#include <algorithm>
#include <cmath>

namespace gapbench {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

AnoStats ano_stats(const Ano& psi) {
    AnoStats s;
    s.depth = psi.hidden.size();
    const NetworkStats rs = stats(psi.lifting);
    const NetworkStats qs = stats(psi.projection);
    s.weight_count = rs.weight_count + qs.weight_count;
    s.weight_sup = std::max(rs.weight_sup, qs.weight_sup);
    for (const auto& [w, b] : psi.hidden) {
        for (double v : w.data)
            if (v != 0.0) {
                ++s.weight_count;
                s.weight_sup = std::max(s.weight_sup, std::abs(v));
            }
        for (double v : b)
            if (v != 0.0) {
                ++s.weight_count;
                s.weight_sup = std::max(s.weight_sup, std::abs(v));
            }
    }
    return s;
}

GridFunction ano_apply(const Ano& psi, const GridFunction& u) {
    const std::size_t g = u.size();
    const std::size_t dc = psi.lifting.output_dim();
    // channel-major state: v[c*g + i]
    Vec v(dc * g);
    Network::Evaluator lift(psi.lifting);
    Vec in(2);
    for (std::size_t i = 0; i < g; ++i) {
        in[0] = u.values[i];
        in[1] = grid_node(i, g);
        const auto out = lift.vector(in);
        for (std::size_t c = 0; c < dc; ++c) v[c * g + i] = out[c];
    }
    Vec mean(dc), next(dc * g);
    for (const auto& [w, b] : psi.hidden) {
        if (w.rows != dc || w.cols != dc || b.size() != dc)
            throw DimensionError("hidden ANO layer width mismatch", 0);
        for (std::size_t c = 0; c < dc; ++c) {
            double s = 0.0;
            for (std::size_t i = 0; i < g; ++i) s += v[c * g + i];
            mean[c] = s / static_cast<double>(g);
        }
        for (std::size_t i = 0; i < g; ++i) {
            for (std::size_t r = 0; r < dc; ++r) {
                double acc = b[r] + mean[r];
                for (std::size_t c = 0; c < dc; ++c) acc += w(r, c) * v[c * g + i];
                next[r * g + i] = relu(acc);
            }
        }
        std::swap(v, next);
    }
    GridFunction out;
    out.values.resize(g);
    Network::Evaluator proj(psi.projection);
    Vec state(dc);
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t c = 0; c < dc; ++c) state[c] = v[c * g + i];
        out.values[i] = proj.scalar(state);
    }
    return out;
}

Network ano_ramp_unit(double b) {
    Matrix a1(1, 1);
    a1(0, 0) = 1.0;
    Matrix a2(1, 1);
    a2(0, 0) = 1.0;
    return Network({Layer{a1, Vec{b}}, Layer{a2, Vec{-b}}});
}

Vec AnoEncoder::apply_fast(const GridFunction& u) const {
    const std::size_t g = u.size();
    Vec out(channels.size());
    for (std::size_t k = 0; k < channels.size(); ++k) {
        const Channel& ch = channels[k];
        auto p_of = [&](double t) {
            const double pos = (t - ch.t0) / ch.step;
            const auto m = ch.knot_values.size() - 1;
            const double clamped = std::clamp(pos, 0.0, static_cast<double>(m) - 1e-12);
            const auto i = static_cast<std::size_t>(clamped);
            const double frac = clamped - static_cast<double>(i);
            return ch.knot_values[i] + frac * (ch.knot_values[i + 1] - ch.knot_values[i]);
        };
        double acc = 0.0;
        for (std::size_t i = 0; i < g; ++i) {
            const double x = grid_node(i, g);
            acc += p_of(x + ch.gamma * u.values[i]) - p_of(x);
        }
        out[k] = norm_scale * acc / (ch.gamma * static_cast<double>(g)) + norm_shift;
    }
    return out;
}

Vec AnoEncoder::apply_network(const GridFunction& u) const {
    const std::size_t g = u.size();
    Vec acc(lifting.output_dim(), 0.0);
    Network::Evaluator lift(lifting);
    Vec in(2);
    for (std::size_t i = 0; i < g; ++i) {
        in[0] = u.values[i];
        in[1] = grid_node(i, g);
        const auto out = lift.vector(in);
        for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += out[c];
    }
    for (double& v : acc) v /= static_cast<double>(g);
    return acc;
}

FieldEncoder AnoEncoder::fn() const {
    AnoEncoder copy = *this;
    return [copy](const GridFunction& u) { return copy.apply_fast(u); };
}

double estimate_sup_bound(const RandomFieldMeasure& mu, std::size_t samples, std::uint64_t seed) {
    Rng rng(seed, 0xb0, mu.truncation);
    double sup = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const FieldSample fs = sample_measure(mu, rng);
        for (double v : fs.u.values) sup = std::max(sup, std::abs(v));
    }
    return 1.5 * sup;
}

AnoEncoder ano_encoder_build(const RandomFieldMeasure& mu, std::size_t d, double b_prime,
                             double eps) {
    if (d < 1 || d > mu.truncation)
        throw std::invalid_argument("encoder dimension must be within the truncation level");
    if (!(b_prime > 0.0) || !(eps > 0.0))
        throw std::invalid_argument("ano encoder needs positive bound and accuracy");

    AnoEncoder enc;
    enc.b_prime = b_prime;
    enc.target_eps = eps;
    double r = kInf;
    for (std::size_t j = 0; j < d; ++j) r = std::min(r, mu.half_widths[j]);
    enc.norm_scale = 2.0 * std::sqrt(static_cast<double>(d)) / r;
    enc.norm_shift = 0.5;

    // Chord model of the dual antiderivative Phi_k(t) = 2 sin(pi k t)/(pi k):
    // curvature bound M2 = 2 pi k drives the step and shear sizes.
    std::vector<std::size_t> unit_count(d);
    for (std::size_t k0 = 0; k0 < d; ++k0) {
        const double kk = static_cast<double>(k0 + 1);
        const double m2 = 2.0 * kPi * kk;
        const double gamma = eps / (m2 * b_prime * (b_prime + 2.0));
        const double step = std::min(gamma, eps / (2.0 * m2));
        const double t_lo = -gamma * b_prime;
        const double t_hi = 1.0 + gamma * b_prime;
        const auto knots =
            static_cast<std::size_t>(std::ceil((t_hi - t_lo) / step)) + 1;
        AnoEncoder::Channel ch;
        ch.gamma = gamma;
        ch.t0 = t_lo;
        ch.step = step;
        ch.knot_values.resize(knots + 1);
        for (std::size_t i = 0; i <= knots; ++i) {
            const double t = t_lo + static_cast<double>(i) * step;
            ch.knot_values[i] = 2.0 * std::sin(kPi * kk * t) / (kPi * kk);
        }
        unit_count[k0] = knots;  // units per argument family
        enc.channels.push_back(std::move(ch));
    }

    // Assemble the genuine depth-2 network: hidden units relu(x + gamma_k*eta
    // - tau_i) and relu(x - tau_i); output rows hold the slope increments.
    std::size_t total_units = 0;
    for (std::size_t k0 = 0; k0 < d; ++k0) total_units += 2 * unit_count[k0];
    Matrix a1(total_units, 2);
    Vec b1(total_units, 0.0);
    Matrix a2(d, total_units);
    Vec b2(d, enc.norm_shift);
    std::size_t row = 0;
    for (std::size_t k0 = 0; k0 < d; ++k0) {
        const AnoEncoder::Channel& ch = enc.channels[k0];
        const std::size_t m = unit_count[k0];
        Vec slopes(m);
        for (std::size_t i = 0; i < m; ++i)
            slopes[i] = (ch.knot_values[i + 1] - ch.knot_values[i]) / ch.step;
        for (int family = 0; family < 2; ++family) {
            for (std::size_t i = 0; i < m; ++i) {
                a1(row, 0) = family == 0 ? ch.gamma : 0.0;  // eta coefficient
                a1(row, 1) = 1.0;                           // x coefficient
                b1[row] = -(ch.t0 + static_cast<double>(i) * ch.step);
                const double inc = i == 0 ? slopes[0] : slopes[i] - slopes[i - 1];
                const double sign = family == 0 ? 1.0 : -1.0;
                a2(k0, row) = sign * enc.norm_scale * inc / ch.gamma;
                ++row;
            }
        }
    }
    enc.lifting = Network({Layer{std::move(a1), std::move(b1)}, Layer{std::move(a2), std::move(b2)}});

    // Honest validation on off-knot x values and an eta grid: average over x of
    // the sup value error plus sup slope error against eta * e*_k(x).
    double sum_w = 0.0, sum_val = 0.0;
    const std::size_t x_draws = 96;
    const std::size_t eta_grid = 33;
    for (std::size_t xi = 0; xi < x_draws; ++xi) {
        const double x = (static_cast<double>(xi) + 0.37) / static_cast<double>(x_draws);
        double worst_w = 0.0, worst_val = 0.0;
        for (std::size_t k0 = 0; k0 < d; ++k0) {
            const AnoEncoder::Channel& ch = enc.channels[k0];
            const double kk = static_cast<double>(k0 + 1);
            auto p_of = [&](double t) {
                const double pos = (t - ch.t0) / ch.step;
                const auto mm = ch.knot_values.size() - 1;
                const double cl = std::clamp(pos, 0.0, static_cast<double>(mm) - 1e-12);
                const auto i = static_cast<std::size_t>(cl);
                return ch.knot_values[i] +
                       (cl - static_cast<double>(i)) * (ch.knot_values[i + 1] - ch.knot_values[i]);
            };
            const double dual = 2.0 * std::cos(kPi * kk * x);
            double val_err = 0.0, der_err = 0.0;
            const double fd = 1e-7 * b_prime;
            for (std::size_t e = 0; e < eta_grid; ++e) {
                const double eta =
                    -b_prime + 2.0 * b_prime * static_cast<double>(e) / (eta_grid - 1.0);
                const double raw = (p_of(x + ch.gamma * eta) - p_of(x)) / ch.gamma;
                val_err = std::max(val_err, std::abs(raw - eta * dual));
                const double raw_hi = (p_of(x + ch.gamma * (eta + fd)) - p_of(x)) / ch.gamma;
                der_err = std::max(der_err, std::abs((raw_hi - raw) / fd - dual));
            }
            worst_val = std::max(worst_val, val_err);
            worst_w = std::max(worst_w, val_err + der_err);
        }
        sum_w += worst_w;
        sum_val += worst_val;
    }
    enc.achieved_eps = sum_w / static_cast<double>(x_draws);
    enc.met_target = enc.achieved_eps <= eps;
    enc.margin = 2.0 * enc.norm_scale * (sum_val / static_cast<double>(x_draws));
    return enc;
}

Ano embed_network_in_ano(const Network& psi, const Network& encoder_lifting) {
    if (psi.depth() < 2) throw std::invalid_argument("embedding needs depth >= 2");
    std::vector<Layer> layers = psi.layers();
    if (layers.size() == 2) {
        // Pad with a transparent layer so there is at least one hidden slot.
        const std::size_t w = layers[0].weights.rows;
        layers.insert(layers.begin() + 1, Layer{Matrix::identity(w), Vec(w, 0.0)});
    }
    const std::size_t L = layers.size();
    std::size_t dc = 0;
    for (std::size_t j = 0; j + 2 < L; ++j) dc = std::max(dc, layers[j].weights.rows);

    // Lifting: first affine map of psi folded into the encoder, zero-padded to
    // the channel width.
    Network folded = merge_affine(Network({layers[0]}), encoder_lifting);
    std::vector<Layer> lift_layers = folded.layers();
    {
        Layer& out = lift_layers.back();
        Matrix padded(dc, out.weights.cols);
        Vec pb(dc, 0.0);
        for (std::size_t i = 0; i < out.weights.rows; ++i) {
            for (std::size_t c = 0; c < out.weights.cols; ++c) padded(i, c) = out.weights(i, c);
            pb[i] = out.bias[i];
        }
        out = Layer{std::move(padded), std::move(pb)};
    }
    Ano ano;
    ano.lifting = Network(std::move(lift_layers));

    // First hidden layer: pure averaging (W = 0, b = 0) makes the state the
    // constant field psi_1(encoder(u)).
    ano.hidden.emplace_back(Matrix(dc, dc), Vec(dc, 0.0));
    // Middle layers exploit constant channels: W_j = A_j - I.
    for (std::size_t j = 1; j + 2 < L; ++j) {
        Matrix w(dc, dc);
        Vec b(dc, 0.0);
        const Layer& lj = layers[j];
        for (std::size_t rr = 0; rr < lj.weights.rows; ++rr) {
            for (std::size_t cc = 0; cc < lj.weights.cols; ++cc) w(rr, cc) = lj.weights(rr, cc);
            b[rr] = lj.bias[rr];
        }
        for (std::size_t c = 0; c < dc; ++c) w(c, c) -= 1.0;
        ano.hidden.emplace_back(std::move(w), std::move(b));
    }

    // Projection packs the last two affine maps, column-padded to dc.
    const Layer& pen = layers[L - 2];
    Matrix q1(pen.weights.rows, dc);
    for (std::size_t rr = 0; rr < pen.weights.rows; ++rr)
        for (std::size_t cc = 0; cc < pen.weights.cols; ++cc) q1(rr, cc) = pen.weights(rr, cc);
    ano.projection = Network({Layer{std::move(q1), pen.bias}, layers[L - 1]});
    return ano;
}

}  // namespace gapbench
