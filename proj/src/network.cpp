#include "gapbench/network.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace gapbench {

Network::Network(std::vector<Layer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw std::invalid_argument("network needs at least one layer");
    for (std::size_t j = 0; j < layers_.size(); ++j) {
        const auto& l = layers_[j];
        if (l.bias.size() != l.weights.rows)
            throw DimensionError("layer " + std::to_string(j) + ": bias length " +
                                     std::to_string(l.bias.size()) + " != rows " +
                                     std::to_string(l.weights.rows),
                                 j);
        if (j > 0 && l.weights.cols != layers_[j - 1].weights.rows)
            throw DimensionError("layer " + std::to_string(j) + ": expects " +
                                     std::to_string(l.weights.cols) + " inputs, previous layer emits " +
                                     std::to_string(layers_[j - 1].weights.rows),
                                 j);
    }
}

Vec Network::evaluate(std::span<const double> x) const {
    if (x.size() != input_dim())
        throw DimensionError("layer 0: input length " + std::to_string(x.size()) +
                                 " != input dimension " + std::to_string(input_dim()),
                             0);
    Vec cur(x.begin(), x.end());
    for (std::size_t j = 0; j < layers_.size(); ++j) {
        Vec next = matvec(layers_[j].weights, cur);
        for (std::size_t i = 0; i < next.size(); ++i) next[i] += layers_[j].bias[i];
        if (j + 1 < layers_.size())
            for (double& v : next) v = relu(v);
        cur = std::move(next);
    }
    return cur;
}

double Network::evaluate_scalar(std::span<const double> x) const {
    Vec y = evaluate(x);
    if (y.size() != 1) throw std::logic_error("evaluate_scalar on a network with output dim != 1");
    return y[0];
}

Network::Evaluator::Evaluator(const Network& net) : net_(&net) {
    std::size_t w = net.input_dim();
    for (const auto& l : net.layers()) w = std::max(w, l.weights.rows);
    a_.resize(w);
    b_.resize(w);
}

std::span<const double> Network::Evaluator::vector(std::span<const double> x) {
    const auto& layers = net_->layers();
    if (x.size() != net_->input_dim())
        throw DimensionError("layer 0: input length " + std::to_string(x.size()) +
                                 " != input dimension " + std::to_string(net_->input_dim()),
                             0);
    std::copy(x.begin(), x.end(), a_.begin());
    Vec* cur = &a_;
    Vec* nxt = &b_;
    for (std::size_t j = 0; j < layers.size(); ++j) {
        const Matrix& A = layers[j].weights;
        const Vec& bias = layers[j].bias;
        const double* xv = cur->data();
        double* yv = nxt->data();
        const bool last = (j + 1 == layers.size());
        for (std::size_t i = 0; i < A.rows; ++i) {
            double acc = bias[i];
            const double* row = A.data.data() + i * A.cols;
            for (std::size_t c = 0; c < A.cols; ++c) acc += row[c] * xv[c];
            yv[i] = last ? acc : relu(acc);
        }
        std::swap(cur, nxt);
    }
    return std::span<const double>(cur->data(), net_->output_dim());
}

double Network::Evaluator::scalar(std::span<const double> x) { return vector(x)[0]; }

NetworkStats stats(const Network& net) {
    NetworkStats s;
    s.depth = net.depth();
    for (const auto& l : net.layers()) {
        for (double v : l.weights.data) {
            if (v != 0.0) {
                ++s.weight_count;
                s.weight_sup = std::max(s.weight_sup, std::abs(v));
            }
        }
        for (double v : l.bias) {
            if (v != 0.0) {
                ++s.weight_count;
                s.weight_sup = std::max(s.weight_sup, std::abs(v));
            }
        }
    }
    return s;
}

Network affine_precompose(const Network& net, const Matrix& C, const Vec& b) {
    if (C.rows != net.input_dim() || b.size() != net.input_dim())
        throw DimensionError("precompose: map emits " + std::to_string(C.rows) +
                                 ", network expects " + std::to_string(net.input_dim()),
                             0);
    std::vector<Layer> layers = net.layers();
    const Matrix& A1 = net.layers().front().weights;
    Vec nb = matvec(A1, b);
    for (std::size_t i = 0; i < nb.size(); ++i) nb[i] += net.layers().front().bias[i];
    layers.front() = Layer{matmul(A1, C), std::move(nb)};
    return Network(std::move(layers));
}

Network homogeneous_rescale(const Network& net, double R) {
    if (!(R > 0.0)) throw std::invalid_argument("rescale factor must be positive");
    std::vector<Layer> layers = net.layers();
    for (double& v : layers.front().weights.data) v /= R;
    for (auto& l : layers)
        for (double& v : l.bias) v /= R;
    return Network(std::move(layers));
}

Network compose(const Network& outer, const Network& inner) {
    if (inner.output_dim() != outer.input_dim())
        throw DimensionError("compose: inner emits " + std::to_string(inner.output_dim()) +
                                 ", outer expects " + std::to_string(outer.input_dim()),
                             inner.depth());
    std::vector<Layer> layers = inner.layers();
    layers.insert(layers.end(), outer.layers().begin(), outer.layers().end());
    return Network(std::move(layers));
}

Network merge_affine(const Network& outer, const Network& inner) {
    if (inner.output_dim() != outer.input_dim())
        throw DimensionError("merge_affine: inner emits " + std::to_string(inner.output_dim()) +
                                 ", outer expects " + std::to_string(outer.input_dim()),
                             inner.depth());
    std::vector<Layer> layers = inner.layers();
    Layer last = layers.back();
    layers.pop_back();
    const Layer& first = outer.layers().front();
    Vec nb = matvec(first.weights, last.bias);
    for (std::size_t i = 0; i < nb.size(); ++i) nb[i] += first.bias[i];
    layers.push_back(Layer{matmul(first.weights, last.weights), std::move(nb)});
    layers.insert(layers.end(), outer.layers().begin() + 1, outer.layers().end());
    return Network(std::move(layers));
}

namespace {

// One tree level: m rail pairs in, ceil(m/2) rail pairs out. `raw_in` treats
// the inputs as plain values instead of pairs (used for the first level);
// `scalar_out` collapses the final pair to p - n.
Layer level_features(std::size_t m, bool raw_in) {
    const std::size_t in_width = raw_in ? m : 2 * m;
    const std::size_t pairs = m / 2;
    const bool leftover = (m % 2) != 0;
    Matrix A(4 * pairs + (leftover ? 2 : 0), in_width);
    auto put = [&](std::size_t row, std::size_t slot, double pv) {
        // slot indexes the virtual inputs; each contributes value p - n.
        if (raw_in) {
            A(row, slot) += pv;
        } else {
            A(row, 2 * slot) += pv;
            A(row, 2 * slot + 1) -= pv;
        }
    };
    for (std::size_t i = 0; i < pairs; ++i) {
        const std::size_t r = 4 * i;
        put(r + 0, 2 * i, 1.0);   // a+b
        put(r + 0, 2 * i + 1, 1.0);
        put(r + 1, 2 * i, -1.0);  // -(a+b)
        put(r + 1, 2 * i + 1, -1.0);
        put(r + 2, 2 * i, 1.0);   // a-b
        put(r + 2, 2 * i + 1, -1.0);
        put(r + 3, 2 * i, -1.0);  // b-a
        put(r + 3, 2 * i + 1, 1.0);
    }
    if (leftover) {
        const std::size_t r = 4 * pairs;
        put(r + 0, m - 1, 1.0);
        put(r + 1, m - 1, -1.0);
    }
    const std::size_t rows = A.rows;
    return Layer{std::move(A), Vec(rows, 0.0)};
}

Layer level_combine(std::size_t m, bool scalar_out) {
    const std::size_t pairs = m / 2;
    const bool leftover = (m % 2) != 0;
    const std::size_t outs = pairs + (leftover ? 1 : 0);
    const std::size_t in_width = 4 * pairs + (leftover ? 2 : 0);
    Matrix A(scalar_out ? 1 : 2 * outs, in_width);
    for (std::size_t i = 0; i < pairs; ++i) {
        const std::size_t c = 4 * i;
        if (scalar_out) {
            A(0, c + 0) = 0.5;   // relu(a+b)
            A(0, c + 1) = -0.5;  // relu(-(a+b))
            A(0, c + 2) = -0.5;  // relu(a-b)
            A(0, c + 3) = -0.5;  // relu(b-a)
        } else {
            A(2 * i, c + 0) = 0.5;      // p rail
            A(2 * i + 1, c + 1) = 0.5;  // n rail
            A(2 * i + 1, c + 2) = 0.5;
            A(2 * i + 1, c + 3) = 0.5;
        }
    }
    if (leftover) {
        const std::size_t c = 4 * pairs;
        const std::size_t o = pairs;
        if (scalar_out) {
            A(0, c + 0) = 1.0;
            A(0, c + 1) = -1.0;
        } else {
            A(2 * o, c + 0) = 1.0;
            A(2 * o + 1, c + 1) = 1.0;
        }
    }
    const std::size_t rows = A.rows;
    return Layer{std::move(A), Vec(rows, 0.0)};
}

}  // namespace

Network min_network(std::size_t k) {
    if (k < 1) throw std::invalid_argument("min_network needs k >= 1");
    if (k == 1) {
        Layer id{Matrix::identity(1), Vec(1, 0.0)};
        return Network({id});
    }
    std::vector<Layer> layers;
    std::size_t m = k;
    bool first = true;
    while (m > 1) {
        const std::size_t next = (m + 1) / 2;
        layers.push_back(level_features(m, first));
        layers.push_back(level_combine(m, next == 1));
        m = next;
        first = false;
    }
    return Network(std::move(layers));
}

nlohmann::json network_to_json(const Network& net) {
    nlohmann::json j;
    j["layers"] = nlohmann::json::array();
    for (const auto& l : net.layers()) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < l.weights.rows; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t c = 0; c < l.weights.cols; ++c) row.push_back(l.weights(i, c));
            rows.push_back(std::move(row));
        }
        j["layers"].push_back({{"A", std::move(rows)}, {"b", l.bias}});
    }
    return j;
}

Network network_from_json(const nlohmann::json& j) {
    std::vector<Layer> layers;
    for (const auto& lj : j.at("layers")) {
        const auto& rows = lj.at("A");
        const std::size_t r = rows.size();
        const std::size_t c = r ? rows[0].size() : 0;
        Matrix A(r, c);
        for (std::size_t i = 0; i < r; ++i) {
            if (rows[i].size() != c) throw std::invalid_argument("ragged weight matrix in JSON");
            for (std::size_t q = 0; q < c; ++q) A(i, q) = rows[i][q].get<double>();
        }
        layers.push_back(Layer{std::move(A), lj.at("b").get<Vec>()});
    }
    return Network(std::move(layers));
}

}  // namespace gapbench
