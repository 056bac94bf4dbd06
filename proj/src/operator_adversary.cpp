#include "gapbench/operator_adversary.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

#include "gapbench/parallel.hpp"
#include "gapbench/subprocess.hpp"

namespace gapbench {

namespace {

// Probe functions shared by the internal baselines: fixed draws from the
// measure keyed only by (n, measure shape), so planning is nonadaptive.
std::vector<GridFunction> probe_functions(std::size_t n, const RandomFieldMeasure& mu) {
    std::vector<GridFunction> out;
    out.reserve(n);
    Rng rng(0x9a71a5, 0x9a, n, mu.truncation);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample_measure(mu, rng).u);
    return out;
}

class ZeroOperator final : public OperatorAlgorithm {
  public:
    std::string name() const override { return "zero-op"; }
    std::vector<GridFunction> plan(std::size_t n, const RandomFieldMeasure& mu) override {
        return probe_functions(n, mu);
    }
    OperatorEval reconstruct(const std::vector<GridFunction>&, const Vec&) override {
        return [](const GridFunction&) { return 0.0; };
    }
};

class NnEncoded final : public OperatorAlgorithm {
  public:
    explicit NnEncoded(std::size_t d) : d_(d) {}
    std::string name() const override { return "nearest-neighbor-encoded"; }

    std::vector<GridFunction> plan(std::size_t n, const RandomFieldMeasure& mu) override {
        mu_ = mu;
        return probe_functions(n, mu);
    }

    OperatorEval reconstruct(const std::vector<GridFunction>& inputs, const Vec& values) override {
        auto keys = std::make_shared<std::vector<Vec>>();
        for (const auto& u : inputs) keys->push_back(encode(u));
        auto vals = std::make_shared<Vec>(values);
        const auto* self = this;
        return [keys, vals, self](const GridFunction& u) {
            const Vec q = self->encode(u);
            std::size_t best = 0;
            double best_dist = kInf;
            for (std::size_t i = 0; i < keys->size(); ++i) {
                double dist = 0.0;
                for (std::size_t j = 0; j < q.size(); ++j)
                    dist = std::max(dist, std::abs(q[j] - (*keys)[i][j]));
                if (dist < best_dist) {
                    best_dist = dist;
                    best = i;
                }
            }
            return (*vals)[best];
        };
    }

  private:
    Vec encode(const GridFunction& u) const {
        Vec z(d_);
        for (std::size_t j = 0; j < d_; ++j) {
            const double y = grid_pairing(u, mu_.duals[j]);
            z[j] = (y + mu_.half_widths[j]) / (2.0 * mu_.half_widths[j]);
        }
        return z;
    }

    std::size_t d_;
    RandomFieldMeasure mu_;
};

}  // namespace

OperatorAlgorithmPtr zero_operator_algorithm() { return std::make_shared<ZeroOperator>(); }

OperatorAlgorithmPtr nearest_neighbor_encoded_algorithm(std::size_t d) {
    return std::make_shared<NnEncoded>(d);
}

EncoderHandle deeponet_encoder_handle(const DeepONetEncoder& enc, const RandomFieldMeasure& mu,
                                      std::size_t d) {
    EncoderHandle h;
    h.fn = enc.fn();
    h.kind = "deeponet";
    h.margin = enc.margin;
    Vec half(mu.half_widths.begin(), mu.half_widths.begin() + d);
    h.nominal_inverse = [half](std::size_t axis, double z) {
        return 2.0 * half[axis] * z - half[axis];
    };
    return h;
}

CurveRow operator_adversary_run(OperatorAlgorithm& alg, std::size_t n_samples,
                                const SpaceParams& effective_params,
                                const RandomFieldMeasure& mu, const EncoderHandle& encoder,
                                const OperatorRunOptions& opts) {
    effective_params.validate();
    const std::size_t d = effective_params.d;
    const double p = effective_params.p;
    if (std::isinf(p))
        throw std::invalid_argument("operator runs measure error in L^p(mu) with finite p");
    if (opts.mc_inputs < 1000)
        throw std::invalid_argument("Bochner norm estimate needs mc_inputs >= 1000");

    std::vector<GridFunction> inputs = alg.plan(n_samples, mu);
    if (inputs.size() != n_samples)
        throw ProtocolError(ProtocolCode::PointCount,
                            alg.name() + " planned " + std::to_string(inputs.size()) +
                                " probe functions, expected " + std::to_string(n_samples));
    std::vector<Vec> encoded_inputs;
    encoded_inputs.reserve(n_samples);
    for (const auto& u : inputs) encoded_inputs.push_back(encoder.fn(u));

    Vec errors(opts.trials, 0.0);
    const bool serialize = !alg.thread_safe();

    parallel_for(opts.trials, serialize ? 1 : opts.threads, [&](std::size_t t) {
        Rng rng(opts.seed, n_samples, t, 11);
        OperatorSample sample{draw_instance(n_samples, effective_params, opts.kappa, rng),
                              &encoder};
        const AdversarialInstance& inst = sample.instance;
        Network::Evaluator psi(inst.net);

        Vec values(n_samples);
        for (std::size_t i = 0; i < n_samples; ++i) values[i] = psi.scalar(encoded_inputs[i]);
        OperatorEval fhat = alg.reconstruct(inputs, values);

        // Pullback of the (margin-enlarged) support cube to coefficient space.
        Vec lo(d), hi(d);
        double p_in = 1.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double zlo = inst.y[j] - 1.0 / inst.M - encoder.margin;
            const double zhi = inst.y[j] + 1.0 / inst.M + encoder.margin;
            lo[j] = std::max(encoder.nominal_inverse(j, zlo), -mu.half_widths[j]);
            hi[j] = std::min(encoder.nominal_inverse(j, zhi), mu.half_widths[j]);
            if (hi[j] <= lo[j]) {
                p_in = 0.0;
                break;
            }
            p_in *= (hi[j] - lo[j]) / (2.0 * mu.half_widths[j]);
        }

        Rng mc_rng(opts.seed, n_samples, t, 12);
        const bool stratify = p_in > 0.0 && p_in < 0.5;
        const std::size_t n_in = stratify ? opts.mc_inputs / 2 : 0;
        const std::size_t n_out = opts.mc_inputs - n_in;

        GridFunction u;
        u.values.resize(mu.grid);
        Vec z(mu.truncation);
        auto draw = [&](bool inside) {
            for (std::size_t j = 0; j < mu.truncation; ++j) {
                if (inside && j < d)
                    z[j] = mc_rng.uniform(lo[j], hi[j]);
                else
                    z[j] = mc_rng.uniform(-mu.half_widths[j], mu.half_widths[j]);
            }
            if (!inside && stratify) {
                // Rejection against the pullback box keeps the strata disjoint.
                bool in_box = true;
                for (std::size_t j = 0; j < d; ++j)
                    if (z[j] < lo[j] || z[j] > hi[j]) {
                        in_box = false;
                        break;
                    }
                if (in_box) return false;
            }
            std::fill(u.values.begin(), u.values.end(), 0.0);
            for (std::size_t j = 0; j < mu.truncation; ++j) {
                const double zj = z[j];
                if (zj == 0.0) continue;
                const Vec& e = mu.basis[j].values;
                for (std::size_t i = 0; i < mu.grid; ++i) u.values[i] += zj * e[i];
            }
            return true;
        };

        auto moment = [&](bool inside, std::size_t count, double& sup_abs) {
            double sum = 0.0;
            std::size_t got = 0;
            while (got < count) {
                if (!draw(inside)) continue;
                const Vec enc = encoder.fn(u);
                const double target = psi.scalar(enc);
                const double approx = fhat(u);
                if (!std::isfinite(approx))
                    throw ProtocolError(ProtocolCode::NonFinite,
                                        alg.name() + " reconstruction value");
                const double diff = std::abs(target - approx);
                sup_abs = std::max(sup_abs, diff);
                sum += p == 1.0 ? diff : (p == 2.0 ? diff * diff : std::pow(diff, p));
                ++got;
            }
            return sum / static_cast<double>(count);
        };

        double sup_abs = 0.0;
        double mean_p;
        if (stratify) {
            const double m_in = moment(true, n_in, sup_abs);
            const double m_out = moment(false, n_out, sup_abs);
            mean_p = p_in * m_in + (1.0 - p_in) * m_out;
        } else {
            mean_p = moment(false, n_out, sup_abs);
        }
        const double err = std::pow(mean_p, 1.0 / p);
        if (err > sup_abs * (1.0 + 1e-9) + 1e-300)
            throw std::logic_error("L^p estimate exceeded the sup over the same inputs");
        errors[t] = err;
    });

    const MeanStderr ms = mean_stderr(errors);
    CurveRow row;
    row.n_samples = n_samples;
    row.trials = opts.trials;
    row.mean = ms.mean;
    row.stderr_ = ms.stderr_;
    row.p = p;
    row.trial_errors = std::move(errors);
    return row;
}

BochnerEstimate bochner_norm(const OperatorEval& op, const RandomFieldMeasure& mu, double p,
                             std::size_t mc_inputs, std::uint64_t seed) {
    if (!(p >= 1.0) || std::isinf(p))
        throw std::invalid_argument("Bochner norm needs finite p >= 1");
    Rng rng(seed, 0xb0c, mc_inputs);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t s = 0; s < mc_inputs; ++s) {
        const FieldSample fs = sample_measure(mu, rng);
        const double v = std::abs(op(fs.u));
        const double vp = p == 1.0 ? v : (p == 2.0 ? v * v : std::pow(v, p));
        sum += vp;
        sumsq += vp * vp;
    }
    const double n = static_cast<double>(mc_inputs);
    const double mean = sum / n;
    const double se_mean = std::sqrt(std::max(0.0, sumsq / n - mean * mean) / n);
    BochnerEstimate est;
    est.value = std::pow(mean, 1.0 / p);
    // delta method: d(m^(1/p))/dm = m^(1/p - 1)/p
    est.stderr_ = mean > 0.0 ? se_mean * std::pow(mean, 1.0 / p - 1.0) / p : se_mean;
    return est;
}

// ---------------------------------------------------------------------------
// External operator adapter (function payloads instead of points).

namespace {

using nlohmann::json;

class ExternalOperatorSession {
  public:
    ExternalOperatorSession(const ExternalAlgorithmSpec& spec, std::size_t n, std::size_t grid)
        : spec_(spec), proc_(spec.command, spec.env_allowlist, spec.timeout_ms) {
        send({{"type", "plan"}, {"n", n}, {"grid", grid}});
        const json reply = recv();
        if (reply["type"] != "inputs" || !reply.contains("functions") ||
            !reply["functions"].is_array())
            throw ProtocolError(ProtocolCode::Malformed,
                                spec_.name + " did not answer plan with inputs");
        for (const auto& fj : reply["functions"]) {
            GridFunction u;
            if (!fj.is_array() || fj.size() != grid)
                throw ProtocolError(ProtocolCode::Malformed,
                                    spec_.name + " sent a malformed function payload");
            for (const auto& v : fj) {
                if (!v.is_number())
                    throw ProtocolError(v.is_null() ? ProtocolCode::NonFinite
                                                    : ProtocolCode::Malformed,
                                        spec_.name + " function value");
                u.values.push_back(v.get<double>());
            }
            inputs_.push_back(std::move(u));
        }
        if (inputs_.size() != n)
            throw ProtocolError(ProtocolCode::PointCount,
                                spec_.name + " planned " + std::to_string(inputs_.size()) +
                                    " functions, expected " + std::to_string(n));
    }

    ~ExternalOperatorSession() {
        try {
            if (proc_.running()) {
                send({{"type", "end"}});
                proc_.finish();
            }
        } catch (...) {
        }
    }

    const std::vector<GridFunction>& inputs() const { return inputs_; }

    void fit(const Vec& values) {
        send({{"type", "values"}, {"values", values}});
        const json reply = recv();
        if (reply["type"] != "model_ready")
            throw ProtocolError(ProtocolCode::Malformed,
                                spec_.name + " did not acknowledge values");
    }

    double predict(const GridFunction& u) {
        send({{"type", "query"}, {"functions", json::array({u.values})}});
        const json reply = recv();
        if (reply["type"] != "predictions" || !reply.contains("values") ||
            !reply["values"].is_array() || reply["values"].size() != 1)
            throw ProtocolError(ProtocolCode::Malformed,
                                spec_.name + " answered query without one prediction");
        const auto& v = reply["values"][0];
        if (v.is_null())
            throw ProtocolError(ProtocolCode::NonFinite, spec_.name + " prediction");
        if (!v.is_number())
            throw ProtocolError(ProtocolCode::Malformed, spec_.name + " prediction");
        const double x = v.get<double>();
        if (!std::isfinite(x))
            throw ProtocolError(ProtocolCode::NonFinite, spec_.name + " prediction");
        return x;
    }

  private:
    void send(const json& msg) { proc_.write_line(msg.dump()); }

    json recv() {
        std::string line;
        bool got = false;
        try {
            got = proc_.read_line(line);
        } catch (const std::exception& e) {
            throw ProtocolError(ProtocolCode::Malformed, spec_.name + ": " + e.what());
        }
        if (!got)
            throw ProtocolError(ProtocolCode::Malformed,
                                spec_.name + " closed its output mid-session");
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("type") || !j["type"].is_string())
            throw ProtocolError(ProtocolCode::Malformed,
                                spec_.name + " sent an unparseable message");
        return j;
    }

    ExternalAlgorithmSpec spec_;
    Subprocess proc_;
    std::vector<GridFunction> inputs_;
};

class ExternalOperatorAlgorithm final : public OperatorAlgorithm {
  public:
    explicit ExternalOperatorAlgorithm(ExternalAlgorithmSpec spec) : spec_(std::move(spec)) {}
    std::string name() const override { return spec_.name; }
    bool thread_safe() const override { return false; }

    std::vector<GridFunction> plan(std::size_t n, const RandomFieldMeasure& mu) override {
        grid_ = mu.grid;
        ExternalOperatorSession session(spec_, n, grid_);
        return session.inputs();
    }

    OperatorEval reconstruct(const std::vector<GridFunction>& inputs, const Vec& values) override {
        auto session =
            std::make_shared<ExternalOperatorSession>(spec_, inputs.size(), grid_);
        for (std::size_t i = 0; i < inputs.size(); ++i)
            if (session->inputs()[i].values != inputs[i].values)
                throw ProtocolError(ProtocolCode::Malformed,
                                    spec_.name + " violated nonadaptivity: repeated plan differs");
        session->fit(values);
        return [session](const GridFunction& u) { return session->predict(u); };
    }

  private:
    ExternalAlgorithmSpec spec_;
    std::size_t grid_ = 0;
};

}  // namespace

OperatorAlgorithmPtr external_operator_algorithm(ExternalAlgorithmSpec spec) {
    return std::make_shared<ExternalOperatorAlgorithm>(std::move(spec));
}

}  // namespace gapbench
