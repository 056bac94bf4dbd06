#include "gapbench/baselines.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <memory>

#include "gapbench/subprocess.hpp"

namespace gapbench {

namespace {

std::size_t integer_root(std::size_t n, std::size_t d) {
    auto pow_int = [](std::size_t b, std::size_t e) {
        std::size_t r = 1;
        for (std::size_t i = 0; i < e; ++i) r *= b;
        return r;
    };
    auto m = static_cast<std::size_t>(
        std::floor(std::pow(static_cast<double>(n), 1.0 / static_cast<double>(d)) + 1e-9));
    while (pow_int(m + 1, d) <= n) ++m;
    while (m > 1 && pow_int(m, d) > n) --m;
    return std::max<std::size_t>(1, m);
}

class ZeroAlgorithm final : public ReconstructionAlgorithm {
  public:
    std::string name() const override { return "zero"; }
    std::vector<Vec> plan(std::size_t n, std::size_t d) override {
        return midpoint_grid_points(n, d);
    }
    EvalFn reconstruct(const std::vector<Vec>&, const Vec&) override {
        return [](std::span<const double>) { return 0.0; };
    }
};

// Uniform-bucket index for exact sup-norm nearest neighbor with index ties.
class LinfIndex {
  public:
    LinfIndex(std::vector<Vec> points, std::size_t d)
        : points_(std::move(points)), d_(d), m_(std::max<std::size_t>(
                                                  1, integer_root(points_.size(), d))) {
        std::size_t total = 1;
        for (std::size_t j = 0; j < d_; ++j) total *= m_;
        buckets_.resize(total);
        for (std::size_t i = 0; i < points_.size(); ++i)
            buckets_[cell_of(points_[i])].push_back(i);
    }

    std::size_t nearest(std::span<const double> x) const {
        std::vector<long> qc(d_);
        for (std::size_t j = 0; j < d_; ++j)
            qc[j] = std::clamp<long>(static_cast<long>(std::floor(x[j] * static_cast<double>(m_))),
                                     0, static_cast<long>(m_) - 1);
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        const double cell_w = 1.0 / static_cast<double>(m_);
        for (long ring = 0;; ++ring) {
            // Points in farther rings are at least (ring-1)*cell_w away.
            if (static_cast<double>(ring - 1) * cell_w > best) break;
            bool any_cell = false;
            std::vector<long> off(d_, -ring);
            while (true) {
                long cheb = 0;
                for (long o : off) cheb = std::max(cheb, std::labs(o));
                if (cheb == ring) {
                    bool inside = true;
                    std::size_t flat = 0;
                    for (std::size_t j = 0; j < d_; ++j) {
                        const long c = qc[j] + off[j];
                        if (c < 0 || c >= static_cast<long>(m_)) {
                            inside = false;
                            break;
                        }
                        flat = flat * m_ + static_cast<std::size_t>(c);
                    }
                    if (inside) {
                        any_cell = true;
                        for (std::size_t i : buckets_[flat]) {
                            double dist = 0.0;
                            for (std::size_t j = 0; j < d_; ++j)
                                dist = std::max(dist, std::abs(x[j] - points_[i][j]));
                            if (dist < best || (dist == best && i < best_idx)) {
                                best = dist;
                                best_idx = i;
                            }
                        }
                    }
                }
                std::size_t j = 0;
                while (j < d_ && ++off[j] > ring) off[j++] = -ring;
                if (j == d_) break;
            }
            if (!any_cell && static_cast<double>(ring) >= static_cast<double>(m_)) break;
        }
        return best_idx;
    }

  private:
    std::size_t cell_of(const Vec& pt) const {
        std::size_t flat = 0;
        for (std::size_t j = 0; j < d_; ++j) {
            const auto c = std::clamp<long>(
                static_cast<long>(std::floor(pt[j] * static_cast<double>(m_))), 0,
                static_cast<long>(m_) - 1);
            flat = flat * m_ + static_cast<std::size_t>(c);
        }
        return flat;
    }

    std::vector<Vec> points_;
    std::size_t d_;
    std::size_t m_;
    std::vector<std::vector<std::size_t>> buckets_;
};

class NearestNeighbor final : public ReconstructionAlgorithm {
  public:
    explicit NearestNeighbor(NnLayout layout) : layout_(layout) {}
    std::string name() const override {
        return layout_.kind == NnLayout::Kind::Grid ? "nearest-neighbor-grid"
                                                    : "nearest-neighbor-iid";
    }
    std::vector<Vec> plan(std::size_t n, std::size_t d) override {
        if (layout_.kind == NnLayout::Kind::Grid) return midpoint_grid_points(n, d);
        std::vector<Vec> pts(n, Vec(d));
        Rng rng(layout_.seed, 0x11d, n, d);
        for (auto& pt : pts)
            for (double& v : pt) v = rng.next_double();
        return pts;
    }
    EvalFn reconstruct(const std::vector<Vec>& points, const Vec& values) override {
        auto index = std::make_shared<LinfIndex>(points, points.front().size());
        auto vals = std::make_shared<Vec>(values);
        return [index, vals](std::span<const double> x) { return (*vals)[index->nearest(x)]; };
    }

  private:
    NnLayout layout_;
};

class Multilinear final : public ReconstructionAlgorithm {
  public:
    std::string name() const override { return "multilinear"; }

    std::vector<Vec> plan(std::size_t n, std::size_t d) override {
        const std::size_t m = integer_root(n, d);
        std::vector<Vec> pts;
        std::vector<std::size_t> idx(d, 0);
        std::size_t total = 1;
        for (std::size_t j = 0; j < d; ++j) total *= m;
        for (std::size_t i = 0; i < total; ++i) {
            Vec x(d);
            for (std::size_t j = 0; j < d; ++j)
                x[j] = m == 1 ? 0.5
                              : static_cast<double>(idx[j]) / static_cast<double>(m - 1);
            pts.push_back(std::move(x));
            std::size_t j = 0;
            while (j < d && ++idx[j] == m) idx[j++] = 0;
        }
        // Leftover budget lands on corner duplicates.
        std::size_t corner = 0;
        while (pts.size() < n) {
            Vec x(d);
            for (std::size_t j = 0; j < d; ++j) x[j] = (corner >> j) & 1u ? 1.0 : 0.0;
            pts.push_back(std::move(x));
            corner = (corner + 1) % (std::size_t{1} << d);
        }
        return pts;
    }

    EvalFn reconstruct(const std::vector<Vec>& points, const Vec& values) override {
        const std::size_t d = points.front().size();
        const std::size_t m = integer_root(points.size(), d);
        std::size_t total = 1;
        for (std::size_t j = 0; j < d; ++j) total *= m;
        auto grid_vals = std::make_shared<Vec>(values.begin(), values.begin() + total);
        return [grid_vals, d, m](std::span<const double> x) {
            if (m == 1) return (*grid_vals)[0];
            std::vector<std::size_t> base(d);
            Vec frac(d);
            for (std::size_t j = 0; j < d; ++j) {
                const double t = std::clamp(x[j], 0.0, 1.0) * static_cast<double>(m - 1);
                const auto i = std::min(static_cast<std::size_t>(t), m - 2);
                base[j] = i;
                frac[j] = t - static_cast<double>(i);
            }
            double acc = 0.0;
            for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
                double w = 1.0;
                std::size_t flat = 0;
                for (std::size_t j = d; j-- > 0;) {
                    const bool hi = (corner >> j) & 1u;
                    w *= hi ? frac[j] : 1.0 - frac[j];
                    flat = flat * m + (base[j] + (hi ? 1 : 0));
                }
                acc += w * (*grid_vals)[flat];
            }
            return acc;
        };
    }
};

}  // namespace

std::vector<Vec> midpoint_grid_points(std::size_t n, std::size_t d) {
    std::size_t m = integer_root(n, d);
    std::size_t total = 1;
    for (std::size_t j = 0; j < d; ++j) total *= m;
    if (total < n) ++m;
    std::vector<Vec> pts;
    pts.reserve(n);
    std::vector<std::size_t> idx(d, 0);
    while (pts.size() < n) {
        Vec x(d);
        for (std::size_t j = 0; j < d; ++j)
            x[j] = (static_cast<double>(idx[j]) + 0.5) / static_cast<double>(m);
        pts.push_back(std::move(x));
        std::size_t j = 0;
        while (j < d && ++idx[j] == m) idx[j++] = 0;
        if (j == d) break;
    }
    return pts;
}

AlgorithmPtr zero_algorithm() { return std::make_shared<ZeroAlgorithm>(); }

AlgorithmPtr nearest_neighbor_algorithm(NnLayout layout) {
    return std::make_shared<NearestNeighbor>(layout);
}

AlgorithmPtr multilinear_interpolation_algorithm() { return std::make_shared<Multilinear>(); }

// ---------------------------------------------------------------------------
// External subprocess adapter.

namespace {

using nlohmann::json;

json parse_msg(const std::string& line, const std::string& who) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw ProtocolError(ProtocolCode::Malformed, who + " sent an unparseable message");
    return j;
}

double number_or_die(const json& v, const std::string& who) {
    if (v.is_null())
        throw ProtocolError(ProtocolCode::NonFinite, who + " sent a null (non-finite) value");
    if (!v.is_number())
        throw ProtocolError(ProtocolCode::Malformed, who + " sent a non-numeric value");
    const double x = v.get<double>();
    if (!std::isfinite(x))
        throw ProtocolError(ProtocolCode::NonFinite, who + " sent a non-finite value");
    return x;
}

class ExternalSession {
  public:
    ExternalSession(const ExternalAlgorithmSpec& spec, std::size_t n, std::size_t d)
        : spec_(spec), proc_(spec.command, spec.env_allowlist, spec.timeout_ms) {
        json plan = {{"type", "plan"}, {"n", n}, {"d", d}};
        send(plan);
        const json reply = recv();
        if (reply["type"] != "points")
            throw ProtocolError(ProtocolCode::Malformed,
                                spec_.name + " answered plan with '" +
                                    reply["type"].get<std::string>() + "'");
        if (!reply.contains("points") || !reply["points"].is_array())
            throw ProtocolError(ProtocolCode::Malformed, spec_.name + " sent no point array");
        for (const auto& pt : reply["points"]) {
            Vec x;
            if (!pt.is_array() || pt.size() != d)
                throw ProtocolError(ProtocolCode::Malformed, spec_.name + " sent a malformed point");
            for (const auto& c : pt) x.push_back(number_or_die(c, spec_.name));
            points_.push_back(std::move(x));
        }
        if (points_.size() != n)
            throw ProtocolError(ProtocolCode::PointCount,
                                spec_.name + " planned " + std::to_string(points_.size()) +
                                    " points, expected " + std::to_string(n));
    }

    ~ExternalSession() {
        try {
            if (proc_.running()) {
                send({{"type", "end"}});
                proc_.finish();
            }
        } catch (...) {
        }
    }

    const std::vector<Vec>& points() const { return points_; }

    void fit(const Vec& values) {
        send({{"type", "values"}, {"values", values}});
        const json reply = recv();
        if (reply["type"] != "model_ready")
            throw ProtocolError(ProtocolCode::Malformed,
                                spec_.name + " answered values with '" +
                                    reply["type"].get<std::string>() + "'");
    }

    double predict(std::span<const double> x) {
        json q = {{"type", "query"}, {"points", json::array({Vec(x.begin(), x.end())})}};
        send(q);
        const json reply = recv();
        if (reply["type"] != "predictions" || !reply.contains("values") ||
            !reply["values"].is_array() || reply["values"].size() != 1)
            throw ProtocolError(ProtocolCode::Malformed,
                                spec_.name + " answered query without one prediction");
        return number_or_die(reply["values"][0], spec_.name);
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
        return parse_msg(line, spec_.name);
    }

    ExternalAlgorithmSpec spec_;
    Subprocess proc_;
    std::vector<Vec> points_;
};

class ExternalAlgorithm final : public ReconstructionAlgorithm {
  public:
    explicit ExternalAlgorithm(ExternalAlgorithmSpec spec) : spec_(std::move(spec)) {}
    std::string name() const override { return spec_.name; }
    bool thread_safe() const override { return false; }

    std::vector<Vec> plan(std::size_t n, std::size_t d) override {
        ExternalSession session(spec_, n, d);
        return session.points();
    }

    EvalFn reconstruct(const std::vector<Vec>& points, const Vec& values) override {
        auto session = std::make_shared<ExternalSession>(spec_, points.size(),
                                                         points.front().size());
        if (session->points() != points)
            throw ProtocolError(ProtocolCode::Malformed,
                                spec_.name + " violated nonadaptivity: repeated plan differs");
        session->fit(values);
        return [session](std::span<const double> x) { return session->predict(x); };
    }

  private:
    ExternalAlgorithmSpec spec_;
};

}  // namespace

AlgorithmPtr external_algorithm(ExternalAlgorithmSpec spec) {
    return std::make_shared<ExternalAlgorithm>(std::move(spec));
}

}  // namespace gapbench
