#include "gapbench/encoders.hpp"

#include <algorithm>
#include <cmath>

#include "gapbench/stats.hpp"

namespace gapbench {

Vec DeepONetEncoder::apply(const GridFunction& u) const {
    Vec ell(functional_weights.size());
    for (std::size_t k = 0; k < functional_weights.size(); ++k) {
        double acc = 0.0;
        const Vec& w = functional_weights[k];
        for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * u.values[i];
        ell[k] = acc;
    }
    Vec out = matvec(coeff, ell);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += bias[j];
    return out;
}

FieldEncoder DeepONetEncoder::fn() const {
    DeepONetEncoder copy = *this;
    return [copy](const GridFunction& u) { return copy.apply(u); };
}

namespace {

// Solve the (tiny) least-squares system E c = rhs with E of shape J x d0,
// d0 >= J, via normal equations on E E^T.
Vec min_norm_solve(const std::vector<Vec>& e_rows, const Vec& rhs) {
    const std::size_t J = e_rows.size();
    const std::size_t d0 = e_rows.front().size();
    std::vector<Vec> g(J, Vec(J + 1, 0.0));
    for (std::size_t i = 0; i < J; ++i) {
        for (std::size_t j = 0; j < J; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < d0; ++k) s += e_rows[i][k] * e_rows[j][k];
            g[i][j] = s;
        }
        g[i][J] = rhs[i];
    }
    for (std::size_t c = 0; c < J; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < J; ++r)
            if (std::abs(g[r][c]) > std::abs(g[piv][c])) piv = r;
        if (std::abs(g[piv][c]) < 1e-14)
            throw std::invalid_argument("point-evaluation system is singular");
        std::swap(g[piv], g[c]);
        for (std::size_t r = 0; r < J; ++r) {
            if (r == c) continue;
            const double f = g[r][c] / g[c][c];
            for (std::size_t k = c; k <= J; ++k) g[r][k] -= f * g[c][k];
        }
    }
    Vec lambda(J);
    for (std::size_t i = 0; i < J; ++i) lambda[i] = g[i][J] / g[i][i];
    Vec c(d0, 0.0);
    for (std::size_t k = 0; k < d0; ++k)
        for (std::size_t i = 0; i < J; ++i) c[k] += lambda[i] * e_rows[i][k];
    return c;
}

}  // namespace

DeepONetEncoder deeponet_encoder_build(const RandomFieldMeasure& mu, std::size_t d, double delta,
                                       FunctionalFamily family, std::size_t n_functionals) {
    if (d < 1 || d > mu.truncation)
        throw std::invalid_argument("encoder dimension must be within the truncation level");
    const std::size_t G = mu.grid;
    const std::size_t J = mu.truncation;
    DeepONetEncoder enc;

    // Raw coefficients c_jk with sum_k c_jk l_k ~ e*_j, then the affine
    // normalization gamma (z_j + s_j) / (2 s_j) mapping the coefficient box
    // onto [0,1]^d.
    Matrix raw;
    if (family == FunctionalFamily::CosineMoments) {
        const std::size_t d0 = d;
        for (std::size_t k = 0; k < d0; ++k) {
            Vec w(G);
            for (std::size_t i = 0; i < G; ++i)
                w[i] = mu.duals[k].values[i] / static_cast<double>(G);
            enc.functional_weights.push_back(std::move(w));
        }
        raw = Matrix::identity(d0);
    } else {
        const std::size_t d0 = n_functionals ? n_functionals : 64;
        if (d0 < J)
            throw std::invalid_argument(
                "point-evaluation encoder needs at least J evaluation sites");
        // Evaluation sites at coarse cell midpoints, snapped to the grid.
        std::vector<std::size_t> sites(d0);
        for (std::size_t k = 0; k < d0; ++k) {
            const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(d0);
            sites[k] = std::min(G - 1, static_cast<std::size_t>(t * static_cast<double>(G)));
        }
        for (std::size_t k = 0; k < d0; ++k) {
            Vec w(G, 0.0);
            w[sites[k]] = 1.0;
            enc.functional_weights.push_back(std::move(w));
        }
        // Want sum_k c_jk e_m(t_k) = delta_jm for all m <= J.
        std::vector<Vec> e_rows(J, Vec(d0));
        for (std::size_t m = 0; m < J; ++m)
            for (std::size_t k = 0; k < d0; ++k) e_rows[m][k] = mu.basis[m].values[sites[k]];
        raw = Matrix(d, d0);
        for (std::size_t j = 0; j < d; ++j) {
            Vec rhs(J, 0.0);
            rhs[j] = 1.0;
            Vec cj = min_norm_solve(e_rows, rhs);
            for (std::size_t k = 0; k < d0; ++k) raw(j, k) = cj[k];
        }
    }

    // Worst error of the raw functionals over the measure's support:
    // delta_hat = max_j sum_m s_m |A_jm - delta_jm|.
    double delta_hat = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double err = 0.0;
        for (std::size_t m = 0; m < J; ++m) {
            double a_jm = 0.0;
            for (std::size_t k = 0; k < enc.functional_weights.size(); ++k) {
                const Vec& w = enc.functional_weights[k];
                double lk = 0.0;
                for (std::size_t i = 0; i < G; ++i) lk += w[i] * mu.basis[m].values[i];
                a_jm += raw(j, k) * lk;
            }
            err += mu.half_widths[m] * std::abs(a_jm - (j == m ? 1.0 : 0.0));
        }
        delta_hat = std::max(delta_hat, err);
    }
    enc.achieved_delta = delta_hat;
    if (delta_hat > delta && delta > 0.0)
        throw std::invalid_argument("requested dual accuracy " + std::to_string(delta) +
                                    " unattainable; achieved " + std::to_string(delta_hat));
    if (family == FunctionalFamily::CosineMoments && delta == 0.0 && delta_hat > 1e-9)
        throw std::invalid_argument("cosine moments should be exact; achieved " +
                                    std::to_string(delta_hat));

    enc.coeff = Matrix(d, enc.functional_weights.size());
    enc.bias.assign(d, 0.0);
    double margin = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double gamma = 1.0 / (2.0 * mu.half_widths[j]);
        for (std::size_t k = 0; k < enc.functional_weights.size(); ++k)
            enc.coeff(j, k) = gamma * raw(j, k);
        enc.bias[j] = 0.5;
        margin = std::max(margin, gamma * delta_hat);
    }
    enc.margin = margin;
    return enc;
}

PushforwardCertificate pushforward_certify(const FieldEncoder& encoder,
                                           const RandomFieldMeasure& mu, std::size_t d,
                                           std::size_t bins, std::size_t samples,
                                           std::uint64_t seed) {
    if (bins < 1) throw std::invalid_argument("need at least one bin per axis");
    std::size_t total = 1;
    for (std::size_t j = 0; j < d; ++j) total *= bins;
    if (total * 20 > samples)
        throw std::invalid_argument("need at least 20 expected samples per bin");

    std::vector<std::size_t> counts(total, 0);
    Rng rng(seed, 0xce27, d, bins);
    for (std::size_t s = 0; s < samples; ++s) {
        const FieldSample fs = sample_measure(mu, rng);
        const Vec z = encoder(fs.u);
        bool inside = true;
        std::size_t flat = 0;
        for (std::size_t j = 0; j < d; ++j) {
            if (!(z[j] >= 0.0 && z[j] < 1.0)) {
                inside = false;
                break;
            }
            flat = flat * bins + static_cast<std::size_t>(z[j] * static_cast<double>(bins));
        }
        if (inside) ++counts[flat];
    }

    PushforwardCertificate cert;
    cert.bins_per_axis = bins;
    cert.samples = samples;
    auto min_it = std::min_element(counts.begin(), counts.end());
    cert.min_bin_count = *min_it;
    cert.min_bin_index = static_cast<std::size_t>(min_it - counts.begin());
    cert.c_hat = static_cast<double>(cert.min_bin_count) /
                 (static_cast<double>(samples) / static_cast<double>(total));
    cert.min_bin_lower_bound = binomial_lower_bound(cert.min_bin_count, samples, 0.95);
    cert.pass = cert.min_bin_lower_bound > 0.0;
    return cert;
}

namespace {

double ball_volume(std::size_t d, double r) {
    constexpr double kPi = 3.14159265358979323846;
    const double dd = static_cast<double>(d);
    return std::pow(kPi, dd / 2.0) / std::tgamma(dd / 2.0 + 1.0) * std::pow(r, dd);
}

// Spectral norm of a small matrix via power iteration on A^T A.
double spectral_norm(const std::vector<Vec>& a) {
    const std::size_t n = a.size();
    Vec v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double s = 0.0;
    for (int it = 0; it < 80; ++it) {
        Vec av(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) av[i] += a[i][j] * v[j];
        Vec atav(n, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) atav[j] += a[i][j] * av[i];
        double norm = 0.0;
        for (double x : atav) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        for (std::size_t j = 0; j < n; ++j) v[j] = atav[j] / norm;
        s = norm;
    }
    return std::sqrt(s);
}

}  // namespace

ContractionReport contraction_coverage_check(const BoxMap& F, const BoxDomain& V,
                                             std::size_t bins, std::size_t samples,
                                             std::uint64_t seed, double supplied_norm_bound) {
    const std::size_t d = V.dim();
    ContractionReport rep;

    double r = kInf;
    Vec center(d);
    for (std::size_t j = 0; j < d; ++j) {
        center[j] = 0.5 * (V.lo[j] + V.hi[j]);
        r = std::min(r, 0.5 * (V.hi[j] - V.lo[j]));
    }
    rep.eps0 = std::min(0.5, r / 4.0);
    rep.ball_radius = r / 4.0;
    double vol_v = 1.0;
    for (std::size_t j = 0; j < d; ++j) vol_v *= V.hi[j] - V.lo[j];
    rep.c0 = ball_volume(d, rep.ball_radius) / vol_v * std::pow(2.0 / 3.0, static_cast<double>(d));

    // Estimate ||F - id||_{W^{1,inf}} = sup |F(y)-y| + sup ||DF - I|| by dense
    // finite differences unless a bound was supplied.
    if (supplied_norm_bound >= 0.0) {
        rep.norm_estimate = supplied_norm_bound;
    } else {
        const std::size_t probe = d == 1 ? 4096 : 64;
        double sup_val = 0.0, sup_jac = 0.0;
        std::vector<std::size_t> idx(d, 0);
        Vec y(d);
        const double fd = 1e-6;
        while (true) {
            for (std::size_t j = 0; j < d; ++j)
                y[j] = V.lo[j] + (V.hi[j] - V.lo[j]) * (static_cast<double>(idx[j]) + 0.5) /
                                     static_cast<double>(probe);
            const Vec fy = F(y);
            double val = 0.0;
            for (std::size_t j = 0; j < d; ++j) val += (fy[j] - y[j]) * (fy[j] - y[j]);
            sup_val = std::max(sup_val, std::sqrt(val));
            std::vector<Vec> jac(d, Vec(d));
            for (std::size_t j = 0; j < d; ++j) {
                Vec yp = y, ym = y;
                yp[j] = std::min(yp[j] + fd, V.hi[j]);
                ym[j] = std::max(ym[j] - fd, V.lo[j]);
                const Vec fp = F(yp), fm = F(ym);
                const double den = yp[j] - ym[j];
                for (std::size_t i = 0; i < d; ++i) {
                    jac[i][j] = (fp[i] - fm[i]) / den - (i == j ? 1.0 : 0.0);
                }
            }
            sup_jac = std::max(sup_jac, spectral_norm(jac));
            std::size_t j = 0;
            while (j < d && ++idx[j] == probe) idx[j++] = 0;
            if (j == d) break;
        }
        rep.norm_estimate = sup_val + sup_jac;
    }

    if (rep.norm_estimate > rep.eps0) {
        rep.applicable = false;  // hypothesis unmet: NOT_APPLICABLE, not failure
        return rep;
    }
    rep.applicable = true;

    // Bins: cells of the bounding box of V0 lying fully inside the ball.
    const double R = rep.ball_radius;
    const double cell_w = 2.0 * R / static_cast<double>(bins);
    std::size_t total = 1;
    for (std::size_t j = 0; j < d; ++j) total *= bins;
    std::vector<int> keep(total, 0);
    std::vector<std::size_t> counts(total, 0);
    std::size_t kept = 0;
    {
        std::vector<std::size_t> idx(d, 0);
        for (std::size_t f = 0; f < total; ++f) {
            double dist2 = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double cmid = -R + (static_cast<double>(idx[j]) + 0.5) * cell_w;
                dist2 += cmid * cmid;
            }
            const double half_diag = 0.5 * cell_w * std::sqrt(static_cast<double>(d));
            if (std::sqrt(dist2) + half_diag <= R) {
                keep[f] = 1;
                ++kept;
            }
            std::size_t j = 0;
            while (j < d && ++idx[j] == bins) idx[j++] = 0;
        }
    }
    rep.bins_checked = kept;

    Rng rng(seed, 0xc027, d, bins);
    Vec y(d);
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t j = 0; j < d; ++j) y[j] = rng.uniform(V.lo[j], V.hi[j]);
        const Vec z = F(y);
        bool inside = true;
        std::size_t flat = 0;
        for (std::size_t j = 0; j < d; ++j) {
            const double t = (z[j] - (center[j] - R)) / cell_w;
            if (!(t >= 0.0 && t < static_cast<double>(bins))) {
                inside = false;
                break;
            }
            flat = flat * bins + static_cast<std::size_t>(t);
        }
        if (inside) ++counts[flat];
    }

    const double vol_v0 = ball_volume(d, R);
    double cell_vol = 1.0;
    for (std::size_t j = 0; j < d; ++j) cell_vol *= cell_w;
    const double q_required = rep.c0 * cell_vol / vol_v0;  // = (2/3)^d cell_vol / vol(V)
    double min_ratio = kInf;
    std::size_t missed = 0;
    const double ns = static_cast<double>(samples);
    for (std::size_t f = 0; f < total; ++f) {
        if (!keep[f]) continue;
        const auto c = static_cast<double>(counts[f]);
        // Five-sigma one-sided margin on the binomial count.
        const double threshold =
            std::max(1.0, ns * q_required - 5.0 * std::sqrt(ns * q_required));
        if (c < threshold) ++missed;
        min_ratio = std::min(min_ratio, c / (ns * q_required));
    }
    rep.bins_missed = missed;
    rep.min_density_ratio = min_ratio;
    rep.pass = missed == 0;
    return rep;
}

}  // namespace gapbench
