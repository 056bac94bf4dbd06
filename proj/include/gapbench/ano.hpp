#pragma once

#include "gapbench/encoders.hpp"
#include "gapbench/network.hpp"

namespace gapbench {

// Averaging neural operator: pointwise lifting, hidden layers that add the
// channel mean, pointwise projection.
struct Ano {
    Network lifting;     // (eta, x) in R^2 -> R^{dc}, depth 2
    std::vector<std::pair<Matrix, Vec>> hidden;  // W_j (dc x dc), b_j
    Network projection;  // R^{dc} -> R, depth 2
};

struct AnoStats {
    std::size_t depth = 0;         // number of hidden layers
    std::size_t weight_count = 0;  // W(R) + sum nnz(W_j, b_j) + W(Q)
    double weight_sup = 0.0;
};

AnoStats ano_stats(const Ano& psi);

// v_0(x) = R(u(x), x); v_j = relu(W_j v + b_j + mean(v)); output Q(v_L(x)).
// The average is the grid mean per channel.
GridFunction ano_apply(const Ano& psi, const GridFunction& u);

// Exact ramp relu(eta + b) - b reproducing eta on [-b, inf).
Network ano_ramp_unit(double b);

// Shallow lifting whose average recovers the first d dual pairings, built
// from chord approximations P_k of the dual antiderivatives:
//   R_k(eta, x) = (1/gamma_k) [P_k(x + gamma_k eta) - P_k(x)] ~ eta e*_k(x),
// then affinely normalized so the nominal image of the coefficient box covers
// [0,1]^d. Every unit's argument is affine in (eta, x), so the lifting stays
// a depth-2 network.
struct AnoEncoder {
    Network lifting;  // normalization folded into the output layer
    struct Channel {
        double gamma = 0.0;
        double t0 = 0.0;
        double step = 0.0;
        Vec knot_values;  // P_k at the knots
    };
    std::vector<Channel> channels;
    double norm_scale = 1.0;   // 2 sqrt(d) / r, ball-based cover of [0,1]^d
    double norm_shift = 0.5;
    double b_prime = 1.0;
    double target_eps = 0.0;
    double achieved_eps = 0.0;  // measured on a validation grid
    bool met_target = true;
    double margin = 0.0;  // encoded-units deviation bound for stratification

    Vec apply_fast(const GridFunction& u) const;
    Vec apply_network(const GridFunction& u) const;
    FieldEncoder fn() const;
};

AnoEncoder ano_encoder_build(const RandomFieldMeasure& mu, std::size_t d, double b_prime,
                             double eps);

// Empirical sup bound on |u| over the measure, margined by 1.5.
double estimate_sup_bound(const RandomFieldMeasure& mu, std::size_t samples, std::uint64_t seed);

// Wraps a finite network psi (depth >= 2) into an ANO computing
// psi(encoder(u)): the first affine map folds into the lifting, hidden layers
// use W_j = A_j - I on constant channel fields, and the projection packs the
// last two affine maps.
Ano embed_network_in_ano(const Network& psi, const Network& encoder_lifting);

}  // namespace gapbench
