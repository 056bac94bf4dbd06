#pragma once

#include "gapbench/network.hpp"

namespace gapbench {

// Depth-growth function n -> max allowed depth. Values may be infinite.
class DepthGrowth {
  public:
    static DepthGrowth constant(double value);
    // Nondecreasing table for n = 1,2,...; the last entry repeats for larger n.
    static DepthGrowth table(std::vector<double> values);
    static DepthGrowth affine(double a, double b);  // n -> a*n + b

    double operator()(std::size_t n) const;
    double sup() const;  // sup over all n; may be infinite
    nlohmann::json to_json() const;
    static DepthGrowth from_json(const nlohmann::json& j);

  private:
    enum class Kind { Constant, Table, Affine } kind_ = Kind::Constant;
    double value_ = 3, a_ = 0, b_ = 0;
    std::vector<double> table_;
};

struct SpaceParams {
    double alpha = 2.0;       // parametric rate
    double p = 2.0;           // error norm exponent, may be infinite
    std::size_t d = 1;        // input dimension
    DepthGrowth ell = DepthGrowth::constant(3);

    double ell_star() const { return ell.sup(); }
    void validate() const;  // alpha > 0, p >= 1, d >= 1
};

// Depth reserved for value amplification in the bump construction: half the
// available depth, capped when the growth function is unbounded.
std::size_t steepening_stages(const SpaceParams& params, std::size_t depth_cap = 64);

// lambda = 1/p + (1/d) * alpha / (alpha + floor(ell*/2)); requires ell* >= 3.
double theoretical_rate(const SpaceParams& params);

struct MembershipReport {
    bool ok = true;
    std::vector<std::string> violations;
    NetworkStats measured;
};

// Checks W <= n, depth <= ell(n), and weight magnitudes <= 1.
MembershipReport sigma_membership(const Network& net, std::size_t n, const SpaceParams& params);

struct BumpSpec {
    std::size_t d = 1;
    double M = 1.0;                 // inverse half-side of the support cube
    std::size_t depth_budget = 8;
    std::size_t width_budget = 1 << 20;
};

struct BumpInfo {
    double center_value = 0.0;   // realized value at the center
    double half_width = 0.0;     // actual support half-side (slightly below 1/M)
    std::size_t declared_budget = 0;  // smallest weight budget the net fits in
    std::size_t stages = 0;
};

// Localized bump: value ~1 at origin, exactly 0 outside the open cube of
// half-side 1/M, continuous piecewise linear, range within [0,1], all weight
// magnitudes <= 1. amplitude (<= 1) scales the peak. The steepness factor is
// recovered over `stages` width-duplication layers so weights stay bounded.
Network bump_network(const BumpSpec& spec, std::size_t stages, double amplitude,
                     BumpInfo* info = nullptr);
Network bump_network(const BumpSpec& spec, BumpInfo* info = nullptr);

// Peak height kappa * M^(-alpha/(alpha + floor(ell*/2))) of the admissible
// localized instance.
double adversarial_amplitude(const SpaceParams& params, double M, double kappa);

// amplitude * bump centered at y, optionally sign-flipped. Keeps all weight
// magnitudes <= 1 for any y in [0,1]^d.
Network make_localized_network(const SpaceParams& params, double M, const Vec& y, double kappa,
                               int sign = 1, BumpInfo* info = nullptr);

// Closed-form L^p mass of the d-dimensional bump min_j tent(x_j/h) over its
// full (unclipped) support cube: integral of value^p = (2h)^d * d * B(d, p+1).
double bump_lp_mass_unclipped(std::size_t d, double h, double p);

// Exact 1-D integral of (a * tent((x-y)/h))^p over [lo, hi] for finite p.
double tent_power_integral_1d(double y, double h, double a, double p, double lo, double hi);

}  // namespace gapbench
