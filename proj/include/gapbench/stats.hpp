#pragma once

#include <cstddef>
#include <span>

namespace gapbench {

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;  // sample standard deviation / sqrt(n)
    std::size_t n = 0;
};

MeanStderr mean_stderr(std::span<const double> xs);

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

OlsFit ols(std::span<const double> x, std::span<const double> y);

// Regularized incomplete beta I_x(a, b).
double betainc(double a, double b, double x);

// One-sided Clopper-Pearson lower confidence bound for a binomial proportion.
double binomial_lower_bound(std::size_t successes, std::size_t n, double confidence);

}  // namespace gapbench
