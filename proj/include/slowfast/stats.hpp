#pragma once

// Small statistics helpers shared by the diagnostics module and tests:
// moment accumulation, Wilson score intervals, two-sample Kolmogorov-Smirnov,
// least-squares slopes, quantiles.

#include <cstddef>
#include <utility>
#include <vector>

namespace slowfast {

struct MeanVar {
    long n = 0;
    double mean = 0.0;
    double m2 = 0.0; // sum of squared deviations (Welford)

    void add(double x);
    double variance() const; // unbiased; 0 when n < 2
    double se() const;       // standard error of the mean
};

double mean_of(const std::vector<double>& xs);
double median_of(std::vector<double> xs); // copies; empty -> 0

// Wilson score interval for k successes in n trials at normal quantile z.
struct WilsonInterval {
    double p_hat = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};
WilsonInterval wilson(long k, long n, double z);

// two-sample KS statistic sup_x |F_a - F_b|; inputs need not be sorted
double ks_statistic(std::vector<double> a, std::vector<double> b);

// ordinary least squares y = a + b x; returns (slope, slope standard error).
// slope SE is the classical residual-based estimate (0 when <3 points).
std::pair<double, double> ls_slope(const std::vector<double>& x,
                                   const std::vector<double>& y);

// inverse standard normal CDF (Acklam's rational approximation, ~1e-9)
double normal_quantile(double p);

} // namespace slowfast
