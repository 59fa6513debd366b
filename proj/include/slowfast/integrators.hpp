#pragma once

// Time stepping. The fast-slow equation is integrated on the noise substep
// grid with the exact integral of Y driving the sigma term; the reduced
// equation is Euler-Maruyama on the macro grid with aggregated Wiener
// increments. Every path is guarded by the first-exit radius R: a value with
// |X| >= R + 1 is never emitted, the path stops there instead.

#include "slowfast/models.hpp"
#include "slowfast/noise.hpp"
#include "slowfast/reduction.hpp"

#include <utility>

namespace slowfast {

struct ExperimentConfig {
    double T = 1.0;
    Vec x0;
    double epsilon = 0.1;
    double substep_c = 0.1;  // h <= substep_c * eps^2
    double macro_step = 0.0; // 0 -> default eps^(4/3)
    double radius = 0.0;     // 0 -> default 10 (1 + |x0|)

    double macro_dt(double eps) const;
    double stop_radius() const;
    void validate() const;
};

struct PathD {
    std::vector<double> t;
    std::vector<Vec> x; // aligned with t
    bool stopped = false;
    double stop_time = 0.0;

    const Vec& final_value() const { return x.back(); }
    double sup_norm() const;
};

// pointwise sup distance over the common sampled times (shorter path wins);
// used by the coupling diagnostics
double sup_distance(const PathD& a, const PathD& b);

// explicit Euler over substeps:
//   X_{n+1} = X_n + h F(t_n, X_n) + sigma(t_n, X_n) IY_n + h eps beta(Y_n, Y_n)
// Samples are emitted every out_stride substeps (macro grid).
PathD simulate_fast_slow(const AbstractModel& model, const ExperimentConfig& cfg,
                         const NoisePath& noise, long out_stride = 1);

// the lowered intermediate process: identical stepping on the lowered model
PathD simulate_tilde(const AbstractModel& lowered, const ExperimentConfig& cfg,
                     const NoisePath& noise, long out_stride = 1);

struct FastSummary {
    double sup_norm = 0.0; // sup_t |Y_t| over the substep grid
    Vec y_final;
};

// coupled quadratic system. The fast variable uses the exponential-Euler
// update with the exact stochastic-convolution increment recovered from the
// NoisePath (so with A21 = 0, B211 = 0 the fast path IS the path's OU);
// the slow variable is explicit Euler with the frozen Y_n.
std::pair<PathD, FastSummary> simulate_coupled_climate(const ClimateModel& cm,
                                                       const ExperimentConfig& cfg,
                                                       const NoisePath& noise,
                                                       long out_stride = 1);

// Euler-Maruyama on the macro grid:
//   X_{k+1} = X_k + h (F + C)(t_k, X_k) + sigma(t_k, X_k) dW_k + G xi_k sqrt(h)
// xi from `extra`, a stream disjoint from the one behind dW (independence of
// the extra noise).
PathD simulate_reduced(const ReducedModel& rm, const ExperimentConfig& cfg,
                       const MacroNoise& macro, RngStream& extra);

// the auxiliary process: reduced drift and sigma dW plus the pathwise
// quadratic integral of the fast noise, accumulated per macro interval by
// trapezoid quadrature of eps beta(Y_s, Y_s) over the substeps
PathD simulate_hat(const ReducedModel& rm, const AbstractModel& model,
                   const ExperimentConfig& cfg, const NoisePath& noise,
                   long macro_factor);

// trapezoid accumulation of eps beta(Y,Y) ds over substeps [n0, n1)
Vec quadratic_drift_increment(const AbstractModel& model, const NoisePath& noise,
                              long n0, long n1);

// smallest power of two >= max(1, ceil(delta / (c eps^2))): substeps per
// macro interval, kept power-of-two so ladder grids nest
long substeps_per_macro(double delta, double c, double eps);

} // namespace slowfast
