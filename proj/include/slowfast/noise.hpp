#pragma once

// Driving noise: the stationary fast Ornstein-Uhlenbeck process Y (rate 1/eps^2,
// mode variances q_m/(2 eps^2)), sampled by exact transitions jointly with the
// Wiener increments dW, plus the pathwise-exact time integral of Y. The key
// identity, per substep: integral of Y over [t_n, t_n+1] = dW_n - eps^2 (Y_{n+1} - Y_n),
// which follows from eps^2 dY = -Y dt + dW and is exact, not a quadrature.

#include "slowfast/rng.hpp"
#include "slowfast/spectral.hpp"

#include <iosfwd>
#include <vector>

namespace slowfast {

struct OUParams {
    double epsilon = 0.0; // in (0, 1)
    SpaceSpec space;

    void validate() const; // throws std::invalid_argument
};

// Jointly sampled noise on a uniform substep grid t_n = n h, n = 0..N.
// Flat row-major storage: dW/IY are [m*N + n], Y is [m*(N+1) + n].
struct NoisePath {
    double epsilon = 0.0;
    Vec q;       // copy of the mode spectrum
    int M = 0;
    long N = 0;  // substep count
    double h = 0.0;

    std::vector<double> dW; // Wiener increment over [t_n, t_n+1]
    std::vector<double> Y;  // OU value at t_n
    std::vector<double> IY; // exact integral of Y over [t_n, t_n+1]

    double t(long n) const { return h * static_cast<double>(n); }
    double T() const { return t(N); }
    double dw(int m, long n) const { return dW[static_cast<std::size_t>(m) * N + n]; }
    double y(int m, long n) const { return Y[static_cast<std::size_t>(m) * (N + 1) + n]; }
    double iy(int m, long n) const { return IY[static_cast<std::size_t>(m) * N + n]; }

    Vec y_at(long n) const;  // all modes at t_n

    // worst per-step violation of IY = dW - eps^2 (Y_{n+1} - Y_n); an
    // independent re-check of the construction invariant
    double max_identity_residual() const;
};

// stationary law of Y: coordinate m ~ N(0, q_m / (2 eps^2)), independent
Vec sample_stationary_initial(const OUParams& params, RngStream& rng);

// One exact transition over step h. Per mode m, (dW, y_next) are jointly
// Gaussian: y_next = a y_prev + conv with a = exp(-h/eps^2),
//   Var dW        = q_m h
//   Var conv      = q_m (1 - a^2) / (2 eps^2)
//   Cov(dW, conv) = q_m (1 - a)
// sampled as (regression of conv on dW) + independent Schur-complement residual.
void step_joint(const OUParams& params, const Vec& y_prev, double h,
                RngStream& rng, Vec& dw_out, Vec& y_next_out);

// Assemble a path on N uniform substeps of [0, T]. Default N is the smallest
// count with h <= c eps^2 (c = 0.1 resolves the OU correlation time); pass
// steps > 0 to pin N (still checked against the substep rule).
NoisePath build_path(const OUParams& params, double T, double c,
                     RngStream& rng, long steps = 0);

// Coarsen by an integer factor to the grid shared with a larger eps_coarse:
// Wiener increments are aggregated exactly; Y is re-simulated at eps_coarse by
// exact conditional sampling of the convolution given each aggregated dW
// (fresh stationary initial value). Throws on incompatible grids.
NoisePath rescale_to_shared_grid(const NoisePath& fine, double eps_coarse,
                                 long factor, RngStream& rng);

// Aggregated macro-grid view: the raw Wiener increments driving the limit
// equation. Produced by exact aggregation of a NoisePath (coupled runs) or by
// direct sampling (independent batches); both are exact in law.
struct MacroNoise {
    Vec q;
    int M = 0;
    long K = 0;  // macro step count
    double h = 0.0;
    std::vector<double> dW; // [m*K + k]

    double dw(int m, long k) const { return dW[static_cast<std::size_t>(m) * K + k]; }
    Vec dw_at(long k) const;
};

MacroNoise aggregate_increments(const NoisePath& path, long factor);
MacroNoise sample_wiener(const SpaceSpec& space, double T, long steps, RngStream& rng);

// Exact joint simulation of two OU processes with parameters eps_a < eps_b
// driven by the *same* Wiener path (correlated stationary initials, trivariate
// (dW, conv_a, conv_b) steps). Used by the non-Cauchy diagnostic, where the
// cross-covariance between the two processes is the measured quantity.
struct OUPair {
    double eps_a = 0.0, eps_b = 0.0;
    Vec ya, yb;
};
OUPair sample_stationary_pair(const SpaceSpec& space, double eps_a, double eps_b,
                              RngStream& rng);
void step_joint_pair(const SpaceSpec& space, OUPair& pair, double h,
                     RngStream& rng, Vec& dw_out);

// debug dump, columns: t, m, Y, dW, IY (dW/IY blank on the last node)
void dump_csv(const NoisePath& path, std::ostream& os);

} // namespace slowfast
