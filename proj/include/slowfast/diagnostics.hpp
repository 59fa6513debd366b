#pragma once

// Monte Carlo experiments and closed-form checks. Conventions:
//  - formula-check rows use deviation-as-estimate: estimate = MC - closed form,
//    verdict "pass" iff |estimate| <= (SE multiple) * se;
//  - experiment rows report the statistic itself; per-epsilon rows carry
//    verdict "info", ladder-level rows carry the deciding verdict;
//  - stopped replicas are excluded from sup statistics but counted; a ladder
//    point with > 5% stops is "inconclusive".
// Every verdict is a pure function of (estimate, se, tolerance); all RNG
// streams are pure functions of (seed, tag, eps index, replica, channel).

#include "slowfast/integrators.hpp"
#include "slowfast/stats.hpp"

#include <optional>
#include <string>
#include <vector>

namespace slowfast {

struct EpsLadder {
    std::vector<double> epsilons; // strictly decreasing, in (0, 1)
    int replicas = 200;
    double threshold = 0.0;       // absolute exceedance threshold; 0 -> derived
    double threshold_frac = 0.25; // derived threshold = frac * median sup|Xbar|
    double confidence = 0.95;

    void validate() const;
};

struct StatReport {
    std::string name;
    std::optional<double> epsilon;
    double estimate = 0.0;
    double se = 0.0;
    long n = 0;
    long stopped = 0;
    std::string verdict; // pass | fail | inconclusive | degenerate | info
};

using Report = std::vector<StatReport>;

// true when no row fails; inconclusive rows don't fail but are surfaced
bool all_pass(const Report& report);
bool any_inconclusive(const Report& report);

// Exceedance probabilities p(eps) = P(sup_k |X^eps - Xbar| > delta) on
// coupled paths (same Wiener path per replica), one row per epsilon plus a
// trend row: pass iff p is nonincreasing up to Wilson-interval overlap and
// p(eps_min) < final_threshold. Requires beta = 0.
Report strong_convergence(const Fixture& fx, const EpsLadder& ladder,
                          const ExperimentConfig& cfg, std::uint64_t seed,
                          int threads, double final_threshold = 0.1);

// Independent-sample comparison of X^eps_T against Xbar_T: per-coordinate
// mean/variance gaps and KS statistics per epsilon (info rows), plus trend
// rows and the final KS row: KS(eps_min) <= 2 x null-calibrated KS.
Report weak_convergence(const Fixture& fx, const EpsLadder& ladder,
                        const ExperimentConfig& cfg, std::uint64_t seed,
                        int threads);

// MC iterated integral c = int_0^Delta (int_0^s Y^l_r dr) Y^m_s ds from fixed
// starts (y_l0, y_m0) against its closed form; fine oracle grid h = eps^2/50
StatReport check_cond_exp(const SpaceSpec& space, double Delta, double eps,
                          double y_l0, double y_m0, int l, int m,
                          int replicas, std::uint64_t seed, int threads);

// U_T = int_0^T eps beta(Y,Y) ds: per-coordinate means (5 SE against 0) and
// second moments (3 SE against the closed form
// 1/2 sum beta^i beta^j q_l q_m (T + eps^2/2 (e^{-2T/eps^2} - 1)))
Report check_u_moments(const Bilinear& beta, const SpaceSpec& space, double T,
                       double eps, int replicas, std::uint64_t seed, int threads,
                       double substep_c = 0.1);

// E sup_t |M^eps - M^{ratio eps}|^2 for the substep-quadrature stochastic
// integrals M^eps_i = eps int sum beta^i_{lm} Y^l dW^m on a shared Wiener
// path, against the closed-form lower bound
// T sum (beta^i_{lm})^2 q_l q_m (eps_b - eps_a)^2/(eps_a^2 + eps_b^2);
// pass iff estimate >= 0.5 x bound
StatReport check_non_cauchy(const Bilinear& beta, const SpaceSpec& space,
                            double T, double eps, double ratio, int replicas,
                            std::uint64_t seed, int threads,
                            double substep_c = 0.1);

// log-log slope of (E sup_t |Y|^p)^{1/p} against eps; pass iff within
// -1 +- 0.15. Throws below 3 ladder points; all-zero spectrum -> "degenerate".
StatReport check_ou_scaling(const SpaceSpec& space,
                            const std::vector<double>& epsilons, double p,
                            double T, int replicas, std::uint64_t seed,
                            int threads, double substep_c = 0.1);

// the constant vector by which the generic Stratonovich correction exceeds
// the simplified climate-form display: disc_i = 1/2 sum_m q_m sum_j
// B112[i][j][m] A12[j][m]
Vec correction_discrepancy(const ClimateModel& cm);
// report row: estimate = max |disc_i|, verdict "pass" (informational)
StatReport correction_discrepancy_report(const ClimateModel& cm);

// run fn(i) for i in [0, n) on `threads` workers; results must be written to
// pre-sized per-index slots so the schedule cannot affect the outcome
void parallel_for(long n, int threads, const std::function<void(long)>& fn);

} // namespace slowfast
