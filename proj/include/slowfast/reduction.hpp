#pragma once

// The reduced limit equation for the slow variable:
//   dXbar = (F + C)(t, Xbar) dt + sigma(t, Xbar) dW + G dWextra
// where C is the Stratonovich correction picked up in the white-noise limit
// and G G^T = extra_cov is the covariance of the extra d-dimensional noise
// generated by the quadratic fast-fast term (present only when beta != 0).

#include "slowfast/models.hpp"

namespace slowfast {

struct ReducedModel {
    SpaceSpec space;
    DriftFn drift;  // F + C
    SigmaFn sigma;
    Mat extra_cov;  // d x d, symmetric PSD: sum_{l,m} b[i][l][m] b[j][l][m]
    Mat extra_chol; // G with G G^T = extra_cov (eigen factor, rank-tolerant)

    bool has_extra_noise() const { return extra_cov.lpNorm<Eigen::Infinity>() > 0.0; }
};

// C^i(t,x) = 1/2 sum_m q_m sum_j d_j sigma^{i,m}(t,x) sigma^{j,m}(t,x)
Vec stratonovich_correction(const AbstractModel& model, double t, const Vec& x);

// b[i][l][m] = beta[i][l][m] sqrt(q_l q_m / 2)
Bilinear diffusion_b(const Bilinear& beta, const Vec& q);

// extra_cov[i][j] = sum_{l,m} b[i][l][m] b[j][l][m]
Mat extra_covariance(const Bilinear& beta, const Vec& q);

// symmetric-eigen factor with eigenvalue clipping at 0 (negatives are MC/
// rounding noise, tolerated down to -1e-12 scale, rejected below)
Mat psd_factor(const Mat& cov);

// throws std::invalid_argument when the zero-mean condition fails: the limit
// equation is only valid under it
ReducedModel build_reduced(const AbstractModel& model);

} // namespace slowfast
