#include "slowfast/reduction.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace slowfast {

Vec stratonovich_correction(const AbstractModel& model, double t, const Vec& x) {
    const int d = model.space.d, M = model.space.M;
    const Mat s = model.sigma(t, x);
    const Bilinear ds = eval_dsigma(model, t, x);
    Vec c = Vec::Zero(d);
    for (int i = 0; i < d; ++i) {
        double acc = 0.0;
        for (int m = 0; m < M; ++m) {
            const double qm = model.space.q[m];
            if (qm == 0.0) continue;
            double inner = 0.0;
            for (int j = 0; j < d; ++j)
                inner += ds.at(i, j, m) * s(j, m);
            acc += qm * inner;
        }
        c[i] = 0.5 * acc;
    }
    return c;
}

Bilinear diffusion_b(const Bilinear& beta, const Vec& q) {
    if (beta.left != beta.right || beta.left != q.size())
        throw std::invalid_argument("diffusion_b: shape mismatch");
    Bilinear b(beta.out, beta.left, beta.right);
    for (int i = 0; i < beta.out; ++i)
        for (int l = 0; l < beta.left; ++l)
            for (int m = 0; m < beta.right; ++m)
                b.at(i, l, m) = beta.at(i, l, m) * std::sqrt(q[l] * q[m] / 2.0);
    return b;
}

Mat extra_covariance(const Bilinear& beta, const Vec& q) {
    const Bilinear b = diffusion_b(beta, q);
    Mat cov = Mat::Zero(beta.out, beta.out);
    for (int i = 0; i < beta.out; ++i)
        for (int j = i; j < beta.out; ++j) {
            double acc = 0.0;
            for (int l = 0; l < b.left; ++l)
                for (int m = 0; m < b.right; ++m)
                    acc += b.at(i, l, m) * b.at(j, l, m);
            cov(i, j) = acc;
            cov(j, i) = acc;
        }
    return cov;
}

Mat psd_factor(const Mat& cov) {
    const double scale = 1.0 + cov.lpNorm<Eigen::Infinity>();
    Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("psd_factor: eigendecomposition failed");
    Vec lam = eig.eigenvalues();
    for (int i = 0; i < lam.size(); ++i) {
        if (lam[i] < -1e-12 * scale) {
            std::ostringstream os;
            os << "psd_factor: matrix is not PSD (eigenvalue " << lam[i] << ")";
            throw std::invalid_argument(os.str());
        }
        lam[i] = std::sqrt(std::max(0.0, lam[i]));
    }
    return eig.eigenvectors() * lam.asDiagonal();
}

ReducedModel build_reduced(const AbstractModel& model) {
    const ZeroMeanResult zm = validate_zero_mean(model.beta, model.space.q);
    if (!zm.pass) {
        std::ostringstream os;
        os << "build_reduced: zero-mean condition fails (max residual "
           << zm.residual.lpNorm<Eigen::Infinity>() << "); the limit equation is"
           << " only valid under it";
        throw std::invalid_argument(os.str());
    }

    ReducedModel rm;
    rm.space = model.space;
    const AbstractModel base = model; // immutable copy shared by the closure
    rm.drift = [base](double t, const Vec& x) -> Vec {
        return base.F(t, x) + stratonovich_correction(base, t, x);
    };
    rm.sigma = model.sigma;
    rm.extra_cov = extra_covariance(model.beta, model.space.q);
    rm.extra_chol = psd_factor(rm.extra_cov);
    return rm;
}

} // namespace slowfast
