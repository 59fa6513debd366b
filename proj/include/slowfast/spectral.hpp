#pragma once

// Finite spectral representation: the slow space (dimension d, basis e_i),
// the truncated fast space (M modes, basis f_m), the noise spectrum q_m,
// and the small dense tensor algebra everything else is built on.

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace slowfast {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Dimensions and covariance spectrum. q holds the M eigenvalues of the
// (diagonal, trace-class) noise covariance in the f_m basis.
struct SpaceSpec {
    int d = 0;
    int M = 0;
    Vec q;

    // throws std::invalid_argument on d < 1, M < 1, size mismatch,
    // negative entries, or an all-zero spectrum
    void validate() const;
    double trace() const { return q.sum(); }
};

// Rank-3 tensor T[i][a][b]: a bilinear map (u, v) -> out with
// out[i] = sum_{a,b} T[i][a][b] u[a] v[b]. Row-major flat storage.
struct Bilinear {
    int out = 0;
    int left = 0;
    int right = 0;
    std::vector<double> t;

    Bilinear() = default;
    Bilinear(int out_dim, int left_dim, int right_dim)
        : out(out_dim), left(left_dim), right(right_dim),
          t(static_cast<std::size_t>(out_dim) * left_dim * right_dim, 0.0) {}

    double& at(int i, int a, int b) {
        return t[(static_cast<std::size_t>(i) * left + a) * right + b];
    }
    double at(int i, int a, int b) const {
        return t[(static_cast<std::size_t>(i) * left + a) * right + b];
    }
    bool is_zero() const;
    double max_abs() const;
};

// out[i] = sum_{a,b} T[i][a][b] u[a] v[b]; throws on shape mismatch
Vec apply_bilinear(const Bilinear& T, const Vec& u, const Vec& v);

// out[i][a][b] = (T[i][a][b] + T[i][b][a]) / 2; preserves quadratic forms.
// Requires left == right.
Bilinear symmetrize_in_last_two(const Bilinear& T);

// Adjoint in the orthonormal bases (plain matrix transpose).
Mat transpose(const Mat& L);

// Partial application in the first slot: result[i][b] = sum_a T[i][a][b] x[a].
// This is how an affine sigma(x) = A + B(x, .) gets its matrix.
Mat contract_left(const Bilinear& T, const Vec& x);

} // namespace slowfast
