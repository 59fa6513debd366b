#include "slowfast/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace slowfast {

void SpaceSpec::validate() const {
    if (d < 1 || M < 1)
        throw std::invalid_argument("SpaceSpec: d and M must be >= 1");
    if (q.size() != M)
        throw std::invalid_argument("SpaceSpec: q must have M entries");
    bool any_positive = false;
    for (int m = 0; m < M; ++m) {
        if (!(q[m] >= 0.0))
            throw std::invalid_argument("SpaceSpec: q entries must be nonnegative");
        any_positive = any_positive || q[m] > 0.0;
    }
    if (!any_positive)
        throw std::invalid_argument("SpaceSpec: spectrum must have a positive entry");
}

bool Bilinear::is_zero() const {
    for (double v : t)
        if (v != 0.0) return false;
    return true;
}

double Bilinear::max_abs() const {
    double m = 0.0;
    for (double v : t) m = std::max(m, std::abs(v));
    return m;
}

Vec apply_bilinear(const Bilinear& T, const Vec& u, const Vec& v) {
    if (u.size() != T.left || v.size() != T.right)
        throw std::invalid_argument("apply_bilinear: shape mismatch");
    Vec out = Vec::Zero(T.out);
    const double* p = T.t.data();
    for (int i = 0; i < T.out; ++i) {
        double acc = 0.0;
        for (int a = 0; a < T.left; ++a) {
            const double ua = u[a];
            if (ua != 0.0) {
                double inner = 0.0;
                for (int b = 0; b < T.right; ++b)
                    inner += p[b] * v[b];
                acc += ua * inner;
            }
            p += T.right;
        }
        out[i] = acc;
    }
    return out;
}

Bilinear symmetrize_in_last_two(const Bilinear& T) {
    if (T.left != T.right)
        throw std::invalid_argument("symmetrize_in_last_two: inner shape not square");
    Bilinear out(T.out, T.left, T.right);
    for (int i = 0; i < T.out; ++i)
        for (int a = 0; a < T.left; ++a)
            for (int b = 0; b < T.right; ++b)
                out.at(i, a, b) = 0.5 * (T.at(i, a, b) + T.at(i, b, a));
    return out;
}

Mat transpose(const Mat& L) { return L.transpose(); }

Mat contract_left(const Bilinear& T, const Vec& x) {
    if (x.size() != T.left)
        throw std::invalid_argument("contract_left: shape mismatch");
    Mat out = Mat::Zero(T.out, T.right);
    for (int i = 0; i < T.out; ++i)
        for (int a = 0; a < T.left; ++a) {
            const double xa = x[a];
            if (xa == 0.0) continue;
            for (int b = 0; b < T.right; ++b)
                out(i, b) += T.at(i, a, b) * xa;
        }
    return out;
}

} // namespace slowfast
