#include "slowfast/noise.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace slowfast {

namespace {

// one-step transition constants over step h at scale eps; every (1 - e^-x)
// goes through expm1 so small h/eps^2 does not lose digits
struct StepConsts {
    double a;        // e^{-h/eps^2}
    double one_m_a;  // 1 - a
    double reg;      // regression of conv on dW: (1 - a)/h
    double vr;       // residual variance per unit q (Schur complement)
};

StepConsts step_consts(double h, double eps) {
    const double x = h / (eps * eps);
    StepConsts s;
    s.a = std::exp(-x);
    s.one_m_a = -std::expm1(-x);
    const double one_m_a2 = -std::expm1(-2.0 * x);
    s.reg = s.one_m_a / h;
    s.vr = one_m_a2 / (2.0 * eps * eps) - s.one_m_a * s.one_m_a / h;
    if (s.vr < 0.0) s.vr = 0.0; // analytic value is >= 0; rounding guard
    return s;
}

void check_positive(double v, const char* what) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

void write_double(std::ostream& os, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    os.write(buf, res.ptr - buf);
}

} // namespace

void OUParams::validate() const {
    space.validate();
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("OUParams: epsilon must be in (0, 1)");
}

Vec NoisePath::y_at(long n) const {
    Vec out(M);
    for (int m = 0; m < M; ++m) out[m] = y(m, n);
    return out;
}

double NoisePath::max_identity_residual() const {
    const double e2 = epsilon * epsilon;
    double worst = 0.0;
    for (int m = 0; m < M; ++m)
        for (long n = 0; n < N; ++n) {
            const double r = iy(m, n) - (dw(m, n) - e2 * (y(m, n + 1) - y(m, n)));
            worst = std::max(worst, std::abs(r));
        }
    return worst;
}

Vec sample_stationary_initial(const OUParams& params, RngStream& rng) {
    params.validate();
    const int M = params.space.M;
    Vec y(M);
    for (int m = 0; m < M; ++m)
        y[m] = rng.normal(std::sqrt(params.space.q[m] / (2.0 * params.epsilon * params.epsilon)));
    return y;
}

void step_joint(const OUParams& params, const Vec& y_prev, double h,
                RngStream& rng, Vec& dw_out, Vec& y_next_out) {
    check_positive(h, "step_joint: h");
    const int M = params.space.M;
    if (y_prev.size() != M)
        throw std::invalid_argument("step_joint: y_prev shape mismatch");
    const StepConsts s = step_consts(h, params.epsilon);
    dw_out.resize(M);
    y_next_out.resize(M);
    for (int m = 0; m < M; ++m) {
        const double q = params.space.q[m];
        const double dw = rng.normal(std::sqrt(q * h));
        const double conv = s.reg * dw + rng.normal(std::sqrt(q * s.vr));
        dw_out[m] = dw;
        y_next_out[m] = s.a * y_prev[m] + conv;
    }
}

NoisePath build_path(const OUParams& params, double T, double c,
                     RngStream& rng, long steps) {
    params.validate();
    check_positive(T, "build_path: T");
    check_positive(c, "build_path: substep constant");
    const double eps = params.epsilon;
    const double hmax = c * eps * eps;
    long N = steps > 0 ? steps : static_cast<long>(std::ceil(T / hmax));
    if (N < 1) N = 1;
    const double h = T / static_cast<double>(N);
    if (h > hmax * (1.0 + 1e-9))
        throw std::invalid_argument("build_path: step count violates the substep rule");

    const int M = params.space.M;
    NoisePath path;
    path.epsilon = eps;
    path.q = params.space.q;
    path.M = M;
    path.N = N;
    path.h = h;
    path.dW.resize(static_cast<std::size_t>(M) * N);
    path.IY.resize(static_cast<std::size_t>(M) * N);
    path.Y.resize(static_cast<std::size_t>(M) * (N + 1));

    const double e2 = eps * eps;
    const StepConsts s = step_consts(h, eps);
    for (int m = 0; m < M; ++m)
        path.Y[static_cast<std::size_t>(m) * (N + 1)] =
            rng.normal(std::sqrt(params.space.q[m] / (2.0 * e2)));

    for (long n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m) {
            const double q = params.space.q[m];
            const std::size_t yi = static_cast<std::size_t>(m) * (N + 1) + n;
            const double y_prev = path.Y[yi];
            const double dw = rng.normal(std::sqrt(q * h));
            const double conv = s.reg * dw + rng.normal(std::sqrt(q * s.vr));
            const double y_next = s.a * y_prev + conv;
            path.Y[yi + 1] = y_next;
            path.dW[static_cast<std::size_t>(m) * N + n] = dw;
            path.IY[static_cast<std::size_t>(m) * N + n] = dw - e2 * (y_next - y_prev);
        }
    return path;
}

NoisePath rescale_to_shared_grid(const NoisePath& fine, double eps_coarse,
                                 long factor, RngStream& rng) {
    if (factor < 1 || fine.N % factor != 0)
        throw std::invalid_argument("rescale_to_shared_grid: incompatible grids");
    if (!(eps_coarse > 0.0 && eps_coarse < 1.0))
        throw std::invalid_argument("rescale_to_shared_grid: epsilon out of range");

    const int M = fine.M;
    const long N = fine.N / factor;
    const double h = fine.h * static_cast<double>(factor);
    const double e2 = eps_coarse * eps_coarse;

    NoisePath path;
    path.epsilon = eps_coarse;
    path.q = fine.q;
    path.M = M;
    path.N = N;
    path.h = h;
    path.dW.resize(static_cast<std::size_t>(M) * N);
    path.IY.resize(static_cast<std::size_t>(M) * N);
    path.Y.resize(static_cast<std::size_t>(M) * (N + 1));

    // exact aggregation of the shared Wiener increments
    for (int m = 0; m < M; ++m)
        for (long k = 0; k < N; ++k) {
            double acc = 0.0;
            for (long j = 0; j < factor; ++j)
                acc += fine.dw(m, k * factor + j);
            path.dW[static_cast<std::size_t>(m) * N + k] = acc;
        }

    // fresh stationary initial at the coarser scale, then the convolution is
    // sampled conditionally on each aggregated increment
    for (int m = 0; m < M; ++m)
        path.Y[static_cast<std::size_t>(m) * (N + 1)] =
            rng.normal(std::sqrt(fine.q[m] / (2.0 * e2)));

    const StepConsts s = step_consts(h, eps_coarse);
    for (long k = 0; k < N; ++k)
        for (int m = 0; m < M; ++m) {
            const double q = fine.q[m];
            const std::size_t yi = static_cast<std::size_t>(m) * (N + 1) + k;
            const double y_prev = path.Y[yi];
            const double dw = path.dW[static_cast<std::size_t>(m) * N + k];
            const double conv = s.reg * dw + rng.normal(std::sqrt(q * s.vr));
            const double y_next = s.a * y_prev + conv;
            path.Y[yi + 1] = y_next;
            path.IY[static_cast<std::size_t>(m) * N + k] = dw - e2 * (y_next - y_prev);
        }
    return path;
}

Vec MacroNoise::dw_at(long k) const {
    Vec out(M);
    for (int m = 0; m < M; ++m) out[m] = dw(m, k);
    return out;
}

MacroNoise aggregate_increments(const NoisePath& path, long factor) {
    if (factor < 1 || path.N % factor != 0)
        throw std::invalid_argument("aggregate_increments: incompatible grids");
    MacroNoise macro;
    macro.q = path.q;
    macro.M = path.M;
    macro.K = path.N / factor;
    macro.h = path.h * static_cast<double>(factor);
    macro.dW.resize(static_cast<std::size_t>(macro.M) * macro.K);
    for (int m = 0; m < macro.M; ++m)
        for (long k = 0; k < macro.K; ++k) {
            double acc = 0.0;
            for (long j = 0; j < factor; ++j)
                acc += path.dw(m, k * factor + j);
            macro.dW[static_cast<std::size_t>(m) * macro.K + k] = acc;
        }
    return macro;
}

MacroNoise sample_wiener(const SpaceSpec& space, double T, long steps, RngStream& rng) {
    space.validate();
    check_positive(T, "sample_wiener: T");
    if (steps < 1) throw std::invalid_argument("sample_wiener: steps must be >= 1");
    MacroNoise macro;
    macro.q = space.q;
    macro.M = space.M;
    macro.K = steps;
    macro.h = T / static_cast<double>(steps);
    macro.dW.resize(static_cast<std::size_t>(macro.M) * macro.K);
    for (long k = 0; k < macro.K; ++k)
        for (int m = 0; m < macro.M; ++m)
            macro.dW[static_cast<std::size_t>(m) * macro.K + k] =
                rng.normal(std::sqrt(space.q[m] * macro.h));
    return macro;
}

OUPair sample_stationary_pair(const SpaceSpec& space, double eps_a, double eps_b,
                              RngStream& rng) {
    space.validate();
    OUPair pair;
    pair.eps_a = eps_a;
    pair.eps_b = eps_b;
    pair.ya.resize(space.M);
    pair.yb.resize(space.M);
    const double va_unit = 1.0 / (2.0 * eps_a * eps_a);
    const double vb_unit = 1.0 / (2.0 * eps_b * eps_b);
    const double cov_unit = 1.0 / (eps_a * eps_a + eps_b * eps_b);
    for (int m = 0; m < space.M; ++m) {
        const double q = space.q[m];
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        if (q == 0.0) {
            pair.ya[m] = pair.yb[m] = 0.0;
            continue;
        }
        const double va = q * va_unit, vb = q * vb_unit, cab = q * cov_unit;
        const double l11 = std::sqrt(va);
        pair.ya[m] = l11 * z1;
        if (eps_a == eps_b) { // fully correlated: identical processes, exactly
            pair.yb[m] = pair.ya[m];
            continue;
        }
        const double l21 = cab / l11;
        const double l22 = std::sqrt(std::max(0.0, vb - l21 * l21));
        pair.yb[m] = l21 * z1 + l22 * z2;
    }
    return pair;
}

void step_joint_pair(const SpaceSpec& space, OUPair& pair, double h,
                     RngStream& rng, Vec& dw_out) {
    check_positive(h, "step_joint_pair: h");
    const double ea2 = pair.eps_a * pair.eps_a;
    const double eb2 = pair.eps_b * pair.eps_b;
    const StepConsts sa = step_consts(h, pair.eps_a);
    const StepConsts sb = step_consts(h, pair.eps_b);
    // cross-covariance of the two convolutions per unit q
    const double kappa = 1.0 / ea2 + 1.0 / eb2;
    const double cross_unit = -std::expm1(-h * kappa) / (ea2 * eb2 * kappa);
    const double s_ab_unit = cross_unit - sa.one_m_a * sb.one_m_a / h;

    dw_out.resize(space.M);
    for (int m = 0; m < space.M; ++m) {
        const double q = space.q[m];
        const double z0 = rng.normal();
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        if (q == 0.0) {
            dw_out[m] = 0.0;
            pair.ya[m] *= sa.a;
            pair.yb[m] *= sb.a;
            continue;
        }
        const double dw = std::sqrt(q * h) * z0;
        // residual covariance given dW (Schur complement), then its Cholesky
        const double s_aa = q * sa.vr;
        const double s_bb = q * sb.vr;
        const double s_ab = q * s_ab_unit;
        double ra, rb;
        if (pair.eps_a == pair.eps_b) { // degenerate pair: identical residuals
            ra = rb = std::sqrt(std::max(0.0, s_aa)) * z1;
        } else if (s_aa > 0.0) {
            const double l11 = std::sqrt(s_aa);
            const double l21 = s_ab / l11;
            const double l22 = std::sqrt(std::max(0.0, s_bb - l21 * l21));
            ra = l11 * z1;
            rb = l21 * z1 + l22 * z2;
        } else {
            ra = 0.0;
            rb = std::sqrt(std::max(0.0, s_bb)) * z1;
        }
        const double conv_a = sa.reg * dw + ra;
        const double conv_b = sb.reg * dw + rb;
        dw_out[m] = dw;
        pair.ya[m] = sa.a * pair.ya[m] + conv_a;
        pair.yb[m] = sb.a * pair.yb[m] + conv_b;
    }
}

void dump_csv(const NoisePath& path, std::ostream& os) {
    os << "t,m,Y,dW,IY\n";
    for (long n = 0; n <= path.N; ++n)
        for (int m = 0; m < path.M; ++m) {
            write_double(os, path.t(n));
            os << ',' << m << ',';
            write_double(os, path.y(m, n));
            os << ',';
            if (n < path.N) {
                write_double(os, path.dw(m, n));
                os << ',';
                write_double(os, path.iy(m, n));
            } else {
                os << ',';
            }
            os << '\n';
        }
}

} // namespace slowfast
