#include "slowfast/integrators.hpp"

#include <cmath>
#include <stdexcept>

namespace slowfast {

namespace {

void check_noise_matches(const NoisePath& noise, const ExperimentConfig& cfg,
                         int M) {
    if (noise.M != M)
        throw std::invalid_argument("simulate: noise/model mode count mismatch");
    if (std::abs(noise.epsilon - cfg.epsilon) > 1e-12)
        throw std::invalid_argument("simulate: noise path and config epsilon differ");
    if (noise.h > cfg.substep_c * cfg.epsilon * cfg.epsilon * (1.0 + 1e-9))
        throw std::invalid_argument("simulate: noise grid violates the substep rule");
}

void check_stride(long N, long stride) {
    if (stride < 1 || N % stride != 0)
        throw std::invalid_argument("simulate: output stride must divide the substep count");
}

} // namespace

double ExperimentConfig::macro_dt(double eps) const {
    const double dt = macro_step > 0.0 ? macro_step : std::pow(eps, 4.0 / 3.0);
    return std::min(dt, T);
}

double ExperimentConfig::stop_radius() const {
    return radius > 0.0 ? radius : 10.0 * (1.0 + x0.norm());
}

void ExperimentConfig::validate() const {
    if (!(T > 0.0)) throw std::invalid_argument("ExperimentConfig: T must be positive");
    if (x0.size() == 0) throw std::invalid_argument("ExperimentConfig: x0 is required");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("ExperimentConfig: epsilon must be in (0, 1)");
    if (!(substep_c > 0.0))
        throw std::invalid_argument("ExperimentConfig: substep constant must be positive");
    if (!(stop_radius() > x0.norm()))
        throw std::invalid_argument("ExperimentConfig: radius must exceed |x0|");
}

double PathD::sup_norm() const {
    double s = 0.0;
    for (const Vec& v : x) s = std::max(s, v.norm());
    return s;
}

double sup_distance(const PathD& a, const PathD& b) {
    const std::size_t n = std::min(a.t.size(), b.t.size());
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(a.t[k] - b.t[k]) > 1e-9)
            throw std::invalid_argument("sup_distance: paths sampled on different grids");
        s = std::max(s, (a.x[k] - b.x[k]).norm());
    }
    return s;
}

long substeps_per_macro(double delta, double c, double eps) {
    const long need =
        std::max<long>(1, static_cast<long>(std::ceil(delta / (c * eps * eps) - 1e-9)));
    long p = 1;
    while (p < need) p <<= 1;
    return p;
}

PathD simulate_fast_slow(const AbstractModel& model, const ExperimentConfig& cfg,
                         const NoisePath& noise, long out_stride) {
    cfg.validate();
    check_noise_matches(noise, cfg, model.space.M);
    check_stride(noise.N, out_stride);
    if (cfg.x0.size() != model.space.d)
        throw std::invalid_argument("simulate_fast_slow: x0 dimension mismatch");

    const double h = noise.h;
    const double eps = cfg.epsilon;
    const double rmax = cfg.stop_radius() + 1.0;
    const bool has_beta = !model.beta.is_zero();
    const int M = model.space.M;

    PathD out;
    out.t.reserve(noise.N / out_stride + 1);
    out.x.reserve(noise.N / out_stride + 1);
    out.t.push_back(0.0);
    out.x.push_back(cfg.x0);

    Vec x = cfg.x0;
    Vec iy(M), y(M);
    for (long n = 0; n < noise.N; ++n) {
        const double t = noise.t(n);
        for (int m = 0; m < M; ++m) {
            iy[m] = noise.iy(m, n);
            y[m] = noise.y(m, n);
        }
        Vec xn = x + h * model.F(t, x) + model.sigma(t, x) * iy;
        if (has_beta) xn += (h * eps) * apply_bilinear(model.beta, y, y);
        if (!(xn.norm() < rmax)) {
            out.stopped = true;
            out.stop_time = noise.t(n + 1);
            return out;
        }
        x = std::move(xn);
        if ((n + 1) % out_stride == 0) {
            out.t.push_back(noise.t(n + 1));
            out.x.push_back(x);
        }
    }
    return out;
}

PathD simulate_tilde(const AbstractModel& lowered, const ExperimentConfig& cfg,
                     const NoisePath& noise, long out_stride) {
    return simulate_fast_slow(lowered, cfg, noise, out_stride);
}

std::pair<PathD, FastSummary> simulate_coupled_climate(const ClimateModel& cm,
                                                       const ExperimentConfig& cfg,
                                                       const NoisePath& noise,
                                                       long out_stride) {
    cfg.validate();
    check_noise_matches(noise, cfg, cm.space.M);
    check_stride(noise.N, out_stride);
    if (cfg.x0.size() != cm.space.d)
        throw std::invalid_argument("simulate_coupled_climate: x0 dimension mismatch");
    const ClimateValidation v = validate_climate(cm);
    if (!v.pass)
        throw std::invalid_argument(
            "simulate_coupled_climate: structural validation failed: " + v.summary());

    const double h = noise.h;
    const double eps = cfg.epsilon;
    const double e2 = eps * eps;
    const double a = std::exp(-h / e2);
    const double one_m_a = -std::expm1(-h / e2);
    const double rmax = cfg.stop_radius() + 1.0;
    const bool has_beta = !cm.B122.is_zero();
    const int M = cm.space.M;

    PathD out;
    out.t.push_back(0.0);
    out.x.push_back(cfg.x0);

    Vec x = cfg.x0;
    Vec y = noise.y_at(0); // the path's stationary initial
    FastSummary fast;
    fast.sup_norm = y.norm();

    for (long n = 0; n < noise.N; ++n) {
        const double t = noise.t(n);
        Vec xn = x + h * (cm.F1(t) + cm.A11 * x + apply_bilinear(cm.B111, x, x) +
                          cm.A12 * y + apply_bilinear(cm.B112, x, y));
        if (has_beta) xn += (h * eps) * apply_bilinear(cm.B122, y, y);

        // exponential-Euler for the fast variable: exact decay and exact
        // stochastic convolution (recovered from the pure-OU path), the slow
        // feedback integrated with X frozen at t_n
        const Vec feedback = cm.A21 * x + apply_bilinear(cm.B211, x, x);
        Vec yn(M);
        for (int m = 0; m < M; ++m) {
            const double conv = noise.y(m, n + 1) - a * noise.y(m, n);
            yn[m] = a * y[m] + one_m_a * feedback[m] + conv;
        }

        if (!(xn.norm() < rmax)) {
            out.stopped = true;
            out.stop_time = noise.t(n + 1);
            fast.y_final = y;
            return {out, fast};
        }
        x = std::move(xn);
        y = std::move(yn);
        fast.sup_norm = std::max(fast.sup_norm, y.norm());
        if ((n + 1) % out_stride == 0) {
            out.t.push_back(noise.t(n + 1));
            out.x.push_back(x);
        }
    }
    fast.y_final = y;
    return {out, fast};
}

PathD simulate_reduced(const ReducedModel& rm, const ExperimentConfig& cfg,
                       const MacroNoise& macro, RngStream& extra) {
    cfg.validate();
    if (macro.M != rm.space.M)
        throw std::invalid_argument("simulate_reduced: noise/model mode count mismatch");
    if (cfg.x0.size() != rm.space.d)
        throw std::invalid_argument("simulate_reduced: x0 dimension mismatch");

    const double h = macro.h;
    const double sqh = std::sqrt(h);
    const double rmax = cfg.stop_radius() + 1.0;
    const bool has_extra = rm.has_extra_noise();
    const int d = rm.space.d;

    PathD out;
    out.t.reserve(macro.K + 1);
    out.x.reserve(macro.K + 1);
    out.t.push_back(0.0);
    out.x.push_back(cfg.x0);

    Vec x = cfg.x0;
    Vec dw(macro.M), xi(d);
    for (long k = 0; k < macro.K; ++k) {
        const double t = h * static_cast<double>(k);
        for (int m = 0; m < macro.M; ++m) dw[m] = macro.dw(m, k);
        Vec xn = x + h * rm.drift(t, x) + rm.sigma(t, x) * dw;
        if (has_extra) {
            for (int i = 0; i < d; ++i) xi[i] = extra.normal();
            xn += sqh * (rm.extra_chol * xi);
        }
        if (!(xn.norm() < rmax)) {
            out.stopped = true;
            out.stop_time = h * static_cast<double>(k + 1);
            return out;
        }
        x = std::move(xn);
        out.t.push_back(h * static_cast<double>(k + 1));
        out.x.push_back(x);
    }
    return out;
}

Vec quadratic_drift_increment(const AbstractModel& model, const NoisePath& noise,
                              long n0, long n1) {
    Vec acc = Vec::Zero(model.space.d);
    if (model.beta.is_zero() || n1 <= n0) return acc;
    const int M = model.space.M;
    Vec y(M);
    for (long n = n0; n <= n1; ++n) {
        for (int m = 0; m < M; ++m) y[m] = noise.y(m, n);
        const double w = (n == n0 || n == n1) ? 0.5 : 1.0;
        acc += w * apply_bilinear(model.beta, y, y);
    }
    return (noise.epsilon * noise.h) * acc;
}

PathD simulate_hat(const ReducedModel& rm, const AbstractModel& model,
                   const ExperimentConfig& cfg, const NoisePath& noise,
                   long macro_factor) {
    cfg.validate();
    check_noise_matches(noise, cfg, model.space.M);
    check_stride(noise.N, macro_factor);
    if (cfg.x0.size() != rm.space.d)
        throw std::invalid_argument("simulate_hat: x0 dimension mismatch");

    const long K = noise.N / macro_factor;
    const double h = noise.h * static_cast<double>(macro_factor);
    const double rmax = cfg.stop_radius() + 1.0;

    PathD out;
    out.t.push_back(0.0);
    out.x.push_back(cfg.x0);

    Vec x = cfg.x0;
    Vec dw(noise.M);
    for (long k = 0; k < K; ++k) {
        const double t = h * static_cast<double>(k);
        for (int m = 0; m < noise.M; ++m) {
            double acc = 0.0;
            for (long j = 0; j < macro_factor; ++j)
                acc += noise.dw(m, k * macro_factor + j);
            dw[m] = acc;
        }
        Vec xn = x + h * rm.drift(t, x) + rm.sigma(t, x) * dw +
                 quadratic_drift_increment(model, noise, k * macro_factor,
                                           (k + 1) * macro_factor);
        if (!(xn.norm() < rmax)) {
            out.stopped = true;
            out.stop_time = h * static_cast<double>(k + 1);
            return out;
        }
        x = std::move(xn);
        out.t.push_back(h * static_cast<double>(k + 1));
        out.x.push_back(x);
    }
    return out;
}

} // namespace slowfast
