#include "slowfast/integrators.hpp"

#include "slowfast/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace slowfast;

namespace {

ClimateModel blank_climate() {
    ClimateModel cm;
    cm.space = SpaceSpec{2, 3, Vec{{1.0, 0.5, 0.25}}};
    cm.F1 = [](double) -> Vec { return Vec::Zero(2); };
    cm.A11 = Mat::Zero(2, 2);
    cm.A12 = Mat::Zero(2, 3);
    cm.A21 = Mat::Zero(3, 2);
    cm.B111 = Bilinear(2, 2, 2);
    cm.B112 = Bilinear(2, 2, 3);
    cm.B122 = Bilinear(2, 3, 3);
    cm.B211 = Bilinear(3, 2, 2);
    return cm;
}

AbstractModel zero_model(int d, int M) {
    SpaceSpec space{d, M, Vec::Ones(M)};
    DriftFn F = [d](double, const Vec&) -> Vec { return Vec::Zero(d); };
    SigmaFn sigma = [d, M](double, const Vec&) -> Mat { return Mat::Zero(d, M); };
    return make_abstract_model(space, F, sigma, Bilinear(d, M, M));
}

ExperimentConfig base_config(double T, Vec x0, double eps) {
    ExperimentConfig cfg;
    cfg.T = T;
    cfg.x0 = std::move(x0);
    cfg.epsilon = eps;
    return cfg;
}

} // namespace

TEST_CASE("experiment config: defaults and validation") {
    ExperimentConfig cfg = base_config(1.0, Vec{{1.0, 2.0}}, 0.1);
    CHECK(cfg.macro_dt(0.1) == doctest::Approx(std::pow(0.1, 4.0 / 3.0)));
    CHECK(cfg.macro_dt(0.99) == doctest::Approx(std::min(std::pow(0.99, 4.0 / 3.0), 1.0)));
    cfg.macro_step = 0.25;
    CHECK(cfg.macro_dt(0.1) == 0.25);
    CHECK(cfg.stop_radius() == doctest::Approx(10.0 * (1.0 + std::sqrt(5.0))));
    cfg.radius = 7.0;
    CHECK(cfg.stop_radius() == 7.0);
    CHECK_NOTHROW(cfg.validate());

    ExperimentConfig bad = cfg;
    bad.T = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.x0 = Vec(0);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.epsilon = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.substep_c = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.radius = 1.0; // below |x0|
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("substeps_per_macro: nested power-of-two grids") {
    const double c = 0.1, eps = 0.2;
    const double hmax = c * eps * eps;
    for (double delta : {0.5 * hmax, hmax, 3.7 * hmax, 4.0 * hmax, 5.0 * hmax, 100.0 * hmax}) {
        const long p = substeps_per_macro(delta, c, eps);
        CHECK((p & (p - 1)) == 0); // power of two
        CHECK(delta / static_cast<double>(p) <= hmax * (1.0 + 1e-9));
        if (p > 1) // minimal: half the count would violate the substep rule
            CHECK(delta / static_cast<double>(p / 2) > hmax * (1.0 - 1e-9));
    }
    CHECK(substeps_per_macro(4.0 * hmax, c, eps) == 4);
    CHECK(substeps_per_macro(5.0 * hmax, c, eps) == 8);
    CHECK(substeps_per_macro(0.01 * hmax, c, eps) == 1);
}

TEST_CASE("sup_distance demands a shared grid") {
    PathD a, b;
    a.t = {0.0, 0.1, 0.2};
    a.x = {Vec{{0.0}}, Vec{{1.0}}, Vec{{2.0}}};
    b.t = {0.0, 0.1};
    b.x = {Vec{{0.5}}, Vec{{2.5}}};
    CHECK(sup_distance(a, b) == doctest::Approx(1.5)); // shorter path wins
    CHECK(a.sup_norm() == 2.0);
    PathD c = b;
    c.t[1] = 0.11;
    CHECK_THROWS_AS(sup_distance(a, c), std::invalid_argument);
}

TEST_CASE("fast-slow integrator: frozen state, output stride, input checks") {
    AbstractModel model = zero_model(2, 3);
    ExperimentConfig cfg = base_config(0.2, Vec{{0.5, -1.0}}, 0.2);
    OUParams params{cfg.epsilon, model.space};
    RngStream rng(11, 3);
    NoisePath noise = build_path(params, cfg.T, cfg.substep_c, rng, 64);

    PathD path = simulate_fast_slow(model, cfg, noise);
    CHECK(path.t.size() == 65);
    CHECK_FALSE(path.stopped);
    for (const Vec& v : path.x) CHECK((v - cfg.x0).norm() == 0.0);

    // strided output samples the same trajectory at coarser nodes
    PathD strided = simulate_fast_slow(model, cfg, noise, 4);
    CHECK(strided.t.size() == 17);
    for (std::size_t k = 0; k < strided.t.size(); ++k) {
        CHECK(strided.t[k] == doctest::Approx(path.t[4 * k]).epsilon(1e-15));
        CHECK((strided.x[k] - path.x[4 * k]).norm() == 0.0);
    }

    CHECK_THROWS_AS(simulate_fast_slow(model, cfg, noise, 7), std::invalid_argument);
    ExperimentConfig bad = cfg;
    bad.x0 = Vec::Ones(3);
    CHECK_THROWS_AS(simulate_fast_slow(model, bad, noise), std::invalid_argument);
    bad = cfg;
    bad.epsilon = 0.21;
    CHECK_THROWS_AS(simulate_fast_slow(model, bad, noise), std::invalid_argument);
    bad = cfg;
    bad.substep_c = 0.01; // noise grid too coarse for this rule
    CHECK_THROWS_AS(simulate_fast_slow(model, bad, noise), std::invalid_argument);
    AbstractModel narrow = zero_model(2, 2);
    CHECK_THROWS_AS(simulate_fast_slow(narrow, cfg, noise), std::invalid_argument);
}

TEST_CASE("fast-slow integrator: additive noise is integrated exactly") {
    // constant sigma, no drift: X_T - x0 = sigma (W_T - eps^2 (Y_T - Y_0))
    // by telescoping the exact per-step integral of Y
    Fixture ou = builtin_fixture("ou_only");
    ExperimentConfig cfg = base_config(0.5, Vec{{0.3, -0.2}}, 0.25);
    OUParams params{cfg.epsilon, ou.model.space};
    RngStream rng(21, 9);
    NoisePath noise = build_path(params, cfg.T, cfg.substep_c, rng);

    PathD path = simulate_fast_slow(ou.model, cfg, noise);
    REQUIRE_FALSE(path.stopped);
    const double e2 = cfg.epsilon * cfg.epsilon;
    const Mat s = ou.model.sigma(0.0, cfg.x0);
    Vec w = Vec::Zero(3);
    for (int m = 0; m < 3; ++m)
        for (long n = 0; n < noise.N; ++n) w[m] += noise.dw(m, n);
    const Vec dy = noise.y_at(noise.N) - noise.y_at(0);
    const Vec expected = cfg.x0 + s * (w - e2 * dy);
    CHECK((path.final_value() - expected).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("fast-slow integrator: first-order convergence on a linear drift") {
    // F = -x with sigma = 0: deterministic Euler against x0 e^{-T}
    SpaceSpec space{1, 1, Vec::Ones(1)};
    DriftFn F = [](double, const Vec& x) -> Vec { return -x; };
    SigmaFn sigma = [](double, const Vec&) -> Mat { return Mat::Zero(1, 1); };
    AbstractModel model = make_abstract_model(space, F, sigma, Bilinear(1, 1, 1));
    ExperimentConfig cfg = base_config(1.0, Vec::Ones(1), 0.3);

    const double exact = std::exp(-1.0);
    double err[2];
    long steps = 512;
    for (int k = 0; k < 2; ++k, steps *= 2) {
        RngStream rng(4, static_cast<std::uint64_t>(k));
        NoisePath noise = build_path(OUParams{0.3, space}, cfg.T, 0.1, rng, steps);
        PathD path = simulate_fast_slow(model, cfg, noise);
        err[k] = std::abs(path.final_value()[0] - exact);
    }
    const double ratio = err[0] / err[1];
    CHECK(ratio >= 1.9);
    CHECK(ratio <= 2.1);
}

TEST_CASE("fast-slow integrator: explosion guard stops without emitting") {
    SpaceSpec space{1, 1, Vec::Ones(1)};
    DriftFn F = [](double, const Vec&) -> Vec { return Vec::Constant(1, 100.0); };
    SigmaFn sigma = [](double, const Vec&) -> Mat { return Mat::Zero(1, 1); };
    AbstractModel model = make_abstract_model(space, F, sigma, Bilinear(1, 1, 1));
    ExperimentConfig cfg = base_config(1.0, Vec::Zero(1), 0.3);
    cfg.radius = 2.0;

    RngStream rng(5, 5);
    NoisePath noise = build_path(OUParams{0.3, space}, cfg.T, 0.1, rng);
    PathD path = simulate_fast_slow(model, cfg, noise);
    CHECK(path.stopped);
    CHECK(path.stop_time > 0.0);
    CHECK(path.stop_time <= cfg.T + 1e-12);
    for (const Vec& v : path.x) CHECK(v.norm() <= cfg.radius + 1.0);
}

TEST_CASE("coupled climate: decoupled fast variable reproduces the driving path") {
    ClimateModel cm = blank_climate();
    ExperimentConfig cfg = base_config(0.3, Vec{{0.4, 0.1}}, 0.3);
    OUParams params{cfg.epsilon, cm.space};
    RngStream rng(66, 2);
    NoisePath noise = build_path(params, cfg.T, cfg.substep_c, rng);

    auto [path, fast] = simulate_coupled_climate(cm, cfg, noise);
    REQUIRE_FALSE(path.stopped);
    for (const Vec& v : path.x) CHECK((v - cfg.x0).norm() == 0.0);
    CHECK((fast.y_final - noise.y_at(noise.N)).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(fast.sup_norm >= noise.y_at(0).norm());

    // with a quadratic fast-fast term but no feedback, the coupled slow path
    // matches the abstract integrator driven by the same noise
    ClimateModel quad = blank_climate();
    quad.F1 = [](double t) -> Vec { return Vec{{0.1 * std::cos(t), -0.05}}; };
    quad.A11 = Mat{{-0.4, 0.1}, {-0.1, -0.3}};
    quad.B111.at(0, 0, 1) = 0.3;
    quad.B111.at(1, 0, 0) = -0.3;
    quad.B122.at(0, 0, 1) = quad.B122.at(0, 1, 0) = 0.4;
    quad.B122.at(1, 1, 2) = quad.B122.at(1, 2, 1) = -0.25;
    auto [cpath, cfast] = simulate_coupled_climate(quad, cfg, noise);
    PathD apath = simulate_fast_slow(lower_climate(quad), cfg, noise);
    REQUIRE_FALSE(cpath.stopped);
    CHECK(sup_distance(cpath, apath) <= 1e-12);

    // structural breakage is refused
    ClimateModel broken = blank_climate();
    broken.A12(0, 0) = 1.0;
    CHECK_THROWS_AS(simulate_coupled_climate(broken, cfg, noise),
                    std::invalid_argument);
}

TEST_CASE("coupled climate and the lowered intermediate process draw together") {
    // the gap between the coupled quadratic system and the abstract process on
    // the same noise shrinks as the scales separate
    Fixture fx = builtin_fixture("linear_scatter");
    const int replicas = 200;
    std::vector<double> gaps;
    for (double eps : {0.3, 0.15}) {
        ExperimentConfig cfg = base_config(0.5, Vec{{0.4, -0.2}}, eps);
        std::vector<double> dist;
        for (int r = 0; r < replicas; ++r) {
            RngStream rng(909, compose_stream(0x70, gaps.size(),
                                              static_cast<std::uint64_t>(r), 0));
            NoisePath noise =
                build_path(OUParams{eps, fx.model.space}, cfg.T, cfg.substep_c, rng);
            auto [cpath, cfast] = simulate_coupled_climate(*fx.climate, cfg, noise);
            PathD tpath = simulate_tilde(fx.model, cfg, noise);
            if (cpath.stopped || tpath.stopped) continue;
            dist.push_back(sup_distance(cpath, tpath));
        }
        REQUIRE(dist.size() > replicas * 0.95);
        gaps.push_back(median_of(dist));
    }
    CHECK(gaps[1] < gaps[0]);
}

TEST_CASE("coupled climate: builtin fixtures stay inside the default radius") {
    Fixture fx = builtin_fixture("quadratic_offdiag");
    ExperimentConfig cfg = base_config(1.0, Vec{{0.4, -0.2}}, 0.3);
    int stopped = 0;
    for (int r = 0; r < 200; ++r) {
        RngStream rng(1212, static_cast<std::uint64_t>(r));
        NoisePath noise =
            build_path(OUParams{cfg.epsilon, fx.model.space}, cfg.T, cfg.substep_c, rng);
        auto [path, fast] = simulate_coupled_climate(*fx.climate, cfg, noise);
        if (path.stopped) ++stopped;
    }
    CHECK(stopped == 0);
}

TEST_CASE("reduced integrator: additive exactness, drift mean, guards") {
    // constant sigma, zero drift: Xbar_T = x0 + sigma W_T exactly
    Fixture ou = builtin_fixture("ou_only");
    ReducedModel rm = build_reduced(ou.model);
    ExperimentConfig cfg = base_config(1.0, Vec{{0.3, -0.2}}, 0.1);
    RngStream rw(3030, 1), extra(3030, 2);
    MacroNoise macro = sample_wiener(ou.model.space, cfg.T, 64, rw);
    PathD path = simulate_reduced(rm, cfg, macro, extra);
    REQUIRE_FALSE(path.stopped);
    Vec w = Vec::Zero(3);
    for (int m = 0; m < 3; ++m)
        for (long k = 0; k < macro.K; ++k) w[m] += macro.dw(m, k);
    const Vec expected = cfg.x0 + ou.model.sigma(0.0, cfg.x0) * w;
    CHECK((path.final_value() - expected).lpNorm<Eigen::Infinity>() <= 1e-12);

    // determinism: identical macro noise and extra stream id
    Fixture fq = builtin_fixture("quadratic_offdiag");
    ReducedModel rq = build_reduced(fq.model);
    ExperimentConfig cq = base_config(1.0, Vec{{0.4, -0.2}}, 0.1);
    RngStream w1(71, 1), e1(71, 2), e2(71, 2);
    MacroNoise mq = sample_wiener(fq.model.space, cq.T, 32, w1);
    PathD p1 = simulate_reduced(rq, cq, mq, e1);
    PathD p2 = simulate_reduced(rq, cq, mq, e2);
    CHECK(sup_distance(p1, p2) == 0.0);

    // mean of the Ornstein-Uhlenbeck-type limit: F = -x, constant sigma
    SpaceSpec space{1, 1, Vec::Ones(1)};
    DriftFn F = [](double, const Vec& x) -> Vec { return -x; };
    SigmaFn sigma = [](double, const Vec&) -> Mat { return Mat::Ones(1, 1); };
    AbstractModel lin = make_abstract_model(space, F, sigma, Bilinear(1, 1, 1));
    ReducedModel rl = build_reduced(lin);
    ExperimentConfig cl = base_config(1.0, Vec::Ones(1), 0.1);
    MeanVar acc;
    for (int r = 0; r < 4000; ++r) {
        RngStream rwr(515, 2 * static_cast<std::uint64_t>(r));
        RngStream rer(515, 2 * static_cast<std::uint64_t>(r) + 1);
        MacroNoise mw = sample_wiener(space, cl.T, 256, rwr);
        acc.add(simulate_reduced(rl, cl, mw, rer).final_value()[0]);
    }
    CHECK(std::abs(acc.mean - std::exp(-1.0)) <= 3.0 * acc.se());

    // shape guards
    ExperimentConfig bad = cfg;
    bad.x0 = Vec::Ones(3);
    RngStream e3(1, 1);
    CHECK_THROWS_AS(simulate_reduced(rm, bad, macro, e3), std::invalid_argument);
    MacroNoise narrow = sample_wiener(SpaceSpec{1, 1, Vec::Ones(1)}, 1.0, 8, e3);
    CHECK_THROWS_AS(simulate_reduced(rm, cfg, narrow, e3), std::invalid_argument);
}

TEST_CASE("hat integrator: quadrature of the quadratic term and the no-beta case") {
    // beta = 0: the auxiliary process IS the reduced one on the same increments
    Fixture lin = builtin_fixture("linear_scatter");
    ReducedModel rm = build_reduced(lin.model);
    ExperimentConfig cfg = base_config(0.2, Vec{{0.4, -0.2}}, 0.2);
    RngStream rng(77, 8), extra(77, 9);
    NoisePath noise =
        build_path(OUParams{cfg.epsilon, lin.model.space}, cfg.T, cfg.substep_c, rng, 64);
    PathD hat = simulate_hat(rm, lin.model, cfg, noise, 8);
    PathD red = simulate_reduced(rm, cfg, aggregate_increments(noise, 8), extra);
    CHECK(sup_distance(hat, red) == 0.0);

    // trapezoid accumulation over two substeps, checked by hand
    Fixture quad = builtin_fixture("quadratic_offdiag");
    const Vec y0 = noise.y_at(0), y1 = noise.y_at(1), y2 = noise.y_at(2);
    const Vec manual = (cfg.epsilon * noise.h) *
                       (0.5 * apply_bilinear(quad.model.beta, y0, y0) +
                        apply_bilinear(quad.model.beta, y1, y1) +
                        0.5 * apply_bilinear(quad.model.beta, y2, y2));
    const Vec inc = quadratic_drift_increment(quad.model, noise, 0, 2);
    CHECK((inc - manual).lpNorm<Eigen::Infinity>() <= 1e-14);

    // with beta != 0 the auxiliary process carries the extra drift
    ReducedModel rq = build_reduced(quad.model);
    PathD hatq = simulate_hat(rq, quad.model, cfg, noise, 8);
    RngStream extra2(77, 10);
    PathD redq = simulate_reduced(rq, cfg, aggregate_increments(noise, 8), extra2);
    CHECK(sup_distance(hatq, redq) > 0.0);
}

TEST_CASE("exact coupling identity for constant sigma and zero drift") {
    // on the macro grid: (X - Xbar)(t_k) = -sigma eps^2 (Y_{t_k} - Y_0) when
    // both are driven by the same Wiener increments
    Fixture ou = builtin_fixture("ou_only");
    ReducedModel rm = build_reduced(ou.model);
    ExperimentConfig cfg = base_config(0.5, Vec{{0.3, -0.2}}, 0.25);
    const long factor = 16;
    RngStream rng(88, 1), extra(88, 2);
    NoisePath noise =
        build_path(OUParams{cfg.epsilon, ou.model.space}, cfg.T, cfg.substep_c, rng, 256);
    PathD xeps = simulate_fast_slow(ou.model, cfg, noise, factor);
    PathD xbar = simulate_reduced(rm, cfg, aggregate_increments(noise, factor), extra);

    const double e2 = cfg.epsilon * cfg.epsilon;
    const Mat s = ou.model.sigma(0.0, cfg.x0);
    double worst = 0.0;
    for (std::size_t k = 0; k < xeps.t.size(); ++k) {
        const Vec dy = noise.y_at(static_cast<long>(k) * factor) - noise.y_at(0);
        const Vec resid = (xeps.x[k] - xbar.x[k]) + e2 * (s * dy);
        worst = std::max(worst, resid.lpNorm<Eigen::Infinity>());
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("sup of the quadratic fast term scales like epsilon") {
    // sup_t eps^3 |beta(Y_t, Y_t) - beta(Y_0, Y_0)| has second-moment root
    // of order eps; a signed-diagonal beta over 8 equal modes keeps the
    // extreme-value log factor inside the +/- 0.2 gate at these horizons
    const int M = 8;
    SpaceSpec space{1, M, Vec::Ones(M)};
    Bilinear beta(1, M, M);
    for (int m = 0; m < M; ++m) beta.at(0, m, m) = (m % 2 == 0) ? 1.0 : -1.0;

    const double T = 24.0, c = 0.25;
    const std::vector<double> ladder = {0.2, 0.1, 0.05, 0.025};
    const long reps[] = {300, 250, 160, 110};

    std::vector<double> log_eps, log_stat;
    for (std::size_t e = 0; e < ladder.size(); ++e) {
        const double eps = ladder[e];
        MeanVar acc;
        for (long r = 0; r < reps[e]; ++r) {
            RngStream rng(5151, compose_stream(0x78, e, static_cast<std::uint64_t>(r), 0));
            NoisePath path = build_path(OUParams{eps, space}, T, c, rng);
            double z0 = 0.0;
            for (int m = 0; m < M; ++m)
                z0 += beta.at(0, m, m) * path.y(m, 0) * path.y(m, 0);
            double peak = 0.0;
            for (long n = 1; n <= path.N; ++n) {
                double z = 0.0;
                for (int m = 0; m < M; ++m)
                    z += beta.at(0, m, m) * path.y(m, n) * path.y(m, n);
                peak = std::max(peak, std::abs(z - z0));
            }
            const double stat = eps * eps * eps * peak;
            acc.add(stat * stat);
        }
        log_eps.push_back(std::log(eps));
        log_stat.push_back(0.5 * std::log(acc.mean));
    }
    const double slope = ls_slope(log_eps, log_stat).first;
    CHECK(std::abs(slope - 1.0) <= 0.2);
}
