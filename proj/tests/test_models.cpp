#include "slowfast/models.hpp"

#include "slowfast/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace slowfast;

namespace {

Vec random_vec(int n, RngStream& rng) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

// empty climate system with consistent shapes (d = 2, M = 3)
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

} // namespace

TEST_CASE("zero-mean condition on the quadratic fast-fast term") {
    // zero-diagonal beta passes for any spectrum
    Bilinear offdiag(2, 3, 3);
    offdiag.at(0, 0, 1) = offdiag.at(0, 1, 0) = 0.4;
    offdiag.at(1, 1, 2) = offdiag.at(1, 2, 1) = -0.7;
    CHECK(validate_zero_mean(offdiag, Vec{{1.0, 0.5, 0.25}}).pass);

    // a single diagonal entry violates it
    Bilinear bad(1, 2, 2);
    bad.at(0, 0, 0) = 1.0;
    ZeroMeanResult res = validate_zero_mean(bad, Vec{{1.0, 1.0}});
    CHECK_FALSE(res.pass);
    CHECK(res.residual[0] == doctest::Approx(1.0));

    // diagonal entries (1, -2) against q = (2, 1): 1*2 + (-2)*1 = 0
    Bilinear cancel(1, 2, 2);
    cancel.at(0, 0, 0) = 1.0;
    cancel.at(0, 1, 1) = -2.0;
    ZeroMeanResult ok = validate_zero_mean(cancel, Vec{{2.0, 1.0}});
    CHECK(ok.pass);
    CHECK(std::abs(ok.residual[0]) <= 1e-12 * ok.scale);

    CHECK_THROWS_AS(validate_zero_mean(cancel, Vec::Ones(3)), std::invalid_argument);
}

TEST_CASE("climate validation: structural conditions and probes") {
    // all tensors zero: every condition holds trivially
    CHECK(validate_climate(blank_climate()).pass);

    // B111(u, v) = (u1 v2, -u1 v1) is skew in the last argument pair
    ClimateModel rot = blank_climate();
    rot.B111.at(0, 0, 1) = 1.0;
    rot.B111.at(1, 0, 0) = -1.0;
    CHECK(validate_climate(rot).pass);

    // B211 forced from a random B112 by the coupling condition
    ClimateModel coupled = blank_climate();
    RngStream rng(88, 1);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int m = 0; m < 3; ++m) coupled.B112.at(i, j, m) = rng.normal();
    for (int m = 0; m < 3; ++m)
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 2; ++i)
                coupled.B211.at(m, j, i) = -coupled.B112.at(i, j, m);
    CHECK(validate_climate(coupled).pass);

    // broken adjoint is caught
    ClimateModel bad_adjoint = blank_climate();
    bad_adjoint.A12(0, 0) = 1.0; // A21 left at zero
    ClimateValidation va = validate_climate(bad_adjoint);
    CHECK_FALSE(va.pass);
    CHECK(va.adjoint_residual > 1e-10);
    CHECK(va.summary().find("fail") == 0);

    // broken energy conservation in B111 is caught
    ClimateModel bad_skew = blank_climate();
    bad_skew.B111.at(0, 0, 0) = 1.0;
    ClimateValidation vs = validate_climate(bad_skew);
    CHECK_FALSE(vs.pass);
    CHECK(vs.skew_111_residual > 1e-10);

    // an unbalanced B112 (without its B211 partner) is caught
    ClimateModel bad_pair = blank_climate();
    bad_pair.B112.at(0, 0, 0) = 1.0;
    CHECK_FALSE(validate_climate(bad_pair).pass);
}

TEST_CASE("energy identities hold on the builtin climate fixtures") {
    for (const char* name : {"linear_scatter", "quadratic_offdiag"}) {
        Fixture fx = builtin_fixture(name);
        REQUIRE(fx.climate.has_value());
        RngStream rng(0xE4E2, 3);
        for (int probe = 0; probe < 200; ++probe) {
            const Vec x = random_vec(fx.climate->space.d, rng);
            const Eigen::Vector4d r = energy_identity_residuals(*fx.climate, x);
            for (int k = 0; k < 4; ++k) CHECK(std::abs(r[k]) <= 1e-10);
        }
    }
}

TEST_CASE("lower_climate: forcing-only and zero-input reductions") {
    ClimateModel cm = blank_climate();
    cm.F1 = [](double t) -> Vec { return Vec{{1.5, -0.5 + t}}; };
    AbstractModel lowered = lower_climate(cm);

    Vec x = Vec{{0.7, -1.2}};
    CHECK((lowered.F(0.3, x) - Vec{{1.5, -0.2}}).norm() <= 1e-15);
    CHECK(lowered.sigma(0.3, x).norm() == 0.0);
    CHECK(lowered.beta.t.empty() == false);
    for (double v : lowered.beta.t) CHECK(v == 0.0);

    // at x = 0 only the forcing survives even for a full model
    Fixture fx = builtin_fixture("quadratic_offdiag");
    Vec zero = Vec::Zero(2);
    const Vec f0 = fx.model.F(0.4, zero);
    const Vec forcing = fx.climate->F1(0.4);
    CHECK((f0 - forcing).norm() <= 1e-15);
}

TEST_CASE("lower_climate matches a term-by-term re-evaluation") {
    Fixture fx = builtin_fixture("quadratic_offdiag");
    const ClimateModel& cm = *fx.climate;
    const int d = cm.space.d, M = cm.space.M;

    RngStream rng(505, 9);
    for (int probe = 0; probe < 25; ++probe) {
        const double t = rng.uniform();
        const Vec x = random_vec(d, rng);

        // independent evaluation with raw index loops
        Vec g = Vec::Zero(M);
        for (int m = 0; m < M; ++m) {
            double acc = 0.0;
            for (int j = 0; j < d; ++j) acc += cm.A21(m, j) * x[j];
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) acc += cm.B211.at(m, a, b) * x[a] * x[b];
            g[m] = acc;
        }
        Vec f_direct = cm.F1(t);
        for (int i = 0; i < d; ++i) {
            double acc = 0.0;
            for (int j = 0; j < d; ++j) acc += cm.A11(i, j) * x[j];
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) acc += cm.B111.at(i, a, b) * x[a] * x[b];
            for (int m = 0; m < M; ++m) acc += cm.A12(i, m) * g[m];
            for (int j = 0; j < d; ++j)
                for (int m = 0; m < M; ++m) acc += cm.B112.at(i, j, m) * x[j] * g[m];
            f_direct[i] += acc;
        }
        const Vec f_lowered = fx.model.F(t, x);
        CHECK((f_lowered - f_direct).lpNorm<Eigen::Infinity>() <=
              1e-12 * (1.0 + f_direct.lpNorm<Eigen::Infinity>()));

        Mat s_direct(d, M);
        for (int i = 0; i < d; ++i)
            for (int m = 0; m < M; ++m) {
                double acc = cm.A12(i, m);
                for (int j = 0; j < d; ++j) acc += cm.B112.at(i, j, m) * x[j];
                s_direct(i, m) = acc;
            }
        CHECK((fx.model.sigma(t, x) - s_direct).lpNorm<Eigen::Infinity>() <= 1e-12);
    }

    // the lowering refuses structurally broken systems
    ClimateModel broken = blank_climate();
    broken.A12(0, 0) = 1.0;
    CHECK_THROWS_AS(lower_climate(broken), std::invalid_argument);
}

TEST_CASE("analytic dsigma agrees with finite differences") {
    // sigma with genuine x-dependence: sigma(i,m) built from products of x
    SpaceSpec space{2, 2, Vec{{1.0, 0.5}}};
    SigmaFn sigma = [](double, const Vec& x) -> Mat {
        Mat s(2, 2);
        s(0, 0) = x[0] * x[0];
        s(0, 1) = x[0] * x[1];
        s(1, 0) = std::sin(x[1]);
        s(1, 1) = 1.0;
        return s;
    };
    DSigmaFn dsigma = [](double, const Vec& x) -> Bilinear {
        Bilinear ds(2, 2, 2); // [i][j][m] = d sigma^{i,m} / d x_j
        ds.at(0, 0, 0) = 2.0 * x[0];
        ds.at(0, 0, 1) = x[1];
        ds.at(0, 1, 1) = x[0];
        ds.at(1, 1, 0) = std::cos(x[1]);
        return ds;
    };
    DriftFn F = [](double, const Vec& x) -> Vec { return Vec::Zero(x.size()); };
    AbstractModel with = make_abstract_model(space, F, sigma, Bilinear(2, 2, 2), dsigma);
    AbstractModel without = make_abstract_model(space, F, sigma, Bilinear(2, 2, 2));
    CHECK(with.has_analytic_dsigma());
    CHECK_FALSE(without.has_analytic_dsigma());

    RngStream rng(7, 3);
    for (int probe = 0; probe < 20; ++probe) {
        const Vec x = random_vec(2, rng);
        const Bilinear exact = eval_dsigma(with, 0.0, x);
        const Bilinear fd = eval_dsigma(without, 0.0, x);
        double scale = 0.0, diff = 0.0;
        for (std::size_t k = 0; k < exact.t.size(); ++k) {
            scale = std::max(scale, std::abs(exact.t[k]));
            diff = std::max(diff, std::abs(exact.t[k] - fd.t[k]));
        }
        CHECK(diff <= 1e-6 * (1.0 + scale));
    }

    // the climate lowering carries a constant analytic derivative
    Fixture fx = builtin_fixture("linear_scatter");
    CHECK(fx.model.has_analytic_dsigma());
    const Vec probe = Vec{{0.3, -0.8}};
    const Bilinear exact = eval_dsigma(fx.model, 0.2, probe);
    const Bilinear fd = dsigma_fd(fx.model, 0.2, probe);
    for (std::size_t k = 0; k < exact.t.size(); ++k)
        CHECK(std::abs(exact.t[k] - fd.t[k]) <= 1e-6);
}

TEST_CASE("builtin fixtures: registry and structure") {
    CHECK(fixture_names() ==
          std::vector<std::string>{"linear_scatter", "ou_only", "quadratic_offdiag"});
    CHECK_THROWS_AS(builtin_fixture("nope"), std::invalid_argument);

    Fixture lin = builtin_fixture("linear_scatter");
    CHECK(lin.climate.has_value());
    CHECK(validate_climate(*lin.climate).pass);
    for (double v : lin.model.beta.t) CHECK(v == 0.0);

    Fixture quad = builtin_fixture("quadratic_offdiag");
    CHECK(validate_climate(*quad.climate).pass);
    CHECK(validate_zero_mean(quad.model.beta, quad.model.space.q).pass);
    double beta_norm = 0.0;
    for (double v : quad.model.beta.t) beta_norm += std::abs(v);
    CHECK(beta_norm > 0.0);
    for (int i = 0; i < 2; ++i)
        for (int l = 0; l < 3; ++l) CHECK(quad.model.beta.at(i, l, l) == 0.0);

    Fixture ou = builtin_fixture("ou_only");
    CHECK_FALSE(ou.climate.has_value());
    const Vec xa = Vec{{0.1, 0.2}}, xb = Vec{{-3.0, 5.0}};
    CHECK(ou.model.F(0.0, xa).norm() == 0.0);
    CHECK((ou.model.sigma(0.0, xa) - ou.model.sigma(1.0, xb)).norm() == 0.0);
    for (double v : ou.model.beta.t) CHECK(v == 0.0);
}

TEST_CASE("make_abstract_model symmetrizes beta and checks shapes") {
    SpaceSpec space{1, 2, Vec{{1.0, 1.0}}};
    DriftFn F = [](double, const Vec& x) -> Vec { return Vec::Zero(x.size()); };
    SigmaFn sigma = [](double, const Vec&) -> Mat { return Mat::Zero(1, 2); };

    Bilinear asym(1, 2, 2);
    asym.at(0, 0, 1) = 1.0; // no (1, 0) partner
    AbstractModel model = make_abstract_model(space, F, sigma, asym);
    CHECK(model.beta.at(0, 0, 1) == doctest::Approx(0.5));
    CHECK(model.beta.at(0, 1, 0) == doctest::Approx(0.5));

    CHECK_THROWS_AS(make_abstract_model(space, nullptr, sigma, Bilinear(1, 2, 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_abstract_model(space, F, nullptr, Bilinear(1, 2, 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_abstract_model(space, F, sigma, Bilinear(1, 3, 3)),
                    std::invalid_argument);
}
