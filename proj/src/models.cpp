#include "slowfast/models.hpp"

#include "slowfast/rng.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace slowfast {

namespace {

Vec random_vec(int n, RngStream& rng) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

void check_shapes(const AbstractModel& model) {
    model.space.validate();
    if (model.beta.out != model.space.d || model.beta.left != model.space.M ||
        model.beta.right != model.space.M)
        throw std::invalid_argument("AbstractModel: beta must map (M, M) -> d");
    if (!model.F || !model.sigma)
        throw std::invalid_argument("AbstractModel: F and sigma are required");
}

} // namespace

AbstractModel make_abstract_model(SpaceSpec space, DriftFn F, SigmaFn sigma,
                                  Bilinear beta, DSigmaFn dsigma) {
    AbstractModel model;
    model.space = std::move(space);
    model.F = std::move(F);
    model.sigma = std::move(sigma);
    model.dsigma = std::move(dsigma);
    model.beta = symmetrize_in_last_two(beta);
    check_shapes(model);
    return model;
}

Bilinear dsigma_fd(const AbstractModel& model, double t, const Vec& x) {
    const int d = model.space.d, M = model.space.M;
    const double step = 1e-5 * (1.0 + x.norm());
    Bilinear out(d, d, M);
    Vec xp = x, xm = x;
    for (int j = 0; j < d; ++j) {
        xp[j] = x[j] + step;
        xm[j] = x[j] - step;
        const Mat sp = model.sigma(t, xp);
        const Mat sm = model.sigma(t, xm);
        for (int i = 0; i < d; ++i)
            for (int m = 0; m < M; ++m)
                out.at(i, j, m) = (sp(i, m) - sm(i, m)) / (2.0 * step);
        xp[j] = x[j];
        xm[j] = x[j];
    }
    return out;
}

Bilinear eval_dsigma(const AbstractModel& model, double t, const Vec& x) {
    return model.has_analytic_dsigma() ? model.dsigma(t, x) : dsigma_fd(model, t, x);
}

ZeroMeanResult validate_zero_mean(const Bilinear& beta, const Vec& q) {
    if (beta.left != beta.right || beta.left != q.size())
        throw std::invalid_argument("validate_zero_mean: shape mismatch");
    ZeroMeanResult res;
    res.residual = Vec::Zero(beta.out);
    double scale = 0.0;
    for (int i = 0; i < beta.out; ++i) {
        double acc = 0.0, mag = 0.0;
        for (int l = 0; l < beta.left; ++l) {
            const double term = beta.at(i, l, l) * q[l];
            acc += term;
            mag += std::abs(term);
        }
        res.residual[i] = acc;
        scale = std::max(scale, mag);
    }
    res.scale = 1.0 + scale;
    res.pass = res.residual.lpNorm<Eigen::Infinity>() <= 1e-12 * res.scale;
    return res;
}

ClimateValidation validate_climate(const ClimateModel& cm) {
    const int d = cm.space.d, M = cm.space.M;
    ClimateValidation v;

    const double a12_scale = 1.0 + cm.A12.lpNorm<Eigen::Infinity>();
    v.adjoint_residual =
        (cm.A21 - cm.A12.transpose()).lpNorm<Eigen::Infinity>() / a12_scale;

    RngStream rng(0xC11A7E, 7); // fixed probe stream: validation is deterministic
    for (int probe = 0; probe < 200; ++probe) {
        const Vec x = random_vec(d, rng);
        const Vec xp = random_vec(d, rng);
        const Vec y = random_vec(M, rng);

        const Vec b111 = apply_bilinear(cm.B111, xp, x);
        const double r111 = std::abs(b111.dot(x)) / (1.0 + b111.norm() * x.norm());
        v.skew_111_residual = std::max(v.skew_111_residual, r111);

        const double t1 = apply_bilinear(cm.B112, xp, y).dot(x);
        const double t2 = apply_bilinear(cm.B211, xp, x).dot(y);
        const double r112 =
            std::abs(t1 + t2) / (1.0 + std::abs(t1) + std::abs(t2));
        v.skew_112_residual = std::max(v.skew_112_residual, r112);
    }
    v.pass = v.adjoint_residual <= 1e-10 && v.skew_111_residual <= 1e-10 &&
             v.skew_112_residual <= 1e-10;
    return v;
}

std::string ClimateValidation::summary() const {
    std::ostringstream os;
    os << (pass ? "pass" : "fail") << " (adjoint " << adjoint_residual
       << ", skew_111 " << skew_111_residual << ", skew_112 " << skew_112_residual
       << ")";
    return os.str();
}

Eigen::Vector4d energy_identity_residuals(const ClimateModel& cm, const Vec& x) {
    const Vec bxx = apply_bilinear(cm.B211, x, x); // fast-space quadratic
    const Vec a21x = cm.A21 * x;

    const Vec b111 = apply_bilinear(cm.B111, x, x);
    const double r1 = b111.dot(x) / (1.0 + b111.norm() * x.norm());

    const double lhs2 = (cm.A12 * bxx).dot(x);
    const double rhs2 = bxx.dot(a21x);
    const double r2 = (lhs2 - rhs2) / (1.0 + std::abs(lhs2) + std::abs(rhs2));

    const double lhs3 = apply_bilinear(cm.B112, x, a21x).dot(x);
    const double r3 = (lhs3 + rhs2) / (1.0 + std::abs(lhs3) + std::abs(rhs2));

    const double lhs4 = apply_bilinear(cm.B112, x, bxx).dot(x);
    const double n4 = bxx.squaredNorm();
    const double r4 = (lhs4 + n4) / (1.0 + std::abs(lhs4) + n4);

    return {r1, r2, r3, r4};
}

AbstractModel lower_climate(const ClimateModel& cm) {
    const ClimateValidation v = validate_climate(cm);
    if (!v.pass)
        throw std::invalid_argument("lower_climate: structural validation failed: " +
                                    v.summary());
    if (!cm.F1) throw std::invalid_argument("lower_climate: F1 is required");

    const ClimateModel c = cm; // immutable copy shared by the closures
    DriftFn F = [c](double t, const Vec& x) -> Vec {
        const Vec g = c.A21 * x + apply_bilinear(c.B211, x, x);
        return c.F1(t) + c.A11 * x + apply_bilinear(c.B111, x, x) + c.A12 * g +
               apply_bilinear(c.B112, x, g);
    };
    SigmaFn sigma = [c](double, const Vec& x) -> Mat {
        return c.A12 + contract_left(c.B112, x);
    };
    DSigmaFn dsigma = [c](double, const Vec&) -> Bilinear { return c.B112; };

    return make_abstract_model(cm.space, std::move(F), std::move(sigma),
                               symmetrize_in_last_two(cm.B122), std::move(dsigma));
}

namespace {

// shared skeleton of the two climate fixtures: d=2, M=3, q=(1, 0.5, 0.25),
// energy-conserving quadratic structure
ClimateModel climate_skeleton() {
    ClimateModel cm;
    cm.space.d = 2;
    cm.space.M = 3;
    cm.space.q = Vec{{1.0, 0.5, 0.25}};

    cm.F1 = [](double t) -> Vec { return Vec{{0.4 + 0.1 * std::sin(t), -0.3}}; };

    cm.A11 = Mat{{-0.5, 0.2}, {-0.3, -0.4}};
    cm.A12 = Mat{{0.6, -0.3, 0.2}, {0.1, 0.4, -0.25}};
    cm.A21 = cm.A12.transpose();

    // B111(u, v) = (c1 u1 + c2 u2) (v2, -v1): linear-in-u rotation of v, so
    // <B111(u, x), x> = 0 identically
    cm.B111 = Bilinear(2, 2, 2);
    const double c1 = 0.35, c2 = -0.2;
    cm.B111.at(0, 0, 1) = c1;
    cm.B111.at(0, 1, 1) = c2;
    cm.B111.at(1, 0, 0) = -c1;
    cm.B111.at(1, 1, 0) = -c2;

    cm.B112 = Bilinear(2, 2, 3);
    cm.B112.at(0, 0, 0) = 0.3;
    cm.B112.at(0, 1, 1) = -0.2;
    cm.B112.at(0, 0, 2) = 0.15;
    cm.B112.at(1, 1, 0) = 0.25;
    cm.B112.at(1, 0, 1) = 0.1;
    cm.B112.at(1, 1, 2) = -0.3;

    // the skew partner forced by the coupling condition
    cm.B211 = Bilinear(3, 2, 2);
    for (int m = 0; m < 3; ++m)
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 2; ++i)
                cm.B211.at(m, j, i) = -cm.B112.at(i, j, m);

    cm.B122 = Bilinear(2, 3, 3);
    return cm;
}

Fixture make_climate_fixture(std::string name, ClimateModel cm) {
    Fixture fx;
    fx.name = std::move(name);
    fx.model = lower_climate(cm);
    fx.climate = std::move(cm);
    return fx;
}

Fixture make_ou_only() {
    Fixture fx;
    fx.name = "ou_only";
    SpaceSpec space;
    space.d = 2;
    space.M = 3;
    space.q = Vec{{1.0, 0.5, 0.25}};

    Mat s = Mat::Zero(2, 3); // identity embedding of the first d modes
    s(0, 0) = 1.0;
    s(1, 1) = 1.0;
    DriftFn F = [](double, const Vec& x) -> Vec { return Vec::Zero(x.size()); };
    SigmaFn sigma = [s](double, const Vec&) -> Mat { return s; };
    DSigmaFn dsigma = [](double, const Vec&) -> Bilinear { return Bilinear(2, 2, 3); };
    fx.model = make_abstract_model(space, std::move(F), std::move(sigma),
                                   Bilinear(2, 3, 3), std::move(dsigma));
    return fx;
}

} // namespace

Fixture builtin_fixture(const std::string& name) {
    if (name == "linear_scatter")
        return make_climate_fixture(name, climate_skeleton());
    if (name == "quadratic_offdiag") {
        ClimateModel cm = climate_skeleton();
        // symmetric, zero-diagonal quadratic fast-fast term: the zero-mean
        // condition holds for any spectrum
        cm.B122.at(0, 0, 1) = cm.B122.at(0, 1, 0) = 0.4;
        cm.B122.at(0, 1, 2) = cm.B122.at(0, 2, 1) = -0.2;
        cm.B122.at(1, 0, 1) = cm.B122.at(1, 1, 0) = -0.3;
        cm.B122.at(1, 0, 2) = cm.B122.at(1, 2, 0) = 0.25;
        return make_climate_fixture(name, std::move(cm));
    }
    if (name == "ou_only") return make_ou_only();
    throw std::invalid_argument("builtin_fixture: unknown name '" + name + "'");
}

std::vector<std::string> fixture_names() {
    return {"linear_scatter", "ou_only", "quadratic_offdiag"};
}

} // namespace slowfast
