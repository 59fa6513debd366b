#pragma once

// Model coefficient sets. AbstractModel is the slow equation
//   dX = F(t,X) dt + sigma(t,X) Y dt + eps beta(Y,Y) dt
// with sigma mapping fast modes to slow coordinates. ClimateModel is the
// structured quadratic system (resolved x, unresolved y):
//   dX = F1 + A11 X + A12 Y + B111(X,X) + B112(X,Y) + eps B122(Y,Y)
//   eps^2 dY = (A21 X + B211(X,X) - Y) dt + dW
// lower_climate rewrites the latter as an AbstractModel via the mild form of
// the fast equation.

#include "slowfast/spectral.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace slowfast {

using DriftFn = std::function<Vec(double, const Vec&)>;  // (t, x) -> VecD
using SigmaFn = std::function<Mat(double, const Vec&)>;  // (t, x) -> d x M
// space derivative of sigma: tensor [i][j][m] = d sigma^{i,m} / d x_j
using DSigmaFn = std::function<Bilinear(double, const Vec&)>;

struct AbstractModel {
    SpaceSpec space;
    DriftFn F;
    SigmaFn sigma;
    DSigmaFn dsigma; // empty -> central finite differences
    Bilinear beta;   // (M, M) -> d, symmetric in its arguments

    bool has_analytic_dsigma() const { return static_cast<bool>(dsigma); }
};

// beta is symmetrized here so downstream formulas can assume symmetry
AbstractModel make_abstract_model(SpaceSpec space, DriftFn F, SigmaFn sigma,
                                  Bilinear beta, DSigmaFn dsigma = nullptr);

// central finite differences with step 1e-5 (1 + |x|)
Bilinear dsigma_fd(const AbstractModel& model, double t, const Vec& x);
// analytic derivative when supplied, finite differences otherwise
Bilinear eval_dsigma(const AbstractModel& model, double t, const Vec& x);

struct ClimateModel {
    SpaceSpec space;
    std::function<Vec(double)> F1; // deterministic continuous forcing
    Mat A11;       // d x d
    Mat A12;       // d x M
    Mat A21;       // M x d
    Bilinear B111; // (d, d) -> d
    Bilinear B112; // (d, M) -> d
    Bilinear B122; // (M, M) -> d, symmetric
    Bilinear B211; // (d, d) -> M
};

// zero-mean condition on the quadratic fast-fast term:
// residual[i] = sum_l beta[i][l][l] q_l, pass iff max |residual| <= 1e-12 scale
struct ZeroMeanResult {
    bool pass = false;
    Vec residual;
    double scale = 0.0;
};
ZeroMeanResult validate_zero_mean(const Bilinear& beta, const Vec& q);

// structural conditions of the climate system:
//   adjoint:    A21 = A12^T entrywise
//   skew_111:   <B111(x',x), x> = 0            (energy conservation)
//   skew_112:   <B112(x',y), x> + <B211(x',x), y> = 0
// checked on 200 deterministic random probes, relative tolerance 1e-10
struct ClimateValidation {
    bool pass = false;
    double adjoint_residual = 0.0;
    double skew_111_residual = 0.0;
    double skew_112_residual = 0.0;
    std::string summary() const;
};
ClimateValidation validate_climate(const ClimateModel& cm);

// residuals of the four energy identities behind the a-priori bound:
//   <B111(x,x), x>
//   <A12 B211(x,x), x> - <B211(x,x), A21 x>
//   <B112(x, A21 x), x> + <B211(x,x), A21 x>
//   <B112(x, B211(x,x)), x> + |B211(x,x)|^2
Eigen::Vector4d energy_identity_residuals(const ClimateModel& cm, const Vec& x);

// abstract form of the climate system:
//   F(t,x)     = F1_t + A11 x + B111(x,x) + A12 g(x) + B112(x, g(x)),
//                with g(x) = A21 x + B211(x,x)
//   sigma(t,x) = A12 + B112(x, .)
//   beta       = B122
// dsigma is analytic and constant: [i][j][m] = B112[i][j][m].
// Throws if validate_climate fails.
AbstractModel lower_climate(const ClimateModel& cm);

// a resolved built-in model: always usable through `model`; `climate` is set
// for the climate-structured fixtures
struct Fixture {
    std::string name;
    std::optional<ClimateModel> climate;
    AbstractModel model;
};

// registry: "linear_scatter" (beta = 0, strong-convergence regime),
// "quadratic_offdiag" (zero-diagonal beta, weak-convergence regime),
// "ou_only" (constant sigma, exact closed forms). Throws on unknown name.
Fixture builtin_fixture(const std::string& name);
std::vector<std::string> fixture_names();

} // namespace slowfast
