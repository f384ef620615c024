#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lyapdim/delayop.hpp"
#include "lyapdim/tensor.hpp"

namespace lyapdim {

// Scalar data of the bound: delay tau, the delay-free aggregate a and the
// squared delayed aggregate b, plus an optional sup of the Lyapunov-function
// derivative.
struct BoundProblem {
    double tau = 1;
    double a = 0;
    double b = 1;
    double vdot_sup = 0;
};

struct DimensionBound {
    double d_star = 0;
    double p_star = 0;
    double kappa_opt = 0;            // optimal weight exponent (p* + 1) / tau
    double slope = 0;                // b e^{p*+1}: d* = slope * tau + 1
    std::optional<double> scale_opt; // optimal time rescaling
    double lambda = 0;               // derivative bound used (model bounds)
    bool trivial_attractor = false;  // attractor is the zero equilibrium
    std::string provenance;
};

// Unique p >= -1 with p e^{p+1} = c.
double lambert_root(double c);

// d*(kappa) = (a + 2 vdot + b e^{kappa tau}) / kappa + 1
double bound_at_kappa(const BoundProblem& prob, double kappa);
DimensionBound scalar_bound(const BoundProblem& prob);

using BoundFamily = std::function<BoundProblem(double scale)>;
DimensionBound scaled_bound(const BoundFamily& family, double lo = 1e-3, double hi = 1e3, double tol = 1e-9);

// vdot + 1/2 sum_{k <= min(m, K)} lambda_k - (kappa0 / 2) max(0, m - K),
// K = #{k : lambda_k >= -kappa0}.
double alpha_plus(int m, const Vec& eigen_desc, double kappa0, double vdot_sup = 0);
// The same expression continued linearly between integers; returns its first
// zero on [0, inf). This is the dimension bound produced by the symmetrized
// matrix eigenvalues.
double alpha_plus_root(const Vec& eigen_desc, double kappa0, double vdot_sup = 0);

// Nested golden-section search over increasing (kappa_0, ..., kappa_J) for
// the smallest alpha_plus_root. Only a local search: nothing guarantees the
// optimum for J >= 1.
struct MultiTapBound {
    double d_star = 0;
    std::vector<double> kappas;
};
MultiTapBound multi_tap_bound(const DelayOperatorSpec& spec, double vdot_sup = 0, double log_lo = -8,
                              double log_hi = 4, double tol = 1e-7);

enum class LambdaMode { Rough, Tight };

// Mackey-Glass nonlinearity F(y) = y / (1 + |y|^k) and its derivative.
double mg_F(double y, double k);
double mg_Fprime(double y, double k);
double mg_radius(double beta, double gamma, double k);
double mg_equilibrium(double beta, double gamma, double k);
double mg_lambda(double beta, double gamma, double k, LambdaMode mode);

DimensionBound mackey_glass_bound(double beta, double gamma, double k, double tau,
                                  LambdaMode mode = LambdaMode::Rough);
BoundFamily mackey_glass_family(double beta, double gamma, double k, double tau,
                                LambdaMode mode = LambdaMode::Rough);

DimensionBound suarez_schopf_bound(double alpha, double gamma, double tau);
BoundFamily suarez_schopf_family(double alpha, double gamma, double tau);

}  // namespace lyapdim
