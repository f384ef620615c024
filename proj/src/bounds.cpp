#include "lyapdim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lyapdim/errors.hpp"

namespace lyapdim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kGolden = 0.5 * (3.0 - std::sqrt(5.0));

// Coarse scan followed by golden-section refinement inside the best bracket.
template <class F>
double scan_then_golden(F f, double lo, double hi, double tol, int scan, double& fbest)
{
    std::vector<double> xs(scan), fs(scan);
    int best = 0;
    for (int i = 0; i < scan; ++i) {
        xs[i] = lo + (hi - lo) * i / (scan - 1);
        fs[i] = f(xs[i]);
        if (fs[i] < fs[best]) best = i;
    }
    double a = xs[std::max(best - 1, 0)], b = xs[std::min(best + 1, scan - 1)];
    double x1 = a + kGolden * (b - a), x2 = b - kGolden * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + kGolden * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - kGolden * (b - a);
            f2 = f(x2);
        }
    }
    double x = 0.5 * (a + b);
    fbest = f(x);
    if (fs[best] < fbest) {
        x = xs[best];
        fbest = fs[best];
    }
    return x;
}

}  // namespace

double lambert_root(double c)
{
    if (!(c >= -1.0)) throw InputError("lambert_root: c must be >= -1");
    if (c == -1.0) return -1.0;
    if (c == 0.0) return 0.0;
    auto f = [c](double p) { return p * std::exp(p + 1) - c; };
    double lo = -1.0, hi = 20.0;
    while (f(hi) < 0) hi *= 2;
    double p = std::max(0.0, std::log1p(std::abs(c)));
    p = std::clamp(p, lo, hi);
    const double scale = std::max(1.0, std::abs(c));
    for (int it = 0; it < 200; ++it) {
        const double fp = f(p);
        if (fp == 0) return p;
        (fp < 0 ? lo : hi) = p;
        const double d = (p + 1) * std::exp(p + 1);
        double q = d > 0 ? p - fp / d : 0.5 * (lo + hi);
        if (!(q > lo && q < hi)) q = 0.5 * (lo + hi);
        if (std::abs(q - p) <= 1e-16 * std::max(1.0, std::abs(p)) && std::abs(f(q)) <= 1e-12 * scale) return q;
        p = q;
    }
    return p;
}

double bound_at_kappa(const BoundProblem& prob, double kappa)
{
    if (!(kappa > 0)) throw InputError("bound_at_kappa: kappa must be positive");
    return (prob.a + 2 * prob.vdot_sup + prob.b * std::exp(kappa * prob.tau)) / kappa + 1.0;
}

DimensionBound scalar_bound(const BoundProblem& prob)
{
    if (!(prob.tau > 0)) throw InputError("scalar_bound: tau must be positive");
    if (!(prob.b > 0)) throw InputError("scalar_bound: b must be positive");
    const double a = prob.a + 2 * prob.vdot_sup;
    if (a + prob.b < 0) throw InputError("scalar_bound: a + b must be nonnegative");
    DimensionBound out;
    out.provenance = "scalar delay bound";
    if (a + prob.b <= 1e-15 * prob.b) {
        // minimum approached as kappa -> 0+
        out.p_star = -1;
        out.kappa_opt = 0;
        out.slope = prob.b;
    } else {
        out.p_star = lambert_root(a / prob.b);
        out.kappa_opt = (out.p_star + 1) / prob.tau;
        out.slope = prob.b * std::exp(out.p_star + 1);
    }
    out.d_star = prob.tau * out.slope + 1;
    return out;
}

DimensionBound scaled_bound(const BoundFamily& family, double lo, double hi, double tol)
{
    if (!(lo > 0) || !(hi > lo)) throw InputError("scaled_bound: need 0 < lo < hi");
    auto obj = [&](double logk) {
        try {
            return scalar_bound(family(std::exp(logk))).d_star;
        } catch (const InputError&) {
            return kInf;
        }
    };
    double fbest;
    const double lk = scan_then_golden(obj, std::log(lo), std::log(hi), tol, 241, fbest);
    if (!std::isfinite(fbest)) throw InputError("scaled_bound: no feasible scale in the range");
    DimensionBound out = scalar_bound(family(std::exp(lk)));
    out.scale_opt = std::exp(lk);
    out.provenance = "scalar delay bound with time rescaling";
    return out;
}

double alpha_plus(int m, const Vec& eigen_desc, double kappa0, double vdot_sup)
{
    if (m < 0) throw InputError("alpha_plus: m must be nonnegative");
    int K = 0;
    while (K < eigen_desc.size() && eigen_desc(K) >= -kappa0) ++K;
    double s = vdot_sup;
    for (int k = 0; k < std::min(m, K); ++k) s += 0.5 * eigen_desc(k);
    s -= 0.5 * kappa0 * std::max(0, m - K);
    return s;
}

double alpha_plus_root(const Vec& eigen_desc, double kappa0, double vdot_sup)
{
    if (!eigen_desc.allFinite() || !std::isfinite(kappa0) || !std::isfinite(vdot_sup))
        throw NumericalError("alpha_plus_root: nonfinite eigenvalue data");
    double s = vdot_sup;
    if (s < 0) return 0;
    const auto n = eigen_desc.size();
    for (Eigen::Index k = 0; k < n; ++k) {
        const double slope = 0.5 * std::max(eigen_desc(k), -kappa0);
        if (s + slope < 0) return double(k) + s / -slope;
        s += slope;
    }
    // beyond n every step contributes -kappa0 / 2
    if (!(kappa0 > 0)) throw NumericalError("alpha_plus_root: no zero (kappa0 <= 0)");
    return double(n) + s / (0.5 * kappa0);
}

MultiTapBound multi_tap_bound(const DelayOperatorSpec& spec, double vdot_sup, double log_lo, double log_hi,
                              double tol)
{
    spec.validate();
    const int J = static_cast<int>(spec.taps.size());
    std::vector<double> u(J + 1, 0.0);
    auto kappas_of = [&](const std::vector<double>& uu) {
        std::vector<double> k(J + 1);
        k[0] = std::exp(uu[0]);
        for (int j = 1; j <= J; ++j) k[j] = k[j - 1] + std::exp(uu[j]);
        return k;
    };
    auto value = [&](const std::vector<double>& uu) {
        const auto k = kappas_of(uu);
        try {
            const auto sm = symmetrized_matrix(spec, WeightProfile::for_spec(spec, k));
            return alpha_plus_root(sm.eigenvalues, k[0], vdot_sup);
        } catch (const NumericalError&) {
            // weights so steep that a jump underflows: not a usable metric
            return kInf;
        }
    };
    // innermost coordinate last; each level minimizes over its coordinate
    // with all deeper coordinates re-optimized
    std::function<double(int)> level = [&](int l) -> double {
        if (l > J) return value(u);
        double fbest;
        auto f = [&](double x) {
            u[l] = x;
            return level(l + 1);
        };
        const double x = scan_then_golden(f, log_lo, log_hi, tol, l == J ? 49 : 25, fbest);
        u[l] = x;
        level(l + 1);
        return fbest;
    };
    MultiTapBound out;
    out.d_star = level(0);
    out.kappas = kappas_of(u);
    return out;
}

double mg_F(double y, double k) { return y / (1 + std::pow(std::abs(y), k)); }

double mg_Fprime(double y, double k)
{
    const double s = std::pow(std::abs(y), k);
    return (1 + (1 - k) * s) / ((1 + s) * (1 + s));
}

double mg_radius(double beta, double gamma, double k)
{
    if (beta <= gamma) return 0;
    return beta / gamma / k * std::pow(k - 1, (k - 1) / k);
}

double mg_equilibrium(double beta, double gamma, double k)
{
    if (beta <= gamma) return 0;
    return std::pow(beta / gamma - 1, 1 / k);
}

double mg_lambda(double beta, double gamma, double k, LambdaMode mode)
{
    if (!(k > 1)) throw InputError("Mackey-Glass: k must exceed 1");
    if (mode == LambdaMode::Rough) return std::max(1.0, (k - 1) * (k - 1) / (4 * k));
    const double R = mg_radius(beta, gamma, k);
    if (R == 0) return 1.0;  // |F'(0)| = 1
    double best = 0, at = 0;
    const int G = 4000;
    for (int i = 0; i <= G; ++i) {
        const double y = R * i / G;
        const double v = std::abs(mg_Fprime(y, k));
        if (v > best) {
            best = v;
            at = y;
        }
    }
    double fb;
    const double lo = std::max(0.0, at - R / G), hi = std::min(R, at + R / G);
    if (hi > lo) {
        const double y = scan_then_golden([&](double x) { return -std::abs(mg_Fprime(x, k)); }, lo, hi, 1e-13, 5, fb);
        best = std::max(best, std::abs(mg_Fprime(y, k)));
    }
    return best;
}

DimensionBound mackey_glass_bound(double beta, double gamma, double k, double tau, LambdaMode mode)
{
    if (!(beta > 0) || !(gamma >= 0) || !(k > 1) || !(tau > 0))
        throw InputError("Mackey-Glass bound needs beta > 0, gamma >= 0, k > 1, tau > 0");
    if (beta <= gamma) {
        DimensionBound out;
        out.trivial_attractor = true;
        out.provenance = "attractor is the zero equilibrium (beta <= gamma)";
        return out;
    }
    const double lam = mg_lambda(beta, gamma, k, mode);
    DimensionBound out = scalar_bound({tau, 1 - 2 * gamma, beta * beta * lam * lam, 0});
    out.lambda = lam;
    out.provenance = mode == LambdaMode::Rough ? "Mackey-Glass, rough derivative bound"
                                               : "Mackey-Glass, derivative bound on the absorbing ball";
    return out;
}

BoundFamily mackey_glass_family(double beta, double gamma, double k, double tau, LambdaMode mode)
{
    const double lam = mg_lambda(beta, gamma, k, mode);
    return [=](double s) {
        return BoundProblem{tau / s, 1 - 2 * s * gamma, (s * beta * lam) * (s * beta * lam), 0};
    };
}

DimensionBound suarez_schopf_bound(double alpha, double gamma, double tau)
{
    if (!(alpha > 0) || !(gamma > 0) || !(tau > 0))
        throw InputError("Suarez-Schopf bound needs alpha, gamma, tau > 0");
    DimensionBound out = scalar_bound({tau, 1 + 2 * gamma, alpha * alpha, 0});
    out.provenance = "Suarez-Schopf, nonlinearity dropped (F' >= 0)";
    return out;
}

BoundFamily suarez_schopf_family(double alpha, double gamma, double tau)
{
    return [=](double s) { return BoundProblem{tau / s, 1 + 2 * s * gamma, (s * alpha) * (s * alpha), 0}; };
}

}  // namespace lyapdim
