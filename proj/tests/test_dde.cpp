#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "lyapdim/bounds.hpp"
#include "lyapdim/charroots.hpp"
#include "lyapdim/dde.hpp"
#include "lyapdim/errors.hpp"

using namespace lyapdim;

namespace {

Vec scalar(double v) { return Vec::Constant(1, v); }

DelayModel decay_model(double a, double tau)
{
    return linear_model(Mat::Constant(1, 1, a), {{tau, Mat::Zero(1, 1)}});
}

double mg_final(double dt)
{
    const auto m = mackey_glass_model(0.2, 0.1, 10, 17);
    const auto h = HistorySegment::from_function(
        17, dt, [](double th) { return scalar(0.9 + 0.3 * std::sin(th / 3)); },
        [](double th) { return scalar(0.1 * std::cos(th / 3)); });
    return integrate(m, h, 34, dt).x.back()(0);
}

}  // namespace

TEST(Integrator, ExponentialDecay)
{
    const auto m = decay_model(-1, 1);
    const auto tr = integrate(m, HistorySegment::constant(1, 1e-3, scalar(1)), 5, 1e-3);
    EXPECT_NEAR(tr.x.back()(0), std::exp(-5.0), 1e-8);
    EXPECT_NEAR(tr.t.back(), 5.0, 1e-12);
}

TEST(Integrator, MethodOfStepsPureDelay)
{
    // x' = -x(t-1), x = 1 on [-1, 0]; piecewise polynomial on [0, 2]
    const auto m = linear_model(Mat::Zero(1, 1), {{1.0, Mat::Constant(1, 1, -1)}});
    const auto tr = integrate(m, HistorySegment::constant(1, 0.01, scalar(1)), 2, 0.01);
    double worst = 0;
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        const double t = tr.t[i];
        double exact = 1;
        if (t > 0 && t <= 1) exact = 1 - t;
        if (t > 1) exact = -(t - 1) + 0.5 * (t - 1) * (t - 1);
        worst = std::max(worst, std::abs(tr.x[i](0) - exact));
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(Integrator, EquilibriumIsStationary)
{
    const double xs = mg_equilibrium(0.2, 0.1, 10);
    const auto m = mackey_glass_model(0.2, 0.1, 10, 22);
    const auto tr = integrate(m, HistorySegment::constant(22, 0.22, scalar(xs)), 220, 0.22);
    for (const auto& v : tr.x) EXPECT_NEAR(v(0), xs, 1e-12);
}

TEST(Integrator, FourthOrderConvergence)
{
    const double ref = mg_final(17.0 / 1600);
    const double e1 = std::abs(mg_final(17.0 / 100) - ref);
    const double e2 = std::abs(mg_final(17.0 / 200) - ref);
    EXPECT_GE(std::log2(e1 / e2), 3.5) << e1 << " " << e2;
}

TEST(Integrator, ErrorEstimate)
{
    const auto m = mackey_glass_model(0.2, 0.1, 10, 17);
    IntegrateOptions o;
    o.estimate_error = true;
    const auto tr = integrate(m, HistorySegment::constant(17, 0.17, scalar(0.5)), 17, 0.17, o);
    EXPECT_GT(tr.error_estimate, 0);
    EXPECT_LT(tr.error_estimate, 1e-3);
}

TEST(Integrator, RejectsBadGrids)
{
    const auto m = decay_model(-1, 1);
    const auto h = HistorySegment::constant(1, 0.01, scalar(1));
    EXPECT_THROW(integrate(m, h, 1, 0.2), InputError);       // dt > tau / 10
    EXPECT_THROW(integrate(m, h, 1, 0.03), InputError);      // does not divide tau
    EXPECT_THROW(integrate(m, h, 1.005, 0.01), InputError);  // horizon off grid
    EXPECT_THROW(integrate(m, HistorySegment::constant(2, 0.01, scalar(1)), 1, 0.01), InputError);
}

TEST(Integrator, BlowUpReported)
{
    const auto m = linear_model(Mat::Constant(1, 1, 400), {{1.0, Mat::Zero(1, 1)}});
    EXPECT_THROW(integrate(m, HistorySegment::constant(1, 0.1, scalar(1)), 100, 0.1), NumericalError);
}

TEST(History, HermiteReproducesCubics)
{
    auto f = [](double t) { return scalar(t * t * t - 2 * t + 1); };
    auto df = [](double t) { return scalar(3 * t * t - 2); };
    const auto h = HistorySegment::from_function(2, 0.25, f, df);
    for (double th = -2; th <= 0; th += 0.0137) EXPECT_NEAR(h(th)(0), f(th)(0), 1e-12);
    EXPECT_THROW(h(0.5), InputError);
    EXPECT_NEAR(h.resampled(0.125)(-1.3)(0), f(-1.3)(0), 1e-12);
    EXPECT_NEAR(h.derivative(-0.7)(0), df(-0.7)(0), 1e-12);
}

TEST(Models, JacobiansMatchDifferences)
{
    EXPECT_LT(jacobian_mismatch(mackey_glass_model(0.2, 0.1, 10, 22), 50, 1.5, 3), 1e-6);
    EXPECT_LT(jacobian_mismatch(suarez_schopf_model(0.75, 6, 0.3), 50, 1.5, 3), 1e-6);
    Mat L0(2, 2), L1(2, 2);
    L0 << -1, 0.3, 0.2, -2;
    L1 << 0.1, 0, 0.5, -0.4;
    EXPECT_LT(jacobian_mismatch(linear_model(L0, {{1.0, L1}}), 20, 2, 4), 1e-8);
}

TEST(Models, SuarezSchopfEquilibria)
{
    const auto eq = suarez_schopf_equilibria(0.75);
    ASSERT_EQ(eq.size(), 3u);
    EXPECT_NEAR(eq[0], 0.5, 1e-15);
    EXPECT_EQ(eq[1], 0.0);
    EXPECT_EQ(suarez_schopf_equilibria(1.5).size(), 1u);
    const auto m = suarez_schopf_model(0.75, 6);
    for (double x : eq) EXPECT_NEAR(m.rhs(0, scalar(x), {scalar(x)})(0), 0, 1e-15);
}

TEST(Monodromy, ScalarOdeGivesExponential)
{
    const auto m = decay_model(0.3, 1);
    const auto M = linearized_monodromy(m, std::vector<Vec>(21, scalar(0)), 0);
    // the head row is e^{a tau} times the head coordinate
    EXPECT_NEAR(M.matrix(20, 20), std::exp(0.3), 1e-6);
    EXPECT_NEAR(M.matrix.row(20).head(20).norm(), 0, 1e-15);
}

TEST(Monodromy, ZeroJacobianIsAShift)
{
    const auto m = linear_model(Mat::Zero(1, 1), {{1.0, Mat::Zero(1, 1)}});
    const auto M = linearized_monodromy(m, std::vector<Vec>(11, scalar(0)), 0);
    // every new node equals the old head
    for (int i = 0; i <= 10; ++i)
        for (int j = 0; j <= 10; ++j) EXPECT_NEAR(M.matrix(i, j), j == 10 ? 1.0 : 0.0, 1e-15);
}

TEST(Monodromy, TwoWindowsCompose)
{
    const auto m = mackey_glass_model(0.2, 0.1, 10, 17);
    const auto tr = integrate(m, HistorySegment::constant(17, 0.5, scalar(0.8)), 170, 0.5);
    const auto nodes = tr.window_nodes(170);
    const auto M2 = linearized_monodromy(m, nodes, 170, 2);
    const auto A = linearized_monodromy(m, nodes, 170);
    const auto B = linearized_monodromy(m, A.end_nodes, A.t_end);
    EXPECT_LT((M2.matrix - B.matrix * A.matrix).norm() / M2.matrix.norm(), 1e-6);
    const auto coc = monodromy_cocycle(m, nodes, 170, 3);
    EXPECT_EQ(coc.size(), 3);
    EXPECT_LT((coc.step(1) - B.matrix).norm(), 1e-12);
}

TEST(Monodromy, EquilibriumEigenvaluesMatchRoots)
{
    const double beta = 0.2, gamma = 0.1, k = 10, tau = 22;
    const double xs = mg_equilibrium(beta, gamma, k);
    const auto m = mackey_glass_model(beta, gamma, k, tau);
    const auto M = linearized_monodromy(m, std::vector<Vec>(65, scalar(xs)), 0);
    Eigen::ComplexEigenSolver<Mat> es(M.matrix);
    std::vector<double> mods;
    for (int i = 0; i < es.eigenvalues().size(); ++i) mods.push_back(std::abs(es.eigenvalues()(i)));
    std::sort(mods.rbegin(), mods.rend());
    const auto rs = char_roots({-gamma, beta * mg_Fprime(xs, k), tau}, 6);
    for (int i = 0; i < 4; ++i) {
        const double expected = std::exp(tau * rs.roots[i].real());
        EXPECT_NEAR(mods[i] / expected, 1.0, 1e-3) << i;
    }
}

TEST(Monodromy, DumpRoundTrip)
{
    Mat A = Mat::Random(6, 6);
    const auto path = (std::filesystem::temp_directory_path() / "lyapdim_roundtrip.bin").string();
    write_monodromy(path, A, 2, 2);
    int n = 0, N = 0;
    const Mat B = read_monodromy(path, n, N);
    EXPECT_EQ(n, 2);
    EXPECT_EQ(N, 2);
    EXPECT_EQ((A - B).norm(), 0);
    std::remove(path.c_str());
    EXPECT_THROW(write_monodromy(path, A, 2, 3), InputError);
    EXPECT_THROW(read_monodromy(path + ".missing", n, N), InputError);
}

TEST(Spectrum, LinearModelMatchesRoots)
{
    const double a = -1, b = 0.6, tau = 1;
    const auto m = linear_model(Mat::Constant(1, 1, a), {{tau, Mat::Constant(1, 1, b)}});
    SpectrumOptions o;
    o.horizon = 4000;
    o.burn_in = 0;
    const auto rep = numerical_lyapunov_spectrum(m, HistorySegment::constant(tau, 0.01, scalar(0)), 3, o);
    const auto rs = char_roots({a, b, tau}, 6);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(rep.lambdas[i], rs.roots[i].real(), 1e-3) << i;
    EXPECT_LT(rep.convergence_gap, 1e-2);
}

TEST(Spectrum, StableMackeyGlassContracts)
{
    const auto m = mackey_glass_model(0.11, 0.1, 10, 2);
    SpectrumOptions o;
    o.horizon = 200;
    const auto rep = numerical_lyapunov_spectrum(m, HistorySegment::constant(2, 0.02, scalar(0.5)), 2, o);
    EXPECT_LT(rep.lambdas[0], 0);
    EXPECT_EQ(rep.kaplan_yorke, 0);
    EXPECT_GE(rep.lambdas[0], rep.lambdas[1]);
}

TEST(Spectrum, SeedDeterminism)
{
    const auto m = mackey_glass_model(0.2, 0.1, 10, 17);
    SpectrumOptions o;
    o.horizon = 20 * 17;
    o.burn_in = 5 * 17;
    const auto h = HistorySegment::constant(17, 0.17, scalar(0.7));
    const auto r1 = numerical_lyapunov_spectrum(m, h, 2, o);
    const auto r2 = numerical_lyapunov_spectrum(m, h, 2, o);
    EXPECT_EQ(r1.lambdas, r2.lambdas);
}

TEST(Ball, MackeyGlassRadiusIsInvariant)
{
    const double beta = 0.2, gamma = 0.1, k = 10;
    const double R = mg_radius(beta, gamma, k);
    const auto rep = invariant_ball_check(mackey_glass_model(beta, gamma, k, 17), R, 10, 170, 0.17);
    EXPECT_TRUE(rep.pass) << rep.message;
    EXPECT_LE(rep.max_sup, R * (1 + 1e-6));
}

TEST(Ball, TooSmallRadiusFails)
{
    // x' = 0.1 x leaves every ball
    const auto rep = invariant_ball_check(decay_model(0.1, 1), 1.0, 3, 10, 0.1);
    EXPECT_FALSE(rep.pass);
    EXPECT_GT(rep.max_sup, 1.0);
}
