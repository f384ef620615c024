#include "lyapdim/verify.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "lyapdim/bounds.hpp"
#include "lyapdim/charroots.hpp"
#include "lyapdim/cocycle.hpp"
#include "lyapdim/dde.hpp"
#include "lyapdim/delayop.hpp"
#include "lyapdim/errors.hpp"
#include "lyapdim/tensor.hpp"

namespace lyapdim {

namespace {

using Rng = std::mt19937_64;

Mat gaussian(Rng& rng, int r, int c, double s = 1)
{
    std::normal_distribution<double> g(0, s);
    Mat M(r, c);
    for (auto& v : M.reshaped()) v = g(rng);
    return M;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

// A check reports its worst observed discrepancy against a limit.
struct Check {
    std::string name;
    double limit;
    std::function<double(Rng&)> worst;
};

std::vector<CheckResult> run(const std::string& suite, const std::vector<Check>& checks, std::uint64_t seed)
{
    std::vector<CheckResult> out;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        Rng rng(seed * 1000003ULL + i);
        CheckResult r{suite, checks[i].name, false, ""};
        try {
            const double w = checks[i].worst(rng);
            r.pass = w <= checks[i].limit;
            r.detail = "worst " + fmt(w) + " (limit " + fmt(checks[i].limit) + ")";
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<Check> tensor_checks()
{
    return {
        {"compound norm equals omega_m", 1e-10,
         [](Rng& rng) {
             double w = 0;
             for (int t = 0; t < 20; ++t) {
                 const Mat A = gaussian(rng, 4, 4);
                 for (int m = 1; m <= 4; ++m) {
                     const double lhs = singular_values(compound_multiplicative(A, m))(0);
                     w = std::max(w, std::abs(lhs - omega_d(A, m)) / std::max(1.0, lhs));
                 }
             }
             return w;
         }},
        {"Cauchy-Binet", 1e-10,
         [](Rng& rng) {
             double w = 0;
             for (int t = 0; t < 20; ++t) {
                 const Mat A = gaussian(rng, 4, 4), B = gaussian(rng, 4, 4);
                 for (int m = 1; m <= 4; ++m) {
                     const Mat lhs = compound_multiplicative(Mat(A * B), m);
                     const Mat rhs = compound_multiplicative(A, m) * compound_multiplicative(B, m);
                     w = std::max(w, (lhs - rhs).norm() / std::max(1.0, lhs.norm()));
                 }
             }
             return w;
         }},
        {"Horn inequality (excess)", 1e-12,
         [](Rng& rng) {
             double w = 0;
             std::uniform_real_distribution<double> ud(0, 4);
             for (int t = 0; t < 50; ++t) {
                 const Mat A = gaussian(rng, 4, 4), B = gaussian(rng, 4, 4);
                 const double d = ud(rng);
                 const double lhs = omega_d(Mat(A * B), d), rhs = omega_d(A, d) * omega_d(B, d);
                 w = std::max(w, (lhs - rhs) / std::max(1.0, rhs));
             }
             return w;
         }},
        {"additive compound spectrum", 1e-9,
         [](Rng& rng) {
             double w = 0;
             for (int t = 0; t < 10; ++t) {
                 const Mat S = gaussian(rng, 4, 4);
                 const Mat A = 0.5 * (S + S.transpose());
                 Eigen::SelfAdjointEigenSolver<Mat> es(A);
                 Vec ev = es.eigenvalues().reverse();
                 for (int m = 1; m <= 4; ++m) {
                     Eigen::SelfAdjointEigenSolver<Mat> ec(compound_additive(A, m));
                     w = std::max(w, std::abs(ec.eigenvalues().maxCoeff() - top_sum(ev, m)));
                 }
             }
             return w;
         }},
        {"trace numbers dominate growth", 1e-9,
         [](Rng& rng) {
             // d/dt log omega_m(e^{tA}) at t = 0 never exceeds the trace-number sum
             double w = 0;
             for (int t = 0; t < 20; ++t) {
                 const Mat A = gaussian(rng, 3, 3);
                 const double h = 1e-6;
                 const Mat E = (h * A).exp();
                 for (int m = 1; m <= 3; ++m) {
                     const double rate = std::log(omega_d(E, m)) / h;
                     w = std::max(w, rate - trace_numbers(A, m).sum() - 1e-5);
                 }
             }
             return std::max(w, 0.0);
         }},
    };
}

MatrixCocycle random_orbit(Rng& rng)
{
    std::vector<Mat> steps;
    for (int i = 0; i < 4; ++i) steps.push_back((0.3 * gaussian(rng, 3, 3)).exp());
    return MatrixCocycle::from_steps(steps, {1, 2, 3, 0}, 1.0);
}

std::vector<Check> cocycle_checks()
{
    return {
        {"non-monotone example exponents", 1e-9,
         [](Rng&) {
             auto d = [](double a, double b, double c) { return Mat(Vec(Eigen::Vector3d(a, b, c)).asDiagonal()); };
             const auto coc = MatrixCocycle::from_generators({d(1, -1, -1), d(0.5, 0, -1), d(0.2, 0.2, 0.2)}, 0.5);
             const auto r = uniform_exponents(coc, 3, 20);
             return std::max({std::abs(r.lambdas[0] - 1), std::abs(r.lambdas[1] + 0.5), std::abs(r.lambdas[2] - 0.1)});
         }},
        {"QR log-volume vs SVD of product", 1e-6,
         [](Rng& rng) {
             double w = 0;
             for (int t = 0; t < 5; ++t) {
                 const auto coc = random_orbit(rng);
                 for (int m = 1; m <= 3; ++m)
                     w = std::max(w, std::abs(volume_growth_qr(coc, 0, m, 20, 1).log_volume -
                                              log_omega_d(singular_values(coc.fiber(0, 20)), m)));
             }
             return w;
         }},
        {"Kaplan-Yorke sandwich (violation)", 0,
         [](Rng& rng) {
             double w = 0;
             for (int t = 0; t < 5; ++t) {
                 const auto coc = random_orbit(rng);
                 const double ky = kaplan_yorke(uniform_exponents(coc, 3, 20).lambdas, 3);
                 const double dl = lyapunov_dimension(coc, 20).value;
                 w = std::max({w, dl - ky - 1e-9, (ky - 1) - dl + 1e-15});
             }
             return std::max(w, 0.0);
         }},
        {"time rescaling covariance", 1e-9,
         [](Rng& rng) {
             const auto coc = random_orbit(rng);
             const auto a = uniform_exponents(coc, 3, 20);
             const auto b = uniform_exponents(coc.time_rescaled(2.5), 3, 8);
             double w = std::abs(kaplan_yorke(a.lambdas, 3) - kaplan_yorke(b.lambdas, 3));
             for (int j = 0; j < 3; ++j) w = std::max(w, std::abs(b.lambdas[j] - 2.5 * a.lambdas[j]));
             return w;
         }},
        {"Liouville trace formula", 1e-5,
         [](Rng& rng) {
             const Mat B = 0.5 * gaussian(rng, 4, 4), C = 0.5 * gaussian(rng, 4, 4);
             const Mat F = gaussian(rng, 4, 2);
             return liouville_check([&](double t) { return Mat(B + std::cos(2 * t) * C); }, {F.col(0), F.col(1)}, 5, 1e-3)
                 .max_rel_error;
         }},
    };
}

std::vector<Check> delayop_checks()
{
    auto spec_of = [](Rng& rng) {
        DelayOperatorSpec s;
        s.n = 2;
        s.tau = 2;
        s.L0 = gaussian(rng, 2, 2);
        s.Ltau = gaussian(rng, 2, 2);
        s.taps = {{0.8, gaussian(rng, 2, 2)}};
        return s;
    };
    return {
        {"adjoint identity (smooth pairs, 32 nodes)", 1e-9,
         [spec_of](Rng& rng) {
             const auto spec = spec_of(rng);
             const auto rho = WeightProfile::for_spec(spec, {0.3, 0.7});
             const auto g = make_grid(spec, 32);
             double w = 0;
             for (int t = 0; t < 10; ++t) {
                 const Vec x = gaussian(rng, 2, 1), y = gaussian(rng, 2, 1), a = gaussian(rng, 2, 1), b = gaussian(rng, 2, 1);
                 const auto v = sample(g, x, [&](int, double th) { return Vec(x + a * std::sin(th)); });
                 // psi on each segment: b cos(theta) plus a constant fixed by the jump conditions
                 const Vec sJ = spec.Ltau.transpose() * y / rho.rho_at_minus_tau() - b * std::cos(-2.0);
                 const double t1 = 0.8;
                 const Vec right = b * std::cos(-t1) + sJ;
                 const Vec left = (spec.taps[0].second.transpose() * y + rho.rho(1, -t1) * right) / rho.rho(0, -t1);
                 const Vec s0 = left - b * std::cos(-t1);
                 const auto u = sample(g, y, [&](int seg, double th) { return Vec(b * std::cos(th) + (seg == 0 ? s0 : sJ)); });
                 const double lhs = weighted_inner(g, rho, apply_L(spec, g, v), u);
                 const double rhs = weighted_inner(g, rho, v, apply_L_star(spec, g, rho, u));
                 w = std::max(w, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
             }
             return w;
         }},
        {"S_L self-adjoint", 1e-9,
         [spec_of](Rng& rng) {
             const auto spec = spec_of(rng);
             const auto rho = WeightProfile::for_spec(spec, {0.3, 0.7});
             const auto g = make_grid(spec, 16);
             double w = 0;
             for (int t = 0; t < 10; ++t) {
                 const auto v = DiscretizedElement::unflatten(g, gaussian(rng, g.size(), 1));
                 const auto u = DiscretizedElement::unflatten(g, gaussian(rng, g.size(), 1));
                 w = std::max(w, std::abs(weighted_inner(g, rho, symmetrize_S(spec, g, rho, v), u) -
                                          weighted_inner(g, rho, v, symmetrize_S(spec, g, rho, u))));
             }
             return w;
         }},
        {"spectrum split of 2 S_L", 1e-9,
         [spec_of](Rng& rng) {
             const auto spec = spec_of(rng);
             const auto rho = WeightProfile::for_spec(spec, {0.3, 0.7});
             const Vec ev = discrete_symmetrization_spectrum(spec, make_grid(spec, 12), rho);
             const Vec head = symmetrized_matrix(spec, rho).eigenvalues;
             double w = 0;
             for (double e : ev) {
                 double best = std::min(std::abs(e + 0.3), std::abs(e + 0.7));
                 for (double h : head) best = std::min(best, std::abs(e - h));
                 w = std::max(w, best);
             }
             return w;
         }},
        {"wrong-way jump detected", 0,
         [](Rng&) {
             DelayOperatorSpec s;
             s.tau = 2;
             s.L0 = Mat::Zero(1, 1);
             s.Ltau = Mat::Ones(1, 1);
             s.taps = {{1.0, Mat::Ones(1, 1)}};
             const bool bad = degeneracy_probe(s, WeightProfile::for_spec(s, {0.8, 0.2})).unbounded;
             const bool good = degeneracy_probe(s, WeightProfile::for_spec(s, {0.2, 0.8})).unbounded;
             return (bad && !good) ? 0.0 : 1.0;
         }},
    };
}

std::vector<Check> bounds_checks()
{
    return {
        {"Lambert root residual", 1e-12,
         [](Rng& rng) {
             std::uniform_real_distribution<double> u(-1, 50);
             double w = 0;
             for (int t = 0; t < 200; ++t) {
                 const double c = u(rng), p = lambert_root(c);
                 w = std::max(w, std::abs(p * std::exp(p + 1) - c) / std::max(1.0, std::abs(c)));
             }
             return w;
         }},
        {"Mackey-Glass slope 0.9957", 5e-5,
         [](Rng&) { return std::abs(mackey_glass_bound(0.2, 0.1, 10, 22).slope - 0.9957); }},
        {"Suarez-Schopf bound 6.675", 1e-3, [](Rng&) { return std::abs(suarez_schopf_bound(0.75, 1, 1.596).d_star - 6.675); }},
        {"Suarez-Schopf scaled bound 5.603", 1e-3,
         [](Rng&) { return std::abs(scaled_bound(suarez_schopf_family(0.75, 1, 1.596)).d_star - 5.603); }},
        {"kappa optimality certificate (violation)", 0,
         [](Rng& rng) {
             std::uniform_real_distribution<double> ua(0, 3), ub(0.05, 2), ut(0.5, 40);
             double w = 0;
             for (int t = 0; t < 50; ++t) {
                 const BoundProblem pr{ut(rng), ua(rng), ub(rng)};
                 const auto b = scalar_bound(pr);
                 w = std::max({w, b.d_star - bound_at_kappa(pr, b.kappa_opt + 1e-4),
                               b.d_star - bound_at_kappa(pr, b.kappa_opt - 1e-4)});
             }
             return std::max(w, 0.0);
         }},
        {"sigma root equals d*", 1e-9,
         [](Rng& rng) {
             std::uniform_real_distribution<double> ua(0, 3), ub(0.05, 2), ut(0.5, 40);
             double w = 0;
             for (int t = 0; t < 50; ++t) {
                 const BoundProblem pr{ut(rng), ua(rng), ub(rng)};
                 const auto b = scalar_bound(pr);
                 const Vec ev = Vec::Constant(1, pr.a + pr.b * std::exp(b.kappa_opt * pr.tau));
                 w = std::max(w, std::abs(alpha_plus_root(ev, b.kappa_opt) - b.d_star) / b.d_star);
             }
             return w;
         }},
    };
}

std::vector<Check> charroots_checks()
{
    return {
        {"argument principle agrees with root list", 0,
         [](Rng& rng) {
             std::uniform_real_distribution<double> ua(-2, 2), ub(-2, 2), ut(0.2, 5);
             double w = 0;
             for (int t = 0; t < 10; ++t) {
                 const CharProblem pr{ua(rng), ub(rng), ut(rng)};
                 const auto rs = char_roots(pr, 12);
                 const double lo = rs.roots.back().real() + 0.5 * (rs.roots.front().real() - rs.roots.back().real()) + 1e-3;
                 double re_hi, im_max;
                 half_plane_box(pr, lo, re_hi, im_max);
                 int listed = 0;
                 for (std::size_t i = 0; i < rs.roots.size(); ++i)
                     if (rs.roots[i].real() > lo) listed += rs.multiplicity[i];
                 w = std::max(w, double(std::abs(contour_count(pr, lo, re_hi, im_max) - listed)));
             }
             return w;
         }},
        {"root residuals", 1e-10,
         [](Rng& rng) {
             std::uniform_real_distribution<double> ua(-2, 2), ub(-2, 2), ut(0.2, 5);
             double w = 0;
             for (int t = 0; t < 10; ++t) {
                 const CharProblem pr{ua(rng), ub(rng), ut(rng)};
                 const auto rs = char_roots(pr, 20);
                 for (std::size_t i = 0; i < rs.roots.size(); ++i)
                     w = std::max(w, std::abs(char_residual(pr, rs.roots[i])) / (1 + std::abs(rs.roots[i])));
             }
             return w;
         }},
        {"Mackey-Glass zero state has one unstable root", 0,
         [](Rng&) { return std::abs(unstable_count(char_roots({-0.1, 0.2, 22}, 8)) - 1.0); }},
    };
}

std::vector<Check> dde_checks()
{
    return {
        {"exponential decay", 1e-8,
         [](Rng&) {
             const auto m = linear_model(Mat::Constant(1, 1, -1), {{1.0, Mat::Zero(1, 1)}});
             const auto tr = integrate(m, HistorySegment::constant(1, 1e-3, Vec::Ones(1)), 5, 1e-3);
             return std::abs(tr.x.back()(0) - std::exp(-5.0));
         }},
        {"method of steps", 1e-10,
         [](Rng&) {
             const auto m = linear_model(Mat::Zero(1, 1), {{1.0, Mat::Constant(1, 1, -1)}});
             const auto tr = integrate(m, HistorySegment::constant(1, 0.01, Vec::Ones(1)), 2, 0.01);
             double w = 0;
             for (std::size_t i = 0; i < tr.t.size(); ++i) {
                 const double t = tr.t[i];
                 const double ex = t <= 0 ? 1 : (t <= 1 ? 1 - t : -(t - 1) + 0.5 * (t - 1) * (t - 1));
                 w = std::max(w, std::abs(tr.x[i](0) - ex));
             }
             return w;
         }},
        {"monodromy composition", 1e-6,
         [](Rng&) {
             const auto m = mackey_glass_model(0.2, 0.1, 10, 17);
             const auto tr = integrate(m, HistorySegment::constant(17, 0.5, Vec::Constant(1, 0.8)), 170, 0.5);
             const auto nodes = tr.window_nodes(170);
             const auto two = linearized_monodromy(m, nodes, 170, 2);
             const auto a = linearized_monodromy(m, nodes, 170);
             const auto b = linearized_monodromy(m, a.end_nodes, a.t_end);
             return (two.matrix - b.matrix * a.matrix).norm() / two.matrix.norm();
         }},
        {"model Jacobians", 1e-6,
         [](Rng& rng) {
             const std::uint64_t s = rng();
             return std::max(jacobian_mismatch(mackey_glass_model(0.2, 0.1, 10, 22), 30, 1.5, s),
                             jacobian_mismatch(suarez_schopf_model(0.75, 1.596, 0.2), 30, 1.5, s));
         }},
    };
}

}  // namespace

std::vector<std::string> suite_names() { return {"tensor", "cocycle", "delayop", "bounds", "charroots", "dde"}; }

std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed)
{
    if (suite == "tensor") return run(suite, tensor_checks(), seed);
    if (suite == "cocycle") return run(suite, cocycle_checks(), seed);
    if (suite == "delayop") return run(suite, delayop_checks(), seed);
    if (suite == "bounds") return run(suite, bounds_checks(), seed);
    if (suite == "charroots") return run(suite, charroots_checks(), seed);
    if (suite == "dde") return run(suite, dde_checks(), seed);
    throw InputError("unknown verification suite '" + suite + "'");
}

}  // namespace lyapdim
