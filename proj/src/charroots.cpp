#include "lyapdim/charroots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "lyapdim/chebyshev.hpp"
#include "lyapdim/errors.hpp"

namespace lyapdim {

namespace {

constexpr double kPi = std::numbers::pi;

cplx dh(const CharProblem& pr, cplx p) { return -pr.tau * pr.b * std::exp(-pr.tau * p) - 1.0; }

bool same_root(cplx p, cplx q) { return std::abs(p - q) <= 1e-8 * (1.0 + std::abs(p)); }

bool root_order(cplx x, cplx y)
{
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
}

struct Refined {
    cplx p;
    double residual;
    bool ok;
};

Refined newton(const CharProblem& pr, cplx p)
{
    const double r0 = std::abs(char_residual(pr, p));
    for (int it = 0; it < 60; ++it) {
        const cplx d = dh(pr, p);
        if (std::abs(d) == 0.0) break;
        const cplx step = char_residual(pr, p) / d;
        p -= step;
        if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) return {p, INFINITY, false};
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(p))) break;
    }
    // snap nearly real roots onto the axis and polish in real arithmetic
    if (std::abs(p.imag()) < 1e-9 * (1.0 + std::abs(p))) {
        double x = p.real();
        for (int it = 0; it < 20; ++it) {
            const double hx = pr.a + pr.b * std::exp(-pr.tau * x) - x;
            const double dx = -pr.tau * pr.b * std::exp(-pr.tau * x) - 1.0;
            if (dx == 0.0) break;
            const double s = hx / dx;
            x -= s;
            if (std::abs(s) <= 1e-16 * (1.0 + std::abs(x))) break;
        }
        const cplx xr(x, 0.0);
        if (std::abs(char_residual(pr, xr)) <= std::abs(char_residual(pr, p))) p = xr;
    }
    const double r = std::abs(char_residual(pr, p));
    const bool ok = r <= 1e-10 * (1.0 + std::abs(p)) && (r <= 1e-6 * r0 || r <= 1e-13 * (1.0 + std::abs(p)));
    return {p, r, ok};
}

// Seeds from the closed form p = a + W_k(c)/tau, c = tau b e^{-a tau},
// with W_k approximated by its branch asymptotics and a few fixed-point
// sweeps; Newton on h does the rest.
std::vector<cplx> branch_seeds(const CharProblem& pr, int K)
{
    std::vector<cplx> seeds;
    const cplx logc(std::log(pr.tau * std::abs(pr.b)) - pr.a * pr.tau, pr.b < 0 ? kPi : 0.0);
    for (int k = -K; k <= K; ++k) {
        const cplx L = logc + cplx(0.0, 2.0 * kPi * k);
        cplx w;
        if (std::abs(L) > 1.5) {
            w = L - std::log(L);
            for (int it = 0; it < 30; ++it) w = L - std::log(w);
        } else {
            w = std::log(1.0 + std::exp(logc));
        }
        seeds.push_back(pr.a + w / pr.tau);
        if (k == 0) {
            // near the branch point the asymptotics are poor; add the real
            // and the branch-point guesses as well
            seeds.push_back(pr.a + (-1.0) / pr.tau);
            seeds.push_back(pr.a + std::log(1.0 + std::abs(std::exp(logc))) / pr.tau);
        }
    }
    return seeds;
}

}  // namespace

cplx char_residual(const CharProblem& pr, cplx p) { return pr.a + pr.b * std::exp(-pr.tau * p) - p; }

std::vector<cplx> pseudospectral_eigenvalues(const CharProblem& pr, int N)
{
    if (!(pr.tau > 0)) throw InputError("characteristic problem needs tau > 0");
    const auto P = cheb::panel(-pr.tau, 0.0, N);
    // node 0 is theta = 0, node N is theta = -tau
    Eigen::MatrixXd A = P.D;
    A.row(0).setZero();
    A(0, 0) = pr.a;
    A(0, N) += pr.b;
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return ev;
}

RootSet char_roots(const CharProblem& pr, int count, const RootOptions& opt)
{
    if (count < 1) throw InputError("char_roots: count must be >= 1");
    if (!(pr.tau > 0)) throw InputError("char_roots: tau must be positive");
    if (!std::isfinite(pr.a) || !std::isfinite(pr.b)) throw InputError("char_roots: nonfinite coefficients");
    RootSet rs;
    rs.count_requested = count;
    if (pr.b == 0.0) {
        rs.roots = {cplx(pr.a, 0.0)};
        rs.residuals = {0.0};
        rs.multiplicity = {1};
        rs.complete = true;
        return rs;
    }

    std::vector<cplx> seeds = branch_seeds(pr, count + 5);
    const int Nspec = count <= opt.spectral_seed_limit ? std::min(std::max(4 * count, 32), opt.spectral_cap) : 64;
    for (cplx s : pseudospectral_eigenvalues(pr, Nspec))
        if (std::isfinite(s.real()) && std::isfinite(s.imag())) seeds.push_back(s);

    std::vector<cplx> found;
    int dropped = 0;
    for (cplx s : seeds) {
        const Refined r = newton(pr, s);
        if (!r.ok) {
            ++dropped;
            continue;
        }
        bool dup = false;
        for (cplx q : found)
            if (same_root(q, r.p)) dup = true;
        if (!dup) found.push_back(r.p);
    }
    // real coefficients: complete conjugate pairs
    const std::size_t nf = found.size();
    for (std::size_t i = 0; i < nf; ++i) {
        if (found[i].imag() == 0.0) continue;
        const cplx c = std::conj(found[i]);
        bool present = false;
        for (cplx q : found)
            if (same_root(q, c)) present = true;
        if (!present) found.push_back(c);
    }
    std::sort(found.begin(), found.end(), root_order);
    if (dropped > 0) rs.warnings.push_back(std::to_string(dropped) + " seeds did not converge and were dropped");
    if (static_cast<int>(found.size()) < count) {
        rs.partial = true;
        rs.warnings.push_back("only " + std::to_string(found.size()) + " certified roots");
    } else {
        found.resize(count);
    }
    for (cplx p : found) {
        rs.roots.push_back(p);
        rs.residuals.push_back(std::abs(char_residual(pr, p)));
        rs.multiplicity.push_back(std::abs(dh(pr, p)) < 1e-8 ? 2 : 1);
    }
    return rs;
}

double local_dimension(const RootSet& rs)
{
    if (rs.roots.empty()) throw NumericalError("local_dimension: empty root set");
    if (rs.roots.front().real() < 0) return 0;
    double S = 0;
    if (rs.complete) {
        // the whole spectrum is listed: partial sums may stay nonnegative
        double tot = 0;
        for (cplx p : rs.roots) tot += p.real();
        if (tot >= 0) return double(rs.roots.size());
    }
    for (std::size_t j = 0; j < rs.roots.size(); ++j) {
        const double next = S + rs.roots[j].real();
        if (next < 0) return double(j) + S / std::abs(rs.roots[j].real());
        S = next;
    }
    throw NumericalError("local_dimension: partial sums never turn negative, needs more roots");
}

int unstable_count(const RootSet& rs)
{
    int n = 0;
    for (cplx p : rs.roots)
        if (p.real() > 0) ++n;
    if (n == static_cast<int>(rs.roots.size()) && !rs.complete)
        throw NumericalError("unstable_count: all returned roots are unstable, needs more roots");
    return n;
}


void half_plane_box(const CharProblem& pr, double c, double& re_hi, double& im_max)
{
    // |p - a| = |b| e^{-tau Re p} < |b| e^{-tau c} for every root right of c
    const double r = std::abs(pr.b) * std::exp(-pr.tau * c);
    re_hi = std::max(pr.a, c) + r + 1.0;
    im_max = r + std::abs(pr.a) + 1.0;
}

int contour_count(const CharProblem& pr, double re_lo, double re_hi, double im_max)
{
    if (!(re_hi > re_lo) || !(im_max > 0)) throw InputError("contour_count: empty rectangle");
    const cplx corners[4] = {{re_lo, -im_max}, {re_hi, -im_max}, {re_hi, im_max}, {re_lo, im_max}};
    double winding = 0;
    // adaptive polyline: split any segment over which arg h turns by more
    // than 0.25 rad
    std::function<double(cplx, cplx, cplx, cplx, int)> seg = [&](cplx z0, cplx z1, cplx h0, cplx h1,
                                                                 int depth) -> double {
        const double d = std::arg(h1 / h0);
        if (std::abs(d) < 0.25 || depth > 40) return d;
        const cplx zm = 0.5 * (z0 + z1);
        const cplx hm = char_residual(pr, zm);
        return seg(z0, zm, h0, hm, depth + 1) + seg(zm, z1, hm, h1, depth + 1);
    };
    for (int e = 0; e < 4; ++e) {
        const cplx za = corners[e], zb = corners[(e + 1) % 4];
        const int base = 256;
        cplx zp = za, hp = char_residual(pr, za);
        for (int i = 1; i <= base; ++i) {
            const cplx z = za + (zb - za) * (double(i) / base);
            const cplx hz = char_residual(pr, z);
            winding += seg(zp, z, hp, hz, 0);
            zp = z;
            hp = hz;
        }
    }
    return static_cast<int>(std::lround(winding / (2 * kPi)));
}

double quantity_at(const CharProblem& pr, Quantity q)
{
    for (int count = 16; count <= 8192; count *= 2) {
        const RootSet rs = char_roots(pr, count);
        try {
            return q == Quantity::LocalDimension ? local_dimension(rs) : double(unstable_count(rs));
        } catch (const NumericalError&) {
            if (rs.complete) throw;
        }
    }
    throw NumericalError("quantity_at: root budget exhausted");
}

namespace {

void linfit(const std::vector<double>& x, const std::vector<double>& y, double& slope, double& icpt)
{
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    slope = den == 0 ? 0 : (n * sxy - sx * sy) / den;
    icpt = (sy - slope * sx) / n;
}

}  // namespace

SlopeFit fit_slope(const std::vector<double>& taus, const std::vector<double>& values)
{
    if (taus.size() < 2 || taus.size() != values.size()) throw InputError("fit_slope: need at least two (tau, value) pairs");
    SlopeFit f;
    f.taus = taus;
    f.values = values;
    linfit(f.taus, f.values, f.slope, f.intercept);
    double mean = 0;
    for (double v : f.values) mean += v;
    mean /= double(f.values.size());
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const double r = f.values[i] - (f.slope * taus[i] + f.intercept);
        ss_res += r * r;
        ss_tot += (f.values[i] - mean) * (f.values[i] - mean);
    }
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    f.rms_residual = std::sqrt(ss_res / double(taus.size()));
    f.low_confidence = f.r2 < 0.99;

    const double hi = *std::max_element(taus.begin(), taus.end());
    const double mid = hi / std::sqrt(10.0), lo = hi / 10.0;
    auto sub = [&](double a, double b) {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < taus.size(); ++i)
            if (taus[i] >= a * (1 - 1e-12) && taus[i] <= b * (1 + 1e-12)) {
                x.push_back(taus[i]);
                y.push_back(f.values[i]);
            }
        double s = NAN, c = 0;
        if (x.size() >= 2) linfit(x, y, s, c);
        return s;
    };
    f.slope_upper_lower_half = sub(lo, mid);
    f.slope_upper_upper_half = sub(mid, hi);
    return f;
}

SlopeFit asymptotic_slope(const CharFamily& fam, Quantity q, const std::vector<double>& taus)
{
    if (taus.size() < 2) throw InputError("asymptotic_slope: need at least two delays");
    std::vector<double> values;
    for (double t : taus) values.push_back(quantity_at(fam(t), q));
    return fit_slope(taus, values);
}

std::vector<double> log_grid(double lo, double hi, int points)
{
    if (!(lo > 0) || !(hi > lo) || points < 2) throw InputError("log_grid: need 0 < lo < hi and >= 2 points");
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = lo * std::pow(hi / lo, double(i) / (points - 1));
    return g;
}

}  // namespace lyapdim
