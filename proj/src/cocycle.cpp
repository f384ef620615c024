#include "lyapdim/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "lyapdim/errors.hpp"

namespace lyapdim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t steps_for(double T, double h, const char* what)
{
    if (!(T > 0) || !(h > 0)) throw InputError(std::string(what) + ": horizon and step must be positive");
    const double r = T / h;
    const auto k = static_cast<std::size_t>(std::llround(r));
    if (k == 0 || std::abs(r - double(k)) > 1e-9 * std::max(1.0, r))
        throw InputError(std::string(what) + ": step does not divide the horizon");
    return k;
}

Mat orthonormal_columns(const Mat& Y)
{
    Eigen::HouseholderQR<Mat> qr(Y);
    return qr.householderQ() * Mat::Identity(Y.rows(), Y.cols());
}

Mat seeded_frame(int n, int m)
{
    std::mt19937_64 rng(0x5eed0f4a11ULL + 131 * n + m);
    std::normal_distribution<double> g;
    Mat Y(n, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) Y(i, j) = g(rng);
    return orthonormal_columns(Y);
}

// One QR step: Q <- qr(B Q), returns the log-volume increment.
double qr_step(const Mat& B, Mat& Q, bool& collapsed)
{
    const Mat Y = B * Q;
    Eigen::HouseholderQR<Mat> qr(Y);
    const Mat& R = qr.matrixQR();
    double inc = 0;
    for (Eigen::Index i = 0; i < Q.cols(); ++i) {
        const double r = std::abs(R(i, i));
        if (!(r > 0) || !std::isfinite(r)) {
            collapsed = true;
            return kNegInf;
        }
        inc += std::log(r);
    }
    Q = qr.householderQ() * Mat::Identity(Y.rows(), Y.cols());
    return inc;
}

std::vector<std::size_t> default_sample(const MatrixCocycle& coc, std::size_t K,
                                        const std::vector<std::size_t>& sample)
{
    std::vector<std::size_t> out;
    if (!sample.empty()) {
        for (auto q : sample) {
            if (q >= coc.size()) throw InputError("base point out of range");
            if (!coc.runs(q, K))
                throw InputError("base point " + std::to_string(q) + " cannot be advanced over the horizon");
            out.push_back(q);
        }
        return out;
    }
    for (std::size_t q = 0; q < coc.size(); ++q)
        if (coc.runs(q, K)) out.push_back(q);
    if (out.empty()) throw InputError("no base point can be advanced over the horizon");
    return out;
}

}  // namespace

MatrixCocycle MatrixCocycle::from_steps(std::vector<Mat> steps, std::vector<std::size_t> next,
                                        double h, std::vector<std::string> labels)
{
    if (steps.empty()) throw InputError("cocycle needs at least one base point");
    if (!(h > 0)) throw InputError("cocycle step must be positive");
    if (next.size() != steps.size()) throw InputError("next map size mismatch");
    MatrixCocycle c;
    c.n_ = static_cast<int>(steps.front().rows());
    for (std::size_t q = 0; q < steps.size(); ++q) {
        if (steps[q].rows() != c.n_ || steps[q].cols() != c.n_)
            throw InputError("fiber matrices must all be n x n");
        if (!steps[q].allFinite()) throw InputError("fiber matrix has nonfinite entries");
        if (next[q] != npos && next[q] >= steps.size()) throw InputError("next map out of range");
    }
    c.h_ = h;
    c.step_ = std::move(steps);
    c.next_ = std::move(next);
    c.gen_.assign(c.step_.size(), std::nullopt);
    if (labels.empty())
        for (std::size_t q = 0; q < c.step_.size(); ++q) labels.push_back("q" + std::to_string(q));
    if (labels.size() != c.step_.size()) throw InputError("label count mismatch");
    c.labels_ = std::move(labels);
    return c;
}

MatrixCocycle MatrixCocycle::from_generators(std::vector<Mat> generators, double h,
                                             std::vector<std::size_t> next,
                                             std::vector<std::string> labels)
{
    if (next.empty())
        for (std::size_t q = 0; q < generators.size(); ++q) next.push_back(q);
    std::vector<Mat> steps;
    steps.reserve(generators.size());
    for (const auto& A : generators) {
        if (A.rows() != A.cols()) throw InputError("generator must be square");
        steps.push_back((h * A).exp());
    }
    MatrixCocycle c = from_steps(std::move(steps), std::move(next), h, std::move(labels));
    for (std::size_t q = 0; q < generators.size(); ++q) c.gen_[q] = std::move(generators[q]);
    return c;
}

MatrixCocycle MatrixCocycle::from_sequence(std::vector<Mat> steps, double h)
{
    std::vector<std::size_t> next(steps.size());
    for (std::size_t q = 0; q < steps.size(); ++q) next[q] = q + 1 < steps.size() ? q + 1 : npos;
    return from_steps(std::move(steps), std::move(next), h);
}

std::size_t MatrixCocycle::advance(std::size_t q, std::size_t k) const
{
    for (std::size_t i = 0; i < k; ++i) {
        if (q == npos) return npos;
        if (next_[q] == q) return q;
        q = next_[q];
    }
    return q;
}

bool MatrixCocycle::runs(std::size_t q, std::size_t k) const
{
    if (k == 0) return true;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        if (next_[q] == q) return true;
        q = next_[q];
        if (q == npos) return false;
    }
    return true;
}

Mat MatrixCocycle::fiber(std::size_t q, std::size_t k) const
{
    Mat P = Mat::Identity(n_, n_);
    for (std::size_t i = 0; i < k; ++i) {
        if (q == npos) throw InputError("fiber requested beyond the end of the base");
        P = step_[q] * P;
        q = next_[q];
    }
    return P;
}

MatrixCocycle MatrixCocycle::time_rescaled(double kappa) const
{
    if (!(kappa > 0)) throw InputError("time rescaling factor must be positive");
    MatrixCocycle c = *this;
    c.h_ = h_ / kappa;
    for (auto& g : c.gen_)
        if (g) *g *= kappa;
    return c;
}

GrowthResult volume_growth_qr(const MatrixCocycle& coc, std::size_t q, int m, double T, double dt)
{
    const int n = coc.dim();
    if (m < 1 || m > n) throw InputError("volume_growth_qr: order outside [1, n]");
    if (q >= coc.size()) throw InputError("volume_growth_qr: base point out of range");
    const std::size_t K = steps_for(T, coc.h(), "volume_growth_qr");
    const std::size_t r = steps_for(dt, coc.h(), "volume_growth_qr");
    if (K % r != 0) throw InputError("volume_growth_qr: dt must divide T");

    // block matrices between re-orthonormalizations
    std::vector<Mat> blocks;
    blocks.reserve(K / r);
    std::size_t p = q;
    for (std::size_t b = 0; b < K / r; ++b) {
        Mat B = Mat::Identity(n, n);
        for (std::size_t i = 0; i < r; ++i) {
            if (p == MatrixCocycle::npos) throw InputError("volume_growth_qr: base ends before the horizon");
            B = coc.step(p) * B;
            p = coc.next(p);
        }
        blocks.push_back(std::move(B));
    }

    GrowthResult res;
    Mat Q0 = seeded_frame(n, m);
    double prev = kNegInf;
    for (int it = 0; it < 60; ++it) {
        Mat Q = Q0;
        std::vector<double> incs;
        incs.reserve(blocks.size());
        double total = 0;
        bool collapsed = false;
        for (const auto& B : blocks) {
            const double inc = qr_step(B, Q, collapsed);
            if (collapsed) break;
            incs.push_back(inc);
            total += inc;
        }
        res.subspace_iterations = it + 1;
        if (collapsed) {
            res.collapsed = true;
            res.log_volume = kNegInf;
            res.rate = kNegInf;
            res.tail_rate = kNegInf;
            res.per_step.clear();
            return res;
        }
        res.per_step = std::move(incs);
        res.log_volume = total;
        if (it > 0 && std::abs(total - prev) <= 1e-14 * std::max(1.0, std::abs(total))) break;
        prev = total;
        for (auto b = blocks.rbegin(); b != blocks.rend(); ++b) {
            bool c = false;
            qr_step(b->transpose(), Q, c);
            if (c) break;
        }
        Q0 = Q;
    }
    res.rate = res.log_volume / T;
    // the finite-horizon rate carries an O(1/T) conditioning term; once the
    // frame has settled the late increments are free of it
    const std::size_t half = res.per_step.size() / 2;
    double tail = 0;
    for (std::size_t i = half; i < res.per_step.size(); ++i) tail += res.per_step[i];
    res.tail_rate = tail / (double(res.per_step.size() - half) * dt);
    return res;
}

ExponentReport uniform_exponents(const MatrixCocycle& coc, int m_max, double T,
                                 const std::vector<std::size_t>& sample)
{
    const int n = coc.dim();
    if (m_max < 1 || m_max > n) throw InputError("uniform_exponents: m_max outside [1, n]");
    const std::size_t K = steps_for(T, coc.h(), "uniform_exponents");
    const auto pts = default_sample(coc, K, sample);

    ExponentReport rep;
    rep.m = m_max;
    rep.horizon = T;
    rep.sample_size = pts.size();
    double prev_sum = 0;
    for (int m = 1; m <= m_max; ++m) {
        double best = kNegInf;
        std::size_t arg = pts.front();
        for (auto q : pts) {
            const double r = volume_growth_qr(coc, q, m, T, coc.h()).rate;
            if (r > best) {
                best = r;
                arg = q;
            }
        }
        rep.partial_sums.push_back(best);
        rep.argmax.push_back(arg);
        rep.lambdas.push_back(best - prev_sum);
        if (m > 1 && best > prev_sum) rep.monotone_sums = false;
        prev_sum = best;
    }
    return rep;
}

ExponentReport uniform_exponents_converged(const MatrixCocycle& coc, int m_max, double T0,
                                           double tol, std::size_t max_steps)
{
    double T = T0;
    ExponentReport a = uniform_exponents(coc, m_max, T);
    while (true) {
        const double T2 = 2 * T;
        if (T2 / coc.h() > double(max_steps) + 0.5) {
            a.converged = false;
            return a;
        }
        ExponentReport b = uniform_exponents(coc, m_max, T2);
        double diff = 0;
        for (int j = 0; j < m_max; ++j)
            diff = std::max(diff, std::abs(a.partial_sums[j] - b.partial_sums[j]));
        if (diff <= tol) {
            b.converged = true;
            return b;
        }
        a = std::move(b);
        T = T2;
    }
}

double kaplan_yorke(const std::vector<double>& lambdas, int n)
{
    if (lambdas.empty()) throw InputError("kaplan_yorke: empty exponent list");
    if (n < 1) throw InputError("kaplan_yorke: dimension must be positive");
    if (lambdas.front() < 0) return 0;
    const int avail = std::min<int>(n, static_cast<int>(lambdas.size()));
    std::vector<double> S(avail + 1, 0.0);
    for (int j = 0; j < avail; ++j) S[j + 1] = S[j] + lambdas[j];
    int m = 0;
    for (int j = 1; j <= avail; ++j)
        if (S[j] >= 0) m = j;
    if (m == n) return n;
    if (m == avail) throw NumericalError("kaplan_yorke: partial sums still nonnegative at the last supplied exponent");
    const double next = lambdas[m];
    if (!std::isfinite(next)) return m;
    return m + S[m] / std::abs(next);
}

DimensionResult lyapunov_dimension(const MatrixCocycle& coc, double T, double tol,
                                   const std::vector<std::size_t>& sample)
{
    const int n = coc.dim();
    const std::size_t K = steps_for(T, coc.h(), "lyapunov_dimension");
    const auto pts = default_sample(coc, K, sample);

    // logw[i][m] = log omega_m of the fiber at the i-th sampled point
    std::vector<std::vector<double>> logw(pts.size(), std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (int m = 1; m <= n; ++m) logw[i][m] = volume_growth_qr(coc, pts[i], m, T, coc.h()).log_volume;

    auto f = [&](double d) {
        const int m = std::min(static_cast<int>(std::floor(d)), n);
        const double g = d - m;
        double best = kNegInf;
        for (const auto& lw : logw) {
            double v;
            if (g <= 0) v = lw[m];
            else if (m >= n) v = kNegInf;
            else if (lw[m + 1] == kNegInf) v = kNegInf;
            else v = (1 - g) * lw[m] + g * lw[m + 1];
            best = std::max(best, v);
        }
        return best / T;
    };

    DimensionResult res;
    for (int m = 0; m < n; ++m) {
        const double lo0 = m, hi0 = m + 1;
        if ((m > 0 && f(lo0) < 0) || (f(lo0) <= 0 && f(lo0 + tol) < 0)) {
            res.value = lo0;
            return res;
        }
        // f is a maximum of affine functions on [m, m+1]: convex, so the
        // first sign change sits left of its minimum
        double a = lo0, b = hi0;
        for (int it = 0; it < 200 && b - a > tol * 0.1; ++it) {
            const double c1 = a + (b - a) / 3, c2 = b - (b - a) / 3;
            if (f(c1) <= f(c2)) b = c2;
            else a = c1;
        }
        double xmin = 0.5 * (a + b);
        if (f(hi0) < f(xmin)) xmin = hi0;
        if (f(xmin) >= 0) continue;
        double lo = lo0, hi = xmin;
        if (f(lo) < 0) {
            res.value = lo;
            return res;
        }
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) < 0 ? hi : lo) = mid;
        }
        res.value = 0.5 * (lo + hi);
        return res;
    }
    res.value = n;
    res.saturated = true;
    return res;
}

MetricResult lyapunov_metric(const MatrixCocycle& coc, double nu, double T, double p,
                             std::size_t q, const Vec& xi)
{
    if (!(p >= 1)) throw InputError("lyapunov_metric: exponent p must be >= 1");
    if (xi.size() != coc.dim()) throw InputError("lyapunov_metric: vector dimension mismatch");
    if (q >= coc.size()) throw InputError("lyapunov_metric: base point out of range");
    const std::size_t K = steps_for(T, coc.h(), "lyapunov_metric");
    const double h = coc.h();

    MetricResult res;
    const double x0 = xi.norm();
    if (x0 == 0) {
        res.undefined = true;
        res.alpha = res.alpha_step = std::numeric_limits<double>::quiet_NaN();
        return res;
    }
    // work with xi / |xi|: the metric is homogeneous and alpha scale-free
    Vec v = xi / x0;
    std::vector<double> w(K + 1);
    std::size_t b = q;
    w[0] = 1.0;
    for (std::size_t k = 1; k <= K; ++k) {
        if (b == MatrixCocycle::npos) throw InputError("lyapunov_metric: base ends before the horizon");
        v = coc.step(b) * v;
        b = coc.next(b);
        w[k] = std::pow(std::exp(-nu * double(k) * h) * v.norm(), p);
    }
    double left = 0;
    for (std::size_t k = 0; k < K; ++k) left += w[k];
    left *= h;
    const double trap = left + 0.5 * h * (w[K] - w[0]);

    res.metric = x0 * std::pow(trap, 1.0 / p);
    res.alpha = nu + (w[K] - w[0]) / (p * trap);
    res.alpha_step = nu + std::log1p(h * (w[K] - w[0]) / left) / (p * h);
    const double growth = std::log(v.norm()) / T;
    res.nu_too_small = !(nu > growth);
    return res;
}

double adapted_horizon(const MatrixCocycle& coc, double nu, double p,
                       const std::vector<std::pair<std::size_t, Vec>>& samples, double T0,
                       int max_doublings)
{
    double T = T0;
    for (int k = 0; k <= max_doublings; ++k, T *= 2) {
        bool ok = true;
        for (const auto& [q, xi] : samples) {
            if (!(lyapunov_metric(coc, nu, T, p, q, xi).alpha < nu)) {
                ok = false;
                break;
            }
        }
        if (ok) return T;
    }
    return -1;
}

namespace {

struct FrameState {
    Mat V;
    double s;
};

double projected_trace(const Mat& A, const Mat& V)
{
    const Mat G = V.transpose() * V;
    return G.ldlt().solve(V.transpose() * A * V).trace();
}

FrameState rhs(const GeneratorPath& A, double t, const FrameState& x)
{
    const Mat At = A(t);
    return {At * x.V, projected_trace(At, x.V)};
}

double log_gram_volume(const Mat& V)
{
    return 0.5 * std::log((V.transpose() * V).determinant());
}

}  // namespace

LiouvilleResult liouville_check(const GeneratorPath& A, const std::vector<Vec>& frame, double T,
                                double dt)
{
    if (frame.empty()) throw InputError("liouville_check: empty frame");
    const auto n = frame.front().size();
    const auto m = static_cast<Eigen::Index>(frame.size());
    if (m > n) throw InputError("liouville_check: more frame vectors than dimensions");
    Mat V(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        if (frame[j].size() != n) throw InputError("liouville_check: frame dimension mismatch");
        V.col(j) = frame[j];
    }
    const Eigen::JacobiSVD<Mat> svd(V);
    if (svd.singularValues()(m - 1) <= 1e-12 * svd.singularValues()(0))
        throw InputError("liouville_check: frame is degenerate at t = 0");
    const std::size_t K = steps_for(T, dt, "liouville_check");

    FrameState x{V, 0.0};
    const double lv0 = log_gram_volume(V);
    LiouvilleResult res;
    for (std::size_t k = 0; k < K; ++k) {
        const double t = double(k) * dt;
        const FrameState k1 = rhs(A, t, x);
        const FrameState k2 = rhs(A, t + dt / 2, {x.V + dt / 2 * k1.V, x.s + dt / 2 * k1.s});
        const FrameState k3 = rhs(A, t + dt / 2, {x.V + dt / 2 * k2.V, x.s + dt / 2 * k2.s});
        const FrameState k4 = rhs(A, t + dt, {x.V + dt * k3.V, x.s + dt * k3.s});
        x.V += dt / 6 * (k1.V + 2 * k2.V + 2 * k3.V + k4.V);
        x.s += dt / 6 * (k1.s + 2 * k2.s + 2 * k3.s + k4.s);
        const double lv = log_gram_volume(x.V) - lv0;
        res.max_rel_error = std::max(res.max_rel_error, std::abs(std::expm1(lv - x.s)));
        res.final_log_volume = lv;
        res.final_trace_integral = x.s;
    }
    return res;
}

std::vector<double> liouville_orders(const GeneratorPath& A, const std::vector<Vec>& frame,
                                     double T, double dt0, int levels)
{
    std::vector<double> err;
    double dt = dt0;
    for (int l = 0; l < levels; ++l, dt /= 2) err.push_back(liouville_check(A, frame, T, dt).max_rel_error);
    std::vector<double> orders;
    for (std::size_t l = 0; l + 1 < err.size(); ++l) orders.push_back(std::log2(err[l] / err[l + 1]));
    return orders;
}

EvpResult evp_finite_base(const MatrixCocycle& coc, int m, double T)
{
    const int n = coc.dim();
    if (m < 1 || m > n) throw InputError("evp_finite_base: order outside [1, n]");
    EvpResult res;
    res.max_over_base = kNegInf;
    for (std::size_t q = 0; q < coc.size(); ++q) {
        if (!coc.is_equilibrium(q))
            throw InputError("evp_finite_base: base point " + coc.label(q) + " is not an equilibrium");
        Vec rates(n);
        if (const auto& A = coc.generator(q)) {
            rates = A->eigenvalues().real();
        } else {
            const Eigen::VectorXcd mu = coc.step(q).eigenvalues();
            for (int i = 0; i < n; ++i) rates(i) = std::log(std::abs(mu(i))) / coc.h();
        }
        std::sort(rates.data(), rates.data() + n, std::greater<double>());
        const double r = top_sum(rates, m);
        res.per_point.push_back(r);
        if (r > res.max_over_base) {
            res.max_over_base = r;
            res.argmax = q;
        }
    }
    res.uniform_rate = kNegInf;
    for (std::size_t q = 0; q < coc.size(); ++q)
        res.uniform_rate = std::max(res.uniform_rate, volume_growth_qr(coc, q, m, T, coc.h()).rate);
    return res;
}

double averaged_exponent(const MatrixCocycle& coc, int m)
{
    const int n = coc.dim();
    if (m < 1 || m > n) throw InputError("averaged_exponent: order outside [1, n]");
    std::vector<double> alpha(coc.size());
    for (std::size_t q = 0; q < coc.size(); ++q) {
        const auto& A = coc.generator(q);
        if (!A) throw InputError("averaged_exponent: base point " + coc.label(q) + " has no generator");
        alpha[q] = top_sum(trace_numbers(*A, m), m);
    }
    double best = kNegInf;
    for (std::size_t q = 0; q < coc.size(); ++q) {
        double acc = 0;
        std::size_t len = 0, p = q;
        do {
            if (p == MatrixCocycle::npos || len > coc.size())
                throw InputError("averaged_exponent: base point " + coc.label(q) + " is not on a periodic orbit");
            acc += alpha[p];
            ++len;
            p = coc.next(p);
        } while (p != q);
        best = std::max(best, acc / double(len));
    }
    return best;
}

}  // namespace lyapdim
