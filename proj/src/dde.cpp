#include "lyapdim/dde.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "lyapdim/bounds.hpp"
#include "lyapdim/errors.hpp"

namespace lyapdim {

DelayModel mackey_glass_model(double beta, double gamma, double k, double tau)
{
    if (!(tau > 0) || !(k > 1)) throw InputError("Mackey-Glass model needs tau > 0 and k > 1");
    DelayModel m;
    m.name = "mackey_glass";
    m.n = 1;
    m.delays = {tau};
    m.rhs = [=](double, const Vec& x, const std::vector<Vec>& d) {
        return Vec::Constant(1, -gamma * x(0) + beta * mg_F(d[0](0), k));
    };
    m.jac_x = [=](double, const Vec&, const std::vector<Vec>&) { return Mat::Constant(1, 1, -gamma); };
    m.jac_delayed = [=](double, const Vec&, const std::vector<Vec>& d) {
        return std::vector<Mat>{Mat::Constant(1, 1, beta * mg_Fprime(d[0](0), k))};
    };
    return m;
}

DelayModel suarez_schopf_model(double alpha, double tau, double A, double gamma, double beta)
{
    if (!(tau > 0)) throw InputError("Suarez-Schopf model needs tau > 0");
    DelayModel m;
    m.name = "suarez_schopf";
    m.n = 1;
    m.delays = {tau};
    m.rhs = [=](double t, const Vec& x, const std::vector<Vec>& d) {
        const double y = x(0);
        return Vec::Constant(1, gamma * y - alpha * d[0](0) - beta * y * y * y + A * std::sin(t));
    };
    m.jac_x = [=](double, const Vec& x, const std::vector<Vec>&) {
        return Mat::Constant(1, 1, gamma - 3 * beta * x(0) * x(0));
    };
    m.jac_delayed = [=](double, const Vec&, const std::vector<Vec>&) {
        return std::vector<Mat>{Mat::Constant(1, 1, -alpha)};
    };
    if (A != 0) m.forcing_period = 2 * std::numbers::pi;
    return m;
}

DelayModel linear_model(const Mat& L0, const std::vector<std::pair<double, Mat>>& taps)
{
    if (taps.empty()) throw InputError("linear delay model needs at least one delay");
    DelayModel m;
    m.name = "linear";
    m.n = static_cast<int>(L0.rows());
    std::vector<Mat> Ls;
    double prev = 0;
    for (const auto& [t, L] : taps) {
        if (!(t > prev)) throw InputError("linear delay model: delays must increase");
        if (L.rows() != m.n || L.cols() != m.n) throw InputError("linear delay model: matrix size mismatch");
        m.delays.push_back(t);
        Ls.push_back(L);
        prev = t;
    }
    m.rhs = [L0, Ls](double, const Vec& x, const std::vector<Vec>& d) {
        Vec r = L0 * x;
        for (std::size_t j = 0; j < Ls.size(); ++j) r += Ls[j] * d[j];
        return r;
    };
    m.jac_x = [L0](double, const Vec&, const std::vector<Vec>&) { return L0; };
    m.jac_delayed = [Ls](double, const Vec&, const std::vector<Vec>&) { return Ls; };
    return m;
}

std::vector<double> suarez_schopf_equilibria(double alpha, double gamma, double beta)
{
    std::vector<double> eq{0.0};
    if (gamma > alpha) {
        const double r = std::sqrt((gamma - alpha) / beta);
        eq = {r, 0.0, -r};
    }
    return eq;
}

double jacobian_mismatch(const DelayModel& model, int samples, double scale, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale), ut(0, 10);
    const int n = model.n;
    const std::size_t J = model.delays.size();
    double worst = 0;
    for (int s = 0; s < samples; ++s) {
        const double t = ut(rng);
        Vec x(n);
        for (auto& v : x) v = u(rng);
        std::vector<Vec> d(J, Vec(n));
        for (auto& dv : d)
            for (auto& v : dv) v = u(rng);
        const Mat A = model.jac_x(t, x, d);
        const auto B = model.jac_delayed(t, x, d);
        auto rel = [](const Mat& fd, const Mat& an) { return (fd - an).norm() / std::max(1.0, an.norm()); };
        Mat fd(n, n);
        for (int c = 0; c < n; ++c) {
            const double h = 1e-6 * std::max(1.0, std::abs(x(c)));
            Vec xp = x, xm = x;
            xp(c) += h;
            xm(c) -= h;
            fd.col(c) = (model.rhs(t, xp, d) - model.rhs(t, xm, d)) / (2 * h);
        }
        worst = std::max(worst, rel(fd, A));
        for (std::size_t j = 0; j < J; ++j) {
            for (int c = 0; c < n; ++c) {
                const double h = 1e-6 * std::max(1.0, std::abs(d[j](c)));
                auto dp = d, dm = d;
                dp[j](c) += h;
                dm[j](c) -= h;
                fd.col(c) = (model.rhs(t, x, dp) - model.rhs(t, x, dm)) / (2 * h);
            }
            worst = std::max(worst, rel(fd, B[j]));
        }
    }
    return worst;
}

// ---------------------------------------------------------------- history

HistorySegment::HistorySegment(double tau, std::vector<Vec> values, std::vector<Vec> slopes)
    : tau_(tau), values_(std::move(values)), slopes_(std::move(slopes))
{
    if (!(tau_ > 0)) throw InputError("history segment needs tau > 0");
    if (values_.size() < 3) throw InputError("history segment needs at least 3 nodes");
    const auto n = values_.front().size();
    for (const auto& v : values_)
        if (v.size() != n) throw InputError("history segment: inconsistent dimensions");
    const int M = intervals();
    const double h = tau_ / M;
    if (slopes_.empty()) {
        slopes_.resize(values_.size());
        for (int i = 1; i < M; ++i) slopes_[i] = (values_[i + 1] - values_[i - 1]) / (2 * h);
        slopes_[0] = (-3 * values_[0] + 4 * values_[1] - values_[2]) / (2 * h);
        slopes_[M] = (3 * values_[M] - 4 * values_[M - 1] + values_[M - 2]) / (2 * h);
    }
    if (slopes_.size() != values_.size()) throw InputError("history segment: slope count mismatch");
}

HistorySegment HistorySegment::from_function(double tau, double dt, const std::function<Vec(double)>& f,
                                             const std::function<Vec(double)>& df)
{
    const double r = tau / dt;
    const int M = static_cast<int>(std::lround(r));
    if (M < 2 || std::abs(r - M) > 1e-9 * r) throw InputError("history grid step must divide tau");
    std::vector<Vec> v, s;
    for (int i = 0; i <= M; ++i) {
        const double th = -tau + tau * i / M;
        v.push_back(f(th));
        if (df) s.push_back(df(th));
    }
    return HistorySegment(tau, std::move(v), std::move(s));
}

HistorySegment HistorySegment::constant(double tau, double dt, const Vec& x)
{
    return from_function(tau, dt, [&](double) { return x; }, [&](double) { return Vec::Zero(x.size()).eval(); });
}

Vec HistorySegment::operator()(double theta) const
{
    if (theta < -tau_ - 1e-12 * tau_ || theta > 1e-12 * tau_) throw InputError("history evaluated outside [-tau, 0]");
    const int M = intervals();
    const double h = tau_ / M;
    const double s = std::clamp((theta + tau_) / h, 0.0, double(M));
    const int i = std::min(static_cast<int>(std::floor(s)), M - 1);
    const double u = s - i;
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    return h00 * values_[i] + h10 * h * slopes_[i] + h01 * values_[i + 1] + h11 * h * slopes_[i + 1];
}

Vec HistorySegment::derivative(double theta) const
{
    if (theta < -tau_ - 1e-12 * tau_ || theta > 1e-12 * tau_) throw InputError("history evaluated outside [-tau, 0]");
    const int M = intervals();
    const double h = tau_ / M;
    const double s = std::clamp((theta + tau_) / h, 0.0, double(M));
    const int i = std::min(static_cast<int>(std::floor(s)), M - 1);
    const double u = s - i;
    const double d00 = 6 * u * (u - 1), d10 = (1 - u) * (1 - 3 * u);
    const double d01 = -d00, d11 = u * (3 * u - 2);
    return (d00 * values_[i] + d01 * values_[i + 1]) / h + d10 * slopes_[i] + d11 * slopes_[i + 1];
}

HistorySegment HistorySegment::resampled(double dt) const
{
    const double r = tau_ / dt;
    const int M = static_cast<int>(std::lround(r));
    if (M < 2 || std::abs(r - M) > 1e-9 * r) throw InputError("resampling step must divide tau");
    if (M == intervals()) return *this;
    std::vector<Vec> v, d;
    for (int i = 0; i <= M; ++i) {
        const double th = -tau_ + tau_ * i / M;
        v.push_back((*this)(th));
        d.push_back(derivative(th));
    }
    return HistorySegment(tau_, std::move(v), std::move(d));
}

double HistorySegment::sup_norm() const
{
    double s = 0;
    for (const auto& v : values_) s = std::max(s, v.lpNorm<Eigen::Infinity>());
    return s;
}

// ---------------------------------------------------------------- stepper

namespace {

int grid_count(double len, double dt, const char* what)
{
    const double r = len / dt;
    const int c = static_cast<int>(std::lround(r));
    if (c < 1 || std::abs(r - c) > 1e-8 * std::max(1.0, r))
        throw InputError(std::string(what) + ": step " + std::to_string(dt) + " does not divide " + std::to_string(len));
    return c;
}

// RK4 on node values with optional tangent (linearized) histories carried
// along. Nodes are addressed by absolute index; the ring keeps the window
// [k - M - 2, k].
class Stepper {
public:
    Stepper(const DelayModel& model, double dt, double t0, const std::vector<Vec>& window, bool fresh)
        : model_(model), dt_(dt), t0_(t0), fresh_(fresh)
    {
        M_ = grid_count(model.tau(), dt, "delay grid");
        if (M_ < 10) throw InputError("integration step must satisfy dt <= tau / 10");
        for (double d : model.delays) md_.push_back(grid_count(d, dt, "delay grid"));
        if (static_cast<int>(window.size()) != M_ + 1) throw InputError("history window has the wrong number of nodes");
        L_ = M_ + 3;
        xb_.assign(L_, Vec::Zero(model.n));
        for (int i = 0; i <= M_; ++i) xb_[slot(i - M_)] = window[i];
        if (fresh_) {
            std::set<long> b{0};
            for (int a : md_) {
                b.insert(a);
                for (int c : md_) {
                    b.insert(a + c);
                    for (int e : md_) b.insert(a + c + e);
                }
            }
            breaks_.assign(b.begin(), b.end());
        }
    }

    void set_tangents(const std::vector<Mat>& window)
    {
        p_ = static_cast<int>(window.front().cols());
        yb_.assign(L_, Mat::Zero(model_.n, p_));
        for (int i = 0; i <= M_; ++i) yb_[slot(k_ - M_ + i)] = window[i];
    }

    int M() const { return M_; }
    long k() const { return k_; }
    double time() const { return t0_ + dt_ * double(k_); }
    const Vec& x(long i) const { return xb_[slot(i)]; }
    Mat& y(long i) { return yb_[slot(i)]; }
    int tangents() const { return p_; }

    // Y <- Y R^{-1} on every stored node.
    void right_solve(const Mat& R)
    {
        for (auto& Y : yb_) Y = R.transpose().triangularView<Eigen::Lower>().solve(Y.transpose()).transpose();
    }

    void step()
    {
        const long k = k_;
        const double t = time();
        const std::size_t J = md_.size();
        std::vector<Vec> d1(J), d2(J), d4(J);
        std::vector<Stencil> st(J);
        for (std::size_t j = 0; j < J; ++j) {
            const long s = k - md_[j];
            d1[j] = x(s);
            d4[j] = x(s + 1);
            st[j] = stencil(s);
            d2[j] = Vec::Zero(model_.n);
            for (int i = 0; i < 4; ++i) d2[j] += st[j].w[i] * x(st[j].start + i);
        }
        const Vec xk = x(k);
        const double h = dt_;
        const Vec k1 = model_.rhs(t, xk, d1);
        const Vec x2 = xk + h / 2 * k1;
        const Vec k2 = model_.rhs(t + h / 2, x2, d2);
        const Vec x3 = xk + h / 2 * k2;
        const Vec k3 = model_.rhs(t + h / 2, x3, d2);
        const Vec x4 = xk + h * k3;
        const Vec k4 = model_.rhs(t + h, x4, d4);
        Vec xn = xk + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        if (!xn.allFinite()) {
            std::ostringstream os;
            os << "integration blew up at t = " << t + h;
            throw NumericalError(os.str());
        }
        if (p_ > 0) {
            std::vector<Mat> y1(J), y2(J), y4(J);
            for (std::size_t j = 0; j < J; ++j) {
                const long s = k - md_[j];
                y1[j] = y(s);
                y4[j] = y(s + 1);
                y2[j] = Mat::Zero(model_.n, p_);
                for (int i = 0; i < 4; ++i) y2[j] += st[j].w[i] * y(st[j].start + i);
            }
            const Mat Yk = y(k);
            auto lin = [&](double tt, const Vec& xs, const std::vector<Vec>& ds, const Mat& Ys,
                           const std::vector<Mat>& Yd) {
                Mat r = model_.jac_x(tt, xs, ds) * Ys;
                const auto B = model_.jac_delayed(tt, xs, ds);
                for (std::size_t j = 0; j < J; ++j) r += B[j] * Yd[j];
                return r;
            };
            const Mat K1 = lin(t, xk, d1, Yk, y1);
            const Mat K2 = lin(t + h / 2, x2, d2, Yk + h / 2 * K1, y2);
            const Mat K3 = lin(t + h / 2, x3, d2, Yk + h / 2 * K2, y2);
            const Mat K4 = lin(t + h, x4, d4, Yk + h * K3, y4);
            yb_[slot(k + 1)] = Yk + h / 6 * (K1 + 2 * K2 + 2 * K3 + K4);
        }
        xb_[slot(k + 1)] = std::move(xn);
        ++k_;
    }

private:
    struct Stencil {
        long start = 0;
        double w[4] = {0, 0, 0, 0};
    };

    int slot(long i) const
    {
        const long r = i % L_;
        return static_cast<int>(r < 0 ? r + L_ : r);
    }

    bool straddles(long start) const
    {
        for (long b : breaks_)
            if (b > start && b < start + 3) return true;
        return false;
    }

    // Lagrange weights for the midpoint of [s, s+1] on nodes start..start+3.
    Stencil stencil(long s) const
    {
        const long k = k_;
        const long lo_window = k - M_;
        const long lo_stored = fresh_ ? std::max<long>(-M_, k - M_ - 2) : lo_window;
        const long cands[3] = {s - 1, s, s - 2};
        long pick = 0;
        bool found = false;
        for (int pass = 0; pass < 3 && !found; ++pass) {
            const long lo = pass == 1 ? lo_stored : lo_window;
            for (long c : cands) {
                if (c < lo || c + 3 > k) continue;
                if (pass < 2 && straddles(c)) continue;
                pick = c;
                found = true;
                break;
            }
        }
        if (!found) throw NumericalError("no admissible interpolation stencil (delay shorter than 3 steps?)");
        Stencil st;
        st.start = pick;
        const double u = double(s - pick) + 0.5;
        for (int i = 0; i < 4; ++i) {
            double w = 1;
            for (int j = 0; j < 4; ++j)
                if (j != i) w *= (u - j) / double(i - j);
            st.w[i] = w;
        }
        return st;
    }

    const DelayModel& model_;
    double dt_;
    double t0_;
    bool fresh_;
    int M_ = 0;
    int L_ = 0;
    int p_ = 0;
    long k_ = 0;
    std::vector<int> md_;
    std::vector<long> breaks_;
    std::vector<Vec> xb_;
    std::vector<Mat> yb_;
};

Trajectory run(const DelayModel& model, const HistorySegment& h0, double T, double dt, double t0)
{
    if (std::abs(h0.tau() - model.tau()) > 1e-12 * model.tau())
        throw InputError("history length differs from the model delay");
    if (h0.dim() != model.n) throw InputError("history dimension differs from the model");
    const int K = grid_count(T, dt, "integration horizon");
    const HistorySegment h = h0.resampled(dt);
    Stepper st(model, dt, t0, h.values(), true);
    const int M = st.M();
    Trajectory tr;
    tr.n = model.n;
    tr.tau = model.tau();
    tr.dt = dt;
    tr.t0 = t0;
    for (int i = 0; i <= M; ++i) {
        tr.t.push_back(t0 - tr.tau + dt * i);
        tr.x.push_back(h.values()[i]);
    }
    for (int i = 0; i < K; ++i) {
        st.step();
        tr.t.push_back(st.time());
        tr.x.push_back(st.x(st.k()));
    }
    return tr;
}

}  // namespace

std::vector<Vec> Trajectory::window_nodes(double s) const
{
    const int M = static_cast<int>(std::lround(tau / dt));
    const long i = std::lround((s - t.front()) / dt);
    if (i - M < 0 || i >= static_cast<long>(x.size())) throw InputError("trajectory does not cover the requested window");
    return std::vector<Vec>(x.begin() + (i - M), x.begin() + i + 1);
}

HistorySegment Trajectory::segment_at(double s) const { return HistorySegment(tau, window_nodes(s)); }

Trajectory integrate(const DelayModel& model, const HistorySegment& h0, double T, double dt,
                     const IntegrateOptions& opt)
{
    if (!(dt > 0) || dt > model.tau() / 10 * (1 + 1e-12)) throw InputError("integration step must satisfy 0 < dt <= tau / 10");
    Trajectory tr = run(model, h0, T, dt, opt.t0);
    if (opt.estimate_error) {
        const Trajectory fine = run(model, h0, T, dt / 2, opt.t0);
        double e = 0;
        for (std::size_t i = 0; i < tr.x.size(); ++i) e = std::max(e, (tr.x[i] - fine.x[2 * i]).lpNorm<Eigen::Infinity>());
        tr.error_estimate = e;
    }
    return tr;
}

BallReport invariant_ball_check(const DelayModel& model, double R, int sample_count, double T, double dt,
                                std::uint64_t seed)
{
    if (!(R > 0)) throw InputError("invariant ball radius must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0, 1);
    BallReport rep;
    const double tau = model.tau();
    for (int s = 0; s < sample_count; ++s) {
        // a few random modes, rescaled to sup-norm u R with u in (0, 1]
        double c[4], f[4], ph[4];
        for (int i = 0; i < 4; ++i) {
            c[i] = 2 * U(rng) - 1;
            f[i] = 6 * U(rng) / tau;
            ph[i] = 2 * std::numbers::pi * U(rng);
        }
        const double u = s == 0 ? 1.0 : U(rng);
        auto raw = [&](double th) {
            Vec v(model.n);
            for (int j = 0; j < model.n; ++j) {
                v(j) = c[0];
                for (int i = 1; i < 4; ++i) v(j) += c[i] * std::sin(f[i] * th + ph[i] + j);
            }
            return v;
        };
        HistorySegment h = HistorySegment::from_function(tau, dt, raw);
        const double sup = h.sup_norm();
        std::vector<Vec> vals = h.values();
        for (auto& v : vals) v *= u * R / std::max(sup, 1e-300);
        h = HistorySegment(tau, std::move(vals));
        try {
            const Trajectory tr = integrate(model, h, T, dt);
            for (std::size_t i = 0; i < tr.x.size(); ++i) {
                const double v = tr.x[i].lpNorm<Eigen::Infinity>();
                if (v > rep.max_sup) {
                    rep.max_sup = v;
                    rep.worst_sample = s;
                    rep.witness_time = tr.t[i];
                }
            }
        } catch (const NumericalError& e) {
            rep.pass = false;
            rep.worst_sample = s;
            rep.max_sup = INFINITY;
            rep.message = std::string("blowup in sample ") + std::to_string(s) + ": " + e.what();
            return rep;
        }
    }
    rep.pass = rep.max_sup <= R * (1 + 1e-6);
    std::ostringstream os;
    os << (rep.pass ? "PASS" : "FAIL") << ": max sup-norm " << rep.max_sup << " vs R = " << R;
    if (!rep.pass) os << " (sample " << rep.worst_sample << ", t = " << rep.witness_time << ")";
    rep.message = os.str();
    return rep;
}

Monodromy linearized_monodromy(const DelayModel& model, const std::vector<Vec>& nodes, double t, int windows)
{
    if (windows < 1) throw InputError("monodromy needs at least one window");
    const int N = static_cast<int>(nodes.size()) - 1;
    const double dt = model.tau() / N;
    Stepper st(model, dt, t, nodes, false);
    const int n = model.n, P = (N + 1) * n;
    std::vector<Mat> Y(N + 1, Mat::Zero(n, P));
    for (int i = 0; i <= N; ++i)
        for (int c = 0; c < n; ++c) Y[i](c, i * n + c) = 1;
    st.set_tangents(Y);
    for (int s = 0; s < windows * N; ++s) st.step();
    Monodromy out;
    out.matrix.resize(P, P);
    for (int i = 0; i <= N; ++i) {
        const long node = st.k() - N + i;
        out.matrix.middleRows(i * n, n) = st.y(node);
        out.end_nodes.push_back(st.x(node));
    }
    out.t_end = st.time();
    return out;
}

MatrixCocycle monodromy_cocycle(const DelayModel& model, const std::vector<Vec>& nodes, double t, int count)
{
    std::vector<Mat> mats;
    std::vector<Vec> w = nodes;
    for (int c = 0; c < count; ++c) {
        Monodromy m = linearized_monodromy(model, w, t);
        mats.push_back(std::move(m.matrix));
        w = std::move(m.end_nodes);
        t = m.t_end;
    }
    return MatrixCocycle::from_sequence(std::move(mats), model.tau());
}

SpectrumReport numerical_lyapunov_spectrum(const DelayModel& model, const HistorySegment& h0, int m,
                                           const SpectrumOptions& opt)
{
    const double tau = model.tau();
    const double dt = opt.dt > 0 ? opt.dt : tau / 100;
    const double burn = opt.burn_in >= 0 ? opt.burn_in : 50 * tau;
    const double horizon = opt.horizon > 0 ? opt.horizon : 200 * tau;
    if (dt > tau / 10 * (1 + 1e-12)) throw InputError("integration step must satisfy dt <= tau / 10");
    if (m < 1) throw InputError("spectrum order must be >= 1");
    const HistorySegment h = h0.resampled(dt);
    Stepper st(model, dt, 0.0, h.values(), true);
    const int M = st.M();
    const int n = model.n;
    if (m > (M + 1) * n) throw InputError("spectrum order exceeds the grid dimension");
    const int burn_steps = static_cast<int>(std::lround(burn / dt));
    for (int s = 0; s < burn_steps; ++s) st.step();

    // orthonormalization happens once per delay interval
    const int blocks = std::max(2, static_cast<int>(std::lround(horizon / tau)));
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> g;
    std::vector<Mat> Y(M + 1, Mat(n, m));
    for (auto& Yi : Y)
        for (auto& v : Yi.reshaped()) v = g(rng);
    st.set_tangents(Y);

    const double w_end = std::sqrt(dt / 2), w_mid = std::sqrt(dt);
    auto orthonormalize = [&](Vec& acc) {
        Mat Z((M + 2) * n, m);
        const long k = st.k();
        Z.topRows(n) = st.y(k);
        for (int i = 0; i <= M; ++i) {
            const double w = (i == 0 || i == M) ? w_end : w_mid;
            Z.middleRows((i + 1) * n, n) = w * st.y(k - M + i);
        }
        Eigen::HouseholderQR<Mat> qr(Z);
        const Mat R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
        for (int j = 0; j < m; ++j) acc(j) += std::log(std::abs(R(j, j)));
        st.right_solve(R);
    };

    Vec dummy = Vec::Zero(m);
    orthonormalize(dummy);
    Vec acc = Vec::Zero(m);
    SpectrumReport rep;
    for (int b = 1; b <= blocks; ++b) {
        for (int s = 0; s < M; ++s) st.step();
        orthonormalize(acc);
        if (b == blocks / 2) {
            const double T = tau * b;
            for (int j = 0; j < m; ++j) rep.lambdas_half.push_back(acc(j) / T);
        }
    }
    rep.horizon = tau * blocks;
    for (int j = 0; j < m; ++j) rep.lambdas.push_back(acc(j) / rep.horizon);
    for (int j = 0; j < m; ++j) rep.convergence_gap = std::max(rep.convergence_gap, std::abs(rep.lambdas[j] - rep.lambdas_half[j]));
    try {
        rep.kaplan_yorke = kaplan_yorke(rep.lambdas, (M + 1) * n);
    } catch (const NumericalError&) {
        rep.ky_resolved = false;
        rep.kaplan_yorke = m;
    }
    return rep;
}

void write_monodromy(const std::string& path, const Mat& M, int n, int N)
{
    if (M.rows() != M.cols() || M.rows() != (N + 1) * n) throw InputError("monodromy dump: size does not match n and N");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open " + path + " for writing");
    f.write("LYPD", 4);
    const std::int32_t hdr[2] = {n, N};
    f.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
    const Eigen::Matrix<double, -1, -1, Eigen::RowMajor> R = M;
    f.write(reinterpret_cast<const char*>(R.data()), static_cast<std::streamsize>(sizeof(double) * R.size()));
}

Mat read_monodromy(const std::string& path, int& n, int& N)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open " + path);
    char magic[4];
    std::int32_t hdr[2];
    f.read(magic, 4);
    f.read(reinterpret_cast<char*>(hdr), sizeof hdr);
    if (!f || std::memcmp(magic, "LYPD", 4) != 0) throw InputError(path + " is not a monodromy dump");
    n = hdr[0];
    N = hdr[1];
    const int P = (N + 1) * n;
    Eigen::Matrix<double, -1, -1, Eigen::RowMajor> R(P, P);
    f.read(reinterpret_cast<char*>(R.data()), static_cast<std::streamsize>(sizeof(double) * R.size()));
    if (!f) throw InputError(path + " is truncated");
    return R;
}

}  // namespace lyapdim
