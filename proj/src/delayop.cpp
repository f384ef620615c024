#include "lyapdim/delayop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lyapdim/errors.hpp"

namespace lyapdim {

namespace {

void check_square(const Mat& M, int n, const char* what)
{
    if (M.rows() != n || M.cols() != n)
        throw InputError(std::string("delay operator: ") + what + " must be " + std::to_string(n) + "x" +
                         std::to_string(n));
}

double domain_tol(const DiscretizedElement& v)
{
    return 1e-8 * std::max(1.0, v.flatten().lpNorm<Eigen::Infinity>());
}

void check_matching(const DelayGrid& g, const DiscretizedElement& v)
{
    if (v.head.size() != g.n || static_cast<int>(v.tail.size()) != g.segments())
        throw InputError("discretized element does not match the grid");
    for (const auto& t : v.tail)
        if (t.rows() != g.nodes() || t.cols() != g.n) throw InputError("discretized element does not match the grid");
}

void check_profile(const DelayGrid& g, const WeightProfile& rho)
{
    if (rho.segments() != g.segments() || rho.cuts.size() != g.cuts.size())
        throw InputError("weight profile partition does not match the delay taps");
    for (std::size_t i = 0; i < g.cuts.size(); ++i)
        if (std::abs(rho.cuts[i] - g.cuts[i]) > 1e-12 * g.tau)
            throw InputError("weight profile partition does not match the delay taps");
}

// Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, Vec& x, Vec& w)
{
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x(i) = z;
        w(i) = 2 / ((1 - z * z) * dp * dp);
    }
}

}  // namespace

void DelayOperatorSpec::validate() const
{
    if (n < 1) throw InputError("delay operator: n must be >= 1");
    if (!(tau > 0)) throw InputError("delay operator: tau must be positive");
    check_square(L0, n, "L0");
    check_square(Ltau, n, "L_tau");
    double prev = 0;
    for (const auto& [t, M] : taps) {
        if (!(t > prev) || !(t < tau)) throw InputError("delay operator: taps must increase strictly inside (0, tau)");
        check_square(M, n, "tap matrix");
        prev = t;
    }
}

std::vector<double> DelayOperatorSpec::cuts() const
{
    std::vector<double> c{0.0};
    for (const auto& tp : taps) c.push_back(tp.first);
    c.push_back(tau);
    return c;
}

WeightProfile WeightProfile::uniform(double kappa, double tau)
{
    return {{kappa}, {0.0, tau}};
}

WeightProfile WeightProfile::for_spec(const DelayOperatorSpec& spec, std::vector<double> kappas)
{
    WeightProfile w{std::move(kappas), spec.cuts()};
    if (static_cast<int>(w.kappas.size()) + 1 != static_cast<int>(w.cuts.size()))
        throw InputError("weight profile needs one kappa per delay segment");
    return w;
}

double WeightProfile::rho(int segment, double theta) const { return std::exp(kappas[segment] * theta); }

double WeightProfile::rho_at_minus_tau() const { return std::exp(-kappas.back() * cuts.back()); }

double WeightProfile::jump(int j) const
{
    return std::exp(-kappas[j - 1] * cuts[j]) - std::exp(-kappas[j] * cuts[j]);
}

bool WeightProfile::increasing() const
{
    for (std::size_t j = 1; j < kappas.size(); ++j)
        if (!(kappas[j] > kappas[j - 1])) return false;
    return true;
}

DelayGrid make_grid(const DelayOperatorSpec& spec, int nodes_per_segment)
{
    spec.validate();
    if (nodes_per_segment < 2) throw InputError("delay grid needs at least 2 nodes per segment");
    DelayGrid g;
    g.n = spec.n;
    g.tau = spec.tau;
    g.cuts = spec.cuts();
    for (std::size_t j = 0; j + 1 < g.cuts.size(); ++j)
        g.panels.push_back(cheb::panel(-g.cuts[j + 1], -g.cuts[j], nodes_per_segment - 1));
    return g;
}

Vec DiscretizedElement::flatten() const
{
    Eigen::Index total = head.size();
    for (const auto& t : tail) total += t.size();
    Vec v(total);
    v.head(head.size()) = head;
    Eigen::Index off = head.size();
    for (const auto& t : tail)
        for (Eigen::Index i = 0; i < t.rows(); ++i) {
            v.segment(off, t.cols()) = t.row(i).transpose();
            off += t.cols();
        }
    return v;
}

DiscretizedElement DiscretizedElement::unflatten(const DelayGrid& g, const Vec& v)
{
    if (v.size() != g.size()) throw InputError("flattened element has the wrong length");
    DiscretizedElement e;
    e.head = v.head(g.n);
    Eigen::Index off = g.n;
    for (int j = 0; j < g.segments(); ++j) {
        Mat t(g.nodes(), g.n);
        for (int i = 0; i < g.nodes(); ++i) {
            t.row(i) = v.segment(off, g.n).transpose();
            off += g.n;
        }
        e.tail.push_back(std::move(t));
    }
    return e;
}

DiscretizedElement sample(const DelayGrid& g, const Vec& head, const SegmentFunction& f)
{
    if (head.size() != g.n) throw InputError("sample: head dimension mismatch");
    DiscretizedElement e;
    e.head = head;
    for (int j = 0; j < g.segments(); ++j) {
        const auto& P = g.panels[j];
        Mat t(g.nodes(), g.n);
        for (int i = 0; i < g.nodes(); ++i) t.row(i) = f(j, P.x(i)).transpose();
        e.tail.push_back(std::move(t));
    }
    return e;
}

double weighted_inner(const DelayGrid& g, const WeightProfile& rho, const DiscretizedElement& v,
                      const DiscretizedElement& w)
{
    check_matching(g, v);
    check_matching(g, w);
    check_profile(g, rho);
    double s = v.head.dot(w.head);
    for (int j = 0; j < g.segments(); ++j) {
        const auto& P = g.panels[j];
        for (int i = 0; i < g.nodes(); ++i) s += P.w(i) * rho.rho(j, P.x(i)) * v.tail[j].row(i).dot(w.tail[j].row(i));
    }
    return s;
}

std::vector<double> domain_residuals(const DelayGrid& g, const DiscretizedElement& v)
{
    check_matching(g, v);
    const int last = g.nodes() - 1;
    std::vector<double> r{(v.tail[0].row(0).transpose() - v.head).norm()};
    for (int j = 1; j < g.segments(); ++j) r.push_back((v.tail[j - 1].row(last) - v.tail[j].row(0)).norm());
    return r;
}

std::vector<double> adjoint_residuals(const DelayOperatorSpec& spec, const DelayGrid& g,
                                      const WeightProfile& rho, const DiscretizedElement& w)
{
    check_matching(g, w);
    check_profile(g, rho);
    const int last = g.nodes() - 1;
    const int J = g.segments() - 1;
    std::vector<double> r;
    r.push_back((rho.rho_at_minus_tau() * w.tail[J].row(last).transpose() - spec.Ltau.transpose() * w.head).norm());
    for (int j = 1; j <= J; ++j) {
        const double t = g.cuts[j];
        const Vec plus = rho.rho(j - 1, -t) * w.tail[j - 1].row(last).transpose();
        const Vec minus = rho.rho(j, -t) * w.tail[j].row(0).transpose();
        r.push_back((plus - minus - spec.taps[j - 1].second.transpose() * w.head).norm());
    }
    return r;
}

DiscretizedElement apply_L(const DelayOperatorSpec& spec, const DelayGrid& g, const DiscretizedElement& v)
{
    check_matching(g, v);
    const double tol = domain_tol(v);
    const auto res = domain_residuals(g, v);
    for (std::size_t i = 0; i < res.size(); ++i)
        if (res[i] > tol) {
            std::ostringstream os;
            os << "apply_L: element is not in the domain (constraint " << i << " residual " << res[i] << ")";
            throw InputError(os.str());
        }
    const int last = g.nodes() - 1;
    const int J = g.segments() - 1;
    DiscretizedElement out;
    out.head = spec.L0 * v.tail[0].row(0).transpose() + spec.Ltau * v.tail[J].row(last).transpose();
    for (int j = 1; j <= J; ++j) {
        // the tap at -tau_j is a partition point; average the two copies
        const Vec phi = 0.5 * (v.tail[j - 1].row(last) + v.tail[j].row(0)).transpose();
        out.head += spec.taps[j - 1].second * phi;
    }
    for (const auto& M : spec.kernels)
        for (int j = 0; j <= J; ++j) {
            const auto& P = g.panels[j];
            for (int i = 0; i < g.nodes(); ++i) out.head += P.w(i) * M(P.x(i)) * v.tail[j].row(i).transpose();
        }
    for (int j = 0; j <= J; ++j) out.tail.push_back(g.panels[j].D * v.tail[j]);
    return out;
}

DiscretizedElement apply_L_star(const DelayOperatorSpec& spec, const DelayGrid& g, const WeightProfile& rho,
                                const DiscretizedElement& w)
{
    check_matching(g, w);
    check_profile(g, rho);
    const double tol = domain_tol(w);
    const auto res = adjoint_residuals(spec, g, rho, w);
    for (std::size_t i = 0; i < res.size(); ++i)
        if (res[i] > tol) {
            std::ostringstream os;
            os << "apply_L_star: boundary conditions violated:";
            for (std::size_t k = 0; k < res.size(); ++k) os << " r" << k << "=" << res[k];
            throw InputError(os.str());
        }
    const Vec& y = w.head;
    DiscretizedElement out;
    out.head = spec.L0.transpose() * y + rho.rho_at_zero() * w.tail[0].row(0).transpose();
    for (int j = 0; j < g.segments(); ++j) {
        const auto& P = g.panels[j];
        Mat t = -(P.D * w.tail[j]) - rho.kappas[j] * w.tail[j];
        for (const auto& M : spec.kernels)
            for (int i = 0; i < g.nodes(); ++i) t.row(i) += (M(P.x(i)).transpose() * y).transpose() / rho.rho(j, P.x(i));
        out.tail.push_back(std::move(t));
    }
    return out;
}

namespace {

Mat head_block(const DelayOperatorSpec& spec, const WeightProfile& rho, bool require_increasing)
{
    const int n = spec.n;
    Mat M = spec.L0 + spec.L0.transpose() + rho.rho_at_zero() * Mat::Identity(n, n) +
            spec.Ltau * spec.Ltau.transpose() / rho.rho_at_minus_tau();
    for (std::size_t j = 1; j <= spec.taps.size(); ++j) {
        const double d = rho.jump(static_cast<int>(j));
        if (require_increasing ? !(d > 0) : d == 0.0) {
            std::ostringstream os;
            os << "weight jump at -tau_" << j << " is " << d << "; no bounded symmetrization in this metric";
            throw DegenerateMetricError(os.str());
        }
        const Mat& Lj = spec.taps[j - 1].second;
        M += Lj * Lj.transpose() / d;
    }
    return M;
}

}  // namespace

DiscretizedElement symmetrize_S(const DelayOperatorSpec& spec, const DelayGrid& g, const WeightProfile& rho,
                                const DiscretizedElement& v)
{
    check_matching(g, v);
    check_profile(g, rho);
    const Mat H = head_block(spec, rho, false);
    const Vec& x = v.head;
    DiscretizedElement out;
    Vec y = H * x;
    for (const auto& M : spec.kernels)
        for (int j = 0; j < g.segments(); ++j) {
            const auto& P = g.panels[j];
            for (int i = 0; i < g.nodes(); ++i) y += P.w(i) * M(P.x(i)) * v.tail[j].row(i).transpose();
        }
    out.head = 0.5 * y;
    for (int j = 0; j < g.segments(); ++j) {
        const auto& P = g.panels[j];
        Mat t = -rho.kappas[j] * v.tail[j];
        for (const auto& M : spec.kernels)
            for (int i = 0; i < g.nodes(); ++i) t.row(i) += (M(P.x(i)).transpose() * x).transpose() / rho.rho(j, P.x(i));
        out.tail.push_back(0.5 * t);
    }
    return out;
}

SymmetrizedMatrix symmetrized_matrix(const DelayOperatorSpec& spec, const WeightProfile& rho)
{
    spec.validate();
    if (!spec.kernels.empty()) throw InputError("symmetrized_matrix: distributed kernels are not supported here");
    if (rho.segments() != static_cast<int>(spec.taps.size()) + 1)
        throw InputError("weight profile needs one kappa per delay segment");
    if (!rho.increasing()) throw DegenerateMetricError("symmetrized_matrix: kappas must increase strictly");
    SymmetrizedMatrix out;
    out.M = head_block(spec, rho, true);
    out.M = (0.5 * (out.M + out.M.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(out.M, Eigen::EigenvaluesOnly);
    out.eigenvalues = es.eigenvalues().reverse();
    return out;
}

Mat discrete_symmetrization(const DelayOperatorSpec& spec, const DelayGrid& g, const WeightProfile& rho)
{
    const int N = g.size();
    Mat S(N, N);
    for (int k = 0; k < N; ++k) {
        const auto e = DiscretizedElement::unflatten(g, Vec::Unit(N, k));
        S.col(k) = 2.0 * symmetrize_S(spec, g, rho, e).flatten();
    }
    return S;
}

Vec discrete_symmetrization_spectrum(const DelayOperatorSpec& spec, const DelayGrid& g, const WeightProfile& rho)
{
    Eigen::EigenSolver<Mat> es(discrete_symmetrization(spec, g, rho), false);
    Vec ev = es.eigenvalues().real();
    std::sort(ev.data(), ev.data() + ev.size(), std::greater<double>());
    return ev;
}

DegeneracyReport degeneracy_probe(const DelayOperatorSpec& spec, const WeightProfile& rho, double threshold)
{
    spec.validate();
    if (rho.segments() != static_cast<int>(spec.taps.size()) + 1)
        throw InputError("weight profile needs one kappa per delay segment");
    const auto& c = rho.cuts;
    DegeneracyReport rep;

    // centre of the spike: the partition point with the most negative jump,
    // or the middle of the first segment when the weight never jumps
    double centre = -0.5 * c[1];
    int seg_left = 0, seg_right = 0;
    double worst = 0;
    for (int j = 1; j < rho.segments(); ++j) {
        const double rel = rho.jump(j) / std::exp(-rho.kappas[j] * c[j]);
        if (rep.jump_index < 0 || rel < worst) {
            worst = rel;
            rep.jump_index = j;
        }
    }
    if (rep.jump_index > 0) {
        centre = -c[rep.jump_index];
        seg_left = rep.jump_index;
        seg_right = rep.jump_index - 1;
    }
    double room = c.back();
    for (std::size_t j = 1; j < c.size(); ++j) room = std::min(room, c[j] - c[j - 1]);

    Vec gx, gw;
    gauss_legendre(24, gx, gw);
    // integral of rho * (phi phi', phi^2) over an affine piece phi = u0 + (u1 - u0) s
    auto piece = [&](int seg, double a, double b, double u0, double u1, double& num, double& den) {
        const double half = 0.5 * (b - a), slope = (u1 - u0) / (b - a);
        for (int i = 0; i < gx.size(); ++i) {
            const double th = a + half * (gx(i) + 1);
            const double phi = u0 + slope * (th - a);
            const double r = rho.rho(seg, th);
            num += gw(i) * half * r * phi * slope;
            den += gw(i) * half * r * phi * phi;
        }
    };
    for (double eps = room / 4; eps > 1e-14 * c.back(); eps /= 2) {
        double num = 0, den = 0;
        piece(seg_left, centre - eps, centre, 0.0, 1.0, num, den);
        piece(seg_right, centre, centre + eps, 1.0, 0.0, num, den);
        rep.widths.push_back(eps);
        rep.quotients.push_back(num / den);
        if (num / den > threshold) {
            rep.unbounded = true;
            break;
        }
    }
    std::ostringstream os;
    if (rep.unbounded)
        os << "unbounded trace numbers: Rayleigh quotient " << rep.quotients.back() << " at spike width "
           << rep.widths.back();
    else
        os << "Rayleigh quotients stay bounded (last " << rep.quotients.back() << ")";
    rep.message = os.str();
    return rep;
}

}  // namespace lyapdim
