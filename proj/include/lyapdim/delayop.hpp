#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lyapdim/chebyshev.hpp"
#include "lyapdim/tensor.hpp"

namespace lyapdim {

using Kernel = std::function<Mat(double theta)>;

// L~phi = L0 phi(0) + Ltau phi(-tau) + sum_j L_j phi(-tau_j) + sum_i int M_i(theta) phi(theta)
struct DelayOperatorSpec {
    int n = 1;
    double tau = 1;
    Mat L0;
    Mat Ltau;
    std::vector<std::pair<double, Mat>> taps;  // (tau_j, L_{-tau_j}), tau_j increasing in (0, tau)
    std::vector<Kernel> kernels;

    void validate() const;
    // 0 = tau_0 < tau_1 < ... < tau_J < tau_{J+1} = tau
    std::vector<double> cuts() const;
};

// rho(theta) = exp(kappa_j theta) on (-tau_{j+1}, -tau_j).
struct WeightProfile {
    std::vector<double> kappas;  // kappa_0 .. kappa_J
    std::vector<double> cuts;    // tau_0 = 0 .. tau_{J+1} = tau

    static WeightProfile uniform(double kappa, double tau);
    static WeightProfile for_spec(const DelayOperatorSpec& spec, std::vector<double> kappas);

    int segments() const { return static_cast<int>(kappas.size()); }
    double rho(int segment, double theta) const;
    double rho_at_zero() const { return 1.0; }
    double rho_at_minus_tau() const;
    // Delta_j(rho) = rho(-tau_j + 0) - rho(-tau_j - 0), j = 1..J
    double jump(int j) const;
    bool increasing() const;
};

// Per-segment Chebyshev panels; segment j covers [-tau_{j+1}, -tau_j] and its
// node 0 sits at the right end. Partition points appear twice, once in each
// neighbouring panel, which is how one-sided limits are carried.
struct DelayGrid {
    int n = 1;
    double tau = 1;
    std::vector<double> cuts;
    std::vector<cheb::Panel> panels;

    int segments() const { return static_cast<int>(panels.size()); }
    int nodes() const { return static_cast<int>(panels.front().x.size()); }
    // total number of scalar unknowns: head plus all tail samples
    int size() const { return n + segments() * nodes() * n; }
};

DelayGrid make_grid(const DelayOperatorSpec& spec, int nodes_per_segment = 32);

struct DiscretizedElement {
    Vec head;
    std::vector<Mat> tail;  // tail[j] is (nodes x n), row i = value at panels[j].x(i)

    Vec flatten() const;
    static DiscretizedElement unflatten(const DelayGrid& g, const Vec& v);
};

using SegmentFunction = std::function<Vec(int segment, double theta)>;
DiscretizedElement sample(const DelayGrid& g, const Vec& head, const SegmentFunction& f);

double weighted_inner(const DelayGrid& g, const WeightProfile& rho, const DiscretizedElement& v,
                      const DiscretizedElement& w);

// Residuals of the domain constraints: tail continuity and tail(0) = head.
std::vector<double> domain_residuals(const DelayGrid& g, const DiscretizedElement& v);
// Residuals of rho(-tau) psi(-tau) = Ltau^T y and Delta_j(rho psi) = L_j^T y.
std::vector<double> adjoint_residuals(const DelayOperatorSpec& spec, const DelayGrid& g,
                                      const WeightProfile& rho, const DiscretizedElement& w);

DiscretizedElement apply_L(const DelayOperatorSpec& spec, const DelayGrid& g, const DiscretizedElement& v);
DiscretizedElement apply_L_star(const DelayOperatorSpec& spec, const DelayGrid& g, const WeightProfile& rho,
                                const DiscretizedElement& w);
DiscretizedElement symmetrize_S(const DelayOperatorSpec& spec, const DelayGrid& g, const WeightProfile& rho,
                                const DiscretizedElement& v);

struct SymmetrizedMatrix {
    Mat M;
    Vec eigenvalues;  // nonincreasing
};
SymmetrizedMatrix symmetrized_matrix(const DelayOperatorSpec& spec, const WeightProfile& rho);

// Matrix of 2 S_L on the flattened grid coordinates, and its eigenvalues
// (self-adjoint in the weighted inner product, so real up to rounding).
Mat discrete_symmetrization(const DelayOperatorSpec& spec, const DelayGrid& g, const WeightProfile& rho);
Vec discrete_symmetrization_spectrum(const DelayOperatorSpec& spec, const DelayGrid& g, const WeightProfile& rho);

struct DegeneracyReport {
    bool unbounded = false;
    int jump_index = -1;                  // partition point used by the probe
    std::vector<double> widths;           // spike half-widths tried
    std::vector<double> quotients;        // Rayleigh quotient <Lv, v> / <v, v> for each width
    std::string message;
};
// Tent-shaped elements concentrated at a partition point where the weight
// jumps the wrong way; their Rayleigh quotients grow like 1/width.
DegeneracyReport degeneracy_probe(const DelayOperatorSpec& spec, const WeightProfile& rho,
                                  double threshold = 1e6);

}  // namespace lyapdim
