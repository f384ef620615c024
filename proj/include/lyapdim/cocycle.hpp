#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lyapdim/tensor.hpp"

namespace lyapdim {

// A linear cocycle over a finite base sampled at a fixed time step h. Base
// point q carries the one-step fiber matrix step[q] (the map over [0, h]) and
// moves to next[q]. Finite trajectory samples end in a point whose next is
// `npos`; equilibria point to themselves.
class MatrixCocycle {
public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    static MatrixCocycle from_steps(std::vector<Mat> steps, std::vector<std::size_t> next, double h,
                                    std::vector<std::string> labels = {});
    // Autonomous generators A_q; the one-step map is exp(h A_q). With
    // next = identity the base is a set of equilibria, a cyclic next map
    // gives a periodic orbit sampled at step h.
    static MatrixCocycle from_generators(std::vector<Mat> generators, double h,
                                         std::vector<std::size_t> next = {},
                                         std::vector<std::string> labels = {});
    // A single trajectory: point k moves to k+1, the last one has no successor.
    static MatrixCocycle from_sequence(std::vector<Mat> steps, double h);

    int dim() const { return n_; }
    std::size_t size() const { return step_.size(); }
    double h() const { return h_; }
    const Mat& step(std::size_t q) const { return step_[q]; }
    const std::optional<Mat>& generator(std::size_t q) const { return gen_[q]; }
    std::size_t next(std::size_t q) const { return next_[q]; }
    const std::string& label(std::size_t q) const { return labels_[q]; }

    // q advanced by k steps, npos if the base runs out.
    std::size_t advance(std::size_t q, std::size_t k) const;
    // True when k one-step maps starting at q are available.
    bool runs(std::size_t q, std::size_t k) const;
    // Product step[q_{k-1}] ... step[q_0] over k steps from q.
    Mat fiber(std::size_t q, std::size_t k) const;
    bool is_equilibrium(std::size_t q) const { return next_[q] == q; }

    // Same matrices traversed kappa times faster: every exponent scales by kappa.
    MatrixCocycle time_rescaled(double kappa) const;

private:
    int n_ = 0;
    double h_ = 1;
    std::vector<Mat> step_;
    std::vector<std::optional<Mat>> gen_;
    std::vector<std::size_t> next_;
    std::vector<std::string> labels_;
};

struct GrowthResult {
    double log_volume = 0;            // log omega_m of the fiber over [0, T]
    double rate = 0;                  // log_volume / T
    double tail_rate = 0;             // mean increment rate over the second half of the horizon
    std::vector<double> per_step;     // log-volume increment of each QR step
    int subspace_iterations = 0;
    bool collapsed = false;           // frame lost rank: growth is -inf
};

// log omega_m(fiber(q, T)) by QR re-orthonormalization of an m-frame every
// dt. The frame is refined by forward/backward sweeps until the log-volume
// is stationary, so the result is the maximal m-volume growth rather than
// the growth of one particular frame.
GrowthResult volume_growth_qr(const MatrixCocycle& coc, std::size_t q, int m, double T, double dt);

struct ExponentReport {
    int m = 0;
    std::vector<double> lambdas;       // uniform exponents
    std::vector<double> partial_sums;  // sup over base of the m-volume rate
    std::vector<std::size_t> argmax;   // base point attaining each partial sum
    double horizon = 0;
    std::size_t sample_size = 0;
    bool converged = true;
    bool monotone_sums = true;         // recorded, never asserted
};

// Base points used for "sup over q": those that can be advanced for the
// whole horizon (all of them, if `sample` is empty).
ExponentReport uniform_exponents(const MatrixCocycle& coc, int m_max, double T,
                                 const std::vector<std::size_t>& sample = {});
// Doubles the horizon from T0 until two consecutive reports agree within tol
// or the step budget is exhausted.
ExponentReport uniform_exponents_converged(const MatrixCocycle& coc, int m_max, double T0,
                                           double tol = 1e-4, std::size_t max_steps = 4096);

double kaplan_yorke(const std::vector<double>& lambdas, int n);

struct DimensionResult {
    double value = 0;
    bool saturated = false;
};
DimensionResult lyapunov_dimension(const MatrixCocycle& coc, double T, double tol = 1e-10,
                                   const std::vector<std::size_t>& sample = {});

struct MetricResult {
    double metric = 0;        // n_q(xi)
    double alpha = 0;         // infinitesimal growth exponent, continuous formula
    double alpha_step = 0;    // exact one-step exponent of the sampled metric
    bool undefined = false;   // xi = 0
    bool nu_too_small = false;
};
MetricResult lyapunov_metric(const MatrixCocycle& coc, double nu, double T, double p,
                             std::size_t q, const Vec& xi);

// Smallest horizon of the form T0 * 2^k for which every sampled (q, xi)
// has alpha < nu; returns a negative value if none up to max_doublings.
double adapted_horizon(const MatrixCocycle& coc, double nu, double p,
                       const std::vector<std::pair<std::size_t, Vec>>& samples, double T0,
                       int max_doublings = 12);

using GeneratorPath = std::function<Mat(double)>;

struct LiouvilleResult {
    double max_rel_error = 0;
    double final_log_volume = 0;  // log of vol(T)/vol(0)
    double final_trace_integral = 0;
};
LiouvilleResult liouville_check(const GeneratorPath& A, const std::vector<Vec>& frame, double T,
                                double dt);
// Observed convergence orders of the Liouville discrepancy under successive
// halving of dt0.
std::vector<double> liouville_orders(const GeneratorPath& A, const std::vector<Vec>& frame,
                                     double T, double dt0, int levels = 3);

struct EvpResult {
    std::vector<double> per_point;  // growth exponent of the m-compound at each equilibrium
    double max_over_base = 0;
    std::size_t argmax = 0;
    double uniform_rate = 0;        // sup over base of the volume rate, horizon T
};
EvpResult evp_finite_base(const MatrixCocycle& coc, int m, double T = 50);

// Time average of the top-m trace-number sum of the generators along each
// periodic orbit (equilibria are orbits of period h); maximum over orbits.
double averaged_exponent(const MatrixCocycle& coc, int m);

}  // namespace lyapdim
