#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lyapdim/cocycle.hpp"
#include "lyapdim/tensor.hpp"

namespace lyapdim {

// x'(t) = f(t, x(t), x(t - tau_1), ..., x(t - tau_J)); the largest delay is tau.
struct DelayModel {
    std::string name;
    int n = 1;
    std::vector<double> delays;  // increasing, last one is tau
    using Rhs = std::function<Vec(double t, const Vec& x, const std::vector<Vec>& delayed)>;
    using Jac = std::function<Mat(double t, const Vec& x, const std::vector<Vec>& delayed)>;
    using DelayedJac = std::function<std::vector<Mat>(double t, const Vec& x, const std::vector<Vec>& delayed)>;
    Rhs rhs;
    Jac jac_x;              // L0 of the linearization
    DelayedJac jac_delayed; // L_{-tau_j}
    std::optional<double> forcing_period;

    double tau() const { return delays.back(); }
};

DelayModel mackey_glass_model(double beta, double gamma, double k, double tau);
// x' = gamma x - alpha x(t - tau) - beta x^3 + A sin(t)
DelayModel suarez_schopf_model(double alpha, double tau, double A = 0, double gamma = 1, double beta = 1);
// x' = L0 x + sum_j L_j x(t - tau_j)
DelayModel linear_model(const Mat& L0, const std::vector<std::pair<double, Mat>>& taps);

// Equilibria of the unforced Suarez-Schopf oscillator from gamma x - alpha x - beta x^3 = 0.
std::vector<double> suarez_schopf_equilibria(double alpha, double gamma = 1, double beta = 1);

// Largest relative mismatch between the supplied Jacobians and central
// differences of the right-hand side, over random states of size `scale`.
double jacobian_mismatch(const DelayModel& model, int samples, double scale, std::uint64_t seed);

// A function on [-tau, 0] sampled on a uniform grid, with cubic Hermite
// interpolation between nodes.
class HistorySegment {
public:
    HistorySegment() = default;
    // values[i] at theta_i = -tau + i * dt, i = 0..M; slopes estimated by
    // finite differences when not given
    HistorySegment(double tau, std::vector<Vec> values, std::vector<Vec> slopes = {});
    static HistorySegment from_function(double tau, double dt, const std::function<Vec(double)>& f,
                                        const std::function<Vec(double)>& df = {});
    static HistorySegment constant(double tau, double dt, const Vec& x);

    double tau() const { return tau_; }
    double dt() const { return tau_ / intervals(); }
    int intervals() const { return static_cast<int>(values_.size()) - 1; }
    int dim() const { return static_cast<int>(values_.front().size()); }
    const std::vector<Vec>& values() const { return values_; }
    const Vec& head() const { return values_.back(); }
    Vec operator()(double theta) const;
    Vec derivative(double theta) const;
    HistorySegment resampled(double dt) const;
    double sup_norm() const;

private:
    double tau_ = 1;
    std::vector<Vec> values_;
    std::vector<Vec> slopes_;
};

struct Trajectory {
    int n = 1;
    double tau = 1;
    double dt = 0;
    double t0 = 0;
    std::vector<double> t;  // node times from t0 - tau to t0 + T
    std::vector<Vec> x;
    double error_estimate = -1;  // max node difference against a dt/2 run, -1 if not computed

    // history window ending at time s (a node time)
    HistorySegment segment_at(double s) const;
    std::vector<Vec> window_nodes(double s) const;
};

struct IntegrateOptions {
    double t0 = 0;
    bool estimate_error = false;
};

// RK4 on the uniform grid dt (dt must divide every delay, dt <= tau/10).
// Delayed values at half steps come from 4-point Lagrange interpolation of
// node values, with stencils that never straddle the propagated
// derivative jumps of the first three delay intervals.
Trajectory integrate(const DelayModel& model, const HistorySegment& h0, double T, double dt,
                     const IntegrateOptions& opt = {});

struct BallReport {
    bool pass = true;
    double max_sup = 0;
    int worst_sample = -1;
    double witness_time = 0;
    std::string message;
};
BallReport invariant_ball_check(const DelayModel& model, double R, int sample_count, double T, double dt,
                                std::uint64_t seed = 1);

struct Monodromy {
    Mat matrix;                 // (N + 1) n square, node-major
    std::vector<Vec> end_nodes; // base window after the last delay interval
    double t_end = 0;
};
// Jacobian of the discrete map taking the node window ending at t to the
// window ending at t + windows * tau; `nodes` is the base window (N + 1 nodes).
Monodromy linearized_monodromy(const DelayModel& model, const std::vector<Vec>& nodes, double t, int windows = 1);

// Sequence of monodromy matrices along the trajectory, as a cocycle with step tau.
MatrixCocycle monodromy_cocycle(const DelayModel& model, const std::vector<Vec>& nodes, double t, int count);

struct SpectrumOptions {
    double dt = 0;          // 0: tau / 100
    double burn_in = -1;    // < 0: 50 tau
    double horizon = 0;     // 0: 200 tau
    std::uint64_t seed = 7;
};

struct SpectrumReport {
    std::vector<double> lambdas;
    std::vector<double> lambdas_half;  // same run stopped at half the horizon
    double convergence_gap = 0;        // max |lambdas - lambdas_half|
    double horizon = 0;
    double kaplan_yorke = 0;
    bool ky_resolved = true;           // partial sums turned negative within m
};
SpectrumReport numerical_lyapunov_spectrum(const DelayModel& model, const HistorySegment& h0, int m,
                                           const SpectrumOptions& opt = {});

// Binary dump: "LYPD", int32 n, int32 N, then row-major doubles.
void write_monodromy(const std::string& path, const Mat& M, int n, int N);
Mat read_monodromy(const std::string& path, int& n, int& N);

}  // namespace lyapdim
