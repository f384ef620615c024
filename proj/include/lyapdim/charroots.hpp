#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace lyapdim {

using cplx = std::complex<double>;

// p = a + b exp(-tau p)
struct CharProblem {
    double a = 0;
    double b = 0;
    double tau = 1;
};

cplx char_residual(const CharProblem& pr, cplx p);

struct RootSet {
    std::vector<cplx> roots;          // Re descending, then Im descending
    std::vector<double> residuals;
    std::vector<int> multiplicity;
    int count_requested = 0;
    bool partial = false;             // fewer certified roots than requested
    bool complete = false;            // the list is the entire spectrum (b = 0)
    std::vector<std::string> warnings;
};

struct RootOptions {
    // Chebyshev seeding is used up to this many requested roots; beyond it
    // only the closed-form branch seeds are refined.
    int spectral_seed_limit = 96;
    int spectral_cap = 256;
};

RootSet char_roots(const CharProblem& pr, int count, const RootOptions& opt = {});

// Eigenvalues of the Chebyshev collocation of the delay generator on
// [-tau, 0] with N + 1 nodes (unrefined).
std::vector<cplx> pseudospectral_eigenvalues(const CharProblem& pr, int N);

// Kaplan-Yorke value on the real parts of the roots.
double local_dimension(const RootSet& rs);
int unstable_count(const RootSet& rs);

// Number of roots in [re_lo, re_hi] x [-im_max, im_max] by the argument
// principle (winding number of h along the rectangle).
int contour_count(const CharProblem& pr, double re_lo, double re_hi, double im_max);
// Rectangle guaranteed to contain every root with Re p > c.
void half_plane_box(const CharProblem& pr, double c, double& re_hi, double& im_max);

enum class Quantity { LocalDimension, UnstableCount };

struct SlopeFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 1;
    double rms_residual = 0;
    bool low_confidence = false;
    std::vector<double> taus;
    std::vector<double> values;
    // slopes fitted on the two upper half-decades of the grid
    double slope_upper_lower_half = 0;
    double slope_upper_upper_half = 0;
};

using CharFamily = std::function<CharProblem(double tau)>;

double quantity_at(const CharProblem& pr, Quantity q);
// Least-squares line through (tau, value) with the half-decade diagnostics.
SlopeFit fit_slope(const std::vector<double>& taus, const std::vector<double>& values);
SlopeFit asymptotic_slope(const CharFamily& fam, Quantity q, const std::vector<double>& taus);
std::vector<double> log_grid(double lo, double hi, int points);

}  // namespace lyapdim
