#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace lyapdim {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

std::size_t binomial(std::size_t n, std::size_t k);

// Strictly increasing m-subsets of {0..n-1} in lexicographic order; the
// basis e_{j1} ^ ... ^ e_{jm} used by every compound matrix below.
struct WedgeIndex {
    int n = 0;
    int m = 0;
    std::vector<std::vector<int>> tuples;

    WedgeIndex(int n, int m);
    std::size_t size() const { return tuples.size(); }
    // Position of a sorted tuple, or npos when absent.
    std::size_t find(const std::vector<int>& t) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// (1/m!) det[<u_k, v_j>_G]
double wedge_gram(const std::vector<Vec>& u, const std::vector<Vec>& v, const Mat& metric);
std::complex<double> wedge_gram(const std::vector<CVec>& u, const std::vector<CVec>& v,
                                const CMat& metric);

Mat compound_multiplicative(const Mat& L, int m);
CMat compound_multiplicative(const CMat& L, int m);
Mat compound_additive(const Mat& T, int m);
CMat compound_additive(const CMat& T, int m);

// Nonincreasing singular values.
Vec singular_values(const Mat& L);
Vec singular_values(const CMat& L);

// omega_d = s_1 ... s_m * s_{m+1}^g with d = m + g. Singular values past the
// matrix size count as zero.
double omega_d(const Mat& L, double d);
double omega_d(const CMat& L, double d);
double omega_d_from_spectrum(const Vec& sigma, double d);
// log omega_d, -inf when it vanishes.
double log_omega_d(const Vec& sigma, double d);

// k largest eigenvalues of the Hermitian part (A + A^*)/2, nonincreasing.
Vec trace_numbers(const Mat& A, int k);
Vec trace_numbers(const CMat& A, int k);

// Sum of the m largest entries of a nonincreasing sequence (helper used all
// over the place for eigensums).
double top_sum(const Vec& sorted_desc, int m);

}  // namespace lyapdim
