#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "lyapdim/errors.hpp"
#include "lyapdim/tensor.hpp"
#include "support.hpp"

using namespace lyapdim;
using testsupport::random_matrix;
using Vec3 = Eigen::Vector3d;

namespace {

Vec e(int n, int i)
{
    Vec v = Vec::Zero(n);
    v(i) = 1;
    return v;
}

// Leibniz sum over S_m: independent of any determinant routine.
double permutation_gram(const std::vector<Vec>& u, const std::vector<Vec>& v, const Mat& G)
{
    const int m = static_cast<int>(u.size());
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    double total = 0, fact = 1;
    for (int k = 2; k <= m; ++k) fact *= k;
    do {
        int inv = 0;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                if (perm[i] > perm[j]) ++inv;
        double prod = inv % 2 ? -1.0 : 1.0;
        for (int j = 0; j < m; ++j) prod *= u[perm[j]].dot(G * v[j]);
        total += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total / fact;
}

}  // namespace

TEST(WedgeIndex, LexicographicTuples)
{
    WedgeIndex w(4, 2);
    ASSERT_EQ(w.size(), 6u);
    EXPECT_EQ(w.tuples.front(), (std::vector<int>{0, 1}));
    EXPECT_EQ(w.tuples[2], (std::vector<int>{0, 3}));
    EXPECT_EQ(w.tuples.back(), (std::vector<int>{2, 3}));
    EXPECT_EQ(w.find({1, 3}), 4u);
    EXPECT_EQ(binomial(6, 3), 20u);
    EXPECT_THROW(WedgeIndex(3, 4), InputError);
}

TEST(WedgeGram, OrthonormalAndRepeated)
{
    const Mat I = Mat(Mat::Identity(3, 3));
    EXPECT_DOUBLE_EQ(wedge_gram({e(3, 0), e(3, 1)}, {e(3, 0), e(3, 1)}, I), 0.5);
    EXPECT_DOUBLE_EQ(wedge_gram({e(3, 0), e(3, 0)}, {e(3, 0), e(3, 0)}, I), 0.0);
}

TEST(WedgeGram, MatchesPermutationSum)
{
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<Vec> u, v;
        for (int k = 0; k < 3; ++k) {
            u.push_back(testsupport::random_vector(rng, 5));
            v.push_back(testsupport::random_vector(rng, 5));
        }
        const Mat G = testsupport::random_spd(rng, 5);
        const double ref = permutation_gram(u, v, G);
        EXPECT_NEAR(wedge_gram(u, v, G), ref, 1e-10 * (1 + std::abs(ref)));
    }
}

TEST(WedgeGram, DimensionMismatch)
{
    EXPECT_THROW(wedge_gram({e(3, 0)}, {e(4, 0)}, Mat(Mat::Identity(3, 3))), InputError);
    EXPECT_THROW(wedge_gram({e(3, 0)}, {e(3, 0), e(3, 1)}, Mat(Mat::Identity(3, 3))), InputError);
}

TEST(Compound, MultiplicativeExamples)
{
    for (int m = 1; m <= 4; ++m)
        EXPECT_TRUE(compound_multiplicative(Mat(Mat::Identity(4, 4)), m).isIdentity(1e-15));
    Mat D = Vec3(2.0, 3.0, 5.0).asDiagonal();
    const Mat C = compound_multiplicative(D, 2);
    EXPECT_TRUE(C.isApprox(Mat(Vec3(6.0, 10.0, 15.0).asDiagonal())));
    std::mt19937_64 rng(5);
    const Mat L = random_matrix(rng, 4, 4);
    EXPECT_NEAR(compound_multiplicative(L, 4)(0, 0), L.determinant(), 1e-12);
    EXPECT_THROW(compound_multiplicative(L, 5), InputError);
    EXPECT_THROW(compound_multiplicative(L, 0), InputError);
}

TEST(Compound, MultiplicativeIsAHomomorphism)
{
    // Cauchy-Binet: (AB)^m = A^m B^m
    std::mt19937_64 rng(6);
    for (int m = 1; m <= 5; ++m) {
        const Mat A = random_matrix(rng, 5, 5), B = random_matrix(rng, 5, 5);
        const Mat lhs = compound_multiplicative(Mat(A * B), m);
        const Mat rhs = compound_multiplicative(A, m) * compound_multiplicative(B, m);
        EXPECT_LT((lhs - rhs).norm(), 1e-10 * rhs.norm());
    }
}

TEST(Compound, AdditiveExamples)
{
    for (int m = 1; m <= 4; ++m)
        EXPECT_TRUE(compound_additive(Mat(Mat::Identity(4, 4)), m).isApprox(m * Mat::Identity(binomial(4, m), binomial(4, m))));
    Mat D = Vec3(2.0, 3.0, 5.0).asDiagonal();
    EXPECT_TRUE(compound_additive(D, 2).isApprox(Mat(Vec3(5.0, 7.0, 8.0).asDiagonal())));
    EXPECT_THROW(compound_additive(D, 4), InputError);
}

TEST(Compound, AdditiveGeneratesMultiplicative)
{
    std::mt19937_64 rng(7);
    for (int n = 2; n <= 5; ++n)
        for (int m = 1; m <= n; ++m) {
            const Mat T = random_matrix(rng, n, n);
            const Mat lhs = (0.3 * compound_additive(T, m)).exp();
            const Mat rhs = compound_multiplicative(Mat((0.3 * T).exp()), m);
            EXPECT_LT((lhs - rhs).norm(), 1e-9 * rhs.norm()) << n << " " << m;
        }
}

TEST(Compound, ComplexMatricesSupported)
{
    std::mt19937_64 rng(8);
    const CMat A = random_matrix(rng, 4, 4).cast<std::complex<double>>() +
                   std::complex<double>(0, 1) * random_matrix(rng, 4, 4).cast<std::complex<double>>();
    const CMat C = compound_multiplicative(A, 4);
    EXPECT_LT(std::abs(C(0, 0) - A.determinant()), 1e-10);
    // derivative of the multiplicative compound at the identity
    const double eps = 1e-6;
    const CMat I = CMat(Mat::Identity(4, 4));
    const CMat fd = (compound_multiplicative(CMat(I + eps * A), 2) - compound_multiplicative(CMat(I - eps * A), 2)) / (2 * eps);
    EXPECT_LT((fd - compound_additive(A, 2)).norm(), 1e-6);
    const Vec sv = singular_values(A);
    EXPECT_NEAR(compound_multiplicative(A, 2).jacobiSvd().singularValues()(0), sv(0) * sv(1), 1e-10 * sv(0) * sv(1));
}

TEST(SingularValues, Examples)
{
    EXPECT_TRUE(singular_values(Mat(Mat::Identity(3, 3))).isApprox(Vec3(1, 1, 1)));
    Mat D = Eigen::Vector2d(3, -2).asDiagonal();
    EXPECT_TRUE(singular_values(D).isApprox(Eigen::Vector2d(3, 2)));
}

TEST(SingularValues, SupInfCharacterization)
{
    std::mt19937_64 rng(9);
    const Mat L = random_matrix(rng, 4, 4);
    const Vec s = singular_values(L);
    // independent route: eigenvalues of L^T L
    Eigen::SelfAdjointEigenSolver<Mat> es(L.transpose() * L);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(s(k), std::sqrt(es.eigenvalues()(3 - k)), 1e-10 * s(0));
    // any k-dimensional subspace gives inf |Lx| <= sigma_k; the k leading
    // right singular directions attain it
    for (int k = 1; k <= 4; ++k) {
        double best = 0;
        for (int t = 0; t < 2000; ++t) {
            const Mat Q = testsupport::random_frame(rng, 4, k);
            best = std::max(best, singular_values(Mat(L * Q))(k - 1));
        }
        EXPECT_LE(best, s(k - 1) + 1e-12);
        EXPECT_GT(best, 0.5 * s(k - 1));
        const Mat V = es.eigenvectors().rightCols(k);
        EXPECT_NEAR(singular_values(Mat(L * V))(k - 1), s(k - 1), 1e-10 * s(0));
    }
}

TEST(OmegaD, Examples)
{
    std::mt19937_64 rng(10);
    const Mat L = random_matrix(rng, 3, 3);
    EXPECT_EQ(omega_d(L, 0.0), 1.0);
    for (double d : {0.0, 0.5, 1.0, 2.7, 3.0}) EXPECT_NEAR(omega_d(Mat(Mat::Identity(3, 3)), d), 1.0, 1e-15);
    const Mat D = Vec3(4, 1, 0.25).asDiagonal();
    EXPECT_NEAR(omega_d(D, 2.5), 2.0, 1e-14);
    EXPECT_EQ(omega_d(D, 3.5), 0.0);
    EXPECT_THROW(omega_d(D, -0.1), InputError);
}

TEST(TraceNumbers, Examples)
{
    const Mat D = Vec3(5, 1, -2).asDiagonal();
    EXPECT_TRUE(trace_numbers(D, 3).isApprox(Vec3(5, 1, -2)));
    std::mt19937_64 rng(12);
    const Mat B = random_matrix(rng, 4, 4);
    EXPECT_LT(trace_numbers(Mat(B - B.transpose()), 4).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_THROW(trace_numbers(D, 4), InputError);
}

TEST(TraceNumbers, RandomFramesNeverBeatTheEigensum)
{
    std::mt19937_64 rng(13);
    const Mat A = random_matrix(rng, 4, 4);
    const Vec beta = trace_numbers(A, 4);
    for (int k = 1; k <= 4; ++k) {
        const double top = top_sum(beta, k);
        double best = -1e300;
        for (int t = 0; t < 200; ++t) {
            const Mat Q = testsupport::random_frame(rng, 4, k);
            best = std::max(best, (Q.transpose() * A * Q).trace());
        }
        EXPECT_LE(best, top + 1e-6);
        // the top eigenvectors of the symmetric part attain the sum
        Eigen::SelfAdjointEigenSolver<Mat> es((A + A.transpose()) / 2);
        const Mat V = es.eigenvectors().rightCols(k);
        EXPECT_NEAR((V.transpose() * A * V).trace(), top, 1e-12);
    }
}

// Property sweeps over random instances.

TEST(TensorProperties, CompoundNormIdentity)
{
    std::mt19937_64 rng(100);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = testsupport::random_int(rng, 1, 6);
        const Mat L = random_matrix(rng, n, n);
        const Vec s = singular_values(L);
        for (int m = 1; m <= n; ++m) {
            const double norm = singular_values(compound_multiplicative(L, m))(0);
            const double prod = s.head(m).prod();
            EXPECT_NEAR(norm, prod, 1e-9 * prod);
        }
    }
}

TEST(TensorProperties, HornAndInterpolation)
{
    std::mt19937_64 rng(101);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = testsupport::random_int(rng, 1, 6);
        const Mat A = random_matrix(rng, n, n), B = random_matrix(rng, n, n);
        const Vec sa = singular_values(A);
        for (double d = 0.5; d <= n + 1e-12; d += 0.5) {
            EXPECT_LE(omega_d(Mat(B * A), d), omega_d(A, d) * omega_d(B, d) * (1 + 1e-12));
            const int m = static_cast<int>(std::floor(d));
            const double g = d - m;
            if (m < n) {
                const double interp = std::pow(omega_d(A, m), 1 - g) * std::pow(omega_d(A, m + 1), g);
                EXPECT_NEAR(omega_d(A, d), interp, 1e-12 * interp);
            }
        }
    }
}

TEST(TensorProperties, AdditiveCompoundSpectrumOfSymmetricMatrix)
{
    std::mt19937_64 rng(102);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = testsupport::random_int(rng, 1, 6);
        Mat S = random_matrix(rng, n, n);
        S = (S + S.transpose()).eval();
        const Vec ev = trace_numbers(S, n);
        for (int k = 1; k < n; ++k) EXPECT_GE(ev(k - 1), ev(k));
        for (int m = 1; m <= n; ++m) {
            const Mat C = compound_additive(S, m);
            Eigen::SelfAdjointEigenSolver<Mat> es(C);
            EXPECT_NEAR(es.eigenvalues().maxCoeff(), top_sum(ev, m), 1e-9 * (1 + std::abs(top_sum(ev, m))));
        }
    }
}
