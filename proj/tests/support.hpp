#pragma once

#include <random>

#include <Eigen/Dense>

namespace testsupport {

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int r, int c, double scale = 1.0)
{
    std::normal_distribution<double> g(0.0, scale);
    Eigen::MatrixXd M(r, c);
    for (int j = 0; j < c; ++j)
        for (int i = 0; i < r; ++i) M(i, j) = g(rng);
    return M;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n)
{
    return random_matrix(rng, n, 1).col(0);
}

inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n)
{
    Eigen::MatrixXd B = random_matrix(rng, n, n);
    return B * B.transpose() + n * Eigen::MatrixXd::Identity(n, n);
}

// n x k matrix with orthonormal columns, uniformly distributed.
inline Eigen::MatrixXd random_frame(std::mt19937_64& rng, int n, int k)
{
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(rng, n, k));
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
}

inline int random_int(std::mt19937_64& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double random_real(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace testsupport
