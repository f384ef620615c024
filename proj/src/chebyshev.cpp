#include "lyapdim/chebyshev.hpp"

#include <cmath>
#include <numbers>

#include "lyapdim/errors.hpp"

namespace lyapdim::cheb {

Vec nodes(int N)
{
    if (N < 1) throw InputError("chebyshev grid needs N >= 1");
    Vec x(N + 1);
    for (int j = 0; j <= N; ++j) x(j) = std::cos(std::numbers::pi * j / N);
    return x;
}

Mat diff_matrix(int N)
{
    const Vec x = nodes(N);
    Vec c(N + 1);
    for (int i = 0; i <= N; ++i) c(i) = ((i == 0 || i == N) ? 2.0 : 1.0) * (i % 2 ? -1.0 : 1.0);
    Mat D = Mat::Zero(N + 1, N + 1);
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j)
            if (i != j) D(i, j) = (c(i) / c(j)) / (x(i) - x(j));
    // negative-sum trick for the diagonal keeps D * const = 0 to rounding
    for (int i = 0; i <= N; ++i) D(i, i) = -D.row(i).sum();
    return D;
}

Vec cc_weights(int N)
{
    Vec w = Vec::Zero(N + 1);
    const double pi = std::numbers::pi;
    // Waldvogel's formulation, written out directly
    Vec theta(N + 1);
    for (int j = 0; j <= N; ++j) theta(j) = pi * j / N;
    for (int j = 0; j <= N; ++j) {
        double s = 1.0;
        const int half = N / 2;
        for (int k = 1; k <= half; ++k) {
            const double b = (2 * k == N) ? 1.0 : 2.0;
            s -= b * std::cos(2.0 * k * theta(j)) / (4.0 * k * k - 1.0);
        }
        const double cj = (j == 0 || j == N) ? 1.0 : 2.0;
        w(j) = cj * s / N;
    }
    return w;
}

Panel panel(double lo, double hi, int N)
{
    if (!(hi > lo)) throw InputError("chebyshev panel needs lo < hi");
    Panel p;
    p.lo = lo;
    p.hi = hi;
    const double half = 0.5 * (hi - lo);
    p.x = (nodes(N).array() + 1.0) * half + lo;
    p.D = diff_matrix(N) / half;
    p.w = cc_weights(N) * half;
    return p;
}

}  // namespace lyapdim::cheb
