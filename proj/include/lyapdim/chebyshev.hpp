#pragma once

#include "lyapdim/tensor.hpp"

namespace lyapdim::cheb {

// Chebyshev-Gauss-Lobatto points cos(pi j / N), j = 0..N, running from +1 to -1.
Vec nodes(int N);
// Differentiation matrix on those points.
Mat diff_matrix(int N);
// Clenshaw-Curtis weights on [-1, 1] for the same points.
Vec cc_weights(int N);

// The same objects mapped to [lo, hi]; node 0 sits at hi, node N at lo.
struct Panel {
    double lo = 0, hi = 0;
    Vec x;   // physical nodes, descending
    Mat D;   // d/dx on the panel
    Vec w;   // quadrature weights on the panel
};
Panel panel(double lo, double hi, int N);

}  // namespace lyapdim::cheb
