#include "lyapdim/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lyapdim/errors.hpp"

namespace lyapdim {

std::size_t binomial(std::size_t n, std::size_t k)
{
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

WedgeIndex::WedgeIndex(int n_, int m_) : n(n_), m(m_)
{
    if (n < 1 || m < 0 || m > n)
        throw InputError("wedge index needs 0 <= m <= n, got n=" + std::to_string(n) +
                         " m=" + std::to_string(m));
    tuples.reserve(binomial(n, m));
    std::vector<int> t(m);
    for (int i = 0; i < m; ++i) t[i] = i;
    while (true) {
        tuples.push_back(t);
        int i = m - 1;
        while (i >= 0 && t[i] == n - m + i) --i;
        if (i < 0) break;
        ++t[i];
        for (int j = i + 1; j < m; ++j) t[j] = t[j - 1] + 1;
    }
}

std::size_t WedgeIndex::find(const std::vector<int>& t) const
{
    auto it = std::lower_bound(tuples.begin(), tuples.end(), t);
    if (it == tuples.end() || *it != t) return npos;
    return static_cast<std::size_t>(it - tuples.begin());
}

namespace {

template <class M>
void check_order(const M& L, int m, const char* what)
{
    if (L.rows() != L.cols())
        throw InputError(std::string(what) + ": matrix must be square");
    if (m < 1 || m > L.rows())
        throw InputError(std::string(what) + ": order m=" + std::to_string(m) +
                         " outside [1, " + std::to_string(L.rows()) + "]");
}

template <class Scalar>
Scalar gram_impl(const std::vector<Eigen::Matrix<Scalar, -1, 1>>& u,
                 const std::vector<Eigen::Matrix<Scalar, -1, 1>>& v,
                 const Eigen::Matrix<Scalar, -1, -1>& G)
{
    const std::size_t m = u.size();
    if (m == 0 || v.size() != m) throw InputError("wedge_gram: frames must have equal nonzero length");
    const auto n = G.rows();
    if (G.cols() != n) throw InputError("wedge_gram: metric must be square");
    if (static_cast<Eigen::Index>(m) > n) throw InputError("wedge_gram: m exceeds dimension");
    for (std::size_t k = 0; k < m; ++k)
        if (u[k].size() != n || v[k].size() != n)
            throw InputError("wedge_gram: vector dimension mismatch");
    Eigen::Matrix<Scalar, -1, -1> P(m, m);
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t j = 0; j < m; ++j) P(k, j) = v[j].dot(G * u[k]);
    double fact = 1;
    for (std::size_t k = 2; k <= m; ++k) fact *= double(k);
    return P.determinant() / fact;
}

template <class M>
M mult_impl(const M& L, int m)
{
    check_order(L, m, "compound_multiplicative");
    const int n = static_cast<int>(L.rows());
    WedgeIndex W(n, m);
    const auto N = static_cast<Eigen::Index>(W.size());
    M C(N, N);
    M sub(m, m);
    for (Eigen::Index I = 0; I < N; ++I) {
        const auto& r = W.tuples[I];
        for (Eigen::Index J = 0; J < N; ++J) {
            const auto& c = W.tuples[J];
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) sub(a, b) = L(r[a], c[b]);
            C(I, J) = m <= 4 ? sub.determinant() : sub.partialPivLu().determinant();
        }
    }
    return C;
}

template <class M>
M add_impl(const M& T, int m)
{
    check_order(T, m, "compound_additive");
    const int n = static_cast<int>(T.rows());
    WedgeIndex W(n, m);
    const auto N = static_cast<Eigen::Index>(W.size());
    M C = M::Zero(N, N);
    std::vector<int> t(m);
    for (Eigen::Index J = 0; J < N; ++J) {
        const auto& col = W.tuples[J];
        for (int j = 0; j < m; ++j) {
            // replace slot j by every basis index i; the result is re-sorted
            // and the sign of the sorting permutation is applied
            for (int i = 0; i < n; ++i) {
                if (T(i, col[j]) == typename M::Scalar(0)) continue;
                bool clash = false;
                for (int s = 0; s < m; ++s)
                    if (s != j && col[s] == i) clash = true;
                if (clash) continue;
                t = col;
                t[j] = i;
                int sign = 1;
                // slot j moves left or right past the entries it overtakes
                for (int s = 0; s < m; ++s)
                    if (s != j && ((s < j && col[s] > i) || (s > j && col[s] < i))) sign = -sign;
                std::sort(t.begin(), t.end());
                C(static_cast<Eigen::Index>(W.find(t)), J) += double(sign) * T(i, col[j]);
            }
        }
    }
    return C;
}

template <class M>
Vec svd_impl(const M& L)
{
    Eigen::JacobiSVD<M> svd(L);
    return svd.singularValues();
}

template <class M>
Vec trace_impl(const M& A, int k)
{
    if (A.rows() != A.cols()) throw InputError("trace_numbers: matrix must be square");
    if (k < 0 || k > A.rows())
        throw InputError("trace_numbers: k=" + std::to_string(k) + " exceeds dimension");
    M S = (A + A.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<M> es(S, Eigen::EigenvaluesOnly);
    Vec ev = es.eigenvalues();  // ascending
    Vec out(k);
    for (int j = 0; j < k; ++j) out(j) = ev(ev.size() - 1 - j);
    return out;
}

}  // namespace

double wedge_gram(const std::vector<Vec>& u, const std::vector<Vec>& v, const Mat& metric)
{
    return gram_impl<double>(u, v, metric);
}

std::complex<double> wedge_gram(const std::vector<CVec>& u, const std::vector<CVec>& v,
                                const CMat& metric)
{
    return gram_impl<std::complex<double>>(u, v, metric);
}

Mat compound_multiplicative(const Mat& L, int m) { return mult_impl(L, m); }
CMat compound_multiplicative(const CMat& L, int m) { return mult_impl(L, m); }
Mat compound_additive(const Mat& T, int m) { return add_impl(T, m); }
CMat compound_additive(const CMat& T, int m) { return add_impl(T, m); }

Vec singular_values(const Mat& L) { return svd_impl(L); }
Vec singular_values(const CMat& L) { return svd_impl(L); }

double log_omega_d(const Vec& sigma, double d)
{
    if (!(d >= 0)) throw InputError("omega_d: d must be nonnegative");
    const int m = static_cast<int>(std::floor(d));
    const double g = d - m;
    const auto sv = [&](int j) { return j < sigma.size() ? sigma(j) : 0.0; };
    double acc = 0;
    for (int j = 0; j < m; ++j) acc += std::log(sv(j));
    if (g > 0) acc += g * std::log(sv(m));
    return acc;
}

double omega_d_from_spectrum(const Vec& sigma, double d)
{
    return std::exp(log_omega_d(sigma, d));
}

double omega_d(const Mat& L, double d) { return omega_d_from_spectrum(singular_values(L), d); }
double omega_d(const CMat& L, double d) { return omega_d_from_spectrum(singular_values(L), d); }

Vec trace_numbers(const Mat& A, int k) { return trace_impl(A, k); }
Vec trace_numbers(const CMat& A, int k) { return trace_impl(A, k); }

double top_sum(const Vec& sorted_desc, int m)
{
    double s = 0;
    for (int j = 0; j < m && j < sorted_desc.size(); ++j) s += sorted_desc(j);
    return s;
}

}  // namespace lyapdim
