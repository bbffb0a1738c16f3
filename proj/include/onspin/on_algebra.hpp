#pragma once

// O(n)-symmetric two-site operator algebra: identity, permutation and
// Temperley-Lieb generators, the rational R-matrix built from them, its
// defining identities (Yang-Baxter, regularity, unitarity, crossing), the
// Hamiltonian density, and the 3x3 coefficient matrix of the two-site
// reduction map on span{I, P, E}.
//
// Index convention everywhere: the two-site basis vector |a,c> (a, c = 1..n)
// maps to flat index (a-1)*n + (c-1).

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

#include "operator_core.hpp"

namespace onspin {

struct ModelParams {
    int n = 3;
    double delta() const { return (n - 2) / 2.0; }
};

inline void check_params(const ModelParams& p) {
    if (p.n < 3) throw std::invalid_argument("ModelParams: n >= 3 required");
}

inline Mat identity_op(int n) { return Mat::Identity(n * n, n * n); }

// P |a,c> = |c,a>
inline Mat permutation_op(int n) {
    Mat P = Mat::Zero(n * n, n * n);
    for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) P(a * n + c, c * n + a) = 1.0;
    return P;
}

// Temperley-Lieb generator: E = sum_{a,b} |a, abar><b, bbar| with abar = n+1-a
// (0-based: abar = n-1-a). Satisfies E^2 = nE, PE = EP = E.
inline Mat tl_op(int n) {
    Mat E = Mat::Zero(n * n, n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) E(a * n + (n - 1 - a), b * n + (n - 1 - b)) = 1.0;
    return E;
}

// Two-site singlet sum_a |a, abar| (not normalized); E = |s><s|.
inline Vec singlet_pair(int n) {
    Vec s = Vec::Zero(n * n);
    for (int a = 0; a < n; ++a) s[a * n + (n - 1 - a)] = 1.0;
    return s;
}

// R(lambda) = lambda/(lambda+1) I + 1/(lambda+1) P - lambda/((lambda+1)(lambda+Delta)) E
template <class S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> r_matrix(const ModelParams& p, S lambda) {
    check_params(p);
    const int n = p.n;
    const S D = S(p.delta());
    if (std::abs(lambda + S(1)) < 1e-13 || std::abs(lambda + D) < 1e-13)
        throw std::invalid_argument("r_matrix: pole at lambda = -1 or -Delta");
    using M = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    const M I = identity_op(n).cast<S>(), P = permutation_op(n).cast<S>(), E = tl_op(n).cast<S>();
    return lambda / (lambda + S(1)) * I + S(1) / (lambda + S(1)) * P -
           lambda / ((lambda + S(1)) * (lambda + D)) * E;
}

// Pole-free normalization (lambda+1)(lambda+Delta) R(lambda); used by the
// quantum transfer matrix so shifted arguments never hit the R poles.
template <class S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> r_matrix_poly(const ModelParams& p, S lambda) {
    check_params(p);
    const int n = p.n;
    const S D = S(p.delta());
    using M = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    const M I = identity_op(n).cast<S>(), P = permutation_op(n).cast<S>(), E = tl_op(n).cast<S>();
    return lambda * (lambda + D) * I + (lambda + D) * P - lambda * E;
}

namespace detail {

// Embeddings on the triple space (n^3): op12 = op (x) I, op23 = I (x) op,
// op13 = op on slots (1,3) with identity in the middle.
inline Mat embed3(const Mat& op, int slot_a, int slot_b, int n) {
    const std::int64_t d = ipow(n, 3);
    Mat out = Mat::Zero(d, d);
    const std::int64_t str[3] = {std::int64_t(n) * n, n, 1};
    const std::int64_t sa = str[slot_a], sb = str[slot_b];
    for (std::int64_t col = 0; col < d; ++col) {
        const int a = static_cast<int>((col / sa) % n), b = static_cast<int>((col / sb) % n);
        const std::int64_t base = col - a * sa - b * sb;
        for (int ap = 0; ap < n; ++ap)
            for (int bp = 0; bp < n; ++bp) {
                const double v = op(ap * n + bp, a * n + b);
                if (v != 0.0) out(base + ap * sa + bp * sb, col) += v;
            }
    }
    return out;
}

inline Mat transpose_second(const Mat& M, int n) {
    Mat out(n * n, n * n);
    for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c)
            for (int b = 0; b < n; ++b)
                for (int d = 0; d < n; ++d) out(a * n + d, b * n + c) = M(a * n + c, b * n + d);
    return out;
}

}  // namespace detail

enum class IdentityKind { yang_baxter, regularity, unitarity, crossing };

// Max-norm residual of the chosen defining identity of R.
inline double check_identity(const ModelParams& p, IdentityKind kind, double lambda, double mu = 0.0) {
    check_params(p);
    const int n = p.n;
    const double D = p.delta();
    switch (kind) {
        case IdentityKind::yang_baxter: {
            const Mat R12 = detail::embed3(r_matrix(p, lambda - mu), 0, 1, n);
            const Mat R13 = detail::embed3(r_matrix(p, lambda), 0, 2, n);
            const Mat R23 = detail::embed3(r_matrix(p, mu), 1, 2, n);
            return (R12 * R13 * R23 - R23 * R13 * R12).cwiseAbs().maxCoeff();
        }
        case IdentityKind::regularity:
            return (r_matrix(p, lambda) - permutation_op(n)).cwiseAbs().maxCoeff();
        case IdentityKind::unitarity:
            // R21 = P R12 P = R12 for this symmetric R
            return (r_matrix(p, lambda) * r_matrix(p, -lambda) - identity_op(n)).cwiseAbs().maxCoeff();
        case IdentityKind::crossing: {
            // R(lambda) = varrho(lambda) (V (x) I) R^{t2}(-lambda-Delta) (V (x) I),
            // V = anti-diagonal ones, varrho = -lambda(1-lambda-Delta)/((lambda+1)(lambda+Delta))
            Mat V = Mat::Zero(n, n);
            for (int a = 0; a < n; ++a) V(a, n - 1 - a) = 1.0;
            const Mat VI = kron(V, Mat(Mat::Identity(n, n)));
            const double vr = -lambda * (1 - lambda - D) / ((lambda + 1) * (lambda + D));
            const Mat rhs = vr * VI * detail::transpose_second(r_matrix(p, -lambda - D), n) * VI;
            return (r_matrix(p, lambda) - rhs).cwiseAbs().maxCoeff();
        }
    }
    throw std::logic_error("check_identity: unknown kind");
}

// Bond Hamiltonian h = P R'(0), from the exact coefficient derivatives
// (1, -1, -1/Delta): h = P - I - E/Delta = -(I - P + E/Delta).
inline Mat hamiltonian_density(const ModelParams& p) {
    check_params(p);
    const int n = p.n;
    return permutation_op(n) * (identity_op(n) - permutation_op(n) - tl_op(n) / p.delta());
}

// Coefficient matrix of the reduction map on span{I, P, E} (column order I, P, E).
inline Eigen::Matrix3d a_matrix(double lam, int n) {
    const double D = (n - 2) / 2.0;
    const double d1 = (lam * lam - 1) * (lam * lam - D * D);
    const double d2 = (lam + 1) * (lam + D);
    Eigen::Matrix3d A;
    A(0, 0) = lam * lam * (lam * lam - (D * D + 1)) / d1;
    A(0, 1) = -lam * (D * D + lam - lam * lam) / d1;
    A(0, 2) = lam / d2;
    A(1, 0) = 2 * D * lam * lam / d1;
    A(1, 1) = lam * (D + lam + lam * D - lam * lam) / d1;
    A(1, 2) = lam * (lam - D) / d2;
    A(2, 0) = 2 * D * ((1 + D) * D - lam * lam) / d1;
    A(2, 1) = (D * D + D * (-1 + 2 * D * (1 + D)) * lam - (D - 1) * D * lam * lam - (1 + 2 * D) * lam * lam * lam +
               lam * lam * lam * lam) /
              d1;
    A(2, 2) = (D - lam) / (D + (1 + D) * lam + lam * lam);
    return A;
}

// Coefficients (c_I, c_P, c_E) of the orthogonal projection of M onto
// span{I, P, E}, plus the Frobenius residual of the projection.
struct IpeDecomposition {
    Eigen::Vector3d coeff;
    double residual;
};

inline IpeDecomposition decompose_ipe(const Mat& M, int n) {
    const Mat I = identity_op(n), P = permutation_op(n), E = tl_op(n);
    Eigen::Matrix3d G;
    const Mat* b[3] = {&I, &P, &E};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) G(r, c) = b[r]->cwiseProduct(*b[c]).sum();
    Eigen::Vector3d rhs;
    for (int r = 0; r < 3; ++r) rhs(r) = b[r]->cwiseProduct(M).sum();
    const Eigen::Vector3d coeff = G.ldlt().solve(rhs);
    const Mat rec = coeff(0) * I + coeff(1) * P + coeff(2) * E;
    return {coeff, (M - rec).norm()};
}

}  // namespace onspin
