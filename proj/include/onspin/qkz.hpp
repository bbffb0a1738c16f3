#pragma once

// Finite-Trotter quantum transfer matrix (QTM) machinery: monodromy blocks,
// scalar-sector boundary states, the two-site reduced density matrix
// D2(lambda1, lambda2), the reduction operator A2, and a verification suite
// for the difference equations D2 satisfies in its second (shift) argument.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "on_algebra.hpp"
#include "special_functions.hpp"

namespace onspin {

namespace detail {

// Embed a two-site operator on slots (sa, sb) of an L-slot chain, slot 0 most
// significant. Generalizes embed3 to arbitrary chain length.
inline Mat embed_slots(const Mat& op, int L, int sa, int sb, int n) {
    const std::int64_t d = ipow(n, L);
    Mat out = Mat::Zero(d, d);
    const std::int64_t stra = ipow(n, L - 1 - sa), strb = ipow(n, L - 1 - sb);
    for (std::int64_t col = 0; col < d; ++col) {
        const int a = static_cast<int>((col / stra) % n), b = static_cast<int>((col / strb) % n);
        const std::int64_t base = col - a * stra - b * strb;
        for (int ap = 0; ap < n; ++ap)
            for (int bp = 0; bp < n; ++bp) {
                const double v = op(ap * n + bp, a * n + b);
                if (v != 0.0) out(base + ap * stra + bp * strb, col) += v;
            }
    }
    return out;
}

}  // namespace detail

// Monodromy matrix T(x) = R_{a,N}(x-u_N) ... R_{a,1}(x-u_1) on aux (x) quantum,
// auxiliary slot most significant, in the pole-free polynomial normalization.
// The quantum-space block T[abar, a] sits at (abar*dimq, a*dimq).
inline Mat monodromy_matrix(const ModelParams& p, double x, const std::vector<double>& u) {
    check_params(p);
    const int n = p.n, N = static_cast<int>(u.size());
    if (N < 1) throw std::invalid_argument("monodromy_matrix: empty inhomogeneity list");
    const std::int64_t dim = ipow(n, N + 1);
    Mat M = Mat::Identity(dim, dim);
    for (int k = 1; k <= N; ++k)
        M = detail::embed_slots(r_matrix_poly(p, x - u[k - 1]), N + 1, 0, k, n) * M;
    return M;
}

// t(x) = tr_aux T(x)
inline Mat build_qtm(const ModelParams& p, double x, const std::vector<double>& u) {
    const int n = p.n;
    const std::int64_t dimq = ipow(n, static_cast<int>(u.size()));
    const Mat M = monodromy_matrix(p, x, u);
    Mat t = Mat::Zero(dimq, dimq);
    for (int a = 0; a < n; ++a) t += M.block(a * dimq, a * dimq, dimq, dimq);
    return t;
}

// Basis of the O(n)-scalar sector of (C^n)^(x)N: one vector per perfect
// matching of the N sites, pairing matched digits by conjugation a <-> n-1-a.
inline Mat pairing_basis(int n, int N) {
    if (N < 2 || N % 2) throw std::invalid_argument("pairing_basis: N must be even and >= 2");
    std::vector<std::vector<std::pair<int, int>>> match;
    std::vector<std::pair<int, int>> cur;
    std::vector<int> sites(N);
    for (int i = 0; i < N; ++i) sites[i] = i;
    // enumerate perfect matchings recursively: pair the first remaining site
    // with each later one
    struct Rec {
        std::vector<std::vector<std::pair<int, int>>>& out;
        std::vector<std::pair<int, int>>& cur;
        void operator()(std::vector<int> rem) {
            if (rem.empty()) {
                out.push_back(cur);
                return;
            }
            const int a = rem[0];
            for (std::size_t i = 1; i < rem.size(); ++i) {
                std::vector<int> rest;
                for (std::size_t q = 1; q < rem.size(); ++q)
                    if (q != i) rest.push_back(rem[q]);
                cur.emplace_back(a, rem[i]);
                (*this)(rest);
                cur.pop_back();
            }
        }
    } rec{match, cur};
    rec(sites);

    const std::int64_t dim = ipow(n, N);
    Mat B = Mat::Zero(dim, static_cast<std::int64_t>(match.size()));
    for (std::size_t m = 0; m < match.size(); ++m)
        for (std::int64_t idx = 0; idx < dim; ++idx) {
            bool ok = true;
            for (const auto& [a, b] : match[m])
                if (site_digit(idx, a, N, n) != n - 1 - site_digit(idx, b, N, n)) {
                    ok = false;
                    break;
                }
            if (ok) B(idx, m) = 1.0;
        }
    return B;
}

struct BoundaryStates {
    Vec left, right;  // <L| t(x) = Lambda0(x) <L|,  t(x)|R> = Lambda0(x)|R>, <L|R> = 1
    double sector_leak = 0.0;
    double rel_gap = std::numeric_limits<double>::infinity();
};

// Dominant eigenpair of the QTM restricted to the scalar (pairing) sector.
// All t(x) commute, so the pair computed at one generic x0 serves every x.
inline BoundaryStates boundary_states(const ModelParams& p, const std::vector<double>& u, double x0 = 0.31) {
    const int n = p.n, N = static_cast<int>(u.size());
    const Mat B = pairing_basis(n, N);
    Eigen::HouseholderQR<Mat> qr(B);
    const Mat Q = qr.householderQ() * Mat::Identity(B.rows(), B.cols());
    const Mat t = build_qtm(p, x0, u);
    const Mat tr = Q.transpose() * t * Q;
    BoundaryStates bs;
    bs.sector_leak = (t * Q - Q * tr).norm() / t.norm();
    if (bs.sector_leak > 1e-10)
        throw std::runtime_error("boundary_states: scalar sector is not invariant under the QTM");
    if (B.cols() == 1) {
        bs.left = bs.right = Q.col(0);
        return bs;
    }

    const auto dominant = [](const Mat& m) {
        Eigen::EigenSolver<Mat> es(m);
        int best = 0;
        for (int i = 1; i < m.rows(); ++i)
            if (std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(best))) best = i;
        const CVec v = es.eigenvectors().col(best);
        if (v.imag().norm() > 1e-9 * v.real().norm())
            throw std::runtime_error("boundary_states: dominant eigenvector is not real");
        std::vector<double> mags(m.rows());
        for (int i = 0; i < m.rows(); ++i) mags[i] = std::abs(es.eigenvalues()(i));
        std::sort(mags.begin(), mags.end());
        const double gap = (mags.back() - mags[mags.size() - 2]) / mags.back();
        return std::make_pair(Vec(v.real()), gap);
    };
    auto [vr_s, gap_r] = dominant(tr);
    auto [vl_s, gap_l] = dominant(tr.transpose());
    bs.rel_gap = std::min(gap_r, gap_l);
    if (bs.rel_gap < 1e-9)
        throw std::runtime_error("boundary_states: dominant QTM eigenvalue is (nearly) degenerate in the scalar sector");
    Vec vr = Q * vr_s, vl = Q * vl_s;
    vl /= vl.dot(vr);
    bs.left = vl;
    bs.right = vr;
    return bs;
}

struct QtmContext {
    ModelParams model;
    std::vector<double> u;  // Trotter inhomogeneities u_1..u_N
    BoundaryStates boundary;

    double lambda0(double x) const {
        return boundary.left.dot(build_qtm(model, x, u) * boundary.right);
    }
};

// Default inhomogeneities: alternating +beta/N, -beta/N.
inline std::vector<double> default_inhomogeneities(int trotter_n, double beta = 0.1) {
    if (trotter_n < 2 || trotter_n % 2)
        throw std::invalid_argument("default_inhomogeneities: Trotter number must be even and >= 2");
    std::vector<double> u(trotter_n);
    for (int i = 0; i < trotter_n; ++i) u[i] = (i % 2 == 0 ? 1.0 : -1.0) * beta / trotter_n;
    return u;
}

inline QtmContext make_qtm_context(const ModelParams& p, std::vector<double> u) {
    QtmContext ctx;
    ctx.model = p;
    ctx.u = std::move(u);
    ctx.boundary = boundary_states(p, ctx.u);
    return ctx;
}

inline QtmContext make_qtm_context(const ModelParams& p, int trotter_n, double beta = 0.1) {
    return make_qtm_context(p, default_inhomogeneities(trotter_n, beta));
}

// Two-site reduced density matrix
//   D[(e1b e2b),(e1 e2)] = <L| T[e1b,e1](l1) T[e2b,e2](l2) |R> / (Lambda0(l1) Lambda0(l2)),
// rows (e1b,e2b), cols (e1,e2).
inline Mat density_matrix_2(const QtmContext& ctx, double l1, double l2) {
    const int n = ctx.model.n;
    const std::int64_t dimq = ipow(n, static_cast<int>(ctx.u.size()));
    const Mat T1 = monodromy_matrix(ctx.model, l1, ctx.u);
    const Mat T2 = monodromy_matrix(ctx.model, l2, ctx.u);
    std::vector<Vec> x1(n * n), x2(n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            x1[a * n + b] = T1.block(a * dimq, b * dimq, dimq, dimq).transpose() * ctx.boundary.left;
            x2[a * n + b] = T2.block(a * dimq, b * dimq, dimq, dimq) * ctx.boundary.right;
        }
    Mat D(n * n, n * n);
    for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c)
            for (int b = 0; b < n; ++b)
                for (int d = 0; d < n; ++d) D(a * n + c, b * n + d) = x1[a * n + b].dot(x2[c * n + d]);
    return D / (ctx.lambda0(l1) * ctx.lambda0(l2));
}

// Reduction operator on two-site operators:
//   A2[B](l1, l2) = tr_2[ R_12(l1-l2) E_23 (B_12 (x) I_3) R_12(l2-l1) ],
// output acting on spaces (1,3). Satisfies D2(l1, u_i - Delta) = A2[D2(l1, u_i)].
inline Mat apply_a2(const ModelParams& p, double l1, double l2, const Mat& B) {
    const int n = p.n;
    const double x = l2 - l1;
    const Mat big = detail::embed_slots(r_matrix(p, -x), 3, 0, 1, n) * detail::embed_slots(tl_op(n), 3, 1, 2, n) *
                    detail::embed_slots(B, 3, 0, 1, n) * detail::embed_slots(r_matrix(p, x), 3, 0, 1, n);
    Mat out = Mat::Zero(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int a = 0; a < n; ++a) s += big((i * n + a) * n + k, (j * n + a) * n + l);
                    out(i * n + k, j * n + l) = s;
                }
    return out;
}

// Linear-reduction scalars of the density matrix: omega1 and omega2 extracted
// from rho = (c_I, c_P, c_E) at spectral-parameter difference lam = l1 - l2.
struct FiniteTrotterOmega {
    double omega1, omega2;
};

inline Eigen::Matrix3d ipe_gram(int n) {
    Eigen::Matrix3d M;
    const double nn = static_cast<double>(n) * n, nd = n;
    M << nn, nd, nd, nd, nn, nd, nd, nd, nn;
    return M;
}

inline FiniteTrotterOmega omega_from_rho(const Eigen::Vector3d& rho, double lam, int n) {
    const double D = (n - 2) / 2.0;
    const Eigen::Vector3d Om = ipe_gram(n) * rho;  // (tr D, <P>, <E>)
    FiniteTrotterOmega w;
    w.omega1 = (1 - Om(1) + (lam * lam - D) / (lam * lam - D * D) * Om(2)) / (lam * lam - 1);
    w.omega2 = lam * Om(2) / ((lam + 1) * (lam * lam - D * D));
    return w;
}

// ---------------------------------------------------------------------------
// Verification suite
// ---------------------------------------------------------------------------

struct QkzVerifyReport {
    double functional_eq = 0.0;    // ||D2(l1, u_i - Delta) - A2[D2(l1, u_i)]||, u_i x random l1
    double intertwining = 0.0;     // ||R^{-1} D2(l1,l2) R - D2(l2,l1)||
    double trace_one = 0.0;        // |tr D2 - 1|
    double ipe_residual = 0.0;     // distance of D2 from span{I,P,E}
    double rho_system = 0.0;       // rho(u_i - Delta, l2) = A(u_i - l2) rho(u_i, l2)
    double omega_system = 0.0;     // two scalar difference-equation rows with alpha factors
    double generic_contrast = 0.0; // functional-eq residual at generic l2 / on-point residual
    double a_matrix_match = 0.0;   // coefficient matrix of A2 vs closed-form 3x3
    double asymptotic_dev = 0.0;   // |rho(l1, 1e6) - (1/n^2, 0, 0)|_max

    double max_residual() const {
        return std::max({functional_eq, intertwining, trace_one, ipe_residual, rho_system, omega_system});
    }
};

namespace detail {

inline double frac_dist_to_nonpos_int(double x) {
    if (x > 0.5) return std::numeric_limits<double>::infinity();
    return std::abs(x - std::round(x));
}

// true if lam is safely away from every pole of the scalar reduction rows
inline bool omega_row_safe(double lam, double D) {
    const double margin = 0.02;
    for (double s : {lam, lam - D}) {
        for (double pole : {0.0, 1.0, -1.0, D, -D}) {
            if (std::abs(s - pole) < margin) return false;
        }
        if (frac_dist_to_nonpos_int((s - 1) / D) < margin) return false;
        if (frac_dist_to_nonpos_int((s + 1) / D) < margin) return false;
    }
    // b(lam) poles
    for (double pole : {0.0, 1.0, D, D - 1}) {
        if (std::abs(lam - pole) < margin) return false;
    }
    return true;
}

inline bool a_matrix_safe(double lam, double D) {
    const double margin = 0.02;
    for (double pole : {0.0, 1.0, -1.0, D, -D}) {
        if (std::abs(lam - pole) < margin) return false;
    }
    return true;
}

}  // namespace detail

inline QkzVerifyReport verify_suite(const QtmContext& ctx, std::uint64_t seed = 2024) {
    const ModelParams p = ctx.model;
    const int n = p.n;
    const double D = p.delta();
    QkzVerifyReport rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.15, 0.45);

    // (a) functional equation in the shift argument, at l2 = u_i
    for (double ui : ctx.u) {
        for (int t = 0; t < 3; ++t) {
            double l1;
            do {
                l1 = unif(rng);
            } while (!detail::a_matrix_safe(ui - l1, D));
            const Mat lhs = density_matrix_2(ctx, l1, ui - D);
            const Mat rhs = apply_a2(p, l1, ui, density_matrix_2(ctx, l1, ui));
            rep.functional_eq = std::max(rep.functional_eq, (lhs - rhs).norm());
        }
    }

    // generic-shift contrast at l2 far from every u_i: equation must fail
    {
        const double l1 = 0.23, lg = 0.4321;
        const Mat lhs = density_matrix_2(ctx, l1, lg - D);
        const Mat rhs = apply_a2(p, l1, lg, density_matrix_2(ctx, l1, lg));
        rep.generic_contrast = (lhs - rhs).norm() / std::max(rep.functional_eq, 1e-300);
    }

    // (b)-(d) pointwise density-matrix checks
    {
        const double l1 = 0.23, l2 = -0.12;
        const Mat D2 = density_matrix_2(ctx, l1, l2);
        const Mat D2s = density_matrix_2(ctx, l2, l1);
        const Mat R = r_matrix(p, l1 - l2);
        rep.intertwining = (R.partialPivLu().solve(D2 * R) - D2s).norm();
        rep.trace_one = std::abs(D2.trace() - 1.0);
        rep.ipe_residual = std::max(decompose_ipe(D2, n).residual, decompose_ipe(D2s, n).residual);

        const auto rho_inf = decompose_ipe(density_matrix_2(ctx, l1, 1e6), n).coeff;
        rep.asymptotic_dev = std::max({std::abs(rho_inf(0) - 1.0 / (n * n)), std::abs(rho_inf(1)), std::abs(rho_inf(2))});
    }

    // (e)-(f) scalar reductions at l1 = u_i
    const double probe_pool[4] = {-0.12, 0.19, -0.31, 0.26};
    for (double ui : ctx.u) {
        int used = 0;
        for (double l2 : probe_pool) {
            if (used == 2) break;
            const double lam = ui - l2;
            if (!detail::a_matrix_safe(lam, D) || !detail::omega_row_safe(lam, D)) continue;
            ++used;
            const Eigen::Vector3d c0 = decompose_ipe(density_matrix_2(ctx, ui, l2), n).coeff;
            const Eigen::Vector3d c1 = decompose_ipe(density_matrix_2(ctx, ui - D, l2), n).coeff;
            rep.rho_system =
                std::max(rep.rho_system, (c1 - a_matrix(lam, n) * c0).cwiseAbs().maxCoeff());

            const auto w0 = omega_from_rho(c0, lam, n);
            const auto w1 = omega_from_rho(c1, lam - D, n);
            const double r1 = w1.omega1 - (b_kernel(lam, D) - w0.omega1);
            const double a0 = alpha_ratio(lam, D), a1 = alpha_ratio(lam - D, D);
            const double r2 = a1 * w1.omega2 - a0 * (1 / (lam - 1) - 1 / lam - w0.omega1 + w0.omega2);
            rep.omega_system = std::max({rep.omega_system, std::abs(r1), std::abs(r2)});
        }
        if (used == 0) throw std::runtime_error("verify_suite: no pole-safe probe for given inhomogeneities");
    }

    // coefficient matrix of A2 vs the closed-form 3x3 at random arguments
    {
        std::uniform_real_distribution<double> mag(0.15, 0.9);
        const Mat ops[3] = {identity_op(n), permutation_op(n), tl_op(n)};
        for (int t = 0; t < 6; ++t) {
            double x;
            do {
                x = mag(rng) * (rng() % 2 ? 1.0 : -1.0);
            } while (!detail::a_matrix_safe(x, D));
            Eigen::Matrix3d M;
            for (int c = 0; c < 3; ++c) {
                const auto dec = decompose_ipe(apply_a2(p, 0.0, x, ops[c]), n);
                rep.a_matrix_match = std::max(rep.a_matrix_match, dec.residual);
                M.col(c) = dec.coeff;
            }
            rep.a_matrix_match = std::max(rep.a_matrix_match, (M - a_matrix(x, n)).cwiseAbs().maxCoeff());
        }
    }

    return rep;
}

}  // namespace onspin
