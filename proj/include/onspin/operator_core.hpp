#pragma once

// Kronecker products, two-site embeddings on a length-L chain, partial traces
// and ground-state eigensolvers (dense + restarted Lanczos with full
// reorthogonalization). Everything is templated on the real scalar so the
// same code runs in double and in long double (used to polish eigenpairs to
// the last printed digit of the reference tables).

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace onspin {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

template <class Real>
using MatT = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using VecT = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

// Optional cap on worker threads (QKZ_ON_THREADS); this build favours
// deterministic single-core execution, so the cap only limits, never forces.
inline int thread_cap() {
    static const int cap = [] {
        const char* e = std::getenv("QKZ_ON_THREADS");
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw <= 0) hw = 1;
        if (!e) return hw;
        const int v = std::atoi(e);
        return (v >= 1 && v <= hw) ? v : hw;
    }();
    return cap;
}

inline std::int64_t ipow(std::int64_t b, int e) {
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

template <class M>
M kron(const M& A, const M& B) {
    M out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

// Site s of basis index idx, sites numbered 0..L-1 with site 0 most significant.
inline int site_digit(std::int64_t idx, int s, int L, int n) {
    return static_cast<int>((idx / ipow(n, L - 1 - s)) % n);
}

// Dense embedding of a two-site operator onto sites (i, i+1 mod L), 0-based i.
inline Mat embed_pair_dense(const Mat& op, int L, int i, int n) {
    if (op.rows() != n * n || op.cols() != n * n) throw std::invalid_argument("embed_pair: op must be n^2 x n^2");
    if (i < 0 || i >= L) throw std::out_of_range("embed_pair: site index");
    const int j = (i + 1) % L;
    const std::int64_t dim = ipow(n, L);
    const std::int64_t si = ipow(n, L - 1 - i), sj = ipow(n, L - 1 - j);
    Mat out = Mat::Zero(dim, dim);
    for (std::int64_t col = 0; col < dim; ++col) {
        const int a = site_digit(col, i, L, n), c = site_digit(col, j, L, n);
        const std::int64_t base = col - a * si - c * sj;
        for (int ap = 0; ap < n; ++ap)
            for (int cp = 0; cp < n; ++cp) {
                const double v = op(ap * n + cp, a * n + c);
                if (v != 0.0) out(base + ap * si + cp * sj, col) += v;
            }
    }
    return out;
}

// y += (op on pair (i, i+1 mod L)) x, gather form: O(dim * nnz_per_row).
// The nonzero pattern is scanned once per call (n^4 entries, negligible next
// to the dim-sized main loop); pair Hamiltonians have ~3 nonzeros per row.
template <class Real>
void apply_pair(const MatT<Real>& op, int L, int i, int n, const VecT<Real>& x, VecT<Real>& y) {
    const int j = (i + 1) % L;
    const std::int64_t dim = ipow(n, L);
    const std::int64_t si = ipow(n, L - 1 - i), sj = ipow(n, L - 1 - j);
    std::vector<std::vector<std::pair<std::int64_t, Real>>> nz(n * n);
    for (int r = 0; r < n * n; ++r)
        for (int b = 0; b < n; ++b)
            for (int d = 0; d < n; ++d) {
                const Real v = op(r, b * n + d);
                if (v != Real(0)) nz[r].emplace_back(b * si + d * sj, v);
            }
    for (std::int64_t row = 0; row < dim; ++row) {
        const int a = static_cast<int>((row / si) % n), c = static_cast<int>((row / sj) % n);
        const std::int64_t base = row - a * si - c * sj;
        Real acc(0);
        for (const auto& [off, v] : nz[a * n + c]) acc += v * x[base + off];
        y[row] += acc;
    }
}

// Reduced density matrix of the pair (i, i+1 mod L) from a normalized pure state.
template <class Real>
MatT<Real> partial_trace_pair(const VecT<Real>& state, int L, int n, int i) {
    const std::int64_t dim = ipow(n, L);
    if (state.size() != dim) throw std::invalid_argument("partial_trace_pair: dimension mismatch");
    const Real nrm = state.squaredNorm();
    if (std::abs(double(nrm) - 1.0) > 1e-10) throw std::invalid_argument("partial_trace_pair: state not normalized");
    const int j = (i + 1) % L;
    const std::int64_t si = ipow(n, L - 1 - i), sj = ipow(n, L - 1 - j);
    MatT<Real> rho = MatT<Real>::Zero(n * n, n * n);
    // Enumerate the complement of the pair once per (pair digits) block.
    std::vector<std::int64_t> rest;
    rest.reserve(dim / (n * n));
    for (std::int64_t idx = 0; idx < dim; ++idx)
        if ((idx / si) % n == 0 && (idx / sj) % n == 0) rest.push_back(idx);
    for (int r = 0; r < n * n; ++r) {
        const std::int64_t off_r = (r / n) * si + (r % n) * sj;
        for (int c = r; c < n * n; ++c) {
            const std::int64_t off_c = (c / n) * si + (c % n) * sj;
            Real acc(0);
            for (const std::int64_t base : rest) acc += state[base + off_r] * state[base + off_c];
            rho(r, c) = acc;
            rho(c, r) = acc;
        }
    }
    return rho;
}

struct SpectralResult {
    double eigenvalue = 0;
    Vec vector;
    double residual_norm = 0;
    int iterations = 0;
};

inline SpectralResult ground_state_dense(const Mat& H, int dim_cap = 4096) {
    if (H.rows() != H.cols()) throw std::invalid_argument("ground_state_dense: square matrix required");
    if (H.rows() > dim_cap) throw std::invalid_argument("ground_state_dense: dimension above cap");
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-13 * (1.0 + H.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("ground_state_dense: matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    SpectralResult r;
    r.eigenvalue = es.eigenvalues()(0);
    r.vector = es.eigenvectors().col(0);
    r.residual_norm = (H * r.vector - r.eigenvalue * r.vector).norm();
    r.iterations = 1;
    return r;
}

template <class Real>
struct LanczosResult {
    Real eigenvalue = Real(0);
    VecT<Real> vector;
    Real residual_norm = Real(0);
    int iterations = 0;
    bool converged = false;
};

struct LanczosOptions {
    double tol = 1e-12;        // residual tolerance, relative to |theta| + 1
    int max_iter = 3000;       // total matvec budget across restarts
    int basis_cap = 300;       // Krylov vectors kept per restart cycle
    std::uint64_t seed = 12345;
};

// Lowest eigenpair of a symmetric operator, full reorthogonalization,
// restart from the best Ritz vector when the basis cap is hit. `deflate`
// vectors are projected out of every Krylov vector (used both to protect
// against degenerate copies and to walk up a degenerate ground space).
template <class Real, class Apply>
LanczosResult<Real> ground_state_lanczos(const Apply& apply_H, std::int64_t dim, const LanczosOptions& opt = {},
                                         const std::vector<VecT<Real>>& deflate = {},
                                         const VecT<Real>* start = nullptr) {
    if (dim < 2) throw std::invalid_argument("ground_state_lanczos: dim >= 2 required");
    using V = VecT<Real>;
    auto project_out = [&](V& v) {
        for (const V& d : deflate) v -= (d.dot(v)) * d;
    };
    V v0(dim);
    if (start) {
        v0 = *start;
    } else {
        std::mt19937_64 gen(opt.seed);
        std::normal_distribution<double> dist(0.0, 1.0);
        for (std::int64_t k = 0; k < dim; ++k) v0[k] = Real(dist(gen));
    }
    project_out(v0);
    if (v0.norm() < Real(1e-14)) throw std::runtime_error("ground_state_lanczos: start vector annihilated by deflation");
    v0.normalize();

    LanczosResult<Real> res;
    res.vector = v0;
    int total_iter = 0;
    bool stalled = false;
    std::vector<V> basis;
    std::vector<Real> al, be;
    while (total_iter < opt.max_iter) {
        basis.clear();
        al.clear();
        be.clear();
        basis.push_back(res.vector);
        V w(dim);
        for (int j = 0; j < opt.basis_cap && total_iter < opt.max_iter; ++j, ++total_iter) {
            w.setZero();
            apply_H(basis[j], w);
            Real a = basis[j].dot(w);
            al.push_back(a);
            w -= a * basis[j];
            if (j > 0) w -= be[j - 1] * basis[j - 1];
            project_out(w);
            // full reorthogonalization, two passes
            for (int pass = 0; pass < 2; ++pass)
                for (const V& b : basis) w -= (b.dot(w)) * b;
            const Real nb = w.norm();
            const bool breakdown = nb < Real(1e-15);  // Krylov space is invariant

            // Ritz check every few steps (the small solve is O(j^3))
            const bool last = breakdown || j + 1 == opt.basis_cap || total_iter + 1 >= opt.max_iter;
            if (!last && j % 5 != 4) {
                be.push_back(nb);
                basis.push_back(w / nb);
                continue;
            }
            const int m = j + 1;
            MatT<Real> T = MatT<Real>::Zero(m, m);
            for (int k = 0; k < m; ++k) {
                T(k, k) = al[k];
                if (k + 1 < m) T(k, k + 1) = T(k + 1, k) = be[k];
            }
            Eigen::SelfAdjointEigenSolver<MatT<Real>> tes(T);
            const Real theta = tes.eigenvalues()(0);
            const Real bres = nb * std::abs(tes.eigenvectors()(m - 1, 0));
            if (bres < Real(opt.tol) * (Real(1) + std::abs(theta)) || breakdown || j + 1 == opt.basis_cap ||
                total_iter + 1 >= opt.max_iter) {
                V ritz = V::Zero(dim);
                for (int k = 0; k < m; ++k) ritz += tes.eigenvectors()(k, 0) * basis[k];
                project_out(ritz);
                ritz.normalize();
                V hx = V::Zero(dim);
                apply_H(ritz, hx);
                const Real ev = ritz.dot(hx);
                const Real rn = (hx - ev * ritz).norm();
                res.eigenvalue = ev;
                res.vector = ritz;
                res.residual_norm = rn;
                res.iterations = ++total_iter;
                res.converged = rn < Real(opt.tol) * (Real(1) + std::abs(ev));
                // restarting from the same invariant subspace cannot improve
                stalled = breakdown && !res.converged;
                break;
            }
            be.push_back(nb);
            basis.push_back(w / nb);
        }
        if (res.converged || stalled) break;  // otherwise restart from the current Ritz vector
    }
    if (!res.converged && res.residual_norm > Real(opt.tol) * Real(100) * (Real(1) + std::abs(res.eigenvalue)))
        throw std::runtime_error("ground_state_lanczos: no convergence after max_iter (best residual " +
                                 std::to_string(double(res.residual_norm)) + ")");
    return res;
}

inline SpectralResult to_spectral(const LanczosResult<double>& lr) {
    SpectralResult r;
    r.eigenvalue = lr.eigenvalue;
    r.vector = lr.vector;
    r.residual_norm = lr.residual_norm;
    r.iterations = lr.iterations;
    return r;
}

}  // namespace onspin
