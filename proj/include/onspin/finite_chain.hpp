#pragma once

// Exact diagonalization of the periodic chain H = sum_i h_{i,i+1}: dense full
// spectra for L <= 4, restarted Lanczos for L = 6, a long-double polish of
// every kept ground state, and bond-averaged two-site density matrices
// feeding the finite-size table rows.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "observables.hpp"
#include "on_algebra.hpp"
#include "operator_core.hpp"

namespace onspin {

inline Mat build_hamiltonian(const ModelParams& p, int L) {
    check_params(p);
    if (L < 2) throw std::invalid_argument("build_hamiltonian: L >= 2 required");
    const Mat h = hamiltonian_density(p);
    const std::int64_t dim = ipow(p.n, L);
    Mat H = Mat::Zero(dim, dim);
    for (int i = 0; i < L; ++i) H += embed_pair_dense(h, L, i, p.n);
    return H;
}

// Matrix-free y += H x for the periodic chain (sum of pair terms).
template <class Real>
struct ChainApply {
    MatT<Real> h;
    int L, n;
    std::int64_t dim;
    ChainApply(const ModelParams& p, int L_) : L(L_), n(p.n), dim(ipow(p.n, L_)) {
        h = hamiltonian_density(p).cast<Real>();
    }
    void operator()(const VecT<Real>& x, VecT<Real>& y) const {
        for (int i = 0; i < L; ++i) apply_pair(h, L, i, n, x, y);
    }
};

struct EdOptions {
    double degeneracy_gap = 1e-8;  // eigenvalues within this of E0 count as ground states
    int lanczos_basis_cap = 240;   // first pass (double)
    int probe_basis_cap = 120;     // deflated degeneracy probe (double)
    int polish_basis_cap = 60;     // long-double refinement per state
    std::uint64_t seed = 20240915;
};

struct GroundSpace {
    long double energy = 0;
    std::vector<VecT<long double>> states;  // orthonormal ground states
    long double residual = 0;               // max |H x - E x| over kept states
    bool lanczos = false;                   // true when the iterative path was used
};

namespace detail {

// Long-double Lanczos refinement seeded by approximate eigenvectors; earlier
// polished states are deflated so a degenerate cluster stays orthonormal.
inline void polish_states(const ModelParams& p, int L, const std::vector<Vec>& seeds, const EdOptions& opt,
                          GroundSpace& gs) {
    const ChainApply<long double> apply(p, L);
    LanczosOptions popt;
    popt.tol = 1e-16;
    popt.basis_cap = opt.polish_basis_cap;
    popt.max_iter = 3 * opt.polish_basis_cap;
    popt.seed = opt.seed;
    for (const Vec& s : seeds) {
        const VecT<long double> v0 = s.cast<long double>();
        const auto r = ground_state_lanczos<long double>(apply, apply.dim, popt, gs.states, &v0);
        if (gs.states.empty()) gs.energy = r.eigenvalue;
        gs.residual = std::max(gs.residual, r.residual_norm);
        gs.states.push_back(r.vector);
    }
}

}  // namespace detail

inline GroundSpace ground_space(const ModelParams& p, int L, const EdOptions& opt = {}) {
    check_params(p);
    const std::int64_t dim = ipow(p.n, L);
    GroundSpace gs;
    std::vector<Vec> seeds;
    if (L <= 4) {
        const Mat H = build_hamiltonian(p, L);
        Eigen::SelfAdjointEigenSolver<Mat> es(H);
        const double e0 = es.eigenvalues()(0);
        for (Eigen::Index k = 0; k < dim && es.eigenvalues()(k) < e0 + opt.degeneracy_gap; ++k)
            seeds.push_back(es.eigenvectors().col(k));
        if (seeds.size() > 32) throw std::runtime_error("ground_space: unexpected ground-state degeneracy");
    } else {
        gs.lanczos = true;
        const ChainApply<double> apply(p, L);
        LanczosOptions lopt;
        lopt.tol = 1e-12;
        lopt.basis_cap = opt.lanczos_basis_cap;
        lopt.max_iter = 10 * opt.lanczos_basis_cap;
        lopt.seed = opt.seed;
        const auto r0 = ground_state_lanczos<double>(apply, dim, lopt);
        seeds.push_back(r0.vector);
        // cheap deflated probe for further states at the ground energy
        LanczosOptions qopt = lopt;
        qopt.tol = 1e-7;
        qopt.basis_cap = opt.probe_basis_cap;
        qopt.max_iter = 2 * opt.probe_basis_cap;
        while (static_cast<int>(seeds.size()) < 8) {
            LanczosResult<double> rk;
            try {
                std::vector<Vec> defl(seeds.begin(), seeds.end());
                rk = ground_state_lanczos<double>(apply, dim, qopt, defl);
            } catch (const std::runtime_error&) {
                break;  // probe did not settle: treat the level as gapped
            }
            if (rk.eigenvalue > r0.eigenvalue + opt.degeneracy_gap) break;
            seeds.push_back(rk.vector);
        }
    }
    detail::polish_states(p, L, seeds, opt, gs);
    return gs;
}

// Bond-averaged two-site density matrix, averaged over the ground space.
inline MatT<long double> ground_rdm(const GroundSpace& gs, int L, int n) {
    if (gs.states.empty()) throw std::invalid_argument("ground_rdm: empty ground space");
    MatT<long double> acc = MatT<long double>::Zero(n * n, n * n);
    for (const auto& s : gs.states)
        for (int i = 0; i < L; ++i) acc += partial_trace_pair(s, L, n, i);
    return acc / static_cast<long double>(L * gs.states.size());
}

struct PairExpectations {
    long double permutation = 0;  // tr(P D)
    long double contraction = 0;  // tr(E D)
};

inline PairExpectations pair_expectations(const MatT<long double>& rdm, int n) {
    PairExpectations e;
    for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) e.permutation += rdm(a * n + c, c * n + a);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) e.contraction += rdm(a * n + (n - 1 - a), b * n + (n - 1 - b));
    return e;
}

inline TableRow finite_row(int n, int L, const EdOptions& opt = {}) {
    const ModelParams p{n};
    const GroundSpace gs = ground_space(p, L, opt);
    const MatT<long double> rdm = ground_rdm(gs, L, n);
    const PairExpectations ex = pair_expectations(rdm, n);
    TableRow row;
    row.n = n;
    row.L = L;
    row.omega1_0 = static_cast<double>(gs.energy / L);
    const bool deriv = n > 4;  // 1/Delta integer only for n = 3, 4
    row.omega2_kind = deriv ? Omega2Kind::derivative : Omega2Kind::value;
    row.omega2 = omega2_expectation_to_scalar(static_cast<double>(ex.contraction), deriv, n);
    row.rho = rho_from_omega(static_cast<double>(ex.permutation), static_cast<double>(ex.contraction), n);
    return row;
}

// Rows are expensive (minutes at the largest sizes); share them per process.
inline const TableRow& finite_row_cached(int n, int L) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, TableRow> cache;
    const std::scoped_lock lock(mu);
    auto it = cache.find({n, L});
    if (it == cache.end()) it = cache.emplace(std::make_pair(n, L), finite_row(n, L)).first;
    return it->second;
}

}  // namespace onspin
