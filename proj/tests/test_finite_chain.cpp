#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "onspin/finite_chain.hpp"
#include "onspin/observables.hpp"
#include "onspin/on_algebra.hpp"
#include "onspin/operator_core.hpp"

using namespace onspin;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Heisenberg chain on 2^L sites (pair density P - I), used as an independent
// oracle below: the O(4) R-matrix factorizes into two spin-1/2 copies, so the
// O(4) chain decouples into two such chains.
struct Su2Chain {
    double energy = 0;
    Mat rdm;  // bond-averaged two-site density matrix (4 x 4)
};

Su2Chain solve_su2_chain(int L) {
    const Mat hs = permutation_op(2) - identity_op(2);
    const std::int64_t dim = ipow(2, L);
    Mat H = Mat::Zero(dim, dim);
    for (int i = 0; i < L; ++i) H += embed_pair_dense(hs, L, i, 2);
    const SpectralResult r = ground_state_dense(H);
    Su2Chain out;
    out.energy = r.eigenvalue;
    out.rdm = Mat::Zero(4, 4);
    for (int i = 0; i < L; ++i) out.rdm += partial_trace_pair(r.vector, L, 2, i);
    out.rdm /= L;
    return out;
}

}  // namespace

TEST_CASE("two-site chain Hamiltonian is twice the pair density") {
    for (int n : {3, 5}) {
        const ModelParams p{n};
        const Mat h = hamiltonian_density(p);
        const Mat H = build_hamiltonian(p, 2);
        // both bonds of the 2-ring hit the same pair, and h is swap-symmetric
        REQUIRE((H - 2.0 * h).cwiseAbs().maxCoeff() == 0.0);
    }
    REQUIRE_THROWS_AS(build_hamiltonian(ModelParams{3}, 1), std::invalid_argument);
}

TEST_CASE("chain Hamiltonian trace scales with the bond count") {
    for (int n : {3, 4}) {
        const ModelParams p{n};
        const double trh = hamiltonian_density(p).trace();
        for (int L : {3, 4}) {
            const Mat H = build_hamiltonian(p, L);
            const double expected = L * trh * std::pow(double(n), L - 2);
            REQUIRE_THAT(H.trace(), WithinRel(expected, 1e-13));
        }
    }
}

TEST_CASE("matrix-free chain application matches the dense Hamiltonian") {
    for (int n : {3, 4}) {
        for (int L : {3, 4}) {
            const ModelParams p{n};
            const Mat H = build_hamiltonian(p, L);
            const ChainApply<double> apply(p, L);
            std::mt19937_64 gen(91 * n + L);
            std::normal_distribution<double> dist(0.0, 1.0);
            Vec x(apply.dim);
            for (std::int64_t i = 0; i < apply.dim; ++i) x[i] = dist(gen);
            Vec y = Vec::Zero(apply.dim);
            apply(x, y);
            REQUIRE((y - H * x).cwiseAbs().maxCoeff() < 1e-11 * H.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("two-site rows are exact for every tabulated n") {
    // At L = 2 the ground state is the normalized paired state: the pair
    // density matrix is the rank-one projector with <P> = 1 and <E> = n.
    const double scalar_ref[] = {-3.0,
                                 4.0,
                                 6.59454753215596702,
                                 3.0,
                                 1.8798189284491748,
                                 1.34791490174957140};
    for (int n = 3; n <= 8; ++n) {
        const ModelParams p{n};
        const GroundSpace gs = ground_space(p, 2);
        REQUIRE(gs.states.size() == 1);
        const auto ex = pair_expectations(ground_rdm(gs, 2, n), n);
        REQUIRE_THAT(static_cast<double>(ex.permutation), WithinAbs(1.0, 1e-13));
        REQUIRE_THAT(static_cast<double>(ex.contraction), WithinAbs(double(n), 1e-12));

        const TableRow row = finite_row(n, 2);
        REQUIRE_THAT(row.omega1_0, WithinRel(-2.0 * n / (n - 2.0), 1e-13));
        REQUIRE(row.omega2_kind == (n > 4 ? Omega2Kind::derivative : Omega2Kind::value));
        REQUIRE_THAT(row.omega2, WithinRel(scalar_ref[n - 3], 1e-12));
        REQUIRE_THAT(row.rho[0], WithinAbs(0.0, 1e-13));
        REQUIRE_THAT(row.rho[1], WithinAbs(0.0, 1e-13));
        REQUIRE_THAT(row.rho[2], WithinRel(1.0 / n, 1e-12));
    }
}

TEST_CASE("ground energy per site equals the pair-expectation combination") {
    // E0/L = <P> - 1 - <E>/Delta holds exactly for the bond-averaged
    // expectations in any eigenstate of the chain.
    struct Run {
        int n, L;
    };
    for (const Run run : {Run{3, 2}, Run{3, 4}, Run{4, 4}, Run{5, 4}, Run{3, 6}, Run{4, 6}, Run{5, 6}}) {
        const ModelParams p{run.n};
        const GroundSpace gs = ground_space(p, run.L);
        const MatT<long double> rdm = ground_rdm(gs, run.L, run.n);
        const auto ex = pair_expectations(rdm, run.n);
        const double lhs = static_cast<double>(gs.energy) / run.L;
        const double rhs = omega1_from_expectations(static_cast<double>(ex.permutation),
                                                    static_cast<double>(ex.contraction), p.delta());
        INFO("n=" << run.n << " L=" << run.L);
        REQUIRE_THAT(lhs, WithinAbs(rhs, 1e-12));
        REQUIRE(gs.states.size() == 1);
        REQUIRE(static_cast<double>(gs.residual) < 1e-11);

        // density-matrix hygiene: unit trace, exact symmetry, positivity
        REQUIRE_THAT(static_cast<double>(rdm.trace()), WithinAbs(1.0, 1e-13));
        REQUIRE((rdm - rdm.transpose()).cwiseAbs().maxCoeff() == 0.0L);
        Eigen::SelfAdjointEigenSolver<Mat> es(rdm.cast<double>());
        REQUIRE(es.eigenvalues()(0) > -1e-13);

        // the periodic ground state is translation invariant bond by bond
        const MatT<long double> bond0 = partial_trace_pair(gs.states[0], run.L, run.n, 0);
        for (int i = 1; i < run.L; ++i) {
            const MatT<long double> bondi = partial_trace_pair(gs.states[0], run.L, run.n, i);
            REQUIRE(static_cast<double>((bondi - bond0).cwiseAbs().maxCoeff()) < 1e-12);
        }
    }
}

TEST_CASE("iterative and dense solvers agree on the 729-dimensional chain") {
    const ModelParams p{3};
    const GroundSpace gs = ground_space(p, 6);
    REQUIRE(gs.lanczos);
    REQUIRE(gs.states.size() == 1);

    const SpectralResult dense = ground_state_dense(build_hamiltonian(p, 6));
    REQUIRE_THAT(static_cast<double>(gs.energy), WithinAbs(dense.eigenvalue, 1e-11));
    const Vec v = gs.states[0].cast<double>();
    REQUIRE_THAT(std::abs(v.dot(dense.vector)), WithinAbs(1.0, 1e-10));

    const Mat rdm_dense = partial_trace_pair(dense.vector, 6, 3, 0);
    const MatT<long double> rdm_iter = ground_rdm(gs, 6, 3);
    REQUIRE((rdm_iter.cast<double>() - rdm_dense).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("n = 4 rows factorize into two spin-1/2 chains") {
    // R_{O(4)} = R_su2 (x) R_su2: the ground energy doubles and the pair
    // expectations square.  The contracted su2 expectation needs the signed
    // pairing (-1)^{a+b} because the spin singlet is antisymmetric.
    for (int L : {2, 4, 6}) {
        const Su2Chain s = solve_su2_chain(L);
        double perm_s = 0, contr_s = 0;
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 2; ++c) perm_s += s.rdm(a * 2 + c, c * 2 + a);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                contr_s += ((a + b) % 2 ? -1.0 : 1.0) * s.rdm(a * 2 + (1 - a), b * 2 + (1 - b));

        const ModelParams p{4};
        const GroundSpace gs = ground_space(p, L);
        const auto ex = pair_expectations(ground_rdm(gs, L, 4), 4);
        INFO("L=" << L);
        REQUIRE_THAT(static_cast<double>(gs.energy), WithinAbs(2.0 * s.energy, 5e-13 * L));
        REQUIRE_THAT(static_cast<double>(ex.permutation), WithinAbs(perm_s * perm_s, 5e-13));
        REQUIRE_THAT(static_cast<double>(ex.contraction), WithinAbs(contr_s * contr_s, 5e-13));
    }
}

TEST_CASE("cached rows are shared and rebuilt rows are deterministic") {
    const TableRow& a = finite_row_cached(3, 4);
    const TableRow& b = finite_row_cached(3, 4);
    REQUIRE(&a == &b);
    const TableRow fresh = finite_row(3, 4);
    REQUIRE(fresh.omega1_0 == a.omega1_0);
    REQUIRE(fresh.omega2 == a.omega2);
    REQUIRE((fresh.rho - a.rho).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("empty ground spaces are rejected") {
    REQUIRE_THROWS_AS(ground_rdm(GroundSpace{}, 4, 3), std::invalid_argument);
}
