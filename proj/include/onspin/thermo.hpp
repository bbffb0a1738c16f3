#pragma once

// Zero-temperature thermodynamic-limit solution of the two-site density
// matrix: the closed-form omega1, the difference equation
//   omega2~(lam - Delta) - omega2~(lam) = phi(lam)
// solved by asymptote-split shifted sums plus a minimal periodic part pinned
// by Laurent and reflection conditions, and the resulting table rows.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "observables.hpp"
#include "operator_core.hpp"
#include "special_functions.hpp"

namespace onspin {

// Ground-state omega1(lam) (even in lam), an 8-digamma combination with
// c = 1/(2 Delta).
template <class S>
S omega1_inf(S lam, int n) {
    const double c = 1.0 / (2.0 * model_delta(n));
    const S cl = c * lam;
    const S half = S(0.5), one = S(1);
    return -c * (digamma(one + cl) + digamma(one - cl) - digamma(half + cl) - digamma(half - cl) +
                 digamma(half + c + cl) + digamma(half + c - cl) - digamma(S(c) + cl) - digamma(S(c) - cl));
}

// omega1(0) = ground-state energy per site
inline double ground_energy_inf(int n) {
    const double c = 1.0 / (2.0 * model_delta(n));
    return -2.0 * c * (2.0 * std::numbers::ln2 + digamma(0.5 + c) - digamma(c));
}

// Anti-periodic asymptote of omega1: Pi(lam + Delta) = -Pi(lam),
// omega1(lam) -> Pi(lam) for Re lam -> +infinity.
template <class S>
S pi_kernel(S lam, int n) {
    const double D = model_delta(n);
    constexpr double pi = std::numbers::pi;
    return -(pi / D) * (S(1) / std::sin(pi * lam / D) - S(1) / std::sin(pi * (lam - S(1)) / D));
}

// Inhomogeneity of the omega2~ difference equation:
//   phi(lam) = alpha(lam) (1/(lam-1) - 1/lam - omega1(lam))
template <class S>
S phi_source(S lam, int n) {
    const double D = model_delta(n);
    return alpha_ratio(lam, D) * (S(1) / (lam - S(1)) - S(1) / lam - omega1_inf(lam, n));
}

// Reflection factor S(lam) = sin(pi(lam-1)/Delta) / sin(pi(lam+1)/Delta)
template <class S>
S reflection_factor(S lam, double delta) {
    constexpr double pi = std::numbers::pi;
    return std::sin(pi * (lam - S(1)) / delta) / std::sin(pi * (lam + S(1)) / delta);
}

// ---------------------------------------------------------------------------
// Closed forms for the integer-1/Delta models
// ---------------------------------------------------------------------------

template <class S>
S omega1_o3(S lam) {
    return S(4) / ((S(2) * lam + S(1)) * (S(2) * lam - S(1)));
}

// omega2~ for n = 3: 1/(3 lam^2 (4 lam^2 - 1)^2) - (4 pi^2/3) csc^2(2 pi lam).
// The two terms share a 1/(3 lam^2) pole; near 0 the difference is evaluated
// by its Taylor series.
template <class S>
S omega2t_o3(S lam) {
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    if (std::abs(lam) < 0.01) {
        const S l2 = lam * lam;
        const double pi4 = pi2 * pi2, pi6 = pi4 * pi2, pi8 = pi4 * pi4;
        return (8.0 / 3.0 - 4.0 * pi2 / 9.0) + l2 * (16.0 - 16.0 * pi4 / 45.0) +
               l2 * l2 * (256.0 / 3.0 - 128.0 * pi6 / 567.0) +
               l2 * l2 * l2 * (1280.0 / 3.0 - 256.0 * pi8 / 2025.0);
    }
    const S q = S(4) * lam * lam - S(1);
    const S s = std::sin(S(2) * std::numbers::pi * lam);
    return S(1) / (S(3) * lam * lam * q * q) - S(4.0 * pi2 / 3.0) / (s * s);
}

// su(2) building block entering the n = 4 closed forms
template <class S>
S omega_su2(S lam) {
    const S h = lam / S(2), half = S(0.5), one = S(1);
    return (lam * lam - one) / S(2) *
               (digamma(one + h) + digamma(one - h) - digamma(half + h) - digamma(half - h)) +
           half;
}

template <class S>
S omega1_o4(S lam) {
    return (S(1) - S(2) * omega_su2(lam)) / (lam * lam - S(1));
}

template <class S>
S omega2t_o4(S lam) {
    const S w = omega1_o4(lam);
    return w * w / S(4);
}

// ---------------------------------------------------------------------------
// Shifted-sum particular solutions
// ---------------------------------------------------------------------------

namespace detail {

// Extrapolate S(J) = S_inf - c1 J^{-e1} - c2 J^{-e2} from three checkpoints.
inline std::complex<double> richardson3(const std::array<std::pair<double, std::complex<double>>, 3>& cp,
                                        double e1, double e2) {
    Eigen::Matrix3cd A;
    Eigen::Vector3cd b;
    for (int i = 0; i < 3; ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = -std::pow(cp[i].first, -e1);
        A(i, 2) = -std::pow(cp[i].first, -e2);
        b(i) = cp[i].second;
    }
    return A.partialPivLu().solve(b)(0);
}

}  // namespace detail

// sum_{j>=1} phi(lam + j Delta), split into a smooth decaying series (omega1
// minus its anti-periodic asymptote) and an alternating alpha series, each
// Richardson-extrapolated in the truncation J.
inline std::complex<double> shifted_sum_plus(std::complex<double> lam, int n, int J = 2048) {
    using C = std::complex<double>;
    const double D = model_delta(n);
    const C pi0 = pi_kernel(lam, n);
    C mu = lam + D;
    C al = alpha_ratio(mu, D);
    C om = omega1_inf(mu, n);
    double sgn = -1;
    C s_dec = 0, s_alt = 0;
    std::array<std::pair<double, C>, 3> cp_dec, cp_alt;
    int ci = 0;
    for (int j = 1; j <= J; ++j) {
        const C om_smooth = om - sgn * pi0;
        s_dec += al * (C(1) / (mu - C(1)) - C(1) / mu - om_smooth);
        s_alt += sgn * al;
        if (j == J / 4 || j == J / 2 || j == J) {
            cp_dec[ci] = {static_cast<double>(j), s_dec};
            cp_alt[ci] = {static_cast<double>(j), s_alt};
            ++ci;
        }
        al *= (mu - C(1)) / (mu + C(1));      // alpha(mu + Delta) / alpha(mu)
        om = b_kernel(C(mu + D), D) - om;     // omega1 difference equation
        mu += D;
        sgn = -sgn;
    }
    const double e = 2.0 / D;
    return detail::richardson3(cp_dec, 2 + e, 3 + e) - pi0 * detail::richardson3(cp_alt, e, 1 + e);
}

// sum_{j>=0} phi(lam - j Delta); the left asymptote of the (even) omega1 is
// Pi(-lam), anti-periodic under the leftward shifts as well.
inline std::complex<double> shifted_sum_minus(std::complex<double> lam, int n, int J = 2048) {
    using C = std::complex<double>;
    const double D = model_delta(n);
    const C pi0 = pi_kernel(-lam, n);
    C mu = lam;
    C al = alpha_ratio(mu, D);
    C om = omega1_inf(mu, n);
    double sgn = 1;
    C s_dec = 0, s_alt = 0;
    std::array<std::pair<double, C>, 3> cp_dec, cp_alt;
    int ci = 0;
    for (int j = 0; j <= J; ++j) {
        const C om_smooth = om - sgn * pi0;
        s_dec += al * (C(1) / (mu - C(1)) - C(1) / mu - om_smooth);
        s_alt += sgn * al;
        if (j == J / 4 || j == J / 2 || j == J) {
            cp_dec[ci] = {static_cast<double>(j), s_dec};
            cp_alt[ci] = {static_cast<double>(j), s_alt};
            ++ci;
        }
        al *= (mu - C(D) + C(1)) / (mu - C(D) - C(1));  // alpha(mu - Delta) / alpha(mu)
        om = b_kernel(mu, D) - om;                      // omega1(mu - Delta)
        mu -= D;
        sgn = -sgn;
    }
    const double e = 2.0 / D;
    return detail::richardson3(cp_dec, 2 + e, 3 + e) - pi0 * detail::richardson3(cp_alt, e, 1 + e);
}

// ---------------------------------------------------------------------------
// Difference-equation solver
// ---------------------------------------------------------------------------

enum class SolverStrategy {
    one_sided,        // particular solution from the right shifted sum only
    principal_value,  // symmetrized two-sided sum (S_plus - S_minus)/2
};

struct Omega2Solution {
    double value = 0.0;              // omega2~(0) (integer 1/Delta) or omega2~'(0)
    bool derivative = false;
    double imag_leak = 0.0;          // |Im| of the extracted coefficient
    double lsq_residual = 0.0;       // residual of the condition solve
    double reflection_check = 0.0;   // held-out reflection residual (max of 3 points)
    double difference_check = 0.0;   // dif-eq residual at a held-out complex point
    std::vector<std::complex<double>> periodic_coeffs;
};

namespace detail {

inline bool integer_inverse_delta(double D) {
    return std::abs(1.0 / D - std::round(1.0 / D)) < 1e-12;
}

// Decaying periodic elements: w^{k+1} / den, w = exp(2 pi i lam / Delta).
// Minimal analyticity: den = (1-w)^{m0} (w1-w)^{m1}; pole confluence for
// integer 1/Delta merges w1 -> 1 into den = (1-w)^{m0+m1}.
inline std::vector<std::complex<double>> periodic_basis(std::complex<double> lam, double D, int m0, int m1) {
    using C = std::complex<double>;
    constexpr double pi = std::numbers::pi;
    const C w = std::exp(C(0, 2 * pi) * lam / D);
    C den;
    if (integer_inverse_delta(D)) {
        den = std::pow(C(1) - w, m0 + m1);
    } else {
        const C w1 = std::exp(C(0, 2 * pi / D));
        den = std::pow(C(1) - w, m0) * std::pow(w1 - w, m1);
    }
    std::vector<C> out(m0 + m1 - 1);
    C wk = w;
    for (int k = 0; k < m0 + m1 - 1; ++k, wk *= w) out[k] = wk / den;
    return out;
}

}  // namespace detail

inline Omega2Solution solve_omega2(int n, SolverStrategy strategy = SolverStrategy::one_sided, int J = 2048,
                                   int M = 96) {
    using C = std::complex<double>;
    constexpr double pi = std::numbers::pi;
    const double D = model_delta(n);
    const bool integer_case = detail::integer_inverse_delta(D);
    const int m0 = integer_case ? 2 : 1;
    const int m1 = integer_case ? 0 : 1;
    const int n_refl = integer_case ? 6 : 10;
    const double r = (n == 5 ? 0.20 : 0.22) * D;
    const int nb = m0 + m1 - 1;

    const auto particular = [&](C lam) {
        if (strategy == SolverStrategy::one_sided) return shifted_sum_plus(lam, n, J);
        return 0.5 * (shifted_sum_plus(lam, n, J) - shifted_sum_minus(lam, n, J));
    };

    // collocation circle around lam = 0
    std::vector<double> theta(M);
    std::vector<C> fv(M);
    std::vector<std::vector<C>> bv(nb, std::vector<C>(M));
    for (int m = 0; m < M; ++m) {
        theta[m] = 2 * pi * m / M;
        const C z = r * std::exp(C(0, theta[m]));
        fv[m] = particular(z);
        const auto bs = detail::periodic_basis(z, D, m0, m1);
        for (int i = 0; i < nb; ++i) bv[i][m] = bs[i];
    }
    const auto coeff = [&](const std::vector<C>& vals, int k) {
        C s = 0;
        for (int m = 0; m < M; ++m) s += vals[m] * std::exp(C(0, -k * theta[m]));
        return s / static_cast<double>(M) / std::pow(r, k);
    };

    // The deepest possible pole order at lam = 0 is max_ord; the row one order
    // beyond is analytically vacuous and is only sanity-checked, never solved.
    const int max_ord = integer_case ? m0 + m1 : m0;
    if (std::abs(coeff(fv, -(max_ord + 1))) >= 1e-6)
        throw std::runtime_error("solve_omega2: unexpected deep pole in the particular solution");

    std::vector<int> ks;
    for (int k = -max_ord; k < (integer_case ? 0 : 1); ++k) ks.push_back(k);

    const int nrows = static_cast<int>(ks.size()) + n_refl;
    CMat A(nrows, nb);
    CVec rhs(nrows);
    int row = 0;
    for (int k : ks) {
        for (int i = 0; i < nb; ++i) A(row, i) = coeff(bv[i], k);
        rhs(row) = -coeff(fv, k);
        ++row;
    }
    static const C refl_fracs[10] = {{0.11, 0.06}, {0.23, -0.05}, {0.17, 0.0},  {0.29, 0.0},   {0.35, 0.1},
                                     {0.41, 0.0},  {0.07, -0.12}, {0.455, 0.0}, {0.33, 0.21}, {0.095, 0.0}};
    for (int i = 0; i < n_refl; ++i) {
        const C x = D * refl_fracs[i];
        const C sx = reflection_factor(x, D);
        const auto bp = detail::periodic_basis(x, D, m0, m1);
        const auto bm = detail::periodic_basis(-x, D, m0, m1);
        for (int q = 0; q < nb; ++q) A(row, q) = bm[q] - sx * bp[q];
        rhs(row) = sx * particular(x) - particular(-x);
        ++row;
    }

    const CVec sol = A.colPivHouseholderQr().solve(rhs);

    Omega2Solution out;
    out.derivative = !integer_case;
    out.lsq_residual = (A * sol - rhs).norm();
    out.periodic_coeffs.assign(sol.data(), sol.data() + sol.size());

    const int out_k = integer_case ? 0 : 1;
    C val = coeff(fv, out_k);
    for (int i = 0; i < nb; ++i) val += sol(i) * coeff(bv[i], out_k);
    out.value = val.real();
    out.imag_leak = std::abs(val.imag());

    const auto f_eval = [&](C lam) {
        C v = particular(lam);
        const auto bs = detail::periodic_basis(lam, D, m0, m1);
        for (int i = 0; i < nb; ++i) v += sol(i) * bs[i];
        return v;
    };
    for (const C xf : {C(0.137, 0.0), C(0.371, 0.08), C(0.448, 0.0)}) {
        const C x = D * xf;
        out.reflection_check =
            std::max(out.reflection_check, std::abs(f_eval(-x) - reflection_factor(x, D) * f_eval(x)));
    }
    {
        const C lam = D * C(0.61, 0.23);
        out.difference_check = std::abs(f_eval(lam - D) - f_eval(lam) - phi_source(lam, n));
    }
    return out;
}

// Evaluate the assembled solution at an arbitrary point (for decay and
// difference-equation property tests).
inline std::complex<double> omega2t_eval(int n, const Omega2Solution& sol, std::complex<double> lam,
                                         SolverStrategy strategy = SolverStrategy::one_sided, int J = 2048) {
    using C = std::complex<double>;
    const double D = model_delta(n);
    const bool integer_case = detail::integer_inverse_delta(D);
    const int m0 = integer_case ? 2 : 1;
    const int m1 = integer_case ? 0 : 1;
    C v = strategy == SolverStrategy::one_sided
              ? shifted_sum_plus(lam, n, J)
              : 0.5 * (shifted_sum_plus(lam, n, J) - shifted_sum_minus(lam, n, J));
    const auto bs = detail::periodic_basis(lam, D, m0, m1);
    for (std::size_t i = 0; i < bs.size(); ++i) v += sol.periodic_coeffs[i] * bs[i];
    return v;
}

// ---------------------------------------------------------------------------
// Table chain
// ---------------------------------------------------------------------------

// Map the solver scalar to the Temperley-Lieb expectation Omega2. For integer
// 1/Delta = k, alpha has a pole at 0 (Gamma at -k) and the residue parity
// fixes the sign: Omega2 = (-1)^{k+1} omega2~(0). Otherwise
// omega2~'(0) = -alpha(0) Omega2 / Delta^2.
inline TableRow thermo_row(int n, SolverStrategy strategy = SolverStrategy::one_sided, int J = 2048) {
    const double D = model_delta(n);
    const Omega2Solution sol = solve_omega2(n, strategy, J);
    TableRow row;
    row.n = n;
    row.L = 0;
    row.omega1_0 = ground_energy_inf(n);
    row.omega2_kind = sol.derivative ? Omega2Kind::derivative : Omega2Kind::value;
    row.omega2 = sol.value;
    const double Om2 = omega2_scalar_to_expectation(sol.value, sol.derivative, n);
    const double Om1 = 1 + row.omega1_0 + Om2 / D;
    row.rho = rho_from_omega(Om1, Om2, n);
    return row;
}

// Absolute tolerance on each rho coefficient induced by an absolute tolerance
// on the tabulated omega2 scalar (omega1(0) is exact).
inline Eigen::Vector3d propagated_rho_tolerance(int n, double omega2_abs_tol) {
    const double D = model_delta(n);
    const bool integer_case = detail::integer_inverse_delta(D);
    const double dOm2 =
        integer_case ? omega2_abs_tol : D * D * omega2_abs_tol / std::abs(alpha_ratio(0.0, D));
    const double t = (1 + 1.0 / D) / (n + 2);
    const Eigen::Vector3d g(-t, 1.0 / D - t, 1 - t);
    return g.cwiseAbs() * (dOm2 / (static_cast<double>(n) * (n - 1)));
}

}  // namespace onspin
