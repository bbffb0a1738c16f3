#pragma once

// Digamma, log-gamma and signed gamma-ratio evaluations used by the
// thermodynamic-limit solver and the observable branch maps.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace onspin {

namespace detail {

// Asymptotic tail of psi(x) for |x| >= 10, Re x > 0:
// psi(x) ~ log x - 1/(2x) - sum_k B_{2k}/(2k x^{2k}).
template <class S>
S digamma_asymptotic(S x) {
    const S inv = S(1) / x;
    const S inv2 = inv * inv;
    // Horner over 1/x^2 with Bernoulli coefficients B_2..B_14.
    const S series =
        inv2 * (1.0 / 12 -
        inv2 * (1.0 / 120 -
        inv2 * (1.0 / 252 -
        inv2 * (1.0 / 240 -
        inv2 * (1.0 / 132 -
        inv2 * (691.0 / 32760 -
        inv2 * (1.0 / 12)))))));
    return std::log(x) - S(0.5) * inv - series;
}

template <class S>
double real_part(const S& x) {
    if constexpr (std::is_floating_point_v<S>) return static_cast<double>(x);
    else return static_cast<double>(x.real());
}

}  // namespace detail

// psi(x) for real or complex argument (S = double or std::complex<double>).
template <class S>
S digamma(S x) {
    constexpr double pi = std::numbers::pi;
    if (detail::real_part(x) < 0.5) {
        // reflection: psi(x) = psi(1-x) - pi cot(pi x)
        return digamma(S(1) - x) - pi / std::tan(pi * x);
    }
    S acc(0);
    while (std::abs(x) < 10.0) {
        acc -= S(1) / x;
        x += S(1);
    }
    return acc + detail::digamma_asymptotic(x);
}

// Principal-branch log Gamma via the Lanczos approximation (g = 7, 9 terms).
// Branch offsets cancel wherever this is used (only exp of differences is taken).
inline std::complex<double> log_gamma(std::complex<double> z) {
    constexpr double pi = std::numbers::pi;
    static constexpr double g = 7.0;
    static constexpr double coef[9] = {
        0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,    12.507343278686905,
        -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
    if (z.real() < 0.5) {
        // log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z)
        return std::log(pi / std::sin(pi * z)) - log_gamma(1.0 - z);
    }
    z -= 1.0;
    std::complex<double> x = coef[0];
    for (int i = 1; i < 9; ++i) x += coef[i] / (z + double(i));
    const std::complex<double> t = z + g + 0.5;
    return 0.5 * std::log(2 * pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// log|Gamma(x)| together with the sign of Gamma(x), for real non-pole x.
inline long double log_abs_gamma(long double x, int& sign) {
    if (x > 0) {
        sign = 1;
        return std::lgamma(x);
    }
    if (x == std::floor(x)) throw std::domain_error("gamma pole at non-positive integer");
    // Gamma(x) on (-k-1, -k) alternates sign; count from floor(x).
    sign = (static_cast<long long>(std::floor(x)) % 2 == 0) ? 1 : -1;
    constexpr long double pi = std::numbers::pi_v<long double>;
    const long double s = std::abs(std::sin(pi * x));
    return std::log(pi) - std::log(s) - std::lgamma(1 - x);
}

// Gamma(a)/Gamma(b) for real arguments, with the correct overall sign.
inline long double gamma_ratio(long double a, long double b) {
    int sa = 1, sb = 1;
    const long double la = log_abs_gamma(a, sa);
    const long double lb = log_abs_gamma(b, sb);
    return static_cast<long double>(sa * sb) * std::exp(la - lb);
}

// alpha(lam) = Gamma((lam-1)/Delta) / Gamma((lam+1)/Delta)
inline double alpha_ratio(double lam, double delta) {
    return static_cast<double>(
        gamma_ratio(static_cast<long double>((lam - 1) / delta), static_cast<long double>((lam + 1) / delta)));
}

inline std::complex<double> alpha_ratio(std::complex<double> lam, double delta) {
    return std::exp(log_gamma((lam - 1.0) / delta) - log_gamma((lam + 1.0) / delta));
}

// Inhomogeneity of the first-order difference equation for omega1:
//   omega1(lam - Delta) + omega1(lam) = b(lam)
template <class S>
S b_kernel(S lam, double delta) {
    const S d = S(delta);
    return S(1) / (lam - S(1)) - S(1) / lam + S(1) / (lam - d) - S(1) / (lam - d + S(1));
}

}  // namespace onspin
