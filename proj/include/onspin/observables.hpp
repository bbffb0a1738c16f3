#pragma once

// Shared result types for the two-site observable tables: one row per (n, L)
// holding omega1(0), the omega2 scalar, and the density-matrix coefficients.

#include <Eigen/Dense>
#include <cmath>

#include "special_functions.hpp"

namespace onspin {

inline double model_delta(int n) { return (n - 2) / 2.0; }

// For integer 1/Delta (n = 3, 4) the tabulated scalar is omega2~(0); otherwise
// omega2~(0) vanishes and the tabulated scalar is the derivative omega2~'(0).
enum class Omega2Kind { value, derivative };

struct TableRow {
    int n = 0;
    int L = 0;  // chain length; 0 denotes the thermodynamic limit
    double omega1_0 = 0.0;
    Omega2Kind omega2_kind = Omega2Kind::value;
    double omega2 = 0.0;
    Eigen::Vector3d rho = Eigen::Vector3d::Zero();  // D = rho1 I + rho2 P + rho3 E
};

// Invert tr(D) = 1, tr(P D) = Omega1, tr(E D) = Omega2 for the coefficients
// of D = rho1 I + rho2 P + rho3 E (Gram matrix n(n-1) Id + n ones).
inline Eigen::Vector3d rho_from_omega(double Omega1, double Omega2, int n) {
    const double S = 1 + Omega1 + Omega2;
    const Eigen::Vector3d b(1.0, Omega1, Omega2);
    Eigen::Vector3d r;
    for (int k = 0; k < 3; ++k) r(k) = (b(k) - S / (n + 2)) / (static_cast<double>(n) * (n - 1));
    return r;
}

// omega1 at coinciding spectral parameters, from the two-site expectations
inline double omega1_from_expectations(double Omega1, double Omega2, double delta) {
    return Omega1 - 1 - Omega2 / delta;
}

// Conversions between the two-site expectation Omega2 = tr(E D) and the
// tabulated scalar: for integer k = 1/Delta the scalar is omega2~(0) and
// Omega2 = (-1)^(k+1) omega2~(0); otherwise omega2~(0) = 0 and the scalar is
// omega2~'(0) with Omega2 = -Delta^2 omega2~'(0) / alpha(0).
inline double omega2_scalar_to_expectation(double value, bool derivative, int n) {
    const double D = model_delta(n);
    if (!derivative) {
        const int k = static_cast<int>(std::round(1.0 / D));
        return (k % 2 == 0 ? -1.0 : 1.0) * value;
    }
    return -D * D * value / alpha_ratio(0.0, D);
}

inline double omega2_expectation_to_scalar(double Omega2, bool derivative, int n) {
    const double D = model_delta(n);
    if (!derivative) {
        const int k = static_cast<int>(std::round(1.0 / D));
        return (k % 2 == 0 ? -1.0 : 1.0) * Omega2;
    }
    return -alpha_ratio(0.0, D) * Omega2 / (D * D);
}

}  // namespace onspin
