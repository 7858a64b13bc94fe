#pragma once

// Shared element-wise math for the kernel variants. The scalar TU uses these
// helpers directly; the vector TU mirrors them lane-wise. Keep the two in
// sync: the equivalence tests pin scalar and vector to 1e-12 relative.

#include <cmath>

namespace thermspec::kernels::detail {

// Principal-branch complex sqrt of w = x + iy, returning (re, im).
// Stable form: the half-angle identity via the larger component.
inline void complex_sqrt(double x, double y, double& re, double& im) {
    const double m = std::hypot(x, y);
    if (x >= 0.0) {
        re = std::sqrt(0.5 * (m + x));
        im = (re > 0.0) ? y / (2.0 * re) : 0.0;
    } else {
        im = std::copysign(std::sqrt(0.5 * (m - x)), y);
        re = (im != 0.0) ? y / (2.0 * im) : 0.0;
    }
}

// Dynes-broadened superconducting density of states at u = E/Delta:
// |Re[(u + i d) / sqrt((u + i d)^2 - 1)]|.
inline double dynes_dos(double u, double d) {
    const double x = u * u - d * d - 1.0;
    const double y = 2.0 * u * d;
    double p, q;
    complex_sqrt(x, y, p, q);
    const double m = std::hypot(x, y); // = p*p + q*q
    return std::fabs((u * p + d * q) / m);
}

inline double fermi(double x) {
    if (x > 700.0) x = 700.0;
    if (x < -700.0) x = -700.0;
    return 1.0 / (1.0 + std::exp(x));
}

} // namespace thermspec::kernels::detail
