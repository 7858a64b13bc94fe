// Vector variants of the kernels, written against std::experimental::simd.
// On x86-64 this TU is compiled with -mavx2 -mfma (4 double lanes); the
// dispatcher only routes here after checking CPU support. On other
// architectures it is compiled with the baseline SIMD width.

#include "thermspec/kernels.hpp"

#include <experimental/simd>

#include "kernels_impl.hpp"

namespace stdx = std::experimental;

namespace thermspec::kernels::vector {

namespace {

using vd = stdx::native_simd<double>;
constexpr std::size_t W = vd::size();

inline vd load(const double* p) {
    vd x;
    x.copy_from(p, stdx::element_aligned);
    return x;
}

inline void store(double* p, const vd& x) { x.copy_to(p, stdx::element_aligned); }

// Lane-wise mirror of detail::complex_sqrt + dynes_dos.
inline vd dynes_dos_v(const vd& u, double d) {
    const vd x = u * u - (d * d + 1.0);
    const vd y = 2.0 * d * u;
    const vd m = stdx::sqrt(x * x + y * y);
    const auto pos = x >= 0.0;

    vd p1 = stdx::sqrt(0.5 * (m + x));
    vd q1 = y / (2.0 * p1);
    where(p1 == 0.0, q1) = 0.0;

    vd q2 = stdx::copysign(stdx::sqrt(0.5 * (m - x)), y);
    vd p2 = y / (2.0 * q2);
    where(q2 == 0.0, p2) = 0.0;

    vd p = p2, q = q2;
    where(pos, p) = p1;
    where(pos, q) = q1;
    return stdx::abs((u * p + d * q) / m);
}

inline vd fermi_v(vd x) {
    where(x > 700.0, x) = 700.0;
    where(x < -700.0, x) = -700.0;
    return 1.0 / (1.0 + stdx::exp(x));
}

} // namespace

void lorentzian(const double* f, double* out, std::size_t n,
                double center, double fwhm, double amplitude, double baseline) {
    const double q = 0.25 * fwhm * fwhm;
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        const vd df = load(f + i) - center;
        store(out + i, baseline + amplitude * q / (df * df + q));
    }
    for (; i < n; ++i) {
        const double df = f[i] - center;
        out[i] = baseline + amplitude * q / (df * df + q);
    }
}

void lorentzian_jacobian(const double* f, std::size_t n,
                         double center, double fwhm, double amplitude,
                         double* d_center, double* d_fwhm, double* d_amplitude) {
    const double half = 0.5 * fwhm;
    const double q = half * half;
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        const vd df = load(f + i) - center;
        const vd dd = df * df + q;
        const vd inv2 = 1.0 / (dd * dd);
        store(d_center + i, (2.0 * amplitude * q) * df * inv2);
        store(d_fwhm + i, (amplitude * half) * df * df * inv2);
        store(d_amplitude + i, q / dd);
    }
    for (; i < n; ++i) {
        const double df = f[i] - center;
        const double dd = df * df + q;
        const double inv2 = 1.0 / (dd * dd);
        d_center[i] = amplitude * q * 2.0 * df * inv2;
        d_fwhm[i] = amplitude * half * df * df * inv2;
        d_amplitude[i] = q / dd;
    }
}

void nis_integrand(const double* u, double* out, std::size_t n,
                   double v, double tau, double dynes) {
    const double inv_tau = 1.0 / tau;
    std::size_t i = 0;
    for (; i + W <= n; i += W) {
        const vd ui = load(u + i);
        const vd dos = dynes_dos_v(ui, dynes);
        const vd fm = fermi_v((ui - v) * inv_tau);
        const vd fp = fermi_v((ui + v) * inv_tau);
        store(out + i, dos * (fm - fp));
    }
    for (; i < n; ++i) {
        const double dos = detail::dynes_dos(u[i], dynes);
        const double fm = detail::fermi((u[i] - v) * inv_tau);
        const double fp = detail::fermi((u[i] + v) * inv_tau);
        out[i] = dos * (fm - fp);
    }
}

} // namespace thermspec::kernels::vector
