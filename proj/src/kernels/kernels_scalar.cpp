#include "thermspec/kernels.hpp"

#include "kernels_impl.hpp"

namespace thermspec::kernels::scalar {

void lorentzian(const double* f, double* out, std::size_t n,
                double center, double fwhm, double amplitude, double baseline) {
    const double q = 0.25 * fwhm * fwhm;
    for (std::size_t i = 0; i < n; ++i) {
        const double df = f[i] - center;
        out[i] = baseline + amplitude * q / (df * df + q);
    }
}

void lorentzian_jacobian(const double* f, std::size_t n,
                         double center, double fwhm, double amplitude,
                         double* d_center, double* d_fwhm, double* d_amplitude) {
    const double half = 0.5 * fwhm;
    const double q = half * half;
    for (std::size_t i = 0; i < n; ++i) {
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
    for (std::size_t i = 0; i < n; ++i) {
        const double dos = detail::dynes_dos(u[i], dynes);
        const double fm = detail::fermi((u[i] - v) * inv_tau);
        const double fp = detail::fermi((u[i] + v) * inv_tau);
        out[i] = dos * (fm - fp);
    }
}

} // namespace thermspec::kernels::scalar
