#pragma once

#include <cstddef>

// Data-parallel inner loops shared by the circuit, fitting and junction code.
// Each kernel exists as a scalar reference implementation and a vector variant
// (std::experimental::simd, compiled with AVX2/FMA on x86-64, NEON elsewhere).
// The active variant is picked once at runtime from CPU capabilities; the
// THERMSPEC_KERNELS environment variable ("scalar" / "vector") overrides it.

namespace thermspec::kernels {

/// out[i] = baseline + amplitude * (fwhm/2)^2 / ((f[i]-center)^2 + (fwhm/2)^2)
void lorentzian(const double* f, double* out, std::size_t n,
                double center, double fwhm, double amplitude, double baseline);

/// Partial derivatives of the Lorentzian above with respect to
/// (center, fwhm, amplitude); the baseline column is identically 1.
void lorentzian_jacobian(const double* f, std::size_t n,
                         double center, double fwhm, double amplitude,
                         double* d_center, double* d_fwhm, double* d_amplitude);

/// Tunnel-current integrand in reduced units u = E/Delta:
/// out[i] = n_s(u[i]; dynes) * (fermi((u[i]-v)/tau) - fermi((u[i]+v)/tau))
/// with v = eV/Delta and tau = kT/Delta. tau must be > 0.
void nis_integrand(const double* u, double* out, std::size_t n,
                   double v, double tau, double dynes);

enum class Backend { scalar, vector };

Backend active_backend();
const char* backend_name();

/// Test hook; has no effect on results beyond rounding-level differences.
void force_backend(Backend b);

namespace scalar {
void lorentzian(const double* f, double* out, std::size_t n,
                double center, double fwhm, double amplitude, double baseline);
void lorentzian_jacobian(const double* f, std::size_t n,
                         double center, double fwhm, double amplitude,
                         double* d_center, double* d_fwhm, double* d_amplitude);
void nis_integrand(const double* u, double* out, std::size_t n,
                   double v, double tau, double dynes);
} // namespace scalar

namespace vector {
bool available(); // CPU supports the flags this TU was compiled with
void lorentzian(const double* f, double* out, std::size_t n,
                double center, double fwhm, double amplitude, double baseline);
void lorentzian_jacobian(const double* f, std::size_t n,
                         double center, double fwhm, double amplitude,
                         double* d_center, double* d_fwhm, double* d_amplitude);
void nis_integrand(const double* u, double* out, std::size_t n,
                   double v, double tau, double dynes);
} // namespace vector

} // namespace thermspec::kernels
