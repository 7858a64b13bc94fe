#include "thermspec/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace thermspec::kernels {

namespace vector {
bool available() {
#if defined(THERMSPEC_VECTOR_X86)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    // Built with the baseline ISA of this target; always runnable.
    return true;
#endif
}
} // namespace vector

namespace {

Backend choose_initial() {
    const char* env = std::getenv("THERMSPEC_KERNELS");
    if (env && std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (vector::available()) return Backend::vector;
    return Backend::scalar;
}

std::atomic<Backend> g_backend{choose_initial()};

} // namespace

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

const char* backend_name() {
    return active_backend() == Backend::vector ? "vector" : "scalar";
}

void force_backend(Backend b) {
    if (b == Backend::vector && !vector::available()) return;
    g_backend.store(b, std::memory_order_relaxed);
}

void lorentzian(const double* f, double* out, std::size_t n,
                double center, double fwhm, double amplitude, double baseline) {
    if (active_backend() == Backend::vector)
        vector::lorentzian(f, out, n, center, fwhm, amplitude, baseline);
    else
        scalar::lorentzian(f, out, n, center, fwhm, amplitude, baseline);
}

void lorentzian_jacobian(const double* f, std::size_t n,
                         double center, double fwhm, double amplitude,
                         double* d_center, double* d_fwhm, double* d_amplitude) {
    if (active_backend() == Backend::vector)
        vector::lorentzian_jacobian(f, n, center, fwhm, amplitude, d_center, d_fwhm, d_amplitude);
    else
        scalar::lorentzian_jacobian(f, n, center, fwhm, amplitude, d_center, d_fwhm, d_amplitude);
}

void nis_integrand(const double* u, double* out, std::size_t n,
                   double v, double tau, double dynes) {
    if (active_backend() == Backend::vector)
        vector::nis_integrand(u, out, n, v, tau, dynes);
    else
        scalar::nis_integrand(u, out, n, v, tau, dynes);
}

} // namespace thermspec::kernels
