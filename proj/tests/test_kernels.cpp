#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "thermspec/kernels.hpp"
#include "thermspec/nis.hpp"

namespace k = thermspec::kernels;

namespace {

std::vector<double> random_grid(std::size_t n, double lo, double hi, unsigned seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(eng);
    return v;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b, double rel) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({std::fabs(a[i]), std::fabs(b[i]), 1e-300});
        CHECK(std::fabs(a[i] - b[i]) <= rel * scale);
    }
}

} // namespace

TEST_CASE("scalar lorentzian matches the closed form") {
    const double c = 7.026e9, g = 4e6, a = 2.5e-15, b = 1e-16;
    const auto f = random_grid(257, c - 5 * g, c + 5 * g, 11);
    std::vector<double> out(f.size());
    k::scalar::lorentzian(f.data(), out.data(), f.size(), c, g, a, b);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double q = 0.25 * g * g;
        const double expected = b + a * q / ((f[i] - c) * (f[i] - c) + q);
        CHECK(out[i] == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("scalar nis_integrand matches bcs_dos and the Fermi difference") {
    const double dynes = 2.4e-3, v = 0.9, tau = 0.05;
    const auto u = random_grid(333, -20.0, 20.0, 5);
    std::vector<double> out(u.size());
    k::scalar::nis_integrand(u.data(), out.data(), u.size(), v, tau, dynes);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double dos = thermspec::bcs_dos(u[i], dynes);
        const double fm = 1.0 / (1.0 + std::exp((u[i] - v) / tau));
        const double fp = 1.0 / (1.0 + std::exp((u[i] + v) / tau));
        const double scale = std::max(std::fabs(out[i]), 1e-300);
        CHECK(std::fabs(out[i] - dos * (fm - fp)) <= 1e-12 * std::max(scale, 1.0));
    }
}

TEST_CASE("vector kernels agree with scalar") {
    if (!k::vector::available()) {
        MESSAGE("vector backend not runnable on this CPU; skipping");
        return;
    }
    SUBCASE("lorentzian") {
        const double c = 7.026e9, g = 4e6, a = -3.1e-4, b = 4.2e-4;
        for (const std::size_t n : {1u, 3u, 4u, 5u, 8u, 401u, 1027u}) {
            const auto f = random_grid(n, c - 8 * g, c + 8 * g, 17 + n);
            std::vector<double> s(n), v(n);
            k::scalar::lorentzian(f.data(), s.data(), n, c, g, a, b);
            k::vector::lorentzian(f.data(), v.data(), n, c, g, a, b);
            check_close(s, v, 1e-13);
        }
    }
    SUBCASE("lorentzian_jacobian") {
        const double c = 0.2, g = 1.3, a = -0.8;
        for (const std::size_t n : {2u, 7u, 64u, 513u}) {
            const auto f = random_grid(n, -6.0, 6.0, 23 + n);
            std::vector<double> sc(n), sw(n), sa(n), vc(n), vw(n), va(n);
            k::scalar::lorentzian_jacobian(f.data(), n, c, g, a, sc.data(), sw.data(),
                                           sa.data());
            k::vector::lorentzian_jacobian(f.data(), n, c, g, a, vc.data(), vw.data(),
                                           va.data());
            check_close(sc, vc, 1e-13);
            check_close(sw, vw, 1e-13);
            check_close(sa, va, 1e-13);
        }
    }
    SUBCASE("nis_integrand, including gap edges and extreme Fermi arguments") {
        for (const double tau : {2e-3, 0.05, 0.3}) {
            for (const double v : {0.0, 0.3, 1.0, 4.9}) {
                auto u = random_grid(517, -25.0, 25.0, 31);
                u.push_back(1.0);
                u.push_back(-1.0);
                u.push_back(0.0);
                std::vector<double> s(u.size()), vec(u.size());
                k::scalar::nis_integrand(u.data(), s.data(), u.size(), v, tau, 2.4e-3);
                k::vector::nis_integrand(u.data(), vec.data(), u.size(), v, tau, 2.4e-3);
                check_close(s, vec, 1e-12);
            }
        }
    }
}

TEST_CASE("dispatch honors force_backend") {
    const auto original = k::active_backend();
    k::force_backend(k::Backend::scalar);
    CHECK(k::active_backend() == k::Backend::scalar);
    const double f = 1.0;
    double out_dispatch = 0.0, out_scalar = 0.0;
    k::lorentzian(&f, &out_dispatch, 1, 0.0, 2.0, 3.0, 0.5);
    k::scalar::lorentzian(&f, &out_scalar, 1, 0.0, 2.0, 3.0, 0.5);
    CHECK(out_dispatch == out_scalar);
    if (k::vector::available()) {
        k::force_backend(k::Backend::vector);
        CHECK(k::active_backend() == k::Backend::vector);
        double out_vec = 0.0;
        k::lorentzian(&f, &out_vec, 1, 0.0, 2.0, 3.0, 0.5);
        CHECK(out_vec == doctest::Approx(out_scalar).epsilon(1e-13));
    }
    k::force_backend(original);
}
