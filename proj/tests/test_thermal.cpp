#include <doctest.h>

#include <cmath>

#include "thermspec/thermal.hpp"
#include "thermspec/units.hpp"

using namespace thermspec;

namespace {

BolometerBody paper_body(double pe = 0.0) {
    BolometerBody b;
    b.sigma_ep_W_per_K5_m3 = 2e9;
    b.volume_m3 = 2.52e-20;
    b.parasitic_power_W = pe;
    b.heat_capacity_const = 71.0;
    b.wire_inductance_H = 8.5e-12;
    b.absorber_resistance_ohm = 12.23;
    return b;
}

} // namespace

TEST_CASE("electron-phonon power at the device operating point") {
    CHECK(electron_phonon_power({0.05, 0.05}, paper_body()) == doctest::Approx(0.0));
    CHECK(electron_phonon_power({0.13, 0.05}, paper_body()) ==
          doctest::Approx(1.85556672e-15).epsilon(1e-12));
    // with the 2 fW background the same point sits slightly below zero signal
    CHECK(electron_phonon_power({0.13, 0.05}, paper_body(2e-15)) ==
          doctest::Approx(-1.4443328e-16).epsilon(1e-10));
}

TEST_CASE("temperature_from_power inverts the power law") {
    const BolometerBody body = paper_body();
    CHECK(temperature_from_power(0.0, 0.05, body) == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(temperature_from_power(1.85556672e-15, 0.05, body) ==
          doctest::Approx(0.13).epsilon(1e-10));
    for (double t = 0.04; t <= 0.5001; t += 0.023) {
        const double p = electron_phonon_power({t, 0.05}, body);
        CHECK(temperature_from_power(p, 0.05, body) == doctest::Approx(t).epsilon(1e-12));
    }
    // same round trip with a parasitic load
    const BolometerBody loaded = paper_body(2e-15);
    for (double t = 0.14; t <= 0.5001; t += 0.04) {
        const double p = electron_phonon_power({t, 0.05}, loaded);
        CHECK(temperature_from_power(p, 0.05, loaded) == doctest::Approx(t).epsilon(1e-12));
    }
    CHECK_THROWS_AS(temperature_from_power(-1.0, 0.05, body), std::domain_error);
}

TEST_CASE("parasitic power saturates the base temperature near 130 mK") {
    CHECK(temperature_from_power(0.0, 0.05, paper_body(2e-15)) ==
          doctest::Approx(0.1319).epsilon(0.002));
}

TEST_CASE("linearized power: value and small-signal agreement") {
    const BolometerBody body = paper_body();
    CHECK(linearized_power(0.0, 0.05, body) == 0.0);
    CHECK(linearized_power(1e-3, 0.05, body) == doctest::Approx(1.575e-18).epsilon(1e-12));
    // dT/T0 = 0.05 stays within the binomial error bound
    const double dt = 0.0025, t0 = 0.05;
    const double lin = linearized_power(dt, t0, body);
    const double exact = electron_phonon_power({t0 + dt, t0}, body);
    CHECK(std::fabs(lin / exact - 1.0) < 0.11);
    // ratio -> 1 as dT -> 0
    for (const double r : {0.02, 0.01, 0.001}) {
        const double d = r * t0;
        const double ratio =
            linearized_power(d, t0, body) / electron_phonon_power({t0 + d, t0}, body);
        CHECK(std::fabs(ratio - 1.0) < 3.0 * r);
    }
}

TEST_CASE("photon number at the single-photon power") {
    const double q_b = 1715.5573848695092;
    const PhotonNumber n = photon_number(1.1979727491095806e-16, q_b, 7.026e9, 0.13);
    CHECK(n.simplified == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(n.thermal_occupation == doctest::Approx(0.0808).epsilon(0.01));
    CHECK(n.full == doctest::Approx(n.simplified + n.thermal_occupation).epsilon(1e-12));
    // zero power leaves only the thermal term
    const PhotonNumber n0 = photon_number(0.0, q_b, 7.026e9, 0.13);
    CHECK(n0.simplified == 0.0);
    CHECK(n0.full == doctest::Approx(0.0808).epsilon(0.01));
    // affine in the power
    const PhotonNumber n2 = photon_number(2.0 * 1.1979727491095806e-16, q_b, 7.026e9, 0.13);
    CHECK(n2.full - n2.thermal_occupation ==
          doctest::Approx(2.0 * (n.full - n.thermal_occupation)).epsilon(1e-12));
}

TEST_CASE("figures of merit at the device operating point") {
    const FiguresOfMerit fom = figures_of_merit(paper_body(2e-15), 0.13, 0.05,
                                                1715.5573848695092, 7.026e9);
    CHECK(fom.nep_thermal_W_per_sqrtHz == doctest::Approx(2.5918e-19).epsilon(1e-4));
    CHECK(fom.relaxation_time_s == doctest::Approx(1.4768e-4).epsilon(1e-4));
    CHECK(fom.cutoff_hz == doctest::Approx(2.28995876942809e11).epsilon(1e-12));
    CHECK(fom.single_photon_power_W == doctest::Approx(1.19797e-16).epsilon(1e-5));
    CHECK(fom.thermal_occupation == doctest::Approx(0.0808).epsilon(0.01));
    CHECK(fom.heat_capacity_J_per_K == doctest::Approx(71.0 * 2.52e-20 * 0.13).epsilon(1e-12));
}

TEST_CASE("thermal conductance scales as T^4") {
    const BolometerBody body = paper_body();
    const FiguresOfMerit a = figures_of_merit(body, 0.1, 0.05, 1700.0, 7e9);
    const FiguresOfMerit b = figures_of_merit(body, 0.2, 0.05, 1700.0, 7e9);
    CHECK(b.g_th_at_tb_W_per_K == doctest::Approx(16.0 * a.g_th_at_tb_W_per_K).epsilon(1e-12));
    // NEP_th scales as T_b^3
    CHECK(b.nep_thermal_W_per_sqrtHz ==
          doctest::Approx(8.0 * a.nep_thermal_W_per_sqrtHz).epsilon(1e-12));
}
