#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "thermspec/errors.hpp"
#include "thermspec/kernels.hpp"
#include "thermspec/random.hpp"
#include "thermspec/spectral.hpp"
#include "thermspec/units.hpp"

using namespace thermspec;

namespace {

SpectralTrace make_lorentzian_trace(double f0, double gamma, double amp, double base,
                                    int n = 401, double span_gammas = 10.0,
                                    ValueKind kind = ValueKind::bolometer_power) {
    SpectralTrace t;
    t.kind = kind;
    t.frequencies_hz.resize(n);
    t.values.resize(n);
    for (int i = 0; i < n; ++i)
        t.frequencies_hz[i] =
            f0 + span_gammas * gamma * (static_cast<double>(i) / (n - 1) - 0.5);
    kernels::lorentzian(t.frequencies_hz.data(), t.values.data(), n, f0, gamma, amp, base);
    return t;
}

LossModelParams table_params() {
    LossModelParams p;
    p.delta_tls0 = 5e-4;
    p.beta_exponent = 2.2;
    p.p_critical_watt = dbm_to_watts(-120.79);
    p.amplitude_A = 2.3e5;
    p.p_quasiparticle_watt = dbm_to_watts(-103.1);
    p.f0_hz = 7.026e9;
    p.t0_kelvin = 52.4e-3;
    return p;
}

} // namespace

TEST_CASE("noiseless Lorentzian recovery to 1e-9 relative") {
    const double f0 = 7.026e9, g = 4e6, a = 3.7e-15, b = 2.2e-16;
    const LorentzianFit fit = fit_lorentzian(make_lorentzian_trace(f0, g, a, b));
    CHECK(std::fabs(fit.center_f0_hz / f0 - 1.0) < 1e-9);
    CHECK(std::fabs(fit.linewidth_hz / g - 1.0) < 1e-9);
    CHECK(std::fabs(fit.peak_amplitude / a - 1.0) < 1e-9);
    CHECK(std::fabs(fit.baseline / b - 1.0) < 1e-9);
    CHECK(fit.orientation == Orientation::peak);
}

TEST_CASE("dip recovery for voltage-like traces") {
    const double f0 = 7.026e9, g = 9.7e6, a = -3.2e-5, b = 3.9e-4;
    const LorentzianFit fit = fit_lorentzian(
        make_lorentzian_trace(f0, g, a, b, 401, 10.0, ValueKind::thermometer_voltage));
    CHECK(fit.orientation == Orientation::dip);
    CHECK(std::fabs(fit.linewidth_hz / g - 1.0) < 1e-9);
    CHECK(std::fabs(fit.peak_amplitude / std::fabs(a) - 1.0) < 1e-9);
}

TEST_CASE("half-max points of the fitted curve sit at f0 +- gamma/2") {
    const double f0 = 5e9, g = 2e6;
    const LorentzianFit fit = fit_lorentzian(make_lorentzian_trace(f0, g, 1.0, 0.1));
    const auto model = [&](double f) {
        const double q = 0.25 * fit.linewidth_hz * fit.linewidth_hz;
        return fit.baseline +
               fit.peak_amplitude * q / ((f - fit.center_f0_hz) * (f - fit.center_f0_hz) + q);
    };
    const double half = fit.baseline + 0.5 * fit.peak_amplitude;
    CHECK(model(fit.center_f0_hz + 0.5 * fit.linewidth_hz) ==
          doctest::Approx(half).epsilon(1e-12));
    CHECK(model(fit.center_f0_hz - 0.5 * fit.linewidth_hz) ==
          doctest::Approx(half).epsilon(1e-12));
}

TEST_CASE("affine value rescaling moves only amplitude and baseline") {
    const double f0 = 7.026e9, g = 4e6;
    SpectralTrace t = make_lorentzian_trace(f0, g, 2.0, 0.5);
    GaussianStream rng(99);
    for (auto& v : t.values) v += 0.01 * rng.next();
    const LorentzianFit base = fit_lorentzian(t);
    const double c = 37.5, d = -4.0;
    SpectralTrace scaled = t;
    for (auto& v : scaled.values) v = c * v + d;
    const LorentzianFit fit = fit_lorentzian(scaled);
    CHECK(fit.center_f0_hz == doctest::Approx(base.center_f0_hz).epsilon(1e-10));
    CHECK(fit.linewidth_hz == doctest::Approx(base.linewidth_hz).epsilon(1e-9));
    CHECK(fit.peak_amplitude == doctest::Approx(c * base.peak_amplitude).epsilon(1e-9));
    CHECK(fit.baseline == doctest::Approx(c * base.baseline + d).epsilon(1e-9));
}

TEST_CASE("frequency translation shifts only the center") {
    const double f0 = 7.026e9, g = 4e6, df = 2.5e8;
    SpectralTrace t = make_lorentzian_trace(f0, g, 1.0, 0.0);
    GaussianStream rng(123);
    for (auto& v : t.values) v += 0.005 * rng.next();
    const LorentzianFit base = fit_lorentzian(t);
    SpectralTrace shifted = t;
    for (auto& f : shifted.frequencies_hz) f += df;
    const LorentzianFit fit = fit_lorentzian(shifted);
    CHECK(fit.center_f0_hz - base.center_f0_hz == doctest::Approx(df).epsilon(1e-12));
    CHECK(fit.linewidth_hz == doctest::Approx(base.linewidth_hz).epsilon(1e-10));
}

TEST_CASE("noisy Monte Carlo: f0 within gamma/100 and gamma within 2%") {
    const double f0 = 7.026e9, g = 4e6, a = 1.0, b = 0.0;
    int n_f0_ok = 0, n_gamma_ok = 0, n_cover = 0;
    const int n_seeds = 120;
    for (int seed = 0; seed < n_seeds; ++seed) {
        SpectralTrace t = make_lorentzian_trace(f0, g, a, b);
        GaussianStream rng(static_cast<std::uint64_t>(seed) + 1000);
        for (auto& v : t.values) v += 0.01 * a * rng.next();
        const LorentzianFit fit = fit_lorentzian(t);
        if (std::fabs(fit.center_f0_hz - f0) < g / 100.0) ++n_f0_ok;
        if (std::fabs(fit.linewidth_hz / g - 1.0) < 0.02) ++n_gamma_ok;
        if (std::fabs(fit.linewidth_hz - g) <= fit.sigma_linewidth_hz) ++n_cover;
    }
    CHECK(n_f0_ok >= n_seeds * 95 / 100);
    CHECK(n_gamma_ok >= n_seeds * 95 / 100);
    // 1-sigma coverage in the rough Gaussian band
    CHECK(n_cover >= n_seeds * 55 / 100);
    CHECK(n_cover <= n_seeds * 80 / 100);
}

TEST_CASE("degenerate traces are rejected") {
    SpectralTrace flat;
    flat.kind = ValueKind::bolometer_power;
    for (int i = 0; i < 32; ++i) {
        flat.frequencies_hz.push_back(1e9 + i * 1e5);
        flat.values.push_back(1.0);
    }
    CHECK_THROWS_AS(fit_lorentzian(flat), FitError);

    SpectralTrace shortt;
    shortt.frequencies_hz = {1.0, 2.0, 3.0};
    shortt.values = {1.0, 2.0, 1.0};
    CHECK_THROWS_AS(fit_lorentzian(shortt), std::invalid_argument);
}

TEST_CASE("lorentzian jacobian matches central finite differences") {
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n_points = 100;
    int checked = 0;
    for (int trial = 0; trial < n_points; ++trial) {
        const double c = -2.0 + 4.0 * u(eng);
        const double g = 0.3 + 3.0 * u(eng);
        const double a = (u(eng) < 0.5 ? -1.0 : 1.0) * (0.2 + 2.0 * u(eng));
        const double f = c + (u(eng) - 0.5) * 8.0 * g;
        double jc, jw, ja;
        kernels::lorentzian_jacobian(&f, 1, c, g, a, &jc, &jw, &ja);
        const auto model = [&](double cc, double gg, double aa) {
            double out;
            kernels::lorentzian(&f, &out, 1, cc, gg, aa, 0.0);
            return out;
        };
        const auto fd = [&](auto eval, double x) {
            const double h = 1e-6 * std::max(std::fabs(x), 1e-3);
            return (eval(x + h) - eval(x - h)) / (2.0 * h);
        };
        const double fdc = fd([&](double x) { return model(x, g, a); }, c);
        const double fdw = fd([&](double x) { return model(c, x, a); }, g);
        const double fda = fd([&](double x) { return model(c, g, x); }, a);
        for (const auto [an, num] : {std::pair{jc, fdc}, {jw, fdw}, {ja, fda}}) {
            const double scale = std::max({std::fabs(an), std::fabs(num), 1e-8});
            CHECK(std::fabs(an - num) / scale < 1e-6);
        }
        ++checked;
    }
    CHECK(checked == n_points);
}

TEST_CASE("internal Q from the linewidth budget") {
    const CircuitAssembly a =
        make_assembly({50.0, 7.026e9, {}, {}}, 13.85e-15, 19.6e-15, 12.23);
    const QualityFactors qf = quality_factors(a);

    SUBCASE("round trip against the forward budget") {
        const double qi_true = 5000.0;
        const double gamma =
            qf.f0_hz * (1.0 / qi_true + 1.0 / qf.q_feedline + 1.0 / qf.q_bolometer);
        const InternalQEstimate est = internal_q_from_linewidth(gamma, 0.0, qf.f0_hz, a);
        CHECK(est.q_internal == doctest::Approx(qi_true).epsilon(1e-3));
    }
    SUBCASE("boundary: coupling-limited linewidth means infinite internal Q") {
        const double gamma = qf.f0_hz * (1.0 / qf.q_feedline + 1.0 / qf.q_bolometer);
        CHECK_THROWS_AS(internal_q_from_linewidth(0.999999 * gamma, 0.0, qf.f0_hz, a),
                        std::domain_error);
        const InternalQEstimate est =
            internal_q_from_linewidth(gamma * 1.0001, 0.0, qf.f0_hz, a);
        CHECK(est.q_internal > 1e6);
    }
    SUBCASE("capacitance uncertainty propagates quadratically") {
        const double gamma =
            qf.f0_hz * (1.0 / 5000.0 + 1.0 / qf.q_feedline + 1.0 / qf.q_bolometer);
        const InternalQEstimate plain =
            internal_q_from_linewidth(gamma, 0.0, qf.f0_hz, a, 0.0);
        const InternalQEstimate banded =
            internal_q_from_linewidth(gamma, 0.0, qf.f0_hz, a, 0.02);
        CHECK(plain.sigma_q_total == doctest::Approx(0.0));
        const double expected_sigma_inv =
            2.0 * 0.02 *
            std::hypot(1.0 / qf.q_feedline, 1.0 / qf.q_bolometer);
        CHECK(banded.sigma_q_total ==
              doctest::Approx(expected_sigma_inv * plain.q_internal * plain.q_internal)
                  .epsilon(1e-9));
    }
}

TEST_CASE("loss model against its closed-form limits") {
    const LossModelParams p = table_params();
    const double th = std::tanh(constants.planck_J_s * p.f0_hz /
                                (2.0 * constants.boltzmann_J_per_K * p.t0_kelvin));
    // low-power plateau: saturation factor -> 1
    const LossModelQ low = loss_model_q(p.p_critical_watt * 1e-6, p);
    CHECK(low.q_tls == doctest::Approx(1.0 / (p.delta_tls0 * th)).epsilon(1e-3));
    CHECK(low.q_internal ==
          doctest::Approx(1.0 / (p.delta_tls0 * th + 1.0 / p.amplitude_A)).epsilon(1e-3));
    // at P = P_c the TLS branch gains sqrt(2)
    const LossModelQ at_pc = loss_model_q(p.p_critical_watt, p);
    CHECK(at_pc.q_tls ==
          doctest::Approx(std::sqrt(2.0) / (p.delta_tls0 * th)).epsilon(1e-12));
}

TEST_CASE("loss model has a single interior maximum over the sweep range") {
    const LossModelParams p = table_params();
    std::vector<double> q;
    for (int i = 0; i < 351; ++i)
        q.push_back(loss_model_q(dbm_to_watts(-130.0 + 35.0 * i / 350.0), p).q_internal);
    std::size_t imax = 0;
    for (std::size_t i = 1; i < q.size(); ++i)
        if (q[i] > q[imax]) imax = i;
    CHECK(imax > 0);
    CHECK(imax < q.size() - 1);
    // strictly rising before, falling after (single interior max)
    for (std::size_t i = 1; i <= imax; ++i) CHECK(q[i] > q[i - 1]);
    for (std::size_t i = imax + 1; i < q.size(); ++i) CHECK(q[i] < q[i - 1]);
    // maximum lands in the -105 dBm region
    const double max_dbm = -130.0 + 35.0 * static_cast<double>(imax) / 350.0;
    CHECK(max_dbm > -110.0);
    CHECK(max_dbm < -95.0);
}

TEST_CASE("monotone when the quasiparticle branch is absent") {
    LossModelParams p = table_params();
    p.amplitude_A = 1e300; // effectively no QP loss
    double prev = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double q = loss_model_q(dbm_to_watts(-130.0 + 35.0 * i / 99.0), p).q_internal;
        CHECK(q >= prev);
        prev = q;
    }
}

TEST_CASE("loss model jacobian matches central finite differences") {
    const LossModelParams base = table_params();
    std::mt19937_64 eng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        LossModelParams p = base;
        p.delta_tls0 = 5e-4 * std::pow(10.0, u(eng) - 0.5);
        p.beta_exponent = 1.5 + u(eng);
        p.p_critical_watt = base.p_critical_watt * std::pow(10.0, u(eng) - 0.5);
        p.amplitude_A = base.amplitude_A * std::pow(10.0, u(eng) - 0.5);
        p.p_quasiparticle_watt = base.p_quasiparticle_watt * std::pow(10.0, u(eng) - 0.5);
        const double power = dbm_to_watts(-128.0 + 30.0 * u(eng));

        // model as a function of the log-parameterization used by the fit
        const auto eval = [&](const std::array<double, 5>& lp) {
            LossModelParams q = p;
            q.delta_tls0 = std::exp(lp[0]);
            q.beta_exponent = lp[1];
            q.p_critical_watt = std::exp(lp[2]);
            q.amplitude_A = std::exp(lp[3]);
            q.p_quasiparticle_watt = std::exp(lp[4]);
            return loss_model_q(power, q).q_internal;
        };
        std::array<double, 5> lp{std::log(p.delta_tls0), p.beta_exponent,
                                 std::log(p.p_critical_watt), std::log(p.amplitude_A),
                                 std::log(p.p_quasiparticle_watt)};

        // analytic derivative assembled the same way the fitter does it
        const double th = std::tanh(constants.planck_J_s * p.f0_hz /
                                    (2.0 * constants.boltzmann_J_per_K * p.t0_kelvin));
        const double w = std::pow(power / p.p_critical_watt, 0.5 * p.beta_exponent);
        const double s = std::sqrt(1.0 + w);
        const double e = std::exp(power / p.p_quasiparticle_watt);
        const double gsum = p.delta_tls0 * th / s + e / p.amplitude_A;
        const double q0 = 1.0 / gsum;
        const double dq = -q0 * q0;
        const double ds_dbeta = 0.5 * std::log(power / p.p_critical_watt) * w / (2.0 * s);
        const double ds_dlnpc = -0.5 * p.beta_exponent * w / (2.0 * s);
        const std::array<double, 5> analytic{
            dq * (p.delta_tls0 * th / s),
            dq * (-p.delta_tls0 * th / (s * s) * ds_dbeta),
            dq * (-p.delta_tls0 * th / (s * s) * ds_dlnpc),
            dq * (-e / p.amplitude_A),
            dq * (-(power / p.p_quasiparticle_watt) * e / p.amplitude_A)};

        for (int k = 0; k < 5; ++k) {
            auto lo = lp, hi = lp;
            const double h = 1e-6 * std::max(std::fabs(lp[k]), 1e-2);
            lo[k] -= h;
            hi[k] += h;
            const double fd = (eval(hi) - eval(lo)) / (2.0 * h);
            const double scale = std::max({std::fabs(fd), std::fabs(analytic[k]), 1e-6 * q0});
            CHECK(std::fabs(fd - analytic[k]) / scale < 1e-6);
        }
    }
}

TEST_CASE("loss model fit: noiseless round trip within 5%") {
    const LossModelParams truth = table_params();
    std::vector<QiPoint> pts;
    for (int i = 0; i < 15; ++i) {
        const double p = dbm_to_watts(-130.0 + 35.0 * i / 14.0);
        pts.push_back({p, loss_model_q(p, truth).q_internal, 0.0});
    }
    const LossModelFitResult fit = fit_loss_model(pts, truth.f0_hz, truth.t0_kelvin);
    CHECK(std::fabs(fit.params.delta_tls0 / truth.delta_tls0 - 1.0) < 0.05);
    CHECK(std::fabs(fit.params.beta_exponent / truth.beta_exponent - 1.0) < 0.05);
    CHECK(std::fabs(fit.params.p_critical_watt / truth.p_critical_watt - 1.0) < 0.05);
    CHECK(std::fabs(fit.params.amplitude_A / truth.amplitude_A - 1.0) < 0.05);
    CHECK(std::fabs(fit.params.p_quasiparticle_watt / truth.p_quasiparticle_watt - 1.0) <
          0.05);
}

TEST_CASE("loss model fit: noisy recovery of delta_tls0 and P_q") {
    const LossModelParams truth = table_params();
    GaussianStream rng(2024);
    std::vector<double> err_d0, err_pq;
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<QiPoint> pts;
        for (int i = 0; i < 15; ++i) {
            const double p = dbm_to_watts(-130.0 + 35.0 * i / 14.0);
            const double q = loss_model_q(p, truth).q_internal;
            const double noisy = q * (1.0 + 0.03 * rng.next());
            pts.push_back({p, noisy, 0.03 * noisy});
        }
        std::size_t imax = 0;
        for (std::size_t i = 1; i < pts.size(); ++i)
            if (pts[i].q_internal > pts[imax].q_internal) imax = i;
        if (imax == 0 || imax + 1 == pts.size()) continue; // rare noise artifact
        const LossModelFitResult fit = fit_loss_model(pts, truth.f0_hz, truth.t0_kelvin);
        err_d0.push_back(std::fabs(fit.params.delta_tls0 / truth.delta_tls0 - 1.0));
        err_pq.push_back(
            std::fabs(fit.params.p_quasiparticle_watt / truth.p_quasiparticle_watt - 1.0));
    }
    REQUIRE(err_d0.size() >= 20);
    std::sort(err_d0.begin(), err_d0.end());
    std::sort(err_pq.begin(), err_pq.end());
    // 80th-percentile errors stay within the 15% Monte Carlo band
    CHECK(err_d0[err_d0.size() * 8 / 10] < 0.15);
    CHECK(err_pq[err_pq.size() * 8 / 10] < 0.15);
}

TEST_CASE("one-sided sweeps are rejected as unidentifiable") {
    const LossModelParams truth = table_params();
    std::vector<QiPoint> rising;
    for (int i = 0; i < 10; ++i) {
        const double p = dbm_to_watts(-130.0 + 15.0 * i / 9.0); // all below the maximum
        rising.push_back({p, loss_model_q(p, truth).q_internal, 0.0});
    }
    CHECK_THROWS_AS(fit_loss_model(rising, truth.f0_hz, truth.t0_kelvin), FitError);

    LossModelParams no_qp = truth;
    no_qp.amplitude_A = 1e300;
    std::vector<QiPoint> monotone;
    for (int i = 0; i < 15; ++i) {
        const double p = dbm_to_watts(-130.0 + 35.0 * i / 14.0);
        monotone.push_back({p, loss_model_q(p, no_qp).q_internal, 0.0});
    }
    CHECK_THROWS_AS(fit_loss_model(monotone, truth.f0_hz, truth.t0_kelvin), FitError);

    std::vector<QiPoint> few(monotone.begin(), monotone.begin() + 5);
    CHECK_THROWS_AS(fit_loss_model(few, truth.f0_hz, truth.t0_kelvin),
                    std::invalid_argument);
}
