#include "thermspec/nis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "thermspec/kernels.hpp"
#include "thermspec/rootfind.hpp"
#include "thermspec/units.hpp"

namespace thermspec {

namespace {

void check_junction(const JunctionParams& j) {
    if (!(j.gap_eV > 0.0))
        throw std::invalid_argument("JunctionParams: gap must be positive");
    if (!(j.dynes > 0.0 && j.dynes < 1.0))
        throw std::invalid_argument("JunctionParams: dynes parameter must be in (0,1)");
    if (!(j.tunnel_resistance_ohm > 0.0))
        throw std::invalid_argument("JunctionParams: tunnel resistance must be positive");
}

void check_thermometer(const ThermometerConfig& cfg) {
    check_junction(cfg.junction);
    if (!(cfg.bias_current_A > 0.0))
        throw std::invalid_argument("ThermometerConfig: bias current must be positive");
    if (cfg.junction_count != 1 && cfg.junction_count != 2)
        throw std::invalid_argument("ThermometerConfig: junction count must be 1 or 2");
}

// Composite Simpson on [a,b] with interval doubling until two successive
// estimates agree. The integrand batch goes through the kernel dispatch.
double integrate_panel(double a, double b, double v, double tau, double dynes,
                       double rel_tol, double abs_tol) {
    if (!(b > a)) return 0.0;
    std::vector<double> u, y;
    double prev = 0.0;
    bool have_prev = false;
    for (std::size_t n = 16; n <= (1u << 20); n *= 2) {
        u.resize(n + 1);
        y.resize(n + 1);
        const double h = (b - a) / static_cast<double>(n);
        for (std::size_t i = 0; i <= n; ++i) u[i] = a + h * static_cast<double>(i);
        u[n] = b;
        kernels::nis_integrand(u.data(), y.data(), n + 1, v, tau, dynes);
        double s_even = 0.0, s_odd = 0.0, c_even = 0.0, c_odd = 0.0;
        for (std::size_t i = 1; i < n; i += 2) { // Kahan, odd nodes
            const double t = s_odd + y[i];
            c_odd += std::fabs(s_odd) >= std::fabs(y[i]) ? (s_odd - t) + y[i] : (y[i] - t) + s_odd;
            s_odd = t;
        }
        for (std::size_t i = 2; i < n; i += 2) {
            const double t = s_even + y[i];
            c_even += std::fabs(s_even) >= std::fabs(y[i]) ? (s_even - t) + y[i] : (y[i] - t) + s_even;
            s_even = t;
        }
        const double s = h / 3.0 *
                         (y[0] + y[n] + 4.0 * (s_odd + c_odd) + 2.0 * (s_even + c_even));
        if (have_prev && std::fabs(s - prev) <= std::max(rel_tol * std::fabs(s), abs_tol))
            return s;
        prev = s;
        have_prev = true;
    }
    std::ostringstream msg;
    msg << "qp_current: quadrature did not converge on [" << a << ", " << b
        << "] (v=" << v << ", tau=" << tau << ")";
    throw std::runtime_error(msg.str());
}

} // namespace

double bcs_dos(double energy_ratio, double dynes) {
    if (!(dynes > 0.0))
        throw std::invalid_argument("bcs_dos: dynes parameter must be positive");
    const std::complex<double> z{energy_ratio, dynes};
    return std::fabs(std::real(z / std::sqrt(z * z - 1.0)));
}

double qp_current(double voltage_V, double t_electron_K, const JunctionParams& j) {
    check_junction(j);
    if (!(t_electron_K > 0.0))
        throw std::invalid_argument("qp_current: electron temperature must be positive");
    const double gap_V = j.gap_eV; // numerically equal in volts
    const double v = voltage_V / gap_V;
    const double tau = constants.boltzmann_J_per_K * t_electron_K /
                       (j.gap_eV * constants.electron_charge_C);
    const double umax = std::max(20.0, std::fabs(v) + 20.0 * tau);

    // Panel edges at the gap singularities (with a tight window of width
    // ~dynes around them) and at the Fermi steps.
    std::vector<double> edges{-umax, umax, 0.0};
    for (const double s : {-1.0, 1.0}) {
        edges.push_back(s);
        edges.push_back(s * (1.0 - 8.0 * j.dynes));
        edges.push_back(s * (1.0 + 8.0 * j.dynes));
        edges.push_back(s * std::fabs(v));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges.erase(std::remove_if(edges.begin(), edges.end(),
                               [umax](double e) { return e < -umax || e > umax; }),
                edges.end());

    double total = 0.0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k)
        total += integrate_panel(edges[k], edges[k + 1], v, tau, j.dynes, 1e-11, 1e-22);
    return gap_V / (2.0 * j.tunnel_resistance_ohm) * total;
}

double thermometer_voltage(double t_electron_K, const ThermometerConfig& cfg) {
    check_thermometer(cfg);
    if (!(t_electron_K >= 0.02 && t_electron_K <= 0.6))
        throw std::domain_error("thermometer_voltage: temperature outside [0.02, 0.6] K");
    const int n = cfg.junction_count;
    const double gap_V = cfg.junction.gap_eV;
    const double v_hi = 2.0 * gap_V * n +
                        10.0 * cfg.bias_current_A * cfg.junction.tunnel_resistance_ohm * n;
    const auto mismatch = [&](double v_total) {
        return qp_current(v_total / n, t_electron_K, cfg.junction) - cfg.bias_current_A;
    };
    if (mismatch(v_hi) < 0.0)
        throw std::domain_error(
            "thermometer_voltage: bias current exceeds the junction current scale");
    return brent_find_root(mismatch, 0.0, v_hi, 1e-16, 1e-14);
}

double electron_temperature_from_voltage(double v_th, const ThermometerConfig& cfg,
                                         double t_min_K, double t_max_K) {
    check_thermometer(cfg);
    // I(V_b/n, T) grows with T at fixed subgap voltage, so this bracket works
    // wherever V(T) is monotone.
    const auto mismatch = [&](double t) {
        return qp_current(v_th / cfg.junction_count, t, cfg.junction) - cfg.bias_current_A;
    };
    const double lo = mismatch(t_min_K), hi = mismatch(t_max_K);
    if ((lo > 0.0) == (hi > 0.0)) {
        std::ostringstream msg;
        msg << "electron_temperature_from_voltage: v_th=" << v_th
            << " V not reachable for T in [" << t_min_K << ", " << t_max_K << "] K";
        throw std::domain_error(msg.str());
    }
    return brent_find_root(mismatch, t_min_K, t_max_K, 1e-12, 1e-13);
}

CalibrationFit linear_calibration_fit(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2)
        throw std::invalid_argument("linear_calibration_fit: need at least two points");
    double tmin = points[0].first, tmax = points[0].first;
    double st = 0.0, sv = 0.0, stt = 0.0, stv = 0.0;
    for (const auto& [t, v] : points) {
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
        st += t;
        sv += v;
        stt += t * t;
        stv += t * v;
    }
    if (!(tmax - tmin > 0.05))
        throw std::invalid_argument("linear_calibration_fit: points must span more than 50 mK");
    const double n = static_cast<double>(points.size());
    const double denom = n * stt - st * st;
    if (denom <= 0.0)
        throw std::invalid_argument("linear_calibration_fit: degenerate abscissas");
    CalibrationFit fit;
    fit.slope_V_per_K = (n * stv - st * sv) / denom;
    fit.intercept_V = (sv - fit.slope_V_per_K * st) / n;
    fit.t_min_K = tmin;
    fit.t_max_K = tmax;
    fit.n_points = static_cast<int>(points.size());
    double rss = 0.0;
    for (const auto& [t, v] : points) {
        const double r = v - (fit.slope_V_per_K * t + fit.intercept_V);
        rss += r * r;
    }
    fit.rms_residual_V = std::sqrt(rss / n);
    return fit;
}

double temperature_from_voltage(double v_th, const CalibrationFit& cal) {
    if (cal.slope_V_per_K == 0.0)
        throw std::invalid_argument("temperature_from_voltage: zero calibration slope");
    const double t = (v_th - cal.intercept_V) / cal.slope_V_per_K;
    if (cal.t_max_K > cal.t_min_K) {
        if (t < cal.t_min_K || t > cal.t_max_K) {
            const double v_lo = cal.slope_V_per_K * cal.t_max_K + cal.intercept_V;
            const double v_hi = cal.slope_V_per_K * cal.t_min_K + cal.intercept_V;
            std::ostringstream msg;
            msg << "temperature_from_voltage: v_th=" << v_th << " V outside calibrated ["
                << std::min(v_lo, v_hi) << ", " << std::max(v_lo, v_hi) << "] V";
            throw std::domain_error(msg.str());
        }
    }
    return t;
}

} // namespace thermspec
