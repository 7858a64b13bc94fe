#include "thermspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "thermspec/errors.hpp"
#include "thermspec/kernels.hpp"
#include "thermspec/levmar.hpp"
#include "thermspec/units.hpp"

namespace thermspec {

const char* to_string(ValueKind k) {
    switch (k) {
        case ValueKind::thermometer_voltage: return "thermometer_voltage";
        case ValueKind::bolometer_power: return "bolometer_power";
        case ValueKind::bolometer_temperature: return "bolometer_temperature";
    }
    return "unknown";
}

std::optional<ValueKind> value_kind_from_string(const std::string& s) {
    if (s == "thermometer_voltage") return ValueKind::thermometer_voltage;
    if (s == "bolometer_power") return ValueKind::bolometer_power;
    if (s == "bolometer_temperature") return ValueKind::bolometer_temperature;
    return std::nullopt;
}

void validate(const SpectralTrace& trace) {
    if (trace.frequencies_hz.size() != trace.values.size())
        throw std::invalid_argument("SpectralTrace: array length mismatch");
    if (trace.frequencies_hz.size() < 8)
        throw std::invalid_argument("SpectralTrace: need at least 8 points");
    for (std::size_t i = 1; i < trace.frequencies_hz.size(); ++i)
        if (!(trace.frequencies_hz[i] > trace.frequencies_hz[i - 1]))
            throw std::invalid_argument("SpectralTrace: frequencies must be strictly increasing");
}

namespace {

double median(std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    double m = v[n / 2];
    if (n % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.end());
        m = 0.5 * (m + v[n / 2 - 1]);
    }
    return m;
}

struct InitialGuess {
    double center, width, amplitude, baseline; // physical units
};

// Edge-median baseline, extremum against it, half-maximum crossing width.
InitialGuess initial_guess(const SpectralTrace& t, Orientation orient) {
    const std::size_t n = t.values.size();
    const std::size_t edge = std::max<std::size_t>(2, n / 8);
    std::vector<double> edges;
    edges.insert(edges.end(), t.values.begin(), t.values.begin() + edge);
    edges.insert(edges.end(), t.values.end() - edge, t.values.end());
    const double baseline = median(std::move(edges));

    std::size_t idx = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dev = orient == Orientation::peak ? t.values[i] - baseline
                                                       : baseline - t.values[i];
        if (dev > best) {
            best = dev;
            idx = i;
        }
    }
    const double amplitude = t.values[idx] - baseline; // signed
    const double half_level = baseline + 0.5 * amplitude;

    const auto crossed = [&](std::size_t i) {
        return orient == Orientation::peak ? t.values[i] < half_level
                                           : t.values[i] > half_level;
    };
    std::size_t lo = idx, hi = idx;
    while (lo > 0 && !crossed(lo)) --lo;
    while (hi + 1 < n && !crossed(hi)) ++hi;
    double width = t.frequencies_hz[hi] - t.frequencies_hz[lo];
    const double span = t.frequencies_hz.back() - t.frequencies_hz.front();
    if (!(width > 0.0)) width = span / 6.0;
    return {t.frequencies_hz[idx], width, amplitude, baseline};
}

} // namespace

LorentzianFit fit_lorentzian(const SpectralTrace& trace) {
    validate(trace);
    const std::size_t n = trace.values.size();
    const Orientation orient0 = trace.kind == ValueKind::thermometer_voltage
                                    ? Orientation::dip
                                    : Orientation::peak;
    const InitialGuess g = initial_guess(trace, orient0);
    const double span = trace.frequencies_hz.back() - trace.frequencies_hz.front();

    const double vscale = std::fabs(g.amplitude);
    if (!(vscale > 0.0))
        throw FitError("fit_lorentzian: flat trace, no extremum against the baseline");
    const double fscale = g.width;

    // Work in scaled coordinates so the solver sees O(1) numbers.
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = (trace.frequencies_hz[i] - g.center) / fscale;
        y[i] = (trace.values[i] - g.baseline) / vscale;
    }

    std::vector<double> model(n), jc(n), jw(n), ja(n);
    const auto residual = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                              Eigen::MatrixXd* jac) {
        kernels::lorentzian(x.data(), model.data(), n, p(0), p(1), p(2), p(3));
        r.resize(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) r(static_cast<Eigen::Index>(i)) = model[i] - y[i];
        if (jac) {
            kernels::lorentzian_jacobian(x.data(), n, p(0), p(1), p(2), jc.data(), jw.data(),
                                         ja.data());
            jac->resize(static_cast<Eigen::Index>(n), 4);
            for (std::size_t i = 0; i < n; ++i) {
                const auto k = static_cast<Eigen::Index>(i);
                (*jac)(k, 0) = jc[i];
                (*jac)(k, 1) = jw[i];
                (*jac)(k, 2) = ja[i];
                (*jac)(k, 3) = 1.0;
            }
        }
    };

    LevMarOptions opt;
    opt.ftol = 1e-15;
    opt.xtol = 1e-14;
    opt.gtol = 1e-13;
    Eigen::Vector4d p0{0.0, 1.0, g.amplitude / vscale, 0.0};

    LevMarResult best;
    best.cost = std::numeric_limits<double>::infinity();
    for (const double wf : {1.0, 0.5, 2.0, 4.0}) {
        Eigen::VectorXd p = p0;
        p(1) = wf;
        const LevMarResult r = levenberg_marquardt(residual, p, opt);
        if (r.cost < best.cost) best = r;
        if (best.converged && best.cost < 1e-20 * n) break;
        if (best.converged && wf == 1.0) break; // first start is almost always right
    }
    if (!best.converged) {
        std::ostringstream msg;
        msg << "fit_lorentzian: no convergence after restarts (best rms residual "
            << std::sqrt(2.0 * best.cost / static_cast<double>(n)) * vscale << ")";
        throw FitError(msg.str());
    }

    LorentzianFit fit;
    fit.center_f0_hz = g.center + best.params(0) * fscale;
    fit.linewidth_hz = std::fabs(best.params(1)) * fscale;
    const double amp = best.params(2) * vscale;
    fit.orientation = amp >= 0.0 ? Orientation::peak : Orientation::dip;
    fit.peak_amplitude = std::fabs(amp);
    fit.baseline = g.baseline + best.params(3) * vscale;
    fit.iterations = best.iterations;
    fit.span_linewidths = span / fit.linewidth_hz;
    if (fit.linewidth_hz > 2.0 * span)
        throw FitError("fit_lorentzian: fitted linewidth exceeds twice the trace span; "
                       "the trace does not constrain the model");

    // Noise from off-resonance scatter of the residuals; fall back to the
    // overall rms when the wings hold too few points.
    Eigen::VectorXd r_final;
    Eigen::MatrixXd jac_final;
    residual(best.params, r_final, &jac_final);
    double rss_wings = 0.0;
    std::size_t n_wings = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::fabs(trace.frequencies_hz[i] - fit.center_f0_hz) > 2.5 * fit.linewidth_hz) {
            rss_wings += r_final(static_cast<Eigen::Index>(i)) * r_final(static_cast<Eigen::Index>(i));
            ++n_wings;
        }
    }
    const double dof = static_cast<double>(n > 4 ? n - 4 : 1);
    double sigma_scaled = n_wings >= 8 ? std::sqrt(rss_wings / static_cast<double>(n_wings))
                                       : std::sqrt(2.0 * best.cost / dof);
    fit.noise_sigma = sigma_scaled * vscale;
    fit.rms_residual = std::sqrt(2.0 * best.cost / static_cast<double>(n)) * vscale;

    const Eigen::Matrix4d cov_scaled =
        sigma_scaled * sigma_scaled * best.covariance.block<4, 4>(0, 0);
    Eigen::Vector4d scale{fscale, fscale, vscale, vscale};
    fit.covariance = scale.asDiagonal() * cov_scaled * scale.asDiagonal();
    fit.sigma_f0_hz = std::sqrt(std::max(0.0, fit.covariance(0, 0)));
    fit.sigma_linewidth_hz = std::sqrt(std::max(0.0, fit.covariance(1, 1)));
    return fit;
}

InternalQEstimate internal_q_from_linewidth(double gamma_t_hz, double sigma_gamma_hz,
                                            double f0_hz, const CircuitAssembly& assembly,
                                            double coupling_fraction_uncertainty) {
    if (!(gamma_t_hz > 0.0) || !(f0_hz > 0.0))
        throw std::invalid_argument("internal_q_from_linewidth: gamma_t and f0 must be positive");
    const double c = assembly.resonator.capacitance_F;
    const double zlc = std::sqrt(assembly.resonator.inductance_H / c);
    const double cf = assembly.feedline_port.series_capacitance_F;
    const double cb = assembly.bolometer_port.series_capacitance_F;
    const double term_f =
        assembly.line_impedance_ohm / (2.0 * zlc) * (cf / c) * (cf / c);
    const double term_b = assembly.bolometer_port.termination_resistance_ohm / zlc *
                          (cb / c) * (cb / c);
    const double inv_qi = gamma_t_hz / f0_hz - term_f - term_b;
    if (!(inv_qi > 0.0)) {
        std::ostringstream msg;
        msg << "internal_q_from_linewidth: measured linewidth narrower than the coupling "
               "losses (1/Q_i deficit "
            << -inv_qi << ")";
        throw std::domain_error(msg.str());
    }
    InternalQEstimate est;
    est.inv_q_internal = inv_qi;
    est.q_internal = 1.0 / inv_qi;
    const double s_fit = sigma_gamma_hz / f0_hz;
    // C_k enters squared, so a fractional capacitance error u moves each
    // coupling term by 2u.
    const double u = coupling_fraction_uncertainty;
    const double s_total =
        std::sqrt(s_fit * s_fit + 4.0 * u * u * (term_f * term_f + term_b * term_b));
    est.sigma_q_from_fit = s_fit * est.q_internal * est.q_internal;
    est.sigma_q_total = s_total * est.q_internal * est.q_internal;
    return est;
}

namespace {

void check_loss_params(const LossModelParams& p) {
    if (!(p.delta_tls0 > 0.0) || !(p.beta_exponent > 0.0) || !(p.p_critical_watt > 0.0) ||
        !(p.amplitude_A > 0.0) || !(p.p_quasiparticle_watt > 0.0) || !(p.f0_hz > 0.0) ||
        !(p.t0_kelvin > 0.0))
        throw std::invalid_argument("LossModelParams: all parameters must be positive");
}

double tanh_factor(double f0_hz, double t0_kelvin) {
    return std::tanh(constants.planck_J_s * f0_hz /
                     (2.0 * constants.boltzmann_J_per_K * t0_kelvin));
}

} // namespace

LossModelQ loss_model_q(double p_in_watt, const LossModelParams& params) {
    check_loss_params(params);
    if (!(p_in_watt > 0.0))
        throw std::invalid_argument("loss_model_q: power must be positive");
    const double th = tanh_factor(params.f0_hz, params.t0_kelvin);
    const double sat = std::sqrt(
        1.0 + std::pow(p_in_watt / params.p_critical_watt, 0.5 * params.beta_exponent));
    const double inv_tls = params.delta_tls0 * th / sat;
    const double expo = std::min(p_in_watt / params.p_quasiparticle_watt, 700.0);
    const double inv_qps = std::exp(expo) / params.amplitude_A;
    LossModelQ q;
    q.q_tls = 1.0 / inv_tls;
    q.q_qps = 1.0 / inv_qps;
    q.q_internal = 1.0 / (inv_tls + inv_qps);
    return q;
}

LossModelFitResult fit_loss_model(std::span<const QiPoint> points, double f0_hz,
                                  double t0_kelvin) {
    if (points.size() < 7)
        throw std::invalid_argument("fit_loss_model: need at least 7 points");
    std::vector<QiPoint> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(),
              [](const QiPoint& a, const QiPoint& b) { return a.p_in_watt < b.p_in_watt; });
    for (const auto& p : pts)
        if (!(p.p_in_watt > 0.0) || !(p.q_internal > 0.0))
            throw std::invalid_argument("fit_loss_model: powers and Q values must be positive");

    // Both regimes must be present: the TLS rise below the Q_i maximum and
    // the quasiparticle fall above it.
    std::size_t imax = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].q_internal > pts[imax].q_internal) imax = i;
    if (imax == 0)
        throw FitError("fit_loss_model: no TLS rise below the Q_i maximum; "
                       "delta_tls0, beta and p_critical are unidentifiable");
    if (imax + 1 == pts.size())
        throw FitError("fit_loss_model: no quasiparticle fall above the Q_i maximum; "
                       "amplitude_A and p_quasiparticle are unidentifiable");

    const double th = tanh_factor(f0_hz, t0_kelvin);
    const std::size_t n = pts.size();

    // Model and Jacobian in u = (ln d0, beta, ln Pc, ln A, ln Pq).
    const auto residual = [&](const Eigen::VectorXd& u, Eigen::VectorXd& r,
                              Eigen::MatrixXd* jac) {
        const double d0 = std::exp(u(0));
        const double beta = u(1);
        const double pc = std::exp(u(2));
        const double a = std::exp(u(3));
        const double pq = std::exp(u(4));
        r.resize(static_cast<Eigen::Index>(n));
        if (jac) jac->resize(static_cast<Eigen::Index>(n), 5);
        for (std::size_t i = 0; i < n; ++i) {
            const double p = pts[i].p_in_watt;
            const double sigma = pts[i].sigma_q > 0.0 ? pts[i].sigma_q : 1.0;
            const double w = std::pow(p / pc, 0.5 * beta);
            const double s = std::sqrt(1.0 + w);
            const double e = std::exp(std::min(p / pq, 700.0));
            const double gsum = d0 * th / s + e / a;
            const double q = 1.0 / gsum;
            const auto k = static_cast<Eigen::Index>(i);
            r(k) = (q - pts[i].q_internal) / sigma;
            if (jac) {
                const double dq = -q * q / sigma; // d(residual)/d(gsum)
                const double ds_dbeta = 0.5 * std::log(p / pc) * w / (2.0 * s);
                const double ds_dlnpc = -0.5 * beta * w / (2.0 * s);
                (*jac)(k, 0) = dq * (d0 * th / s);
                (*jac)(k, 1) = dq * (-d0 * th / (s * s) * ds_dbeta);
                (*jac)(k, 2) = dq * (-d0 * th / (s * s) * ds_dlnpc);
                (*jac)(k, 3) = dq * (-e / a);
                (*jac)(k, 4) = dq * (-(p / pq) * e / a);
            }
        }
    };

    const double q_max = pts[imax].q_internal;
    const double lp_lo = std::log(pts.front().p_in_watt);
    const double lp_hi = std::log(pts.back().p_in_watt);
    const auto lp_at = [&](double frac) { return lp_lo + frac * (lp_hi - lp_lo); };

    LevMarOptions opt;
    opt.max_iterations = 400;
    LevMarResult best;
    best.cost = std::numeric_limits<double>::infinity();
    for (const double fc : {0.1, 0.35, 0.6}) {
        for (const double fq : {0.5, 0.75, 0.95}) {
            Eigen::VectorXd u0(5);
            u0 << std::log(1.0 / (pts.front().q_internal * th)), 2.0, lp_at(fc),
                std::log(2.0 * q_max), lp_at(fq);
            const LevMarResult r = levenberg_marquardt(residual, u0, opt);
            if (r.converged && r.cost < best.cost) best = r;
        }
    }
    if (!std::isfinite(best.cost))
        throw FitError("fit_loss_model: no start converged");

    LossModelFitResult out;
    out.params.delta_tls0 = std::exp(best.params(0));
    out.params.beta_exponent = best.params(1);
    out.params.p_critical_watt = std::exp(best.params(2));
    out.params.amplitude_A = std::exp(best.params(3));
    out.params.p_quasiparticle_watt = std::exp(best.params(4));
    out.params.f0_hz = f0_hz;
    out.params.t0_kelvin = t0_kelvin;
    out.covariance_log = best.covariance;
    out.chi2 = 2.0 * best.cost;
    out.n_points = static_cast<int>(n);
    return out;
}

namespace {

SpectralTrace convert_to_power(const SpectralTrace& in, const AnalysisDevice& device,
                               const AnalyzeOptions& opts) {
    SpectralTrace out;
    out.frequencies_hz = in.frequencies_hz;
    out.kind = ValueKind::bolometer_power;
    out.values.resize(in.values.size());
    for (std::size_t i = 0; i < in.values.size(); ++i) {
        double t_b;
        if (in.kind == ValueKind::bolometer_temperature) {
            t_b = in.values[i];
        } else if (opts.conversion == ConversionMode::nis_model) {
            t_b = electron_temperature_from_voltage(in.values[i], device.thermometer);
        } else {
            if (!opts.calibration)
                throw std::invalid_argument(
                    "analyze_power_sweep: linear calibration mode needs a CalibrationFit");
            t_b = temperature_from_voltage(in.values[i], *opts.calibration);
        }
        out.values[i] =
            electron_phonon_power({t_b, device.t_phonon_K}, device.body);
    }
    return out;
}

} // namespace

SweepReport analyze_power_sweep(std::span<const std::pair<double, SpectralTrace>> traces,
                                const AnalysisDevice& device, const AnalyzeOptions& options) {
    if (traces.empty())
        throw std::invalid_argument("analyze_power_sweep: no traces");
    SweepReport report;
    const QualityFactors geometry = quality_factors(device.assembly);

    for (const auto& [p_in, trace] : traces) {
        TraceAnalysis ta;
        ta.p_in_watt = p_in;
        try {
            if (trace.kind == ValueKind::thermometer_voltage)
                ta.voltage_fit = fit_lorentzian(trace);
            const SpectralTrace power =
                trace.kind == ValueKind::bolometer_power
                    ? trace
                    : convert_to_power(trace, device, options);
            ta.power_fit = fit_lorentzian(power);
            ta.q_total = ta.power_fit.center_f0_hz / ta.power_fit.linewidth_hz;
            ta.qi = internal_q_from_linewidth(
                ta.power_fit.linewidth_hz, ta.power_fit.sigma_linewidth_hz,
                ta.power_fit.center_f0_hz, device.assembly,
                options.coupling_fraction_uncertainty);
            const double peak_power = ta.power_fit.baseline + ta.power_fit.peak_amplitude;
            ta.peak_temperature_K =
                temperature_from_power(peak_power, device.t_phonon_K, device.body);
            ta.photons = photon_number(peak_power, geometry.q_bolometer,
                                       ta.power_fit.center_f0_hz, ta.peak_temperature_K);
            if (ta.voltage_fit)
                ta.gamma_voltage_vs_power =
                    ta.voltage_fit->linewidth_hz / ta.power_fit.linewidth_hz - 1.0;
            ta.ok = true;
        } catch (const std::exception& e) {
            ta.ok = false;
            ta.error = e.what();
        }
        report.traces.push_back(std::move(ta));
    }

    std::vector<QiPoint> pts;
    std::vector<double> centers;
    for (const auto& ta : report.traces)
        if (ta.ok) {
            pts.push_back({ta.p_in_watt, ta.qi.q_internal, ta.qi.sigma_q_total});
            centers.push_back(ta.power_fit.center_f0_hz);
        }
    if (pts.size() < 7) {
        report.loss_fit_notice = "loss-model fit skipped: fewer than 7 usable traces";
        return report;
    }
    try {
        report.loss_fit = fit_loss_model(pts, median(centers), device.t_phonon_K);
    } catch (const std::exception& e) {
        report.loss_fit_notice = e.what();
    }
    return report;
}

} // namespace thermspec
