#include "thermspec/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "thermspec/errors.hpp"
#include "thermspec/units.hpp"

namespace thermspec {

namespace {

using cd = std::complex<double>;
using SparseCd = Eigen::SparseMatrix<cd>;
using Triplet = Eigen::Triplet<cd>;

constexpr double kTopPopulationThreshold = 1e-6;
constexpr int kMaxCutoff = 160;

struct Channel {
    Eigen::MatrixXcd op; // collapse operator
    double rate;         // dimensionless after scaling
};

struct Generator {
    Eigen::MatrixXcd hamiltonian; // units of the rate scale
    std::vector<Channel> channels;
    double rate_scale; // rad/s folded out of the generator
};

void check_inputs(double f0_hz, const DriveSpec& drive, std::span<const BathSpec> baths,
                  int n_max) {
    if (!(f0_hz > 0.0))
        throw std::invalid_argument("steady_state: resonator frequency must be positive");
    if (drive.amplitude_J < 0.0 || !(drive.frequency_hz > 0.0))
        throw std::invalid_argument("steady_state: drive amplitude must be >= 0 and "
                                    "frequency positive");
    if (baths.empty())
        throw std::invalid_argument("steady_state: at least one bath is required");
    for (const auto& b : baths)
        if (!(b.quality_factor > 0.0) || b.temperature_K < 0.0)
            throw std::invalid_argument("steady_state: bath Q must be positive and "
                                        "temperature non-negative");
    if (n_max < 2)
        throw std::invalid_argument("steady_state: n_max must be at least 2");
}

Eigen::MatrixXcd lowering_operator(int dim) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Generator build_generator(double f0_hz, const DriveSpec& drive,
                          std::span<const BathSpec> baths, int dim) {
    const double w0 = 2.0 * std::numbers::pi * f0_hz;
    const double delta = 2.0 * std::numbers::pi * (drive.frequency_hz - f0_hz);
    const double eps = drive.amplitude_J / (2.0 * constants.reduced_planck_J_s);

    double scale = std::max({std::fabs(delta), eps, 1.0});
    for (const auto& b : baths) {
        const double gamma = w0 / b.quality_factor;
        const double n_occ = bose_einstein(f0_hz, b.temperature_K);
        scale = std::max(scale, gamma * (1.0 + 2.0 * n_occ));
    }

    Generator g;
    g.rate_scale = scale;
    const Eigen::MatrixXcd a = lowering_operator(dim);
    const Eigen::MatrixXcd ad = a.adjoint();
    g.hamiltonian = (-delta / scale) * (ad * a) + (eps / scale) * (a + ad);
    for (const auto& b : baths) {
        const double gamma = w0 / b.quality_factor;
        const double n_occ = bose_einstein(f0_hz, b.temperature_K);
        g.channels.push_back({a, gamma * (1.0 + n_occ) / scale});
        if (n_occ > 0.0) g.channels.push_back({ad, gamma * n_occ / scale});
    }
    return g;
}

struct Nonzero {
    int row, col;
    cd value;
};

std::vector<Nonzero> nonzeros(const Eigen::MatrixXcd& m) {
    std::vector<Nonzero> nz;
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i)
            if (m(i, j) != cd{0.0, 0.0}) nz.push_back({i, j, m(i, j)});
    return nz;
}

// Column-major vectorization: rho(i,j) lives at index i + dim*j.
void add_left(std::vector<Triplet>& t, const Eigen::MatrixXcd& m, cd w, int dim) {
    for (const auto& e : nonzeros(m))
        for (int n = 0; n < dim; ++n)
            t.emplace_back(e.row + dim * n, e.col + dim * n, w * e.value);
}

void add_right(std::vector<Triplet>& t, const Eigen::MatrixXcd& m, cd w, int dim) {
    for (const auto& e : nonzeros(m)) // contributes m(p,n) to column block p, row block n
        for (int r = 0; r < dim; ++r)
            t.emplace_back(r + dim * e.col, r + dim * e.row, w * e.value);
}

void add_sandwich(std::vector<Triplet>& t, const Eigen::MatrixXcd& left,
                  const Eigen::MatrixXcd& right, double w, int dim) {
    const auto lnz = nonzeros(left);
    const auto rnz = nonzeros(right);
    for (const auto& l : lnz)
        for (const auto& r : rnz)
            t.emplace_back(l.row + dim * r.col, l.col + dim * r.row, w * l.value * r.value);
}

SparseCd assemble_superoperator(const Generator& g, int dim) {
    std::vector<Triplet> trip;
    const cd mi{0.0, -1.0};
    add_left(trip, g.hamiltonian, mi, dim);
    add_right(trip, g.hamiltonian, -mi, dim);
    for (const auto& ch : g.channels) {
        const Eigen::MatrixXcd cdag = ch.op.adjoint();
        const Eigen::MatrixXcd cdc = cdag * ch.op;
        add_sandwich(trip, ch.op, cdag, ch.rate, dim);
        add_left(trip, cdc, cd{-0.5 * ch.rate, 0.0}, dim);
        add_right(trip, cdc, cd{-0.5 * ch.rate, 0.0}, dim);
    }
    SparseCd l(dim * dim, dim * dim);
    l.setFromTriplets(trip.begin(), trip.end());
    return l;
}

// Dense application of the (scaled) generator; used by the RK4 route and
// for residual reporting.
Eigen::MatrixXcd apply_generator(const Generator& g, const Eigen::MatrixXcd& rho) {
    const cd i{0.0, 1.0};
    Eigen::MatrixXcd out = -i * (g.hamiltonian * rho - rho * g.hamiltonian);
    for (const auto& ch : g.channels) {
        const Eigen::MatrixXcd cdag = ch.op.adjoint();
        const Eigen::MatrixXcd cdc = cdag * ch.op;
        out += ch.rate * (ch.op * rho * cdag - 0.5 * (cdc * rho + rho * cdc));
    }
    return out;
}

TruncatedDensityMatrix finalize(const Generator& g, Eigen::MatrixXcd rho) {
    rho = 0.5 * (rho + rho.adjoint().eval());
    rho /= rho.trace().real();
    TruncatedDensityMatrix state;
    state.top_population = std::real(rho(rho.rows() - 1, rho.cols() - 1));
    state.converged = state.top_population < kTopPopulationThreshold;
    state.stationarity_residual = apply_generator(g, rho).norm();
    state.rho = std::move(rho);
    return state;
}

TruncatedDensityMatrix solve_once(double f0_hz, const DriveSpec& drive,
                                  std::span<const BathSpec> baths, int n_max) {
    const int dim = n_max + 1;
    const Generator g = build_generator(f0_hz, drive, baths, dim);
    const SparseCd l = assemble_superoperator(g, dim);

    // Replace the rho(0,0) row with the trace constraint; the pure generator
    // is singular by construction (the steady state spans its null space).
    std::vector<Triplet> trip;
    trip.reserve(l.nonZeros() + dim);
    for (int k = 0; k < l.outerSize(); ++k)
        for (SparseCd::InnerIterator it(l, k); it; ++it)
            if (it.row() != 0) trip.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < dim; ++i) trip.emplace_back(0, i + dim * i, cd{1.0, 0.0});
    SparseCd m(dim * dim, dim * dim);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();

    Eigen::SparseLU<SparseCd> lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success)
        throw QuantumError("steady_state: sparse LU factorization failed "
                           "(singular or ill-conditioned stationary system)");
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(dim * dim);
    b(0) = cd{1.0, 0.0};
    const Eigen::VectorXcd x = lu.solve(b);
    if (lu.info() != Eigen::Success)
        throw QuantumError("steady_state: sparse LU solve failed");

    Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(x.data(), dim, dim);
    return finalize(g, std::move(rho));
}

} // namespace

bool is_physical_state(const TruncatedDensityMatrix& state) {
    const auto& rho = state.rho;
    if ((rho - rho.adjoint()).norm() > 1e-10) return false;
    if (std::fabs(rho.trace().real() - 1.0) > 1e-10 || std::fabs(rho.trace().imag()) > 1e-10)
        return false;
    for (int i = 0; i < rho.rows(); ++i)
        if (std::real(rho(i, i)) < -1e-12) return false;
    return true;
}

TruncatedDensityMatrix steady_state(double f0_hz, const DriveSpec& drive,
                                    std::span<const BathSpec> baths, int n_max) {
    check_inputs(f0_hz, drive, baths, n_max);
    int cutoff = n_max;
    TruncatedDensityMatrix state = solve_once(f0_hz, drive, baths, cutoff);
    while (!state.converged && cutoff < kMaxCutoff) {
        cutoff = std::min(2 * cutoff, kMaxCutoff);
        state = solve_once(f0_hz, drive, baths, cutoff);
    }
    return state;
}

TruncatedDensityMatrix steady_state_time_evolved(double f0_hz, const DriveSpec& drive,
                                                 std::span<const BathSpec> baths,
                                                 int n_max, double residual_tol) {
    check_inputs(f0_hz, drive, baths, n_max);
    const int dim = n_max + 1;
    const Generator g = build_generator(f0_hz, drive, baths, dim);

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    rho(0, 0) = cd{1.0, 0.0};
    const double dt = 0.02; // in units of 1/rate_scale
    const long max_steps = 4'000'000;
    for (long step = 0; step < max_steps; ++step) {
        const Eigen::MatrixXcd k1 = apply_generator(g, rho);
        if (step % 50 == 0 && k1.norm() < residual_tol) break;
        const Eigen::MatrixXcd k2 = apply_generator(g, rho + 0.5 * dt * k1);
        const Eigen::MatrixXcd k3 = apply_generator(g, rho + 0.5 * dt * k2);
        const Eigen::MatrixXcd k4 = apply_generator(g, rho + dt * k3);
        rho += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return finalize(g, std::move(rho));
}

double bath_power_from_state(const TruncatedDensityMatrix& state, const BathSpec& bath,
                             double f0_hz) {
    if (!(bath.quality_factor > 0.0) || !(f0_hz > 0.0))
        throw std::invalid_argument("bath_power_from_state: Q and f0 must be positive");
    const double w0 = 2.0 * std::numbers::pi * f0_hz;
    const double n_occ = bose_einstein(f0_hz, bath.temperature_K);
    const int dim = state.dimension();
    double sum = 0.0;
    for (int r = 0; r < dim; ++r) {
        const double up = (r + 1 < dim) ? std::real(state.rho(r + 1, r + 1)) : 0.0;
        sum += (r + 1) * ((1.0 + n_occ) * up - n_occ * std::real(state.rho(r, r)));
    }
    return constants.reduced_planck_J_s * w0 * w0 / bath.quality_factor * sum;
}

double drive_power_from_state(const TruncatedDensityMatrix& state, const DriveSpec& drive,
                              double f0_hz) {
    const double w0 = 2.0 * std::numbers::pi * f0_hz;
    cd a_expect{0.0, 0.0};
    for (int n = 0; n + 1 < state.dimension(); ++n)
        a_expect += std::sqrt(static_cast<double>(n + 1)) * state.rho(n + 1, n);
    return -w0 * drive.amplitude_J * a_expect.imag();
}

double steady_power_analytic(const DriveSpec& drive, double f0_hz, double q_total,
                             double q_bath) {
    if (!(f0_hz > 0.0) || !(q_total > 0.0) || !(q_bath > 0.0))
        throw std::invalid_argument("steady_power_analytic: inputs must be positive");
    const double detuning = drive.frequency_hz / f0_hz - 1.0;
    const double denom = 1.0 + 4.0 * q_total * q_total * detuning * detuning;
    return drive.amplitude_J * drive.amplitude_J / constants.reduced_planck_J_s *
           (q_total * q_total / q_bath) / denom;
}

double drive_amplitude_from_input_power(double p_in_watt, double q_feedline,
                                        [[maybe_unused]] double f0_hz) {
    if (p_in_watt < 0.0 || !(q_feedline > 0.0))
        throw std::invalid_argument(
            "drive_amplitude_from_input_power: power must be >= 0 and Q_f positive");
    return std::sqrt(2.0 * constants.reduced_planck_J_s * p_in_watt / q_feedline);
}

double mean_photon_number(const TruncatedDensityMatrix& state) {
    double n = 0.0;
    for (int i = 0; i < state.dimension(); ++i) n += i * std::real(state.rho(i, i));
    return n;
}

} // namespace thermspec
