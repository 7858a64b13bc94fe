#pragma once

#include <span>

#include <Eigen/Dense>

namespace thermspec {

/// One thermal loss channel: rate omega0/quality_factor, occupation set by
/// the bath temperature at the resonator frequency.
struct BathSpec {
    double quality_factor = 0.0;
    double temperature_K = 0.0;
};

/// Sinusoidal drive lambda(t) = Lambda sin(Omega t) acting through the
/// resonator coupling; in the rotating frame this becomes a static term
/// (Lambda/2)(a + a^dag) at detuning Omega - omega0.
struct DriveSpec {
    double amplitude_J = 0.0;  // Lambda
    double frequency_hz = 0.0; // Omega / 2 pi
};

struct TruncatedDensityMatrix {
    Eigen::MatrixXcd rho;              // Fock basis, dimension n_max + 1
    bool converged = false;            // top population below threshold
    double top_population = 0.0;       // rho(n_max, n_max)
    double stationarity_residual = 0.0; // |L rho| / max generator rate
    int dimension() const { return static_cast<int>(rho.rows()); }
};

/// Physicality checks: Hermitian and unit trace within 1e-10, diagonal
/// entries above -1e-12.
bool is_physical_state(const TruncatedDensityMatrix& state);

/// Stationary solution of the rotating-frame master equation on a truncated
/// Fock space (sparse direct solve with a trace constraint). If the top
/// population exceeds 1e-6 the cutoff is doubled, up to 160.
TruncatedDensityMatrix steady_state(double f0_hz, const DriveSpec& drive,
                                    std::span<const BathSpec> baths, int n_max = 40);

/// Independent route to the same state: fixed-step RK4 integration of the
/// master equation from vacuum until the time derivative is negligible.
TruncatedDensityMatrix steady_state_time_evolved(double f0_hz, const DriveSpec& drive,
                                                 std::span<const BathSpec> baths,
                                                 int n_max = 40,
                                                 double residual_tol = 1e-9);

/// Power flowing into one bath, evaluated as the explicit ladder sum
/// (hbar w0^2 / Q) sum_r (r+1) [(1+n) rho_{r+1,r+1} - n rho_{r,r}].
double bath_power_from_state(const TruncatedDensityMatrix& state, const BathSpec& bath,
                             double f0_hz);

/// Power delivered by the drive in steady state, -w0 Lambda Im<a>.
double drive_power_from_state(const TruncatedDensityMatrix& state, const DriveSpec& drive,
                              double f0_hz);

/// Closed form for the steady-state power into a bath:
/// (Lambda^2/hbar) (Q_t^2/Q_i) / (1 + (2 Q_t)^2 (Omega/w0 - 1)^2).
double steady_power_analytic(const DriveSpec& drive, double f0_hz, double q_total,
                             double q_bath);

/// Lambda = sqrt(2 hbar P_in / Q_f): the drive amplitude under which the
/// analytic bath power reproduces the circuit-theory Lorentzian for the
/// same input power. The mapping is frequency independent; f0 is accepted
/// for interface symmetry with the other conversions.
double drive_amplitude_from_input_power(double p_in_watt, double q_feedline, double f0_hz);

double mean_photon_number(const TruncatedDensityMatrix& state);

} // namespace thermspec
