#include "thermspec/units.hpp"

#include <cmath>
#include <stdexcept>

namespace thermspec {

double dbm_to_watts(double p_dbm) {
    if (!std::isfinite(p_dbm))
        throw std::domain_error("dbm_to_watts: power must be finite");
    return 1e-3 * std::pow(10.0, p_dbm / 10.0);
}

double watts_to_dbm(double p_watt) {
    if (!(p_watt > 0.0))
        throw std::domain_error("watts_to_dbm: power must be positive");
    return 10.0 * std::log10(p_watt / 1e-3);
}

double bose_einstein(double f_hz, double t_kelvin) {
    if (!(f_hz > 0.0))
        throw std::domain_error("bose_einstein: frequency must be positive");
    if (t_kelvin < 0.0)
        throw std::domain_error("bose_einstein: temperature must be non-negative");
    if (t_kelvin == 0.0) return 0.0;
    const double x = constants.planck_J_s * f_hz / (constants.boltzmann_J_per_K * t_kelvin);
    return 1.0 / std::expm1(x);
}

} // namespace thermspec
