#include "thermspec/levmar.hpp"

#include <cmath>
#include <limits>

namespace thermspec {

LevMarResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd p0,
                                 const LevMarOptions& opt) {
    const int np = static_cast<int>(p0.size());
    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    fn(p0, r, &jac);
    double cost = 0.5 * r.squaredNorm();

    LevMarResult res;
    res.params = p0;
    res.cost = cost;

    double lambda = opt.lambda0;
    Eigen::VectorXd p = p0, r_try;
    for (int it = 0; it < opt.max_iterations; ++it) {
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * r;
        res.gradient_norm = g.lpNorm<Eigen::Infinity>();
        if (res.gradient_norm < opt.gtol) {
            res.converged = true;
            break;
        }

        // Scale the damping with the diagonal so parameter units drop out.
        Eigen::MatrixXd a = jtj;
        for (int k = 0; k < np; ++k) {
            const double d = jtj(k, k);
            a(k, k) += lambda * (d > 0.0 ? d : 1.0);
        }
        const Eigen::VectorXd step = a.ldlt().solve(-g);
        if (!step.allFinite()) {
            lambda *= 10.0;
            if (lambda > 1e14) break;
            continue;
        }

        const Eigen::VectorXd p_try = p + step;
        fn(p_try, r_try, nullptr);
        const double cost_try = 0.5 * r_try.squaredNorm();
        if (cost_try < cost) {
            const double rel_step = step.norm() / std::max(p.norm(), 1e-300);
            const double rel_decrease = (cost - cost_try) / std::max(cost, 1e-300);
            p = p_try;
            fn(p, r, &jac);
            cost = 0.5 * r.squaredNorm();
            lambda = std::max(lambda / 3.0, 1e-14);
            res.iterations = it + 1;
            if (rel_decrease < opt.ftol || rel_step < opt.xtol) {
                res.converged = true;
                break;
            }
        } else {
            lambda *= 4.0;
            if (lambda > 1e14) break; // stuck; report best point
        }
    }

    res.params = p;
    res.cost = cost;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
    res.covariance = lu.isInvertible()
                         ? lu.inverse()
                         : Eigen::MatrixXd::Constant(np, np,
                                                     std::numeric_limits<double>::quiet_NaN());
    return res;
}

} // namespace thermspec
