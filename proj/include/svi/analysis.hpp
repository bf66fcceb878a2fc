#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>

#include "svi/integrators.hpp"

namespace svi {

/// No error in the study exceeded the solver-tolerance floor, so a slope
/// cannot be fit. Enlarge the steps or reduce the stage count.
struct order_unresolvable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Step-size refinement study against a reference solution.
struct convergence_study {
    vec h_values;         ///< strictly decreasing
    vec errors;           ///< final-state infinity-norm errors
    double slope = 0.0;   ///< least-squares slope of log(error) vs log(h)
    vec pairwise_orders;  ///< log(e_k/e_{k+1}) / log(h_k/h_{k+1})
    std::size_t points_used = 0;  ///< errors above the floor that entered the fit
};

struct symplecticity_report {
    double defect = 0.0;  ///< max-norm of M^T J M - J
    double fd_step = 0.0;
    double h = 0.0;
};

struct drift_stats {
    double max_deviation = 0.0;  ///< max_k |H_k - H_0|
    double drift_slope = 0.0;    ///< least-squares slope of H_k vs t_k
};

namespace detail {

inline double least_squares_slope(const vec& x, const vec& y) {
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

/// High-accuracy state at time T: the system's exact flow when it has
/// one, otherwise a 3-stage Gauss-Legendre pRK run at h = T / 2^14.
inline phase_state reference_state(const lagrangian_system& sys, const phase_state& initial,
                                   double T, const solver_config& cfg = {}) {
    if (!(T > 0.0)) throw std::invalid_argument("reference time must be positive");
    if (sys.exact_flow) return sys.exact_flow(initial, T);
    const std::size_t steps = std::size_t(1) << 14;
    const method m = make_method(scheme::sprk, quadrature_kind::gauss_legendre, 3, T / steps);
    trajectory traj = integrate(sys, m, initial, steps, cfg);
    if (!traj.completed())
        throw std::runtime_error("reference integration failed at step " +
                                 std::to_string(*traj.failed_step) + ": " + traj.failure_reason);
    return traj.states.back();
}

/// Final-state error against the reference for each step size, plus the
/// fitted order. Errors at or below 1000x the solver tolerance are
/// treated as floored and excluded from the fit; fewer than two live
/// points raises order_unresolvable.
inline convergence_study convergence_order(const lagrangian_system& sys, scheme family,
                                           quadrature_kind kind, std::size_t s,
                                           const phase_state& initial, double T,
                                           const vec& h_values, const solver_config& cfg = {}) {
    if (h_values.size() < 3) throw std::invalid_argument("need at least 3 step sizes");
    const phase_state ref = reference_state(sys, initial, T, cfg);

    convergence_study study;
    study.h_values = h_values;
    study.errors.resize(h_values.size());
    for (std::size_t k = 0; k < h_values.size(); ++k) {
        const double h = h_values[k];
        const auto steps = std::size_t(std::llround(T / h));
        if (std::abs(steps * h - T) > 1e-9 * T)
            throw std::invalid_argument("T/h must be integral for every h");
        const method m = make_method(family, kind, s, h);
        trajectory traj = integrate(sys, m, initial, steps, cfg);
        if (!traj.completed())
            throw std::runtime_error("study run failed at step " +
                                     std::to_string(*traj.failed_step) + ": " +
                                     traj.failure_reason);
        const phase_state& fin = traj.states.back();
        double err = 0.0;
        for (std::size_t d = 0; d < sys.n; ++d) {
            err = std::max(err, std::abs(fin.q[d] - ref.q[d]));
            err = std::max(err, std::abs(fin.p[d] - ref.p[d]));
        }
        study.errors[k] = err;
    }

    for (std::size_t k = 0; k + 1 < h_values.size(); ++k)
        study.pairwise_orders.push_back(std::log(study.errors[k] / study.errors[k + 1]) /
                                        std::log(h_values[k] / h_values[k + 1]));

    const double floor = 1e3 * cfg.tol;
    vec lh, le;
    for (std::size_t k = 0; k < h_values.size(); ++k) {
        if (study.errors[k] > floor) {
            lh.push_back(std::log(h_values[k]));
            le.push_back(std::log(study.errors[k]));
        }
    }
    study.points_used = lh.size();
    if (lh.size() < 2)
        throw order_unresolvable("all errors at the solver-tolerance floor; enlarge h or reduce s");
    study.slope = detail::least_squares_slope(lh, le);
    return study;
}

/// Measures how far the one-step map is from preserving the canonical
/// symplectic form: builds the step-map Jacobian M by central
/// differences and returns the max norm of M^T J M - J. The stage
/// solves run at a tightened tolerance of 1e-13 so the differencing
/// noise dominates, not the solver.
inline symplecticity_report symplecticity_defect(const lagrangian_system& sys, const method& m,
                                                 const phase_state& state,
                                                 double fd_step = 1e-5) {
    const std::size_t n = sys.n, dim = 2 * n;
    solver_config cfg;
    cfg.tol = 1e-13;

    auto step_flat = [&](const vec& z) {
        const phase_state in{vec(z.begin(), z.begin() + n), vec(z.begin() + n, z.end())};
        const step_result res = step(in, m, sys, cfg);
        vec out(dim);
        for (std::size_t d = 0; d < n; ++d) {
            out[d] = res.state.q[d];
            out[n + d] = res.state.p[d];
        }
        return out;
    };

    vec z0(dim);
    for (std::size_t d = 0; d < n; ++d) {
        z0[d] = state.q[d];
        z0[n + d] = state.p[d];
    }

    mat jac(dim, dim);
    for (std::size_t col = 0; col < dim; ++col) {
        vec zp = z0, zm = z0;
        zp[col] += fd_step;
        zm[col] -= fd_step;
        const vec fp = step_flat(zp), fm = step_flat(zm);
        for (std::size_t row = 0; row < dim; ++row)
            jac(row, col) = (fp[row] - fm[row]) / (2.0 * fd_step);
    }

    // M^T J M - J with J = [[0, I], [-I, 0]].
    mat jm(dim, dim);  // J * M: top rows become M's bottom rows, bottom become -top
    for (std::size_t jcol = 0; jcol < dim; ++jcol)
        for (std::size_t d = 0; d < n; ++d) {
            jm(d, jcol) = jac(n + d, jcol);
            jm(n + d, jcol) = -jac(d, jcol);
        }
    mat defect(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < dim; ++k) acc += jac(k, i) * jm(k, j);
            defect(i, j) = acc;
        }
    for (std::size_t d = 0; d < n; ++d) {
        defect(d, n + d) -= 1.0;
        defect(n + d, d) += 1.0;
    }
    return {inf_norm(defect), fd_step, m.h};
}

/// Maximum energy deviation from the start plus the least-squares drift
/// slope of energy versus time.
inline drift_stats energy_drift(const trajectory& traj) {
    if (traj.energies.empty()) throw std::invalid_argument("trajectory has no recorded energies");
    drift_stats out;
    const double h0 = traj.energies.front();
    for (double e : traj.energies) out.max_deviation = std::max(out.max_deviation, std::abs(e - h0));
    out.drift_slope = detail::least_squares_slope(traj.times, traj.energies);
    return out;
}

/// Evaluates a scalar invariant along the trajectory.
inline vec invariant_history(const trajectory& traj,
                             const std::function<double(const vec&, const vec&)>& invariant) {
    vec out;
    out.reserve(traj.states.size());
    for (const phase_state& z : traj.states) out.push_back(invariant(z.q, z.p));
    return out;
}

/// Planar angular momentum q1 p2 - q2 p1, the conserved quantity of the
/// Kepler benchmark.
inline double angular_momentum(const vec& q, const vec& p) {
    return q[0] * p[1] - q[1] * p[0];
}

}  // namespace svi
