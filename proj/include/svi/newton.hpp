#pragma once

#include <cstdio>
#include <utility>

#include "svi/linalg.hpp"

namespace svi {

struct solver_config {
    double tol = 1e-12;       ///< residual infinity-norm tolerance
    int max_iter = 50;        ///< maximum Newton updates
    double fd_step = 1e-7;    ///< forward-difference step for the Jacobian
    int max_backtracks = 20;  ///< step halvings before giving up
};

struct solve_report {
    int iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
    vec residual_history;  ///< infinity norm after each update, starting at x0
};

namespace detail {
inline std::string residual_string(double r) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", r);
    return buf;
}
}  // namespace detail

/// Thrown when the damped iteration exhausts max_iter or backtracking stalls.
struct non_convergence : std::runtime_error {
    solve_report report;
    explicit non_convergence(solve_report r)
        : std::runtime_error("Newton iteration did not converge: residual " +
                             detail::residual_string(r.final_residual) + " after " +
                             std::to_string(r.iterations) + " iterations"),
          report(std::move(r)) {}
};

template <class F>
struct solve_result {
    vec x;
    solve_report report;
};

/// Forward-difference Jacobian of f at x, column by column. f0 = f(x).
template <class F>
mat fd_jacobian(F&& f, const vec& x, const vec& f0, double step) {
    const std::size_t m = x.size();
    mat jac(f0.size(), m);
    vec xp = x;
    for (std::size_t j = 0; j < m; ++j) {
        xp[j] = x[j] + step;
        const vec fj = f(xp);
        xp[j] = x[j];
        for (std::size_t i = 0; i < fj.size(); ++i) jac(i, j) = (fj[i] - f0[i]) / step;
    }
    return jac;
}

/// Damped Newton iteration on F : R^m -> R^m with a caller-supplied
/// Jacobian callback jac(x, f_at_x). Converges when the residual
/// infinity norm drops to cfg.tol. The step is halved (up to
/// cfg.max_backtracks times) until the residual norm decreases.
template <class F, class J>
std::pair<vec, solve_report> solve_with_jacobian(F&& f, J&& jac, vec x,
                                                 const solver_config& cfg = {}) {
    vec fx = f(x);
    double res = inf_norm(fx);
    solve_report rep;
    rep.residual_history.push_back(res);

    for (int iter = 0;; ++iter) {
        rep.iterations = iter;
        rep.final_residual = res;
        if (res <= cfg.tol) {
            rep.converged = true;
            return {std::move(x), std::move(rep)};
        }
        if (iter >= cfg.max_iter) throw non_convergence(std::move(rep));

        const mat j = jac(x, fx);
        vec rhs = fx;
        for (double& v : rhs) v = -v;
        const vec step = lu_solve(j, std::move(rhs));

        double lambda = 1.0;
        bool accepted = false;
        for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
            vec xt = x;
            for (std::size_t i = 0; i < xt.size(); ++i) xt[i] += lambda * step[i];
            vec ft = f(xt);
            const double rt = inf_norm(ft);
            if (rt < res) {
                x = std::move(xt);
                fx = std::move(ft);
                res = rt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            rep.iterations = iter;
            rep.final_residual = res;
            throw non_convergence(std::move(rep));
        }
        rep.residual_history.push_back(res);
    }
}

/// Damped Newton iteration with the Jacobian assembled by forward
/// differences (step cfg.fd_step).
template <class F>
std::pair<vec, solve_report> solve(F&& f, vec x0, const solver_config& cfg = {}) {
    auto jac = [&f, &cfg](const vec& x, const vec& fx) {
        return fd_jacobian(f, x, fx, cfg.fd_step);
    };
    return solve_with_jacobian(std::forward<F>(f), jac, std::move(x0), cfg);
}

}  // namespace svi
