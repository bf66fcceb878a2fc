#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>

#include "svi/collocation.hpp"
#include "svi/mechanics.hpp"
#include "svi/newton.hpp"

namespace svi {

/// The two integrator families: stages parameterized by micro-velocities
/// (partitioned Runge-Kutta) or by micro-nodes (Galerkin).
enum class scheme { sprk, sg };

inline std::string_view to_string(scheme f) { return f == scheme::sprk ? "sprk" : "sg"; }

inline scheme scheme_from_string(std::string_view name) {
    if (name == "sprk") return scheme::sprk;
    if (name == "sg") return scheme::sg;
    throw std::invalid_argument("unknown method: " + std::string(name));
}

/// A step map: family, coefficient tables and step size. The step size
/// must be nonzero; reversibility checks step with h < 0, forward
/// integration always uses h > 0.
struct method {
    scheme family = scheme::sprk;
    tableau tab;
    double h = 0.0;
};

inline method make_method(scheme family, quadrature_kind kind, std::size_t s, double h) {
    if (family == scheme::sg && s < 2)
        throw stage_count_too_small("Galerkin stepping needs at least 2 stages");
    if (!(h != 0.0) || !std::isfinite(h)) throw std::invalid_argument("step size must be nonzero");
    return method{family, make_tableau(kind, s), h};
}

/// Per-step internal stage data, one row per stage.
struct stage_set {
    mat Q;     ///< micro-nodes
    mat Qdot;  ///< micro-velocities
    mat P;     ///< stage momenta dL/dv at each stage
    mat Pdot;  ///< stage momentum rates dL/dq (+ force) at each stage
};

struct step_result {
    phase_state state;
    stage_set stages;
    solve_report report;
};

namespace detail {

inline vec stage_row(const mat& m, std::size_t i) {
    vec r(m.cols());
    for (std::size_t d = 0; d < m.cols(); ++d) r[d] = m(i, d);
    return r;
}

inline void set_stage_row(mat& m, std::size_t i, const vec& r) {
    for (std::size_t d = 0; d < m.cols(); ++d) m(i, d) = r[d];
}

/// Stage momentum rates dL/dq|_i plus force, for all stages.
inline mat momentum_rates(const lagrangian_system& sys, const mat& Q, const mat& Qdot) {
    const std::size_t s = Q.rows(), n = Q.cols();
    mat pdot(s, n);
    for (std::size_t i = 0; i < s; ++i) {
        const vec qi = stage_row(Q, i), vi = stage_row(Qdot, i);
        vec r = sys.dLdq(qi, vi);
        if (sys.force) r = r + sys.force(qi, vi);
        set_stage_row(pdot, i, r);
    }
    return pdot;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Partitioned Runge-Kutta stepping. Unknowns: the micro-velocities,
// flattened stage-major.

/// Builds the stage data implied by a micro-velocity vector:
/// Q_i = q0 + h sum_j a_ij Qdot_j, P_i = dL/dv|_i, Pdot_i = dL/dq|_i + f|_i.
inline stage_set sprk_stages(const vec& qdot_flat, const vec& q0, const method& m,
                             const lagrangian_system& sys) {
    const std::size_t s = m.tab.s, n = sys.n;
    stage_set st{mat(s, n), mat(s, n), mat(s, n), mat(s, n)};
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t d = 0; d < n; ++d) st.Qdot(i, d) = qdot_flat[i * n + d];
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t d = 0; d < n; ++d) {
            double acc = q0[d];
            for (std::size_t j = 0; j < s; ++j) acc += m.h * m.tab.a(i, j) * st.Qdot(j, d);
            st.Q(i, d) = acc;
        }
    for (std::size_t i = 0; i < s; ++i)
        detail::set_stage_row(st.P, i,
                              sys.dLdv(detail::stage_row(st.Q, i), detail::stage_row(st.Qdot, i)));
    st.Pdot = detail::momentum_rates(sys, st.Q, st.Qdot);
    return st;
}

/// Residual of the implicit stage system: block i is
/// dL/dv(Q_i, Qdot_i) - p0 - h sum_j abar_ij Pdot_j. A root makes the
/// stage momenta satisfy P_i = p0 + h sum_j abar_ij Pdot_j.
inline vec sprk_residual(const vec& qdot_flat, const vec& q0, const vec& p0, const method& m,
                         const lagrangian_system& sys) {
    const std::size_t s = m.tab.s, n = sys.n;
    const stage_set st = sprk_stages(qdot_flat, q0, m, sys);
    vec r(s * n);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t d = 0; d < n; ++d) {
            double acc = st.P(i, d) - p0[d];
            for (std::size_t j = 0; j < s; ++j) acc -= m.h * m.tab.abar(i, j) * st.Pdot(j, d);
            r[i * n + d] = acc;
        }
    return r;
}

/// One partitioned Runge-Kutta step (q0, p0) -> (q1, p1). The stage
/// system is solved for the micro-velocities starting from the
/// constant-velocity guess Qdot_i = velocityFromMomentum(q0, p0); then
/// q1 = q0 + h sum b_j Qdot_j and p1 = p0 + h sum bbar_j Pdot_j.
inline step_result sprk_step(const vec& q0, const vec& p0, const method& m,
                             const lagrangian_system& sys, const solver_config& cfg = {}) {
    const std::size_t s = m.tab.s, n = sys.n;
    const vec v0 = velocity_from_momentum(sys, q0, p0, cfg);
    vec guess(s * n);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t d = 0; d < n; ++d) guess[i * n + d] = v0[d];

    auto residual = [&](const vec& u) { return sprk_residual(u, q0, p0, m, sys); };
    auto [u, rep] = solve(residual, std::move(guess), cfg);

    const stage_set st = sprk_stages(u, q0, m, sys);
    phase_state out{q0, p0};
    for (std::size_t d = 0; d < n; ++d)
        for (std::size_t j = 0; j < s; ++j) {
            out.q[d] += m.h * m.tab.b[j] * st.Qdot(j, d);
            out.p[d] += m.h * m.tab.bbar[j] * st.Pdot(j, d);
        }
    return {std::move(out), st, std::move(rep)};
}

// ---------------------------------------------------------------------------
// Galerkin stepping. Unknowns: the micro-nodes (stage-major) with the
// new momentum p1 as the trailing block.

namespace detail {

/// Stage data from micro-node offsets delta_j = Q_j - q0. Micro-nodes are
/// only O(1) doubles, so a root expressed in absolute Q is quantized to
/// eps |Q|, which the differentiation matrix amplifies by 1/h; the
/// offsets keep full resolution at the h v scale and the velocities come
/// out with noise O(eps |Qdot|). The Galerkin solver therefore works in
/// offset coordinates throughout.
inline stage_set sg_stages_from_offsets(const vec& offsets, const vec& q0, const method& m,
                                        const lagrangian_system& sys) {
    const std::size_t s = m.tab.s, n = sys.n;
    stage_set st{mat(s, n), mat(s, n), mat(s, n), mat(s, n)};
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t d = 0; d < n; ++d) st.Q(i, d) = q0[d] + offsets[i * n + d];
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t d = 0; d < n; ++d) {
            double acc = 0.0;  // rows of dmat sum to zero, so the shift drops out
            for (std::size_t j = 0; j < s; ++j)
                if (j != i) acc += m.tab.dmat(i, j) * (offsets[j * n + d] - offsets[i * n + d]);
            st.Qdot(i, d) = acc / m.h;
        }
    for (std::size_t i = 0; i < s; ++i)
        set_stage_row(st.P, i, sys.dLdv(stage_row(st.Q, i), stage_row(st.Qdot, i)));
    st.Pdot = momentum_rates(sys, st.Q, st.Qdot);
    return st;
}

/// Galerkin residual on (offsets, p1); see sg_residual for the blocks.
inline vec sg_residual_from_offsets(const vec& unknowns, const vec& q0, const vec& p0,
                                    const method& m, const lagrangian_system& sys) {
    const std::size_t s = m.tab.s, n = sys.n;
    const stage_set st = sg_stages_from_offsets(unknowns, q0, m, sys);
    const double* p1 = unknowns.data() + s * n;
    vec r(s * n + n);
    for (std::size_t j = 0; j < s; ++j)
        for (std::size_t d = 0; d < n; ++d) {
            double acc = m.h * m.tab.b[j] * st.Pdot(j, d);
            for (std::size_t i = 0; i < s; ++i) acc += m.tab.b[i] * m.tab.dmat(i, j) * st.P(i, d);
            acc += m.tab.alpha[j] * p0[d] - m.tab.beta[j] * p1[d];
            r[j * n + d] = acc;
        }
    // Source constraint sum_j alpha_j Q_j = q0; with sum_j alpha_j = 1 it
    // reduces to the offset combination.
    for (std::size_t d = 0; d < n; ++d) {
        double acc = 0.0;
        for (std::size_t j = 0; j < s; ++j) acc += m.tab.alpha[j] * unknowns[j * n + d];
        r[s * n + d] = acc;
    }
    return r;
}

}  // namespace detail

/// Builds the stage data implied by a micro-node vector:
/// Qdot_i = (1/h) sum_j dmat_ij Q_j and the momenta as above.
inline stage_set sg_stages(const vec& unknowns, const vec& q0, const method& m,
                           const lagrangian_system& sys) {
    const std::size_t s = m.tab.s, n = sys.n;
    vec offsets(s * n);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t d = 0; d < n; ++d) offsets[i * n + d] = unknowns[i * n + d] - q0[d];
    return detail::sg_stages_from_offsets(offsets, q0, m, sys);
}

/// Residual of the Galerkin system in the unknowns (Q_1..Q_s, p1).
/// Block j is h b_j Pdot_j + sum_i b_i dmat_ij P_i + alpha_j p0 - beta_j p1
/// (the variational equations); the trailing block pins the source point,
/// sum_j alpha_j Q_j - q0.
inline vec sg_residual(const vec& unknowns, const vec& q0, const vec& p0, const method& m,
                       const lagrangian_system& sys) {
    const std::size_t s = m.tab.s, n = sys.n;
    vec w = unknowns;
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t d = 0; d < n; ++d) w[i * n + d] -= q0[d];
    return detail::sg_residual_from_offsets(w, q0, p0, m, sys);
}

/// One Galerkin step (q0, p0) -> (q1, p1). Initial guess: micro-nodes on
/// the constant-velocity line Q_j = q0 + h c_j v0 and p1 = p0. The new
/// configuration is the target combination q1 = sum_j beta_j Q_j.
inline step_result sg_step(const vec& q0, const vec& p0, const method& m,
                           const lagrangian_system& sys, const solver_config& cfg = {}) {
    const std::size_t s = m.tab.s, n = sys.n;
    if (s < 2) throw stage_count_too_small("Galerkin stepping needs at least 2 stages");
    const vec v0 = velocity_from_momentum(sys, q0, p0, cfg);
    vec guess(s * n + n);
    for (std::size_t j = 0; j < s; ++j)
        for (std::size_t d = 0; d < n; ++d) guess[j * n + d] = m.h * m.tab.c[j] * v0[d];
    for (std::size_t d = 0; d < n; ++d) guess[s * n + d] = p0[d];

    auto residual = [&](const vec& u) {
        return detail::sg_residual_from_offsets(u, q0, p0, m, sys);
    };
    auto [u, rep] = solve(residual, std::move(guess), cfg);

    const stage_set st = detail::sg_stages_from_offsets(u, q0, m, sys);
    // q1 = sum_j beta_j Q_j, accumulated as q0 plus the offset combination
    // (sum_j beta_j = 1) so the target keeps full precision.
    phase_state out{q0, vec(u.begin() + s * n, u.end())};
    for (std::size_t d = 0; d < n; ++d)
        for (std::size_t j = 0; j < s; ++j) out.q[d] += m.tab.beta[j] * u[j * n + d];
    return {std::move(out), st, std::move(rep)};
}

/// Dispatch on the method family.
inline step_result step(const phase_state& z, const method& m, const lagrangian_system& sys,
                        const solver_config& cfg = {}) {
    return m.family == scheme::sprk ? sprk_step(z.q, z.p, m, sys, cfg)
                                    : sg_step(z.q, z.p, m, sys, cfg);
}

// ---------------------------------------------------------------------------
// Trajectory driver.

struct trajectory {
    vec times;
    std::vector<phase_state> states;
    std::vector<solve_report> reports;  ///< one per completed step
    vec energies;                       ///< H(q_k, v_k) along the trajectory

    /// Set when a step failed; the trajectory holds everything up to it.
    std::optional<std::size_t> failed_step;
    std::string failure_reason;

    bool completed() const { return !failed_step.has_value(); }
};

/// Applies the step map `steps` times from `initial`, recording states,
/// solver statistics and energies. On solver failure the partial
/// trajectory is returned with the failing step recorded.
inline trajectory integrate(const lagrangian_system& sys, const method& m,
                            const phase_state& initial, std::size_t steps,
                            const solver_config& cfg = {}) {
    if (!(m.h > 0.0)) throw std::invalid_argument("trajectories require h > 0");
    trajectory traj;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.energies.reserve(steps + 1);

    auto record = [&](std::size_t k, const phase_state& z) {
        traj.times.push_back(k * m.h);
        traj.states.push_back(z);
        traj.energies.push_back(energy(sys, z.q, velocity_from_momentum(sys, z.q, z.p, cfg)));
    };

    record(0, initial);
    phase_state z = initial;
    for (std::size_t k = 0; k < steps; ++k) {
        try {
            step_result res = step(z, m, sys, cfg);
            z = std::move(res.state);
            traj.reports.push_back(std::move(res.report));
        } catch (const std::exception& e) {
            traj.failed_step = k;
            traj.failure_reason = e.what();
            return traj;
        }
        record(k + 1, z);
    }
    return traj;
}

}  // namespace svi
