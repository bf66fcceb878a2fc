#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "svi/linalg.hpp"
#include "svi/newton.hpp"

namespace svi {

/// A point (q, p) in phase space.
struct phase_state {
    vec q;
    vec p;
};

/// First-order description of a mechanical system on R^n. Only the
/// Lagrangian and its first partials are required; everything else is
/// optional and used for diagnostics or as a closed-form shortcut.
/// Systems are stateless evaluators and safe for concurrent use.
struct lagrangian_system {
    std::size_t n = 1;
    std::string name;

    std::function<double(const vec& q, const vec& v)> lagrangian;
    std::function<vec(const vec& q, const vec& v)> dLdq;
    std::function<vec(const vec& q, const vec& v)> dLdv;

    /// External force entering the stage momentum rates; null means none.
    std::function<vec(const vec& q, const vec& v)> force;

    /// Optional closed-form inverse Legendre transform (q, p) -> v.
    std::function<vec(const vec& q, const vec& p)> velocity_from_momentum;

    /// Optional exact Hamiltonian for cross-checks.
    std::function<double(const vec& q, const vec& v)> exact_energy;

    /// Optional exact flow map (state, t) -> state, used for reference
    /// trajectories when available.
    std::function<phase_state(const phase_state&, double)> exact_flow;
};

/// Legendre transform p = dL/dv(q, v).
inline vec legendre(const lagrangian_system& sys, const vec& q, const vec& v) {
    return sys.dLdv(q, v);
}

/// Inverse Legendre transform: the v with dL/dv(q, v) = p. Uses the
/// system's closed form when present, otherwise Newton from v = p.
inline vec velocity_from_momentum(const lagrangian_system& sys, const vec& q, const vec& p,
                                  const solver_config& cfg = {}) {
    if (sys.velocity_from_momentum) return sys.velocity_from_momentum(q, p);
    auto residual = [&](const vec& v) { return sys.dLdv(q, v) - p; };
    auto [v, rep] = solve(residual, p, cfg);
    return v;
}

/// Total energy H = dL/dv(q,v) . v - L(q,v).
inline double energy(const lagrangian_system& sys, const vec& q, const vec& v) {
    return dot(sys.dLdv(q, v), v) - sys.lagrangian(q, v);
}

// ---------------------------------------------------------------------------
// Built-in benchmark systems.

/// L = |v|^2 / 2. Any scheme in this library integrates it exactly.
inline lagrangian_system free_particle(std::size_t dim = 1) {
    lagrangian_system s;
    s.n = dim;
    s.name = "free-particle";
    s.lagrangian = [](const vec&, const vec& v) { return 0.5 * dot(v, v); };
    s.dLdq = [dim](const vec&, const vec&) { return vec(dim, 0.0); };
    s.dLdv = [](const vec&, const vec& v) { return v; };
    s.velocity_from_momentum = [](const vec&, const vec& p) { return p; };
    s.exact_energy = [](const vec&, const vec& v) { return 0.5 * dot(v, v); };
    s.exact_flow = [](const phase_state& z, double t) {
        phase_state out = z;
        for (std::size_t i = 0; i < z.q.size(); ++i) out.q[i] += t * z.p[i];
        return out;
    };
    return s;
}

/// L = m v^2 / 2 - k q^2 / 2 in one dimension.
inline lagrangian_system harmonic_oscillator(double m = 1.0, double k = 1.0) {
    lagrangian_system s;
    s.n = 1;
    s.name = "harmonic-oscillator";
    s.lagrangian = [m, k](const vec& q, const vec& v) {
        return 0.5 * m * v[0] * v[0] - 0.5 * k * q[0] * q[0];
    };
    s.dLdq = [k](const vec& q, const vec&) { return vec{-k * q[0]}; };
    s.dLdv = [m](const vec&, const vec& v) { return vec{m * v[0]}; };
    s.velocity_from_momentum = [m](const vec&, const vec& p) { return vec{p[0] / m}; };
    s.exact_energy = [m, k](const vec& q, const vec& v) {
        return 0.5 * m * v[0] * v[0] + 0.5 * k * q[0] * q[0];
    };
    if (m > 0.0 && k > 0.0) {
        const double omega = std::sqrt(k / m);
        s.exact_flow = [m, omega](const phase_state& z, double t) {
            const double cw = std::cos(omega * t), sw = std::sin(omega * t);
            const double q0 = z.q[0], p0 = z.p[0];
            return phase_state{{q0 * cw + p0 / (m * omega) * sw},
                               {-q0 * m * omega * sw + p0 * cw}};
        };
    }
    return s;
}

/// L = v^2 / 2 + cos q.
inline lagrangian_system pendulum() {
    lagrangian_system s;
    s.n = 1;
    s.name = "pendulum";
    s.lagrangian = [](const vec& q, const vec& v) { return 0.5 * v[0] * v[0] + std::cos(q[0]); };
    s.dLdq = [](const vec& q, const vec&) { return vec{-std::sin(q[0])}; };
    s.dLdv = [](const vec&, const vec& v) { return v; };
    s.exact_energy = [](const vec& q, const vec& v) {
        return 0.5 * v[0] * v[0] - std::cos(q[0]);
    };
    return s;
}

/// Planar Kepler problem, L = |v|^2 / 2 + 1 / |q|.
inline lagrangian_system kepler() {
    lagrangian_system s;
    s.n = 2;
    s.name = "kepler";
    auto radius = [](const vec& q) { return std::sqrt(q[0] * q[0] + q[1] * q[1]); };
    s.lagrangian = [radius](const vec& q, const vec& v) {
        return 0.5 * dot(v, v) + 1.0 / radius(q);
    };
    s.dLdq = [radius](const vec& q, const vec&) {
        const double r3 = std::pow(radius(q), 3);
        return vec{-q[0] / r3, -q[1] / r3};
    };
    s.dLdv = [](const vec&, const vec& v) { return v; };
    s.exact_energy = [radius](const vec& q, const vec& v) {
        return 0.5 * dot(v, v) - 1.0 / radius(q);
    };
    return s;
}

/// Harmonic oscillator with the linear damping force f(q, v) = -rho v.
inline lagrangian_system forced_oscillator(double m, double k, double rho) {
    lagrangian_system s = harmonic_oscillator(m, k);
    s.name = "forced-oscillator";
    s.force = [rho](const vec&, const vec& v) { return vec{-rho * v[0]}; };
    s.exact_flow = nullptr;  // damping breaks the closed form
    return s;
}

/// Factory used by the CLI: system by name plus a parameter list.
inline lagrangian_system make_system(std::string_view name, std::span<const double> params = {}) {
    auto arg = [&params](std::size_t i, double fallback) {
        return i < params.size() ? params[i] : fallback;
    };
    if (name == "free-particle") return free_particle(std::size_t(arg(0, 1.0)));
    if (name == "harmonic-oscillator") return harmonic_oscillator(arg(0, 1.0), arg(1, 1.0));
    if (name == "pendulum") return pendulum();
    if (name == "kepler") return kepler();
    if (name == "forced-oscillator")
        return forced_oscillator(arg(0, 1.0), arg(1, 1.0), arg(2, 0.1));
    throw std::invalid_argument("unknown system: " + std::string(name));
}

}  // namespace svi
