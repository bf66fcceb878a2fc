#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

#include "svi/errors.hpp"
#include "svi/linalg.hpp"

namespace svi {

/// Quadrature family defining the collocation times on [0,1].
enum class quadrature_kind { gauss_legendre, gauss_lobatto, radau_iia, chebyshev };

/// Largest supported stage count. Node computation and basis integrals
/// stay well conditioned in double precision up to here.
inline constexpr std::size_t max_stages = 10;

inline std::string_view to_string(quadrature_kind kind) {
    switch (kind) {
        case quadrature_kind::gauss_legendre: return "gauss-legendre";
        case quadrature_kind::gauss_lobatto: return "gauss-lobatto";
        case quadrature_kind::radau_iia: return "radau-iia";
        case quadrature_kind::chebyshev: return "chebyshev";
    }
    return "unknown";
}

inline quadrature_kind quadrature_from_string(std::string_view name) {
    if (name == "gauss-legendre") return quadrature_kind::gauss_legendre;
    if (name == "gauss-lobatto") return quadrature_kind::gauss_lobatto;
    if (name == "radau-iia" || name == "radau") return quadrature_kind::radau_iia;
    if (name == "chebyshev") return quadrature_kind::chebyshev;
    throw std::invalid_argument("unknown quadrature kind: " + std::string(name));
}

namespace detail {

/// Legendre P_n and P_n' at x in (-1,1), by the three-term recurrence.
inline std::pair<double, double> legendre_pair(std::size_t n, double x) {
    if (n == 0) return {1.0, 0.0};
    double pm = 1.0, p = x;
    for (std::size_t k = 2; k <= n; ++k) {
        const double pn = ((2.0 * k - 1.0) * x * p - (k - 1.0) * pm) / k;
        pm = p;
        p = pn;
    }
    const double dp = n * (x * p - pm) / (x * x - 1.0);
    return {p, dp};
}

struct root_problem {
    // f and f' of the polynomial whose interior roots are sought.
    double f;
    double df;
};

/// Newton iteration for one root of f, starting from guess x. Roots
/// listed in `deflate` are removed Maehly-style so the iteration cannot
/// fall back onto them. Tolerance 1e-15 on the update, at most 100 steps.
template <class Eval>
double polish_root(Eval&& eval, double x, const vec& deflate) {
    for (int it = 0; it < 100; ++it) {
        const root_problem rp = eval(x);
        double denom = rp.df;
        for (double r : deflate) denom -= rp.f / (x - r);
        const double dx = rp.f / denom;
        x -= dx;
        if (std::abs(dx) <= 1e-15) break;
    }
    return x;
}

/// Enforce the node symmetry c_i + c_{s+1-i} = 1 possessed by the
/// Gauss-Legendre and Gauss-Lobatto families (coordinates here are on
/// [-1,1], so x_i = -x_{s+1-i}).
inline void symmetrize(vec& x) {
    const std::size_t s = x.size();
    for (std::size_t i = 0; i < s / 2; ++i) {
        const double m = 0.5 * (x[i] - x[s - 1 - i]);
        x[i] = m;
        x[s - 1 - i] = -m;
    }
    if (s % 2 == 1) x[s / 2] = 0.0;
}

/// Roots of P_s on (-1,1), ascending.
inline vec legendre_roots(std::size_t s) {
    vec x(s);
    for (std::size_t i = 0; i < s; ++i) {
        const double guess = -std::cos(std::numbers::pi * (i + 0.75) / (s + 0.5));
        x[i] = polish_root(
            [s](double t) {
                auto [p, dp] = legendre_pair(s, t);
                return root_problem{p, dp};
            },
            guess, {});
    }
    symmetrize(x);
    return x;
}

}  // namespace detail

/// Reference Gauss-Legendre rule on [0,1] with m points (exact for
/// polynomials of degree 2m-1). Used internally to integrate the
/// Lagrange basis; weights come from the classical closed form
/// w = 2 / ((1-x^2) P_m'(x)^2) halved for the unit interval.
inline std::pair<vec, vec> gauss_legendre_rule(std::size_t m) {
    const vec x = detail::legendre_roots(m);
    vec points(m), wts(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto [p, dp] = detail::legendre_pair(m, x[i]);
        (void)p;
        points[i] = 0.5 * (x[i] + 1.0);
        wts[i] = 1.0 / ((1.0 - x[i] * x[i]) * dp * dp);
    }
    return {points, wts};
}

/// Collocation times for the requested family, ascending on [0,1].
///
/// Gauss-Legendre: roots of the shifted P_s. Gauss-Lobatto: both
/// endpoints plus the roots of P'_{s-1}. Radau IIA: right-endpoint
/// Radau points, the roots of P_{s-1} - P_s (which include 1).
/// Chebyshev: the Chebyshev-Gauss points (1 - cos((2i-1)pi/(2s)))/2.
inline vec nodes(quadrature_kind kind, std::size_t s) {
    if (s < 1 || s > max_stages)
        throw unsupported_stage_count("stage count " + std::to_string(s) +
                                      " outside supported range [1," +
                                      std::to_string(max_stages) + "]");
    if (kind == quadrature_kind::gauss_lobatto && s < 2)
        throw unsupported_stage_count("Gauss-Lobatto needs at least 2 stages");

    vec x;  // nodes on [-1,1]
    switch (kind) {
        case quadrature_kind::gauss_legendre:
            x = detail::legendre_roots(s);
            break;
        case quadrature_kind::gauss_lobatto: {
            x.assign(s, 0.0);
            x.front() = -1.0;
            x.back() = 1.0;
            const std::size_t n = s - 1;  // interior nodes are roots of P_n'
            for (std::size_t i = 0; i + 2 < s; ++i) {
                const double guess = -std::cos(std::numbers::pi * (i + 1.0) / n);
                x[i + 1] = detail::polish_root(
                    [n](double t) {
                        const auto [p, dp] = detail::legendre_pair(n, t);
                        const double d2p =
                            (2.0 * t * dp - double(n) * (n + 1.0) * p) / (1.0 - t * t);
                        return detail::root_problem{dp, d2p};
                    },
                    guess, {});
            }
            detail::symmetrize(x);
            break;
        }
        case quadrature_kind::radau_iia: {
            x.assign(s, 0.0);
            x.back() = 1.0;
            // Interior roots of P_{s-1} - P_s, found with the known root
            // at 1 deflated; Gauss nodes of order s-1 are close enough to
            // serve as starting guesses.
            const vec guesses = s > 1 ? detail::legendre_roots(s - 1) : vec{};
            auto eval = [s](double t) {
                const auto [pm, dpm] = detail::legendre_pair(s - 1, t);
                const auto [p, dp] = detail::legendre_pair(s, t);
                return detail::root_problem{pm - p, dpm - dp};
            };
            for (std::size_t i = 0; i + 1 < s; ++i)
                x[i] = detail::polish_root(eval, guesses[i], {1.0});
            break;
        }
        case quadrature_kind::chebyshev: {
            x.resize(s);
            for (std::size_t i = 0; i < s; ++i)
                x[i] = -std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * s));
            break;
        }
    }

    vec c(s);
    for (std::size_t i = 0; i < s; ++i) c[i] = 0.5 * (x[i] + 1.0);
    if (kind == quadrature_kind::gauss_lobatto) {
        c.front() = 0.0;
        c.back() = 1.0;
    }
    if (kind == quadrature_kind::radau_iia) c.back() = 1.0;

    for (std::size_t i = 0; i < s; ++i) {
        const bool ok = c[i] >= 0.0 && c[i] <= 1.0 && (i == 0 || c[i] > c[i - 1]);
        if (!ok)
            throw std::logic_error("node computation produced a non-increasing set for " +
                                   std::string(to_string(kind)) + " s=" + std::to_string(s));
    }
    return c;
}

/// Barycentric weights w_j = 1 / prod_{i != j} (c_j - c_i).
inline vec barycentric_weights(const vec& c) {
    const std::size_t s = c.size();
    vec w(s, 1.0);
    for (std::size_t j = 0; j < s; ++j)
        for (std::size_t i = 0; i < s; ++i)
            if (i != j) w[j] /= (c[j] - c[i]);
    return w;
}

/// Value of the j-th (0-based) Lagrange basis polynomial at t, evaluated
/// in the first barycentric form. Exact node hits return the Kronecker
/// delta directly.
inline double lagrange_eval(const vec& c, std::size_t j, double t) {
    const std::size_t s = c.size();
    for (std::size_t i = 0; i < s; ++i)
        if (t == c[i]) return i == j ? 1.0 : 0.0;
    const vec w = barycentric_weights(c);
    double ell = 1.0;
    for (std::size_t i = 0; i < s; ++i) ell *= (t - c[i]);
    return ell * w[j] / (t - c[j]);
}

/// Nodal weights b_j = integral of l^j over [0,1], via the reference
/// Gauss-Legendre rule with s points (exact: the basis has degree s-1).
inline vec weights(const vec& c) {
    const std::size_t s = c.size();
    const auto [x, w] = gauss_legendre_rule(s);
    vec b(s, 0.0);
    for (std::size_t j = 0; j < s; ++j)
        for (std::size_t k = 0; k < s; ++k) b[j] += w[k] * lagrange_eval(c, j, x[k]);
    return b;
}

/// Runge-Kutta coefficients a_ij = integral of l^j over [0, c_i],
/// by mapping the reference rule onto each subinterval.
inline mat sprk_coeffs(const vec& c) {
    const std::size_t s = c.size();
    const auto [x, w] = gauss_legendre_rule(s);
    mat a(s, s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < s; ++k)
                sum += w[k] * lagrange_eval(c, j, c[i] * x[k]);
            a(i, j) = c[i] * sum;
        }
    return a;
}

struct conjugate_pair {
    mat abar;
    vec bbar;
};

/// Conjugate coefficients abar_ij = b_j (1 - a_ji / b_i), bbar = b.
/// Together with (a, b) they satisfy b_i abar_ij + bbar_j a_ji = b_i bbar_j,
/// the condition that makes the partitioned pair symplectic.
inline conjugate_pair conjugate_coeffs(const mat& a, const vec& b) {
    const std::size_t s = b.size();
    for (std::size_t i = 0; i < s; ++i)
        if (b[i] == 0.0)
            throw zero_weight("nodal weight b[" + std::to_string(i) +
                              "] vanishes; conjugate coefficients undefined");
    conjugate_pair out{mat(s, s), b};
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) out.abar(i, j) = b[j] * (1.0 - a(j, i) / b[i]);
    return out;
}

struct sg_tables {
    mat dmat;   ///< dmat_ij = d l^j / dt at c_i
    vec alpha;  ///< alpha_j = l^j(0)
    vec beta;   ///< beta_j = l^j(1)
    double gamma = 0.0;
};

/// Differentiation matrix and endpoint basis values for the Galerkin
/// scheme. The matrix uses the standard barycentric formulas
/// D_ij = (w_j/w_i)/(c_i - c_j), D_ii = -sum_{j != i} D_ij.
inline sg_tables sg_coeffs(const vec& c) {
    const std::size_t s = c.size();
    if (s < 2) throw stage_count_too_small("Galerkin tables need at least 2 stages");
    const vec w = barycentric_weights(c);
    sg_tables t;
    t.dmat = mat(s, s);
    for (std::size_t i = 0; i < s; ++i) {
        double diag = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
            if (j == i) continue;
            t.dmat(i, j) = (w[j] / w[i]) / (c[i] - c[j]);
            diag -= t.dmat(i, j);
        }
        t.dmat(i, i) = diag;
    }
    t.alpha.resize(s);
    t.beta.resize(s);
    for (std::size_t j = 0; j < s; ++j) {
        t.alpha[j] = lagrange_eval(c, j, 0.0);
        t.beta[j] = lagrange_eval(c, j, 1.0);
    }
    t.gamma = t.alpha.front() * t.beta.back() - t.alpha.back() * t.beta.front();
    if (t.gamma == 0.0)
        throw degenerate_endpoints("source/target determinant vanished (c_1 == c_s?)");
    return t;
}

/// All per-(family, s) coefficient tables used by both integrator
/// families. Immutable after construction; safe for concurrent reads.
struct tableau {
    quadrature_kind kind = quadrature_kind::gauss_legendre;
    std::size_t s = 0;
    vec c;         ///< collocation times, ascending on [0,1]
    vec b;         ///< nodal weights
    mat a;         ///< a_ij = int_0^{c_i} l^j
    mat abar;      ///< conjugate coefficients
    vec bbar;      ///< conjugate weights (= b)
    mat dmat;      ///< differentiation matrix at the nodes
    vec alpha;     ///< l^j(0)
    vec beta;      ///< l^j(1)
    double gamma = 0.0;  ///< alpha_1 beta_s - alpha_s beta_1
};

inline tableau make_tableau(quadrature_kind kind, std::size_t s) {
    tableau t;
    t.kind = kind;
    t.s = s;
    t.c = nodes(kind, s);
    t.b = weights(t.c);
    t.a = sprk_coeffs(t.c);
    auto conj = conjugate_coeffs(t.a, t.b);
    t.abar = std::move(conj.abar);
    t.bbar = std::move(conj.bbar);
    if (s >= 2) {
        auto sg = sg_coeffs(t.c);
        t.dmat = std::move(sg.dmat);
        t.alpha = std::move(sg.alpha);
        t.beta = std::move(sg.beta);
        t.gamma = sg.gamma;
    } else {
        // Single constant basis polynomial: zero derivative, unit endpoint
        // values, and a vanishing determinant (the Galerkin step is not
        // defined for s = 1).
        t.dmat = mat(1, 1, 0.0);
        t.alpha = {1.0};
        t.beta = {1.0};
        t.gamma = 0.0;
    }
    return t;
}

}  // namespace svi
