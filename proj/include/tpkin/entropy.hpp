#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "state.hpp"

namespace tpkin {

/// Node values below this are treated as vacuum in entropy sums.
inline constexpr double kVacuum = 1e-300;

/// Kinetic entropy density F ln F - sum_i F s^i(G^i / F) / R.
inline double H_density(double F, const double *G, const Gas &gas)
{
    if (!(F > 0.0)) throw DomainError("entropy: F must be positive, got " + detail::num(F));
    double h = F * std::log(F);
    for (size_t i = 0; i < gas.n_modes(); ++i) h -= F * gas.mode(i).s_int(G[i] / F) / gas.R();
    return h;
}

inline double H_density(double F, const std::vector<double> &G, const Gas &gas)
{
    return H_density(F, G.data(), gas);
}

/// Gradient (d/dF, d/dG^1, ..., d/dG^n) of the entropy density.
inline Eigen::VectorXd dH(double F, const double *G, const Gas &gas)
{
    if (!(F > 0.0)) throw DomainError("entropy: F must be positive, got " + detail::num(F));
    size_t n = gas.n_modes();
    double R = gas.R();
    Eigen::VectorXd d(n + 1);
    d(0) = 1.0 + std::log(F);
    for (size_t i = 0; i < n; ++i) {
        const auto &m = gas.mode(i);
        double eps = G[i] / F;
        double Ti = m.T_int(eps);
        d(0) += G[i] / (R * Ti * F) - m.s_int(eps) / R;
        d(1 + i) = -1.0 / (R * Ti);
    }
    return d;
}

/// Hessian of the entropy density in (F, G^1..G^n).
inline Eigen::MatrixXd hessian(double F, const double *G, const Gas &gas)
{
    if (!(F > 0.0)) throw DomainError("entropy: F must be positive, got " + detail::num(F));
    size_t n = gas.n_modes();
    double R = gas.R();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n + 1, n + 1);
    H(0, 0) = 1.0 / F;
    for (size_t i = 0; i < n; ++i) {
        const auto &m = gas.mode(i);
        double Ti = m.T_int(G[i] / F);
        double k = 1.0 / (m.c_v_int(Ti) * R * Ti * Ti);
        H(0, 0) += G[i] * G[i] * k / (F * F * F);
        H(0, 1 + i) = H(1 + i, 0) = -G[i] * k / (F * F);
        H(1 + i, 1 + i) = k / F;
    }
    return H;
}

struct EntropyReport {
    double H_total = 0.0;
    Vec3 H_flux{};
    double dissipation = 0.0;
    double hessian_min_det = 0.0;
};

/// Quadrature of H and v H over the grid; vacuum nodes contribute 0.
inline EntropyReport H_total(const ReducedState &s, const VelocityGrid &g, const Gas &gas)
{
    EntropyReport rep;
    std::vector<double> Gv(s.n_modes());
    double h = 0, fx = 0, fy = 0, fz = 0;
    size_t a = 0;
    for (int i = 0; i < g.n(0); ++i)
        for (int j = 0; j < g.n(1); ++j)
            for (int k = 0; k < g.n(2); ++k, ++a) {
                double F = s.F()[a];
                if (F < kVacuum) {
                    if (F < 0.0)
                        throw DomainError("entropy: negative F = " + detail::num(F) + " at velocity node " +
                                          std::to_string(a));
                    continue;
                }
                for (size_t m = 0; m < s.n_modes(); ++m) Gv[m] = s.G(m)[a];
                double hd;
                try {
                    hd = H_density(F, Gv.data(), gas);
                } catch (const Error &e) {
                    throw DomainError(std::string(e.what()) + " at velocity node " + std::to_string(a));
                }
                h += hd;
                fx += g.v(0, i) * hd;
                fy += g.v(1, j) * hd;
                fz += g.v(2, k) * hd;
            }
    double w = g.weight();
    rep.H_total = h * w;
    rep.H_flux = {fx * w, fy * w, fz * w};
    return rep;
}

/// Smallest Hessian determinant over nodes with F above vacuum, sampled with a stride.
inline double hessian_min_det(const ReducedState &s, const Gas &gas, size_t stride = 1)
{
    double best = INFINITY;
    std::vector<double> Gv(s.n_modes());
    for (size_t a = 0; a < s.nv(); a += stride) {
        double F = s.F()[a];
        if (F < 1e-200) continue;
        for (size_t m = 0; m < s.n_modes(); ++m) Gv[m] = s.G(m)[a];
        best = std::min(best, hessian(F, Gv.data(), gas).determinant());
    }
    return best;
}

/// H(state) - H(equilibrium with the same rho, u, e). Nonnegative at the minimum.
inline double minimization_check(const ReducedState &s, const VelocityGrid &g, const Gas &gas)
{
    Moments m = compute_moments(s, g, gas, false);
    ReducedState eq(s.nv(), s.n_modes());
    set_equilibrium(eq, project_maxwellian(m, g, gas.R()), gas);
    return H_total(s, g, gas).H_total - H_total(eq, g, gas).H_total;
}

} // namespace tpkin
