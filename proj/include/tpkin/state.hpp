#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "thermo.hpp"
#include "vgrid.hpp"

namespace tpkin {

using Mat3 = std::array<Vec3, 3>;

/// Reduced distributions of one spatial cell: F followed by G^1..G^n,
/// each a full velocity-grid array.
class ReducedState {
public:
    ReducedState() = default;
    ReducedState(size_t nv, size_t n_modes) : nv_(nv), nm_(n_modes), data_((1 + n_modes) * nv, 0.0) {}

    size_t nv() const { return nv_; }
    size_t n_modes() const { return nm_; }
    size_t n_components() const { return 1 + nm_; }
    double *F() { return data_.data(); }
    const double *F() const { return data_.data(); }
    double *G(size_t i) { return data_.data() + (1 + i) * nv_; }
    const double *G(size_t i) const { return data_.data() + (1 + i) * nv_; }
    double *component(size_t c) { return data_.data() + c * nv_; }
    const double *component(size_t c) const { return data_.data() + c * nv_; }
    std::vector<double> &data() { return data_; }
    const std::vector<double> &data() const { return data_; }

private:
    size_t nv_ = 0, nm_ = 0;
    std::vector<double> data_;
};

struct Moments {
    double rho = 0.0;
    Vec3 u{};
    double e_tr = 0.0;
    std::vector<double> e_int_modes;
    double e = 0.0;
    double T = 0.0;
    std::vector<double> T_int_modes;
    double p = 0.0;
    Mat3 sigma{};
    Vec3 q{};

    double kinetic() const { return 0.5 * rho * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]); }
    /// Total energy per unit volume.
    double E() const { return kinetic() + rho * e; }
};

/// Conserved sums (mass, momentum relative to the grid center, total energy
/// relative to the grid center) evaluated by quadrature.
struct Conserved {
    double mass = 0.0;
    Vec3 mom{};
    double energy = 0.0;
};

inline Conserved conserved(const ReducedState &s, const VelocityGrid &g)
{
    Conserved c;
    const double *F = s.F();
    double m = 0, m1[3] = {0, 0, 0}, m2 = 0;
    size_t a = 0;
    for (int i = 0; i < g.n(0); ++i) {
        double x = g.offset(0, i);
        for (int j = 0; j < g.n(1); ++j) {
            double y = g.offset(1, j);
            double sk = 0, sz = 0, sr = 0;
            const double *f = F + a;
            const double *zo = g.offsets(2).data();
            const int nz = g.n(2);
#pragma omp simd reduction(+ : sk, sz, sr)
            for (int k = 0; k < nz; ++k) {
                double z = zo[k];
                sk += f[k];
                sz += z * f[k];
                sr += z * z * f[k];
            }
            a += nz;
            m += sk;
            m1[0] += x * sk;
            m1[1] += y * sk;
            m1[2] += sz;
            m2 += (x * x + y * y) * sk + sr;
        }
    }
    double w = g.weight();
    double gsum = 0;
    for (size_t i = 0; i < s.n_modes(); ++i) gsum += g.integrate(s.G(i));
    c.mass = m * w;
    c.mom = {m1[0] * w, m1[1] * w, m1[2] * w};
    c.energy = 0.5 * m2 * w + gsum;
    return c;
}

/// Moments of a reduced state. With full = false, sigma and q are skipped.
inline Moments compute_moments(const ReducedState &s, const VelocityGrid &g, const Gas &gas, bool full = true)
{
    Conserved c = conserved(s, g);
    Moments mo;
    mo.rho = c.mass;
    if (!(mo.rho > 0.0) || !std::isfinite(mo.rho))
        throw DegenerateStateError("moments: non-positive density " + detail::num(mo.rho));
    Vec3 du;
    for (int d = 0; d < 3; ++d) {
        du[d] = c.mom[d] / mo.rho;
        mo.u[d] = g.center()[d] + du[d];
    }
    double g_sum = 0.0;
    for (size_t i = 0; i < s.n_modes(); ++i) g_sum += g.integrate(s.G(i));
    double e2 = (c.energy - g_sum) / mo.rho;
    mo.e_tr = e2 - 0.5 * (du[0] * du[0] + du[1] * du[1] + du[2] * du[2]);
    mo.e = mo.e_tr;
    mo.e_int_modes.resize(s.n_modes());
    mo.T_int_modes.resize(s.n_modes());
    for (size_t i = 0; i < s.n_modes(); ++i) {
        mo.e_int_modes[i] = g.integrate(s.G(i)) / mo.rho;
        mo.e += mo.e_int_modes[i];
    }
    mo.T = gas.T_of_e(mo.e);
    mo.p = mo.rho * gas.R() * mo.T;
    for (size_t i = 0; i < s.n_modes(); ++i) mo.T_int_modes[i] = gas.mode(i).T_int(mo.e_int_modes[i]);
    if (!full) return mo;

    const double *F = s.F();
    Mat3 sig{};
    Vec3 q{};
    size_t a = 0;
    for (int i = 0; i < g.n(0); ++i)
        for (int j = 0; j < g.n(1); ++j)
            for (int k = 0; k < g.n(2); ++k, ++a) {
                double c0 = g.v(0, i) - mo.u[0], c1 = g.v(1, j) - mo.u[1], c2 = g.v(2, k) - mo.u[2];
                double cc[3] = {c0, c1, c2};
                double f = F[a];
                double h = 0.5 * (c0 * c0 + c1 * c1 + c2 * c2) * f;
                for (size_t m = 0; m < s.n_modes(); ++m) h += s.G(m)[a];
                for (int r = 0; r < 3; ++r) {
                    q[r] += h * cc[r];
                    for (int t = r; t < 3; ++t) sig[r][t] += cc[r] * cc[t] * f;
                }
            }
    double w = g.weight();
    for (int r = 0; r < 3; ++r) {
        q[r] *= w;
        for (int t = r; t < 3; ++t) {
            sig[r][t] *= w;
            sig[t][r] = sig[r][t];
        }
    }
    mo.sigma = sig;
    mo.q = q;
    return mo;
}

/// Pointwise Maxwellian rho / (2 pi R T)^{3/2} exp(-|v-u|^2 / 2RT).
inline std::vector<double> maxwellian(double rho, Vec3 u, double T, double R, const VelocityGrid &g)
{
    if (!(rho > 0.0 && T > 0.0)) throw DomainError("maxwellian: rho and T must be positive");
    double norm = rho * std::pow(2.0 * M_PI * R * T, -1.5);
    return g.tabulate([&](const Vec3 &v) {
        double r2 = 0;
        for (int d = 0; d < 3; ++d) r2 += (v[d] - u[d]) * (v[d] - u[d]);
        return norm * std::exp(-0.5 * r2 / (R * T));
    });
}

/// Discrete exponential-family density rho * exp(a + b.w - g|w|^2) in the
/// scaled variable w = (v - u) / sqrt(RT), whose grid moments match
/// (rho, rho u, 3/2 rho R T) to round-off.
struct ProjectedMaxwellian {
    double rho = 0.0, T = 0.0, R = 1.0, c = 1.0;
    Vec3 u{};
    double a = 0.0;
    Vec3 b{};
    double g = 0.5;
    std::array<std::vector<double>, 3> w;   // scaled node coordinates per axis
    std::array<std::vector<double>, 3> fac; // exp(b_d w - g w^2) per axis

    double scale() const { return rho * std::exp(a); }

    /// out = factor * M at every node.
    void fill(double *out, double factor = 1.0) const
    {
        double s = factor * scale();
        size_t n0 = fac[0].size(), n1 = fac[1].size(), n2 = fac[2].size();
        size_t idx = 0;
        for (size_t i = 0; i < n0; ++i) {
            double fi = s * fac[0][i];
            for (size_t j = 0; j < n1; ++j) {
                double fij = fi * fac[1][j];
                for (size_t k = 0; k < n2; ++k) out[idx++] = fij * fac[2][k];
            }
        }
    }
    std::vector<double> values() const
    {
        std::vector<double> out(fac[0].size() * fac[1].size() * fac[2].size());
        fill(out.data());
        return out;
    }
};

namespace detail {

inline double ipow(double x, int p)
{
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

// sum_i w_i^p e_i with mirrored pairs summed together.
inline double paired_sum(const std::vector<double> &w, const std::vector<double> &e, int p)
{
    size_t n = w.size();
    double s = 0.0;
    for (size_t i = 0; i < n / 2; ++i) {
        size_t j = n - 1 - i;
        s += ipow(w[i], p) * e[i] + ipow(w[j], p) * e[j];
    }
    if (n % 2) s += ipow(w[n / 2], p) * e[n / 2];
    return s;
}

} // namespace detail

inline ProjectedMaxwellian project_maxwellian(double rho, Vec3 u, double T, double R, const VelocityGrid &grid)
{
    if (!(rho > 0.0 && T > 0.0)) throw DomainError("projected maxwellian: rho and T must be positive");
    ProjectedMaxwellian pm;
    pm.rho = rho;
    pm.u = u;
    pm.T = T;
    pm.R = R;
    pm.c = std::sqrt(R * T);
    double cube = 1.0;
    std::array<bool, 3> centered{}; // mirror-symmetric node set: the drift term is exactly zero
    for (int d = 0; d < 3; ++d) {
        centered[d] = grid.center()[d] == u[d];
        int n = grid.n(d);
        pm.w[d].resize(n);
        pm.fac[d].resize(n);
        double shift = grid.center()[d] - u[d];
        for (int i = 0; i < n; ++i) pm.w[d][i] = (shift + grid.offset(d, i)) / pm.c;
        cube *= grid.dv(d);
    }
    pm.a = -std::log(std::pow(2.0 * M_PI, 1.5) * pm.c * pm.c * pm.c);
    pm.b = {0.0, 0.0, 0.0};
    pm.g = 0.5;

    std::array<std::array<double, 5>, 3> S;
    auto evaluate = [&]() {
        for (int d = 0; d < 3; ++d) {
            for (size_t i = 0; i < pm.w[d].size(); ++i) {
                double x = pm.w[d][i];
                pm.fac[d][i] = std::exp(pm.b[d] * x - pm.g * x * x);
            }
            for (int p = 0; p < 5; ++p) S[d][p] = detail::paired_sum(pm.w[d], pm.fac[d], p);
        }
    };
    // <w0^p w1^q w2^r M> / rho
    auto mom = [&](int p, int q, int r) { return std::exp(pm.a) * cube * S[0][p] * S[1][q] * S[2][r]; };
    auto phi_mom = [&](int row, std::array<int, 3> extra) {
        // row: 0 -> 1, 1..3 -> w_d, 4 -> |w|^2
        if (row < 4) {
            std::array<int, 3> e = extra;
            if (row > 0) e[row - 1] += 1;
            return mom(e[0], e[1], e[2]);
        }
        double s = 0;
        for (int d = 0; d < 3; ++d) {
            std::array<int, 3> e = extra;
            e[d] += 2;
            s += mom(e[0], e[1], e[2]);
        }
        return s;
    };

    double res_norm = 0.0;
    for (int it = 0; it < 60; ++it) {
        evaluate();
        Eigen::Matrix<double, 5, 1> r;
        r(0) = phi_mom(0, {0, 0, 0}) - 1.0;
        for (int d = 0; d < 3; ++d) r(1 + d) = phi_mom(1 + d, {0, 0, 0});
        r(4) = phi_mom(4, {0, 0, 0}) - 3.0;
        res_norm = r.cwiseAbs().sum();
        if (!std::isfinite(res_norm)) break;
        if (res_norm < 1e-15) break;
        Eigen::Matrix<double, 5, 5> J;
        for (int row = 0; row < 5; ++row) {
            J(row, 0) = phi_mom(row, {0, 0, 0});
            for (int d = 0; d < 3; ++d) {
                std::array<int, 3> e{0, 0, 0};
                e[d] = 1;
                J(row, 1 + d) = phi_mom(row, e);
            }
            double s = 0;
            for (int d = 0; d < 3; ++d) {
                std::array<int, 3> e{0, 0, 0};
                e[d] = 2;
                s += phi_mom(row, e);
            }
            J(row, 4) = -s;
        }
        Eigen::Matrix<double, 5, 1> dx = J.partialPivLu().solve(r);
        pm.a -= dx(0);
        for (int d = 0; d < 3; ++d) pm.b[d] = centered[d] ? 0.0 : pm.b[d] - dx(1 + d);
        pm.g -= dx(4);
        if (!(pm.g > 0.0)) break;
    }
    evaluate();
    // exact mass by a final shift of the log-normalization
    double z0 = mom(0, 0, 0);
    pm.a -= std::log(z0);
    double err = std::abs(mom(0, 0, 0) - 1.0);
    for (int d = 0; d < 3; ++d) {
        std::array<int, 3> e{0, 0, 0};
        e[d] = 1;
        err += std::abs(mom(e[0], e[1], e[2]));
    }
    double m2 = mom(2, 0, 0) + mom(0, 2, 0) + mom(0, 0, 2);
    err += std::abs(m2 - 3.0) / 3.0;
    if (!(pm.g > 0.0) || !(err < 1e-12))
        throw ProjectionError("moment projection failed (residual " + detail::num(err) +
                              "); increase velocity-grid span or resolution");
    return pm;
}

inline ProjectedMaxwellian project_maxwellian(const Moments &m, const VelocityGrid &g, double R)
{
    return project_maxwellian(m.rho, m.u, m.T, R, g);
}

/// Writes the equilibrium pair (M, e_int^i(T) M) into s.
inline void set_equilibrium(ReducedState &s, const ProjectedMaxwellian &pm, const Gas &gas)
{
    pm.fill(s.F());
    for (size_t i = 0; i < s.n_modes(); ++i) pm.fill(s.G(i), gas.mode(i).e_int(pm.T));
}

} // namespace tpkin
