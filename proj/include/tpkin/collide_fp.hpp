#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "collide_bgk.hpp"
#include "state.hpp"

namespace tpkin {

/// One velocity axis of the drift-diffusion operator, written in the
/// scaled variable w = (v - u) / sqrt(RT) where it reads d/dw (w f + df/dw).
///
/// Fluxes use the compact form m d/dw (f / m) with face weights
/// P_{i+1/2} = sum_{k<=i} (wbar - w_k) m_k, so the discrete equilibrium m is
/// an exact null vector and the boundary faces carry no flux.
struct FPAxis {
    int n = 0;
    std::vector<double> lo, di, up; // row i: lo_i f_{i-1} + di_i f_i + up_i f_{i+1}

    FPAxis() = default;
    FPAxis(const std::vector<double> &w, const std::vector<double> &m, double dw)
    {
        n = int(w.size());
        double s0 = 0, s1 = 0;
        for (int i = 0; i < n / 2; ++i) {
            int j = n - 1 - i;
            s0 += m[i] + m[j];
            s1 += w[i] * m[i] + w[j] * m[j];
        }
        if (n % 2) {
            s0 += m[n / 2];
            s1 += w[n / 2] * m[n / 2];
        }
        double wbar = s1 / s0;
        std::vector<double> left(n, 0.0), right(n, 0.0), P(n + 1, 0.0);
        double acc = 0;
        for (int i = 0; i < n; ++i) {
            acc += (wbar - w[i]) * m[i];
            left[i] = acc;
        }
        acc = 0;
        for (int i = n - 1; i >= 0; --i) {
            right[i] = acc; // sum over k > i of (w_k - wbar) m_k
            acc += (w[i] - wbar) * m[i];
        }
        for (int i = 0; i + 1 < n; ++i) P[i + 1] = (w[i] < wbar) ? left[i] : right[i];
        lo.assign(n, 0.0);
        di.assign(n, 0.0);
        up.assign(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double Pm = P[i], Pp = P[i + 1];
            if (i > 0) lo[i] = Pm / (dw * m[i - 1]);
            if (i + 1 < n) up[i] = Pp / (dw * m[i + 1]);
            di[i] = -(Pm + Pp) / (dw * m[i]);
        }
    }
};

namespace detail {

struct AxisLayout {
    size_t outer, n, inner;
};

inline AxisLayout axis_layout(const VelocityGrid &g, int d)
{
    size_t n0 = g.n(0), n1 = g.n(1), n2 = g.n(2);
    if (d == 0) return {1, n0, n1 * n2};
    if (d == 1) return {n0, n1, n2};
    return {n0 * n1, n2, 1};
}

// y += scale * L x along one axis.
inline void axis_apply(const FPAxis &op, const AxisLayout &L, const double *x, double *y, double scale)
{
    const size_t n = L.n;
    if (L.inner == 1) {
        std::vector<double> a(n), b(n), c(n);
        for (size_t i = 0; i < n; ++i) {
            a[i] = scale * op.lo[i];
            b[i] = scale * op.di[i];
            c[i] = scale * op.up[i];
        }
        for (size_t o = 0; o < L.outer; ++o) {
            const double *xb = x + o * n;
            double *yb = y + o * n;
            yb[0] += b[0] * xb[0] + c[0] * xb[1];
#pragma omp simd
            for (size_t i = 1; i < n - 1; ++i) yb[i] += a[i] * xb[i - 1] + b[i] * xb[i] + c[i] * xb[i + 1];
            yb[n - 1] += a[n - 1] * xb[n - 2] + b[n - 1] * xb[n - 1];
        }
        return;
    }
    for (size_t o = 0; o < L.outer; ++o) {
        const double *xb = x + o * n * L.inner;
        double *yb = y + o * n * L.inner;
        for (size_t i = 0; i < n; ++i) {
            double a = scale * op.lo[i], b = scale * op.di[i], c = scale * op.up[i];
            const double *xm = xb + (i > 0 ? i - 1 : i) * L.inner;
            const double *x0 = xb + i * L.inner;
            const double *xp = xb + (i + 1 < n ? i + 1 : i) * L.inner;
            double *yy = yb + i * L.inner;
#pragma omp simd
            for (size_t k = 0; k < L.inner; ++k) yy[k] += a * xm[k] + b * x0[k] + c * xp[k];
        }
    }
}

// Forward/back substitution on n rows of `inner` interleaved lines.
inline void thomas_block(double *xb, size_t n, size_t inner, const double *a, const double *inv, const double *cp)
{
#pragma omp simd
    for (size_t k = 0; k < inner; ++k) xb[k] *= inv[0];
    for (size_t i = 1; i < n; ++i) {
        double *xi = xb + i * inner;
        const double *xm = xb + (i - 1) * inner;
        double ai = a[i], vi = inv[i];
#pragma omp simd
        for (size_t k = 0; k < inner; ++k) xi[k] = (xi[k] - ai * xm[k]) * vi;
    }
    for (size_t i = n - 1; i-- > 0;) {
        double *xi = xb + i * inner;
        const double *xp = xb + (i + 1) * inner;
        double ci = cp[i];
#pragma omp simd
        for (size_t k = 0; k < inner; ++k) xi[k] -= ci * xp[k];
    }
}

// Solves (I - h L) x = r in place along one axis (Thomas, shared factorization).
inline void axis_solve(const FPAxis &op, const AxisLayout &L, double *x, double h)
{
    size_t n = L.n;
    std::vector<double> cp(n), inv(n), a(n);
    for (size_t i = 0; i < n; ++i) {
        a[i] = -h * op.lo[i];
        double b = 1.0 - h * op.di[i];
        double c = -h * op.up[i];
        double den = (i == 0) ? b : b - a[i] * cp[i - 1];
        if (!(den > 0.0)) throw NumericalError("fp_step: singular velocity-line system");
        inv[i] = 1.0 / den;
        cp[i] = c * inv[i];
    }
    if (L.inner == 1) {
        // contiguous lines: transpose groups of lines so the sweep vectorizes across them
        constexpr size_t kGroup = 16;
        std::vector<double> buf(n * kGroup);
        for (size_t o0 = 0; o0 < L.outer; o0 += kGroup) {
            size_t m = std::min(kGroup, L.outer - o0);
            for (size_t l = 0; l < m; ++l)
                for (size_t i = 0; i < n; ++i) buf[i * m + l] = x[(o0 + l) * n + i];
            thomas_block(buf.data(), n, m, a.data(), inv.data(), cp.data());
            for (size_t l = 0; l < m; ++l)
                for (size_t i = 0; i < n; ++i) x[(o0 + l) * n + i] = buf[i * m + l];
        }
        return;
    }
    for (size_t o = 0; o < L.outer; ++o) thomas_block(x + o * n * L.inner, n, L.inner, a.data(), inv.data(), cp.data());
}

// Moments <z0^a z1^b z2^c F> for a + b + c <= 4 with z = (v - u) / c.
struct MonomialMoments {
    double m[5][5][5] = {};
};

inline MonomialMoments monomial_moments(const VelocityGrid &g, const Vec3 &u, double c, const double *F)
{
    MonomialMoments out;
    std::vector<double> z2(g.n(2));
    for (int k = 0; k < g.n(2); ++k) z2[k] = (g.v(2, k) - u[2]) / c;
    size_t a = 0;
    for (int i = 0; i < g.n(0); ++i) {
        double z0 = (g.v(0, i) - u[0]) / c;
        double si[5][5] = {};
        for (int j = 0; j < g.n(1); ++j, a += g.n(2)) {
            double z1 = (g.v(1, j) - u[1]) / c;
            double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0;
            const double *f = F + a;
#pragma omp simd reduction(+ : s0, s1, s2, s3, s4)
            for (int k = 0; k < g.n(2); ++k) {
                double z = z2[k], v = f[k];
                double vz = v * z, vz2 = vz * z;
                s0 += v;
                s1 += vz;
                s2 += vz2;
                s3 += vz2 * z;
                s4 += vz2 * z * z;
            }
            double sk[5] = {s0, s1, s2, s3, s4};
            double pw = 1.0;
            for (int b = 0; b < 5; ++b, pw *= z1)
                for (int cc = 0; cc + b < 5; ++cc) si[b][cc] += pw * sk[cc];
        }
        double pw = 1.0;
        for (int aa = 0; aa < 5; ++aa, pw *= z0)
            for (int b = 0; aa + b < 5; ++b)
                for (int cc = 0; aa + b + cc < 5; ++cc) out.m[aa][b][cc] += pw * si[b][cc];
    }
    double w = g.weight();
    for (auto &x : out.m)
        for (auto &y : x)
            for (auto &z : y) z *= w;
    return out;
}

// Basis p = (1, z0, z1, z2, |z|^2) as sums of monomials.
inline const std::vector<std::pair<double, std::array<int, 3>>> &basis_poly(int r)
{
    static const std::vector<std::pair<double, std::array<int, 3>>> b[5] = {
        {{1.0, {0, 0, 0}}},
        {{1.0, {1, 0, 0}}},
        {{1.0, {0, 1, 0}}},
        {{1.0, {0, 0, 1}}},
        {{1.0, {2, 0, 0}}, {1.0, {0, 2, 0}}, {1.0, {0, 0, 2}}}};
    return b[r];
}

// 5x5 matrix <p p^T F> and vector <p X> in the basis p = (1, z, |z|^2), z = (v - u) / c.
inline void weighted_basis_moments(const VelocityGrid &g, const Vec3 &u, double c, const double *F,
                                   Eigen::Matrix<double, 5, 5> *A, const double *X,
                                   Eigen::Matrix<double, 5, 1> *bx)
{
    if (A) {
        auto mm = monomial_moments(g, u, c, F);
        for (int r = 0; r < 5; ++r)
            for (int q = 0; q < 5; ++q) {
                double s = 0;
                for (auto &[ca, ea] : basis_poly(r))
                    for (auto &[cb, eb] : basis_poly(q))
                        s += ca * cb * mm.m[ea[0] + eb[0]][ea[1] + eb[1]][ea[2] + eb[2]];
                (*A)(r, q) = s;
            }
    }
    if (X && bx) {
        auto mm = monomial_moments(g, u, c, X);
        for (int r = 0; r < 5; ++r) {
            double s = 0;
            for (auto &[ca, ea] : basis_poly(r)) s += ca * mm.m[ea[0]][ea[1]][ea[2]];
            (*bx)(r) = s;
        }
    }
}

} // namespace detail

/// Per-cell operator: projected equilibrium plus the three axis stencils.
struct FPOperator {
    ProjectedMaxwellian pm;
    std::array<FPAxis, 3> axes;
    std::array<detail::AxisLayout, 3> layout;
    double tau_eff = 1.0;

    FPOperator(const ProjectedMaxwellian &p, const VelocityGrid &g, double tau) : pm(p), tau_eff(tau)
    {
        for (int d = 0; d < 3; ++d) {
            axes[d] = FPAxis(pm.w[d], pm.fac[d], g.dv(d) / pm.c);
            layout[d] = detail::axis_layout(g, d);
        }
    }

    /// y += (scale / tau) * div(flux(x)) summed over the axes.
    void apply(const double *x, double *y, double scale = 1.0) const
    {
        for (int d = 0; d < 3; ++d) detail::axis_apply(axes[d], layout[d], x, y, scale / tau_eff);
    }
};

/// Multiplies F and every G^i by 1 + a + b.z + c|z|^2 so that mass, momentum
/// and total energy (about the grid center) match the target.
inline void fp_moment_correction(ReducedState &s, const VelocityGrid &g, const Vec3 &u, double c,
                                 const Conserved &target)
{
    Conserved cur = conserved(s, g);
    // Defects in (1, xi, |xi|^2/2) converted to the basis (1, z, |z|^2).
    Vec3 du;
    for (int d = 0; d < 3; ++d) du[d] = u[d] - g.center()[d];
    double D0 = target.mass - cur.mass;
    Vec3 D1;
    for (int d = 0; d < 3; ++d) D1[d] = target.mom[d] - cur.mom[d];
    double D2 = target.energy - cur.energy;
    Eigen::Matrix<double, 5, 1> rhs;
    rhs(0) = D0;
    double dot = 0, du2 = 0;
    for (int d = 0; d < 3; ++d) {
        rhs(1 + d) = (D1[d] - du[d] * D0) / c;
        dot += du[d] * D1[d];
        du2 += du[d] * du[d];
    }
    // xi = du + c z  =>  |xi|^2/2 = |du|^2/2 + c du.z + c^2 |z|^2 / 2
    rhs(4) = 2.0 * (D2 - dot + 0.5 * du2 * D0) / (c * c);
    // F and every G^i share the factor so G^i / F is untouched; the energy row sees both
    std::vector<double> gs(s.nv(), 0.0);
    for (size_t i = 0; i < s.n_modes(); ++i) {
        const double *G = s.G(i);
        for (size_t a = 0; a < s.nv(); ++a) gs[a] += G[a];
    }
    Eigen::Matrix<double, 5, 5> A;
    Eigen::Matrix<double, 5, 1> bg = Eigen::Matrix<double, 5, 1>::Zero();
    detail::weighted_basis_moments(g, u, c, s.F(), &A, s.n_modes() ? gs.data() : nullptr, &bg);
    A.row(4) += (2.0 / (c * c)) * bg.transpose();
    Eigen::Matrix<double, 5, 1> k = A.partialPivLu().solve(rhs);
    double *F = s.F();
    size_t a = 0;
    for (int i = 0; i < g.n(0); ++i) {
        double z0 = (g.v(0, i) - u[0]) / c;
        for (int j = 0; j < g.n(1); ++j) {
            double z1 = (g.v(1, j) - u[1]) / c;
            double base = k(0) + k(1) * z0 + k(2) * z1 + k(4) * (z0 * z0 + z1 * z1);
            for (int l = 0; l < g.n(2); ++l, ++a) {
                double z2 = (g.v(2, l) - u[2]) / c;
                double f = 1.0 + base + k(3) * z2 + k(4) * z2 * z2;
                F[a] *= f;
                for (size_t m = 0; m < s.n_modes(); ++m) s.G(m)[a] *= f;
            }
        }
    }
}

/// Drift-diffusion rates for F and every G^i plus the exchange source
/// (2 / tau)(e_int^i(T) F - G^i). A small F-weighted term removes the
/// discrete energy and momentum defect of the stencil.
inline ReducedState fp_rhs(const ReducedState &s, const VelocityGrid &g, const Gas &gas, double tau_eff)
{
    Moments m = compute_moments(s, g, gas, false);
    FPOperator op(project_maxwellian(m, g, gas.R()), g, tau_eff);
    ReducedState d(s.nv(), s.n_modes());
    op.apply(s.F(), d.F());
    double gsum = 0;
    for (size_t i = 0; i < s.n_modes(); ++i) {
        op.apply(s.G(i), d.G(i));
        double ei = gas.mode(i).e_int(m.T);
        for (size_t a = 0; a < s.nv(); ++a) d.G(i)[a] += 2.0 * (ei * s.F()[a] - s.G(i)[a]) / tau_eff;
        gsum += g.integrate(d.G(i));
    }
    double c = op.pm.c;
    Eigen::Matrix<double, 5, 5> A;
    Eigen::Matrix<double, 5, 1> b;
    detail::weighted_basis_moments(g, m.u, c, s.F(), &A, d.F(), &b);
    // want <p dF> = (0, 0, 0, 0, -2 gsum / c^2)
    Eigen::Matrix<double, 5, 1> target = Eigen::Matrix<double, 5, 1>::Zero();
    target(4) = -2.0 * gsum / (c * c);
    Eigen::Matrix<double, 5, 1> k = A.partialPivLu().solve(target - b);
    size_t a = 0;
    for (int i = 0; i < g.n(0); ++i) {
        double z0 = (g.v(0, i) - m.u[0]) / c;
        for (int j = 0; j < g.n(1); ++j) {
            double z1 = (g.v(1, j) - m.u[1]) / c;
            for (int l = 0; l < g.n(2); ++l, ++a) {
                double z2 = (g.v(2, l) - m.u[2]) / c;
                d.F()[a] += s.F()[a] * (k(0) + k(1) * z0 + k(2) * z1 + k(3) * z2 +
                                        k(4) * (z0 * z0 + z1 * z1 + z2 * z2));
            }
        }
    }
    return d;
}

/// One collision step: exchange source over dt/2, per-axis implicit
/// theta-scheme line solves for F and each G^i, exchange source over dt/2,
/// then restoration of (rho, rho u, E). theta = 1 is backward Euler.
inline void fp_step(ReducedState &s, const VelocityGrid &g, const Gas &gas, double dt, double tau_eff,
                    double theta = 1.0)
{
    if (!(dt > 0.0) || !(tau_eff > 0.0)) throw StepSizeError("fp_step: dt and tau_eff must be positive");
    Moments m = compute_moments(s, g, gas, false);
    Conserved c0 = conserved(s, g);
    FPOperator op(project_maxwellian(m, g, gas.R()), g, tau_eff);
    std::vector<double> ei(s.n_modes());
    for (size_t i = 0; i < s.n_modes(); ++i) ei[i] = gas.mode(i).e_int(m.T);
    double x = std::exp(-dt / tau_eff); // exp(-2 (dt/2) / tau)

    auto source = [&]() {
        for (size_t i = 0; i < s.n_modes(); ++i) {
            double *G = s.G(i);
            const double *F = s.F();
            for (size_t a = 0; a < s.nv(); ++a) {
                double Ge = ei[i] * F[a];
                G[a] = Ge + (G[a] - Ge) * x;
            }
        }
    };

    source();
    double h = dt / tau_eff;
    std::vector<double> tmp(s.nv());
    for (size_t comp = 0; comp < s.n_components(); ++comp) {
        double *y = s.component(comp);
        for (int d = 0; d < 3; ++d) {
            if (theta < 1.0) {
                std::copy(y, y + s.nv(), tmp.begin());
                detail::axis_apply(op.axes[d], op.layout[d], tmp.data(), y, (1.0 - theta) * h);
            }
            detail::axis_solve(op.axes[d], op.layout[d], y, theta * h);
        }
    }
    source();
    // theta < 1 can undershoot in the far tail; such nodes restart from the equilibrium ratio
    double *F = s.F();
    for (size_t a = 0; a < s.nv(); ++a) {
        bool bad = !(F[a] > 0.0);
        for (size_t i = 0; i < s.n_modes() && !bad; ++i) bad = !(s.G(i)[a] > 0.0);
        if (!bad) continue;
        F[a] = std::max(F[a], 0.0);
        for (size_t i = 0; i < s.n_modes(); ++i) s.G(i)[a] = ei[i] * F[a];
    }
    fp_moment_correction(s, g, m.u, op.pm.c, c0);
}

/// Discrete linearized operators acting on relative perturbations in the
/// scaled variable V, on the grid read as V (unit temperature, zero drift):
/// L_F(F1) = -V.grad F1 + lap F1 and L_G(F1, G1) = L_F(G1) + 2 (F1 - G1).
class LinearOps {
public:
    explicit LinearOps(const VelocityGrid &g) : g_(g)
    {
        for (int d = 0; d < 3; ++d) {
            std::vector<double> w(g.offsets(d)), m(w.size());
            for (size_t i = 0; i < w.size(); ++i) m[i] = std::exp(-0.5 * w[i] * w[i]);
            m_[d] = m;
            axes_[d] = FPAxis(w, m, g.dv(d));
            layout_[d] = detail::axis_layout(g, d);
        }
        M_.resize(g.size());
        size_t a = 0;
        for (int i = 0; i < g.n(0); ++i)
            for (int j = 0; j < g.n(1); ++j)
                for (int k = 0; k < g.n(2); ++k, ++a) M_[a] = m_[0][i] * m_[1][j] * m_[2][k];
    }

    std::vector<double> L_F(const std::vector<double> &F1) const
    {
        std::vector<double> f(F1.size()), y(F1.size(), 0.0);
        for (size_t a = 0; a < f.size(); ++a) f[a] = M_[a] * F1[a];
        for (int d = 0; d < 3; ++d) detail::axis_apply(axes_[d], layout_[d], f.data(), y.data(), 1.0);
        for (size_t a = 0; a < f.size(); ++a) y[a] /= M_[a];
        return y;
    }

    std::vector<double> L_G(const std::vector<double> &F1, const std::vector<double> &G1) const
    {
        auto y = L_F(G1);
        for (size_t a = 0; a < y.size(); ++a) y[a] += 2.0 * (F1[a] - G1[a]);
        return y;
    }

    /// True for nodes on the outermost layer of the velocity box.
    bool on_boundary(size_t a) const
    {
        int k = int(a % g_.n(2));
        int j = int((a / g_.n(2)) % g_.n(1));
        int i = int(a / (size_t(g_.n(1)) * g_.n(2)));
        return i == 0 || j == 0 || k == 0 || i == g_.n(0) - 1 || j == g_.n(1) - 1 || k == g_.n(2) - 1;
    }

    const VelocityGrid &grid() const { return g_; }

private:
    VelocityGrid g_;
    std::array<std::vector<double>, 3> m_;
    std::array<FPAxis, 3> axes_;
    std::array<detail::AxisLayout, 3> layout_;
    std::vector<double> M_;
};

} // namespace tpkin
