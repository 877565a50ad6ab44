#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"

namespace tpkin {

using Vec3 = std::array<double, 3>;

/// Uniform Cartesian velocity lattice with midpoint nodes.
///
/// Node (i, j, k) has flat index (i * n[1] + j) * n[2] + k. Coordinates are
/// stored as center + offset, where the offsets are exactly antisymmetric.
class VelocityGrid {
public:
    VelocityGrid() = default;

    VelocityGrid(Vec3 center, Vec3 half_width, std::array<int, 3> n) : center_(center), n_(n)
    {
        for (int d = 0; d < 3; ++d) {
            if (n[d] < 8) throw DomainError("velocity grid needs at least 8 nodes per axis");
            if (!(half_width[d] > 0.0)) throw DomainError("velocity grid needs positive extent");
            dv_[d] = 2.0 * half_width[d] / n[d];
            off_[d].resize(n[d]);
            v_[d].resize(n[d]);
            for (int i = 0; i < n[d]; ++i) {
                off_[d][i] = (i - 0.5 * (n[d] - 1)) * dv_[d];
                v_[d][i] = center[d] + off_[d][i];
            }
        }
        size_ = size_t(n[0]) * n[1] * n[2];
    }

    int n(int d) const { return n_[d]; }
    size_t size() const { return size_; }
    double dv(int d) const { return dv_[d]; }
    double weight() const { return dv_[0] * dv_[1] * dv_[2]; }
    const Vec3 &center() const { return center_; }
    double v_min(int d) const { return center_[d] - 0.5 * n_[d] * dv_[d]; }
    double v_max(int d) const { return center_[d] + 0.5 * n_[d] * dv_[d]; }
    double v(int d, int i) const { return v_[d][i]; }
    double offset(int d, int i) const { return off_[d][i]; }
    const std::vector<double> &axis(int d) const { return v_[d]; }
    const std::vector<double> &offsets(int d) const { return off_[d]; }
    size_t index(int i, int j, int k) const { return (size_t(i) * n_[1] + j) * n_[2] + k; }
    double max_abs_v(int d) const { return std::max(std::abs(v_[d].front()), std::abs(v_[d].back())); }

    /// Midpoint-rule quadrature, summed in node order.
    double integrate(const double *psi) const
    {
        double s = 0.0;
        const size_t n = size_;
#pragma omp simd reduction(+ : s)
        for (size_t a = 0; a < n; ++a) s += psi[a];
        return s * weight();
    }
    double integrate(const std::vector<double> &psi) const { return integrate(psi.data()); }

    /// Quadrature of psi * f(v) for a node function f.
    template <class Fn>
    double integrate_with(const double *psi, Fn f) const
    {
        double s = 0.0;
        size_t a = 0;
        for (int i = 0; i < n_[0]; ++i)
            for (int j = 0; j < n_[1]; ++j)
                for (int k = 0; k < n_[2]; ++k, ++a) s += psi[a] * f(Vec3{v_[0][i], v_[1][j], v_[2][k]});
        return s * weight();
    }

    /// Tabulate f(v) at every node.
    template <class Fn>
    std::vector<double> tabulate(Fn f) const
    {
        std::vector<double> out(size_);
        size_t a = 0;
        for (int i = 0; i < n_[0]; ++i)
            for (int j = 0; j < n_[1]; ++j)
                for (int k = 0; k < n_[2]; ++k, ++a) out[a] = f(Vec3{v_[0][i], v_[1][j], v_[2][k]});
        return out;
    }

private:
    Vec3 center_{};
    std::array<int, 3> n_{};
    Vec3 dv_{};
    size_t size_ = 0;
    std::array<std::vector<double>, 3> off_, v_;
};

/// Grid with bounds u_ref +- span * sqrt(R T_ref) on each axis.
inline VelocityGrid build_grid(Vec3 u_ref, double T_ref, double R, int n, double span)
{
    if (n < 8) throw DomainError("build_grid: n must be >= 8");
    if (!(span >= 3.0)) throw DomainError("build_grid: span must be >= 3");
    if (!(T_ref > 0.0 && R > 0.0)) throw DomainError("build_grid: T_ref and R must be positive");
    double h = span * std::sqrt(R * T_ref);
    return VelocityGrid(u_ref, {h, h, h}, {n, n, n});
}

struct GaussianIdentity {
    std::string name;
    double error; // max absolute error over components
};

struct GaussianIdentityReport {
    std::vector<GaussianIdentity> items;
    double max_error() const
    {
        double m = 0.0;
        for (auto &i : items) m = std::max(m, i.error);
        return m;
    }
    bool passed(double tol) const { return max_error() <= tol; }
};

/// Standard Gaussian moment identities evaluated by quadrature on a grid
/// in the scaled variable (the grid is read as V directly, centered at 0).
inline GaussianIdentityReport gaussian_identity_suite(const VelocityGrid &g, const std::array<std::array<double, 3>, 3> &C)
{
    const double norm = std::pow(2.0 * M_PI, -1.5);
    auto M0 = g.tabulate([&](const Vec3 &v) {
        double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        return norm * std::exp(-0.5 * r2);
    });
    auto r2 = [](const Vec3 &v) { return v[0] * v[0] + v[1] * v[1] + v[2] * v[2]; };
    auto I = [&](auto f) { return g.integrate_with(M0.data(), f); };
    auto delta = [](int i, int j) { return i == j ? 1.0 : 0.0; };

    GaussianIdentityReport rep;
    rep.items.push_back({"<M0> = 1", std::abs(I([](const Vec3 &) { return 1.0; }) - 1.0)});

    double e2 = 0, e22 = 0, e2r = 0, e4r = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            e2 = std::max(e2, std::abs(I([&](const Vec3 &v) { return v[i] * v[j]; }) - delta(i, j)));
            e22 = std::max(e22, std::abs(I([&](const Vec3 &v) { return v[i] * v[i] * v[j] * v[j]; }) -
                                         (1.0 + 2.0 * delta(i, j))));
            e2r = std::max(e2r, std::abs(I([&](const Vec3 &v) { return v[i] * v[j] * r2(v); }) - 5.0 * delta(i, j)));
            e4r = std::max(e4r, std::abs(I([&](const Vec3 &v) { return v[i] * v[j] * r2(v) * r2(v); }) -
                                         35.0 * delta(i, j)));
        }
    rep.items.push_back({"<V_i V_j M0> = delta_ij", e2});
    rep.items.push_back({"<|V|^2 M0> = 3", std::abs(I(r2) - 3.0)});
    rep.items.push_back({"<V_i^2 V_j^2 M0> = 1 + 2 delta_ij", e22});
    rep.items.push_back({"<V_i V_j |V|^2 M0> = 5 delta_ij", e2r});
    rep.items.push_back({"<|V|^4 M0> = 15", std::abs(I([&](const Vec3 &v) { return r2(v) * r2(v); }) - 15.0)});
    rep.items.push_back({"<V_i V_j |V|^4 M0> = 35 delta_ij", e4r});
    rep.items.push_back(
        {"<|V|^6 M0> = 105", std::abs(I([&](const Vec3 &v) { return r2(v) * r2(v) * r2(v); }) - 105.0)});

    double tr = C[0][0] + C[1][1] + C[2][2];
    double em = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double val = I([&](const Vec3 &v) {
                double q = 0;
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) q += C[k][l] * v[k] * v[l];
                return v[i] * v[j] * q;
            });
            em = std::max(em, std::abs(val - (C[i][j] + C[j][i] + tr * delta(i, j))));
        }
    rep.items.push_back({"<V_i V_j C_kl V_k V_l M0> = C_ij + C_ji + C_kk delta_ij", em});
    return rep;
}

} // namespace tpkin
