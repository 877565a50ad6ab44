#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "collide_fp.hpp"
#include "transport.hpp"

namespace tpkin {

struct TransportPrediction {
    CollisionModel model = CollisionModel::bgk;
    double mu = 0, kappa = 0, alpha = 0, Pr = 0;
};

/// Navier-Stokes coefficients of the two models at temperature T and pressure p.
inline TransportPrediction predict(CollisionModel model, double tau, double p, const Gas &gas, double T)
{
    if (!(p > 0.0)) throw DomainError("predict: pressure must be positive");
    TransportPrediction t;
    t.model = model;
    double cp = gas.c_p(T), cv = gas.c_v(T);
    if (model == CollisionModel::bgk) {
        t.mu = tau * p;
        t.kappa = t.mu * cp;
    } else {
        t.mu = 0.5 * tau * p;
        t.kappa = 2.0 / 3.0 * t.mu * cp;
    }
    t.alpha = cp / cv - 1.0;
    t.Pr = t.mu * cp / t.kappa;
    return t;
}

/// First-order source fields in the scaled variable V = (v - u) / sqrt(RT).
struct ABFields {
    std::array<std::vector<double>, 3> A, At;
    std::array<std::array<std::vector<double>, 3>, 3> B, Bt;
};

namespace detail {

// Fields at every node for scaled velocities V(i, j, k).
template <class VFn>
ABFields build_ab(const VelocityGrid &g, const Gas &gas, double T, VFn Vof)
{
    double R = gas.R();
    double cv = gas.c_v(T) / R;     // nondimensional
    double de = gas.c_v_int(T) / R; // e_int'(T) / R
    double ei = gas.e_int(T) / (R * T);
    double s = ei > 0.0 ? de / ei : 0.0; // T e_int' / e_int
    ABFields f;
    size_t n = g.size();
    for (int i = 0; i < 3; ++i) {
        f.A[i].resize(n);
        f.At[i].resize(n);
        for (int j = 0; j < 3; ++j) {
            f.B[i][j].resize(n);
            f.Bt[i][j].resize(n);
        }
    }
    size_t a = 0;
    for (int i = 0; i < g.n(0); ++i)
        for (int j = 0; j < g.n(1); ++j)
            for (int k = 0; k < g.n(2); ++k, ++a) {
                Vec3 V = Vof(i, j, k);
                double r2 = V[0] * V[0] + V[1] * V[1] + V[2] * V[2];
                double iso = 0.5 * r2 / cv + de / cv;
                for (int p = 0; p < 3; ++p) {
                    f.A[p][a] = (0.5 * r2 - 2.5) * V[p];
                    f.At[p][a] = (0.5 * r2 - 2.5 + s) * V[p];
                    for (int q = 0; q < 3; ++q) {
                        double b = V[p] * V[q] - (p == q ? iso : 0.0);
                        f.B[p][q][a] = b;
                        f.Bt[p][q][a] = b - (p == q ? s / cv : 0.0);
                    }
                }
            }
    return f;
}

} // namespace detail

/// A, B, A~, B~ at the nodes of a physical grid, with V = (v - u) / sqrt(RT).
inline ABFields ab_fields(const VelocityGrid &g, const Vec3 &u, double T, const Gas &gas)
{
    double c = std::sqrt(gas.R() * T);
    return detail::build_ab(g, gas, T, [&](int i, int j, int k) {
        return Vec3{(g.v(0, i) - u[0]) / c, (g.v(1, j) - u[1]) / c, (g.v(2, k) - u[2]) / c};
    });
}

/// Same fields on a grid read directly as V (node offsets), gas data at T.
inline ABFields ab_fields_scaled(const VelocityGrid &g, double T, const Gas &gas)
{
    return detail::build_ab(g, gas, T,
                            [&](int i, int j, int k) { return Vec3{g.offset(0, i), g.offset(1, j), g.offset(2, k)}; });
}

/// M0-weighted L2 norm over nodes off the outermost layer of the velocity box.
inline double interior_norm(const LinearOps &ops, const std::vector<double> &r)
{
    const auto &g = ops.grid();
    double s = 0;
    size_t a = 0;
    for (int i = 0; i < g.n(0); ++i)
        for (int j = 0; j < g.n(1); ++j)
            for (int k = 0; k < g.n(2); ++k, ++a) {
                if (ops.on_boundary(a)) continue;
                double x = g.offset(0, i), y = g.offset(1, j), z = g.offset(2, k);
                double m0 = std::pow(2 * M_PI, -1.5) * std::exp(-0.5 * (x * x + y * y + z * z));
                s += r[a] * r[a] * m0;
            }
    return std::sqrt(s * g.weight());
}

/// Residual norms of the four eigenrelations and of the closure ansatz with
/// coefficients (a, b) for fixed test gradients, on a grid read as V.
struct EigenResiduals {
    double LF_A = 0, LF_B = 0, LG_A = 0, LG_B = 0, closure_F = 0, closure_G = 0;
};

inline EigenResiduals eigen_residuals(const VelocityGrid &g, const Gas &gas, double T, double a_coef, double b_coef)
{
    LinearOps ops(g);
    auto f = ab_fields_scaled(g, T, gas);
    EigenResiduals r;
    size_t n = g.size();
    auto sq = [](double x) { return x * x; };
    double sA = 0, sB = 0, sGA = 0, sGB = 0;
    for (int p = 0; p < 3; ++p) {
        auto l = ops.L_F(f.A[p]);
        for (size_t i = 0; i < n; ++i) l[i] += 3.0 * f.A[p][i];
        sA += sq(interior_norm(ops, l));
        auto lg = ops.L_G(f.A[p], f.At[p]);
        for (size_t i = 0; i < n; ++i) lg[i] += 3.0 * f.At[p][i];
        sGA += sq(interior_norm(ops, lg));
        for (int q = 0; q < 3; ++q) {
            auto lb = ops.L_F(f.B[p][q]);
            for (size_t i = 0; i < n; ++i) lb[i] += 2.0 * f.B[p][q][i];
            sB += sq(interior_norm(ops, lb));
            auto lgb = ops.L_G(f.B[p][q], f.Bt[p][q]);
            for (size_t i = 0; i < n; ++i) lgb[i] += 2.0 * f.Bt[p][q][i];
            sGB += sq(interior_norm(ops, lgb));
        }
    }
    r.LF_A = std::sqrt(sA);
    r.LF_B = std::sqrt(sB);
    r.LG_A = std::sqrt(sGA);
    r.LG_B = std::sqrt(sGB);

    // closure: F1 = a A.g + b B:D, G1 = a At.g + b Bt:D against L_F(F1) = A.g + B:D
    const double gT[3] = {0.7, -0.4, 0.25};
    const double D[3][3] = {{0.3, -0.5, 0.2}, {0.6, -0.1, 0.4}, {-0.3, 0.15, -0.2}};
    std::vector<double> F1(n, 0.0), G1(n, 0.0), SF(n, 0.0), SG(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        for (int p = 0; p < 3; ++p) {
            SF[i] += f.A[p][i] * gT[p];
            SG[i] += f.At[p][i] * gT[p];
            for (int q = 0; q < 3; ++q) {
                // B : grad u = B_kl d_l u_k with D[k][l] = d u_k / d x_l
                SF[i] += f.B[p][q][i] * D[p][q];
                SG[i] += f.Bt[p][q][i] * D[p][q];
            }
        }
        double fa = 0, fb = 0, ga = 0, gb = 0;
        for (int p = 0; p < 3; ++p) {
            fa += f.A[p][i] * gT[p];
            ga += f.At[p][i] * gT[p];
            for (int q = 0; q < 3; ++q) {
                fb += f.B[p][q][i] * D[p][q];
                gb += f.Bt[p][q][i] * D[p][q];
            }
        }
        F1[i] = a_coef * fa + b_coef * fb;
        G1[i] = a_coef * ga + b_coef * gb;
    }
    auto lf = ops.L_F(F1);
    auto lg = ops.L_G(F1, G1);
    for (size_t i = 0; i < n; ++i) {
        lf[i] -= SF[i];
        lg[i] -= SG[i];
    }
    r.closure_F = interior_norm(ops, lf);
    r.closure_G = interior_norm(ops, lg);
    return r;
}

/// Observed convergence order from errors at two spacings.
inline double observed_order(double e_coarse, double e_fine, double h_coarse, double h_fine)
{
    return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

// ---------------------------------------------------------------------------
// Exact Riemann solver for a calorically perfect gas.

struct PrimState {
    double rho, u, p;
};

class RiemannSolver {
public:
    RiemannSolver(PrimState L, PrimState R, double gamma) : L_(L), R_(R), g_(gamma)
    {
        aL_ = std::sqrt(g_ * L.p / L.rho);
        aR_ = std::sqrt(g_ * R.p / R.rho);
        if (2.0 * (aL_ + aR_) / (g_ - 1.0) <= R.u - L.u) throw DomainError("Riemann problem generates vacuum");
        p_star_ = star_pressure_newton();
        u_star_ = 0.5 * (L.u + R.u) + 0.5 * (side(p_star_, R_, aR_).first - side(p_star_, L_, aL_).first);
    }

    double p_star() const { return p_star_; }
    double u_star() const { return u_star_; }

    /// Pressure function f_L(p) + f_R(p) + u_R - u_L.
    double pressure_function(double p) const
    {
        return side(p, L_, aL_).first + side(p, R_, aR_).first + R_.u - L_.u;
    }

    /// Star pressure by bisection on the pressure function.
    double star_pressure_bisection(double tol = 1e-15) const
    {
        double lo = 1e-14, hi = std::max(L_.p, R_.p);
        while (pressure_function(hi) < 0.0) hi *= 2.0;
        for (int it = 0; it < 400 && hi - lo > tol * hi; ++it) {
            double mid = 0.5 * (lo + hi);
            if (pressure_function(mid) > 0.0) hi = mid; else lo = mid;
        }
        return 0.5 * (lo + hi);
    }

    /// Self-similar solution at x / t = xi.
    PrimState sample(double xi) const
    {
        double g = g_;
        if (xi <= u_star_) {
            const PrimState &K = L_;
            double a = aL_;
            if (p_star_ > K.p) {
                double pr = p_star_ / K.p;
                double S = K.u - a * std::sqrt((g + 1) / (2 * g) * pr + (g - 1) / (2 * g));
                if (xi <= S) return K;
                double rho = K.rho * (pr + (g - 1) / (g + 1)) / ((g - 1) / (g + 1) * pr + 1);
                return {rho, u_star_, p_star_};
            }
            double head = K.u - a;
            double astar = a * std::pow(p_star_ / K.p, (g - 1) / (2 * g));
            double tail = u_star_ - astar;
            if (xi <= head) return K;
            if (xi >= tail) return {K.rho * std::pow(p_star_ / K.p, 1 / g), u_star_, p_star_};
            double c = 2 / (g + 1) + (g - 1) / ((g + 1) * a) * (K.u - xi);
            return {K.rho * std::pow(c, 2 / (g - 1)), 2 / (g + 1) * (a + (g - 1) / 2 * K.u + xi),
                    K.p * std::pow(c, 2 * g / (g - 1))};
        }
        const PrimState &K = R_;
        double a = aR_;
        if (p_star_ > K.p) {
            double pr = p_star_ / K.p;
            double S = K.u + a * std::sqrt((g + 1) / (2 * g) * pr + (g - 1) / (2 * g));
            if (xi >= S) return K;
            double rho = K.rho * (pr + (g - 1) / (g + 1)) / ((g - 1) / (g + 1) * pr + 1);
            return {rho, u_star_, p_star_};
        }
        double head = K.u + a;
        double astar = a * std::pow(p_star_ / K.p, (g - 1) / (2 * g));
        double tail = u_star_ + astar;
        if (xi >= head) return K;
        if (xi <= tail) return {K.rho * std::pow(p_star_ / K.p, 1 / g), u_star_, p_star_};
        double c = 2 / (g + 1) - (g - 1) / ((g + 1) * a) * (K.u - xi);
        return {K.rho * std::pow(c, 2 / (g - 1)), 2 / (g + 1) * (-a + (g - 1) / 2 * K.u + xi),
                K.p * std::pow(c, 2 * g / (g - 1))};
    }

private:
    // (f_K(p), f_K'(p))
    std::pair<double, double> side(double p, const PrimState &K, double a) const
    {
        double g = g_;
        if (p > K.p) {
            double A = 2 / ((g + 1) * K.rho), B = (g - 1) / (g + 1) * K.p;
            double q = std::sqrt(A / (p + B));
            return {(p - K.p) * q, q * (1 - 0.5 * (p - K.p) / (B + p))};
        }
        double pr = p / K.p;
        return {2 * a / (g - 1) * (std::pow(pr, (g - 1) / (2 * g)) - 1),
                1 / (K.rho * a) * std::pow(pr, -(g + 1) / (2 * g))};
    }

    double star_pressure_newton() const
    {
        double p = std::max(1e-12, 0.5 * (L_.p + R_.p));
        for (int it = 0; it < 100; ++it) {
            auto l = side(p, L_, aL_), r = side(p, R_, aR_);
            double f = l.first + r.first + R_.u - L_.u;
            double pn = p - f / (l.second + r.second);
            if (pn < 0) pn = 1e-12;
            if (std::abs(pn - p) <= 1e-15 * 0.5 * (pn + p)) return pn;
            p = pn;
        }
        throw NumericalError("Riemann solver: Newton iteration did not converge");
    }

    PrimState L_, R_;
    double g_, aL_ = 0, aR_ = 0, p_star_ = 0, u_star_ = 0;
};

// ---------------------------------------------------------------------------
// Coefficient-extraction experiments.

/// Least-squares slope and mean of y over cells whose centers lie in the core fraction.
struct CoreFit {
    double slope = 0, intercept = 0, mean = 0;
};

inline CoreFit core_fit(const SpatialMesh &mesh, const std::vector<double> &y, const std::vector<double> &flux,
                        double core, double *flux_mean)
{
    double L = mesh.x_max - mesh.x_min;
    double lo = mesh.x_min + 0.5 * (1 - core) * L, hi = mesh.x_max - 0.5 * (1 - core) * L;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, sf = 0;
    int n = 0;
    for (int i = 0; i < mesh.n_cells; ++i) {
        double x = mesh.x(i);
        if (x < lo || x > hi) continue;
        sx += x;
        sy += y[i];
        sxx += x * x;
        sxy += x * y[i];
        sf += flux.empty() ? 0.0 : flux[i];
        ++n;
    }
    CoreFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    f.mean = sy / n;
    if (flux_mean) *flux_mean = sf / n;
    return f;
}

/// Gas used by the channel experiments: R = 1, one rotational mode.
inline Gas channel_gas() { return Gas(1.0, {EnergyModel::rotational(1.0, 1e-3, 1e3)}, 1e-3, 1e3); }

struct ChannelSetup {
    Gas gas = channel_gas();
    double rho0 = 1.0, T0 = 1.0, x_min = 0.0, length = 1.0, tau = 1.0;
    CollisionModel model = CollisionModel::bgk;
    double kn = 0.005;
    int n_cells = 100;
    int n_v = 32;
    double span = 6.0;
    double wall_speed = 0.1;  // Couette: walls at -U/2 and +U/2
    double delta_T = 0.05;    // Fourier: walls at 1 -+ dT/2
    double theta = 0.5;
    double cfl = 0.9;
    double core = 0.6;
    int window = 100;
    double threshold = 1e-6;
    long max_steps = 200000;
    int order = 2;
    // two-mode polynomial extrapolation on states averaged over one acoustic round trip,
    // so standing sound waves are neither extrapolated nor excited
    bool accelerate = true;
    int max_extrapolations = 8;
    double max_amplification = 200; // reject jumps longer than this many last block increments
    std::function<void(long, double)> progress; // (step, relative change)
    std::function<void(const Solver &)> observer; // called once per window
    std::function<void(const Solver &)> finish;   // called once with the final state
};

struct ChannelResult {
    bool converged = false;
    long steps = 0;
    double time = 0;
    double gradient = 0;   // du_y/dx or dT/dx over the core
    double flux = 0;       // mean sigma_xy or q_x over the core
    double coefficient = 0; // -flux / gradient
    double p_core = 0;
    double T_core = 0;
    double tau_eff = 0;
    double last_change = 0;
    int extrapolations = 0;
    std::vector<Moments> profile;
};

namespace detail {

// Chapman-Enskog state with a linear profile: shear du_y/dx and gradient dT/dx.
inline void ce_fill(ReducedState &s, const VelocityGrid &g, const Gas &gas, CollisionModel model, double tau_eff,
                    double rho, Vec3 u, double T, double dudx, double dTdx)
{
    double R = gas.R(), c = std::sqrt(R * T);
    auto pm = project_maxwellian(rho, u, T, R, g);
    pm.fill(s.F());
    double de = gas.c_v_int(T) / R, ei = gas.e_int(T) / (R * T);
    double sfac = de / ei;
    // BGK: F1 = -tau (A.g + B:D); FP: F1 = tau (-(1/3) A.g - (1/2) B:D)
    double ka = model == CollisionModel::bgk ? -1.0 : -1.0 / 3.0;
    double kb = model == CollisionModel::bgk ? -1.0 : -0.5;
    double gx = dTdx * c / T;
    size_t a = 0;
    for (int i = 0; i < g.n(0); ++i)
        for (int j = 0; j < g.n(1); ++j)
            for (int k = 0; k < g.n(2); ++k, ++a) {
                double V0 = (g.v(0, i) - u[0]) / c, V1 = (g.v(1, j) - u[1]) / c, V2 = (g.v(2, k) - u[2]) / c;
                double r2 = V0 * V0 + V1 * V1 + V2 * V2;
                double A0 = (0.5 * r2 - 2.5) * V0;
                double At0 = A0 + sfac * V0;
                double B10 = V1 * V0; // B_yx, off-diagonal
                double F1 = tau_eff * (ka * A0 * gx + kb * B10 * dudx);
                double G1 = tau_eff * (ka * At0 * gx + kb * B10 * dudx);
                double M = s.F()[a];
                s.F()[a] = M * (1.0 + F1);
                for (size_t m = 0; m < s.n_modes(); ++m) s.G(m)[a] = gas.mode(m).e_int(T) * M * (1.0 + G1);
            }
}

} // namespace detail

/// Steady planar Couette (shear) or Fourier (conduction) run between diffuse walls.
inline ChannelResult run_channel(const ChannelSetup &cs, bool couette)
{
    const Gas &gas = cs.gas;
    const double R = gas.R(), rho0 = cs.rho0, T0 = cs.T0, tau = cs.tau;
    auto grid = build_grid({0, 0, 0}, T0, R, cs.n_v, cs.span);
    SpatialMesh mesh;
    mesh.n_cells = cs.n_cells;
    mesh.x_min = cs.x_min;
    mesh.x_max = cs.x_min + cs.length;
    mesh.boundary = BoundaryKind::diffuse_wall;
    if (couette) {
        mesh.left = {T0, {0, -0.5 * cs.wall_speed, 0}};
        mesh.right = {T0, {0, 0.5 * cs.wall_speed, 0}};
    } else {
        mesh.left = {T0 - 0.5 * cs.delta_T, {0, 0, 0}};
        mesh.right = {T0 + 0.5 * cs.delta_T, {0, 0, 0}};
    }
    StepParams sp;
    sp.model = cs.model;
    sp.law.tau = tau;
    sp.kn = cs.kn;
    sp.theta = cs.theta;
    sp.order = cs.order;
    Solver solver(gas, grid, mesh, sp);

    double tau_eff = cs.kn * tau;
    auto pred = predict(cs.model, tau_eff, rho0 * R * T0, gas, T0);
    // slip / jump lengths of order a mean free path
    double mfp = pred.mu / (rho0 * R * T0) * std::sqrt(0.5 * M_PI * R * T0);
    double L = mesh.x_max - mesh.x_min;
    double dudx = 0, dTdx = 0;
    if (couette) dudx = cs.wall_speed / (L + 2.0 * mfp);
    else dTdx = cs.delta_T / (L + 2.0 * 2.0 * mfp * pred.kappa / (pred.mu * gas.c_p(T0)) / pred.Pr);
    solver.fill([&](int i, ReducedState &s) {
        double xc = mesh.x(i) - 0.5 * (mesh.x_min + mesh.x_max);
        double T = T0 + dTdx * xc;
        detail::ce_fill(s, grid, gas, cs.model, tau_eff, rho0 * T0 / T, {0, dudx * xc, 0}, T, dudx, dTdx);
    });

    double dt = solver.max_dt(cs.cfl);
    ChannelResult res;
    res.tau_eff = tau_eff;
    double prev = NAN;
    int calm = 0;
    auto measure = [&](ChannelResult &r) {
        auto ms = solver.moments(true);
        std::vector<double> y(ms.size()), fl(ms.size());
        for (size_t i = 0; i < ms.size(); ++i) {
            y[i] = couette ? ms[i].u[1] : ms[i].T;
            fl[i] = couette ? ms[i].sigma[0][1] : ms[i].q[0];
        }
        double fm = 0;
        auto fit = core_fit(mesh, y, fl, cs.core, &fm);
        std::vector<double> pv(ms.size()), Tv(ms.size());
        for (size_t i = 0; i < ms.size(); ++i) {
            pv[i] = ms[i].p;
            Tv[i] = ms[i].T;
        }
        r.p_core = core_fit(mesh, pv, {}, cs.core, nullptr).mean;
        r.T_core = core_fit(mesh, Tv, {}, cs.core, nullptr).mean;
        r.gradient = fit.slope;
        r.flux = fm;
        r.coefficient = -fm / fit.slope;
        r.profile = std::move(ms);
    };
    // block averages over one acoustic round trip, oldest first
    const double c_sound = std::sqrt(gas.c_p(T0) / gas.c_v(T0) * R * T0);
    const long block = std::max(1L, std::lround(2.0 * L / c_sound / dt));
    std::vector<double> acc, snap;
    std::vector<std::vector<double>> B(4); // last four round-trip averages, oldest first
    long in_block = 0;
    int blocks = 0;
    while (solver.steps() < cs.max_steps) {
        solver.step(dt);
        if (cs.accelerate && res.extrapolations < cs.max_extrapolations) {
            solver.export_state(snap);
            if (acc.size() != snap.size()) acc.assign(snap.size(), 0.0);
            for (size_t k = 0; k < snap.size(); ++k) acc[k] += snap[k];
            if (++in_block == block) {
                std::rotate(B.begin(), B.begin() + 1, B.end());
                B[3].resize(acc.size());
                for (size_t k = 0; k < acc.size(); ++k) {
                    B[3][k] = acc[k] / double(block);
                    acc[k] = 0.0;
                }
                in_block = 0;
                ++blocks;
            }
        }
        if (solver.steps() % cs.window == 0) {
            measure(res);
            double change = std::abs(res.flux - prev) / std::abs(res.flux);
            res.last_change = change;
            prev = res.flux;
            if (cs.progress) cs.progress(solver.steps(), change);
            if (cs.observer) cs.observer(solver);
            calm = change < cs.threshold ? calm + 1 : 0;
            if (calm >= 2) {
                res.converged = true;
                break;
            }
        }
        if (in_block != 0 || blocks < 4) continue;
        // two-mode minimal polynomial extrapolation: c0 d0 + c1 d1 + d2 ~ 0 in least squares
        const size_t N = B[3].size();
        Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
        Eigen::Vector2d r = Eigen::Vector2d::Zero();
        double d2n = 0;
        for (size_t k = 0; k < N; ++k) {
            double d0 = B[1][k] - B[0][k], d1 = B[2][k] - B[1][k], d2 = B[3][k] - B[2][k];
            A(0, 0) += d0 * d0;
            A(0, 1) += d0 * d1;
            A(1, 1) += d1 * d1;
            r(0) -= d0 * d2;
            r(1) -= d1 * d2;
            d2n += d2 * d2;
        }
        A(1, 0) = A(0, 1);
        Eigen::Vector2d c = A.ldlt().solve(r);
        double sum = c(0) + c(1) + 1.0;
        blocks = 0;
        // a root of the fitted polynomial at or beyond 1 means no contracting mode to jump along
        if (!std::isfinite(sum) || sum < 1e-3) continue;
        double g0 = c(0) / sum, g1 = c(1) / sum, g2 = 1.0 / sum, jump = 0;
        for (size_t k = 0; k < N; ++k) {
            double x = g0 * B[1][k] + g1 * B[2][k] + g2 * B[3][k];
            jump += (x - B[3][k]) * (x - B[3][k]);
            B[0][k] = x;
        }
        if (!(std::sqrt(jump) < cs.max_amplification * std::sqrt(d2n))) continue;
        solver.import_state(B[0]);
        solver.clip_negative();
        ++res.extrapolations;
        calm = 0;
        prev = NAN;
    }
    res.steps = solver.steps();
    res.time = solver.time();
    if (cs.finish) cs.finish(solver);
    return res;
}

struct SodSetup {
    Gas gas = channel_gas(); // must be calorically perfect
    PrimState left{1.0, 0.0, 1.0}, right{0.125, 0.0, 0.1};
    double x_min = 0.0, length = 1.0, x_split = 0.5;
    double u_ref = 0.45, T_ref = 1.0; // velocity-grid center and width scale
    double tau = 1.0;
    CollisionModel model = CollisionModel::bgk;
    double theta = 0.5;
    double kn = 0.01;
    int n_cells = 200;
    int n_v = 32;
    double span = 6.0;
    double t_end = 0.2;
    double cfl = 0.9;
    int order = 2;
    std::function<void(const Solver &)> observer; // called after every step
};

struct SodResult {
    double l1_rho = 0, l1_u = 0, l1_T = 0;
    long steps = 0;
    std::vector<Moments> profile;
    std::vector<PrimState> exact;
};

/// Sod shock tube with a calorically perfect diatomic gas (e_int = RT).
inline SodResult run_sod(const SodSetup &ss)
{
    const Gas &gas = ss.gas;
    const double R = gas.R();
    for (size_t m = 0; m < gas.n_modes(); ++m)
        if (gas.mode(m).kind() != EnergyKind::rotational)
            throw DomainError("run_sod: the exact solution needs a calorically perfect gas");
    const double gamma = gas.c_p(ss.T_ref) / gas.c_v(ss.T_ref);
    const PrimState left = ss.left, right = ss.right;
    auto grid = build_grid({ss.u_ref, 0, 0}, ss.T_ref, R, ss.n_v, ss.span);
    SpatialMesh mesh;
    mesh.n_cells = ss.n_cells;
    mesh.x_min = ss.x_min;
    mesh.x_max = ss.x_min + ss.length;
    mesh.boundary = BoundaryKind::inflow_outflow;
    StepParams sp;
    sp.model = ss.model;
    sp.theta = ss.theta;
    sp.kn = ss.kn;
    sp.law.tau = ss.tau;
    sp.order = ss.order;
    Solver solver(gas, grid, mesh, sp);
    auto eq = [&](const PrimState &P, ReducedState &s) {
        double T = P.p / (P.rho * R);
        set_equilibrium(s, project_maxwellian(P.rho, {P.u, 0, 0}, T, R, grid), gas);
    };
    const double xs = ss.x_min + ss.x_split * ss.length;
    solver.fill([&](int i, ReducedState &s) { eq(mesh.x(i) < xs ? left : right, s); });
    eq(left, solver.ghost(-1));
    eq(left, solver.ghost(-2));
    eq(right, solver.ghost(mesh.n_cells));
    eq(right, solver.ghost(mesh.n_cells + 1));
    double dt0 = solver.max_dt(ss.cfl);
    while (solver.time() < ss.t_end * (1 - 1e-14)) {
        double dt = std::min(dt0, ss.t_end - solver.time());
        solver.step(dt);
        if (ss.observer) ss.observer(solver);
    }
    RiemannSolver rs(left, right, gamma);
    SodResult out;
    out.steps = solver.steps();
    out.profile = solver.moments(false);
    double dx = mesh.dx();
    for (int i = 0; i < mesh.n_cells; ++i) {
        auto ex = rs.sample((mesh.x(i) - xs) / ss.t_end);
        out.exact.push_back(ex);
        const auto &m = out.profile[i];
        out.l1_rho += std::abs(m.rho - ex.rho) * dx;
        out.l1_u += std::abs(m.u[0] - ex.u) * dx;
        out.l1_T += std::abs(m.T - ex.p / (ex.rho * R)) * dx;
    }
    return out;
}

} // namespace tpkin
