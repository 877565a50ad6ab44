#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "collide_bgk.hpp"
#include "collide_fp.hpp"
#include "entropy.hpp"
#include "state.hpp"

namespace tpkin {

enum class BoundaryKind { periodic, diffuse_wall, inflow_outflow };

struct WallState {
    double T = 1.0;
    Vec3 u{}; // tangential components only
};

struct SpatialMesh {
    int n_cells = 1;
    double x_min = 0.0, x_max = 1.0;
    BoundaryKind boundary = BoundaryKind::periodic;
    WallState left, right; // used by diffuse walls

    double dx() const { return (x_max - x_min) / n_cells; }
    double x(int i) const { return x_min + (i + 0.5) * dx(); }
};

enum class Splitting { strang, lie };

struct StepParams {
    CollisionModel model = CollisionModel::bgk;
    TauLaw law;
    double kn = 1.0;
    double theta = 1.0;   // FP line-solve implicitness
    int order = 2;        // 1: upwind, 2: minmod MUSCL-Hancock
    Splitting splitting = Splitting::strang;
};

namespace detail {

inline double minmod(double a, double b)
{
    // branch-free so the node loops vectorize
    return (std::copysign(0.5, a) + std::copysign(0.5, b)) * std::min(std::abs(a), std::abs(b));
}

} // namespace detail

/// Discrete-velocity solver on a 1D mesh; x is the first velocity axis.
class Solver {
public:
    static constexpr int kGhost = 2;

    Solver(Gas gas, VelocityGrid grid, SpatialMesh mesh, StepParams params)
        : gas_(std::move(gas)), grid_(std::move(grid)), mesh_(mesh), par_(params)
    {
        if (mesh_.n_cells < 1) throw DomainError("mesh needs at least one cell");
        if (!(mesh_.dx() > 0.0)) throw DomainError("mesh needs x_max > x_min");
        cells_.assign(mesh_.n_cells + 2 * kGhost, ReducedState(grid_.size(), gas_.n_modes()));
        block_ = size_t(grid_.n(1)) * grid_.n(2);
    }

    const Gas &gas() const { return gas_; }
    const VelocityGrid &grid() const { return grid_; }
    const SpatialMesh &mesh() const { return mesh_; }
    const StepParams &params() const { return par_; }
    StepParams &params() { return par_; }
    int n_cells() const { return mesh_.n_cells; }
    ReducedState &cell(int i) { return cells_[i + kGhost]; }
    const ReducedState &cell(int i) const { return cells_[i + kGhost]; }
    /// Ghost cell i in {-2, -1, n, n + 1}; frozen for inflow-outflow boundaries.
    ReducedState &ghost(int i) { return cells_[i + kGhost]; }
    double time() const { return time_; }
    long steps() const { return steps_; }
    long clipped_nodes() const { return clipped_; }

    double max_dt(double cfl) const { return cfl * mesh_.dx() / grid_.max_abs_v(0); }

    /// Transport over dt for every velocity node and component.
    void advect(double dt)
    {
        double nu_max = dt * grid_.max_abs_v(0) / mesh_.dx();
        if (nu_max > 1.0 + 1e-12)
            throw StepSizeError("advect: CFL number " + detail::num(nu_max) + " exceeds 1");
        fill_ghosts();
        const int n = mesh_.n_cells;
        const size_t nv = grid_.size();
        const double lam = dt / mesh_.dx();
        const bool second = par_.order >= 2;
        // one x-velocity slab at a time so the face fluxes stay in cache
        const size_t bl = block_;
        flux_.resize(size_t(n + 1) * bl);
        for (size_t comp = 0; comp < 1 + gas_.n_modes(); ++comp) {
            for (int i0 = 0; i0 < grid_.n(0); ++i0) {
                const double vx = grid_.v(0, i0);
                const double nu = std::abs(vx) * lam;
                const double half = second ? 0.5 * (1.0 - nu) : 0.0;
                const size_t off = size_t(i0) * bl;
                for (int f = 0; f <= n; ++f) {
                    // cells f-1 (left of face) and f (right of face) in interior numbering
                    double *fl = flux_.data() + size_t(f) * bl;
                    const double *Lm = cells_[f - 2 + kGhost].component(comp) + off;
                    const double *L0 = cells_[f - 1 + kGhost].component(comp) + off;
                    const double *R0 = cells_[f + kGhost].component(comp) + off;
                    const double *Rp = cells_[f + 1 + kGhost].component(comp) + off;
                    if (vx > 0.0) {
#pragma omp simd
                        for (size_t a = 0; a < bl; ++a)
                            fl[a] = vx * (L0[a] + half * detail::minmod(L0[a] - Lm[a], R0[a] - L0[a]));
                    } else {
#pragma omp simd
                        for (size_t a = 0; a < bl; ++a)
                            fl[a] = vx * (R0[a] - half * detail::minmod(R0[a] - L0[a], Rp[a] - R0[a]));
                    }
                }
                for (int c = 0; c < n; ++c) {
                    double *u = cells_[c + kGhost].component(comp) + off;
                    const double *fl = flux_.data() + size_t(c) * bl;
                    const double *fr = fl + bl;
#pragma omp simd
                    for (size_t a = 0; a < bl; ++a) u[a] -= lam * (fr[a] - fl[a]);
                }
            }
        }
        for (int c = 0; c < n; ++c) {
            double *F = cell(c).F();
            for (size_t a = 0; a < nv; ++a)
                if (F[a] < 0.0) {
                    F[a] = 0.0;
                    ++clipped_;
                }
        }
    }

    /// Collision over dt in every interior cell.
    void collide(double dt)
    {
        for (int c = 0; c < mesh_.n_cells; ++c) {
            auto &s = cell(c);
            try {
                Moments m = compute_moments(s, grid_, gas_, false);
                double tau = tau_law(m, par_.law, par_.model, par_.kn);
                if (par_.model == CollisionModel::bgk)
                    bgk_step_exact(s, grid_, gas_, dt, tau);
                else
                    fp_step(s, grid_, gas_, dt, tau, par_.theta);
            } catch (const Error &e) {
                throw NumericalError(std::string(e.what()) + " [cell " + std::to_string(c) + ", step " +
                                     std::to_string(steps_) + "]");
            }
        }
    }

    /// One split step. `around_collide(false)` runs just before the collision
    /// stage and `around_collide(true)` just after it.
    void step(double dt, const std::function<void(bool)> &around_collide = {})
    {
        if (par_.splitting == Splitting::strang) advect(0.5 * dt);
        else advect(dt);
        if (around_collide) around_collide(false);
        collide(dt);
        if (around_collide) around_collide(true);
        if (par_.splitting == Splitting::strang) advect(0.5 * dt);
        time_ += dt;
        ++steps_;
    }

    std::vector<Moments> moments(bool full = true) const
    {
        std::vector<Moments> out;
        out.reserve(mesh_.n_cells);
        for (int c = 0; c < mesh_.n_cells; ++c) out.push_back(compute_moments(cell(c), grid_, gas_, full));
        return out;
    }

    /// Domain totals of mass, momentum and energy (times dx).
    Conserved totals() const
    {
        Conserved t;
        for (int c = 0; c < mesh_.n_cells; ++c) {
            Conserved k = conserved(cell(c), grid_);
            t.mass += k.mass;
            for (int d = 0; d < 3; ++d) t.mom[d] += k.mom[d];
            t.energy += k.energy;
        }
        double dx = mesh_.dx();
        t.mass *= dx;
        for (auto &m : t.mom) m *= dx;
        t.energy *= dx;
        return t;
    }

    double H_total() const
    {
        double h = 0;
        for (int c = 0; c < mesh_.n_cells; ++c) h += tpkin::H_total(cell(c), grid_, gas_).H_total;
        return h * mesh_.dx();
    }

    /// Interior cell data, concatenated in cell order.
    void export_state(std::vector<double> &out) const
    {
        size_t per = cell(0).data().size();
        out.resize(per * mesh_.n_cells);
        for (int c = 0; c < mesh_.n_cells; ++c) std::copy(cell(c).data().begin(), cell(c).data().end(), out.begin() + c * per);
    }
    void import_state(const std::vector<double> &in)
    {
        size_t per = cell(0).data().size();
        if (in.size() != per * mesh_.n_cells) throw DomainError("import_state: size mismatch");
        for (int c = 0; c < mesh_.n_cells; ++c)
            std::copy(in.begin() + c * per, in.begin() + (c + 1) * per, cell(c).data().begin());
    }
    /// Clamps negative F left by an external state update; returns the count.
    long clip_negative()
    {
        long k = 0;
        for (int c = 0; c < mesh_.n_cells; ++c) {
            double *F = cell(c).F();
            for (size_t a = 0; a < grid_.size(); ++a)
                if (F[a] < 0.0) {
                    F[a] = 0.0;
                    ++k;
                }
        }
        clipped_ += k;
        return k;
    }

    /// Sets every interior cell to a given state.
    void fill(const std::function<void(int, ReducedState &)> &init)
    {
        for (int c = 0; c < mesh_.n_cells; ++c) init(c, cell(c));
    }

    /// Ghost values for a diffuse wall on one side, from the adjacent interior cell.
    ReducedState wall_ghost(bool left) const
    {
        const WallState &w = left ? mesh_.left : mesh_.right;
        const ReducedState &in = left ? cell(0) : cell(mesh_.n_cells - 1);
        ReducedState gs = in;
        auto Mw = maxwellian(1.0, {0.0, w.u[1], w.u[2]}, w.T, gas_.R(), grid_);
        double out_flux = 0, in_flux = 0;
        for (int i0 = 0; i0 < grid_.n(0); ++i0) {
            double vx = grid_.v(0, i0);
            bool incoming = left ? vx > 0.0 : vx < 0.0;
            size_t b = size_t(i0) * block_, e = b + block_;
            double s = 0;
            if (incoming) {
                for (size_t a = b; a < e; ++a) s += Mw[a];
                in_flux += std::abs(vx) * s;
            } else {
                for (size_t a = b; a < e; ++a) s += in.F()[a];
                out_flux += std::abs(vx) * s;
            }
        }
        double rho_w = out_flux / in_flux;
        std::vector<double> eint(gas_.n_modes());
        for (size_t m = 0; m < gas_.n_modes(); ++m) eint[m] = gas_.mode(m).e_int(w.T);
        for (int i0 = 0; i0 < grid_.n(0); ++i0) {
            double vx = grid_.v(0, i0);
            bool incoming = left ? vx > 0.0 : vx < 0.0;
            if (!incoming) continue;
            size_t b = size_t(i0) * block_, e = b + block_;
            for (size_t a = b; a < e; ++a) {
                gs.F()[a] = rho_w * Mw[a];
                for (size_t m = 0; m < gas_.n_modes(); ++m) gs.G(m)[a] = eint[m] * gs.F()[a];
            }
        }
        return gs;
    }

    /// Net (mass, x-momentum, tangential momentum, energy) flux through a wall face
    /// for first-order face values, positive in +x.
    std::array<double, 4> wall_face_flux(bool left) const
    {
        ReducedState gs = wall_ghost(left);
        const ReducedState &in = left ? cell(0) : cell(mesh_.n_cells - 1);
        std::array<double, 4> f{0, 0, 0, 0};
        size_t a = 0;
        for (int i = 0; i < grid_.n(0); ++i) {
            double vx = grid_.v(0, i);
            bool from_ghost = left ? vx > 0.0 : vx < 0.0;
            const ReducedState &src = from_ghost ? gs : in;
            for (int j = 0; j < grid_.n(1); ++j)
                for (int k = 0; k < grid_.n(2); ++k, ++a) {
                    double vy = grid_.v(1, j), vz = grid_.v(2, k);
                    double F = src.F()[a];
                    double G = 0;
                    for (size_t m = 0; m < gas_.n_modes(); ++m) G += src.G(m)[a];
                    f[0] += vx * F;
                    f[1] += vx * vx * F;
                    f[2] += vx * vy * F;
                    f[3] += vx * (0.5 * (vx * vx + vy * vy + vz * vz) * F + G);
                }
        }
        for (auto &x : f) x *= grid_.weight();
        return f;
    }

private:
    void fill_ghosts()
    {
        const int n = mesh_.n_cells;
        switch (mesh_.boundary) {
        case BoundaryKind::periodic:
            for (int g = 1; g <= kGhost; ++g) {
                cells_[kGhost - g] = cell(((n - g) % n + n) % n);
                cells_[n - 1 + g + kGhost] = cell((g - 1) % n);
            }
            break;
        case BoundaryKind::inflow_outflow:
            break;
        case BoundaryKind::diffuse_wall: {
            ReducedState l = wall_ghost(true), r = wall_ghost(false);
            cells_[0] = l;
            cells_[1] = l;
            cells_[n + kGhost] = r;
            cells_[n + kGhost + 1] = r;
            break;
        }
        }
    }

    Gas gas_;
    VelocityGrid grid_;
    SpatialMesh mesh_;
    StepParams par_;
    std::vector<ReducedState> cells_;
    std::vector<double> flux_;
    size_t block_ = 0;
    double time_ = 0.0;
    long steps_ = 0;
    long clipped_ = 0;
};

} // namespace tpkin
