#pragma once

// Case library and run orchestration for the command-line driver.
// Requires nlohmann/json (json.hpp) on the include path.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "chapman.hpp"
#include "config.hpp"

namespace tpkin {

namespace detail {

inline std::string snapshot_header(size_t n_modes)
{
    std::string h = "x,rho,u,T";
    for (size_t m = 0; m < n_modes; ++m) h += ",T_int_" + std::to_string(m + 1);
    return h + ",p,sigma_xx,sigma_xy,q_x,H_total,u_y";
}

inline void write_snapshot(const std::string &path, const Solver &s)
{
    std::FILE *f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("cannot write " + path);
    std::fprintf(f, "%s\n", snapshot_header(s.gas().n_modes()).c_str());
    for (int i = 0; i < s.n_cells(); ++i) {
        Moments m = compute_moments(s.cell(i), s.grid(), s.gas(), true);
        double H = tpkin::H_total(s.cell(i), s.grid(), s.gas()).H_total;
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g", s.mesh().x(i), m.rho, m.u[0], m.T);
        for (double t : m.T_int_modes) std::fprintf(f, ",%.17g", t);
        std::fprintf(f, ",%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", m.p, m.sigma[0][0], m.sigma[0][1], m.q[0], H,
                     m.u[1]);
    }
    std::fclose(f);
}

/// Raw final state: magic, sizes, time, steps, then every interior cell.
inline void write_checkpoint(const std::string &path, const Solver &s)
{
    std::ofstream o(path, std::ios::binary);
    if (!o) throw Error("cannot write " + path);
    std::vector<double> data;
    s.export_state(data);
    const char magic[8] = {'T', 'P', 'K', 'C', 'K', 'P', 'T', '1'};
    std::int64_t sizes[3] = {s.n_cells(), static_cast<std::int64_t>(s.grid().size()),
                             static_cast<std::int64_t>(1 + s.gas().n_modes())};
    double t = s.time();
    std::int64_t steps = s.steps();
    o.write(magic, 8);
    o.write(reinterpret_cast<const char *>(sizes), sizeof sizes);
    o.write(reinterpret_cast<const char *>(&t), sizeof t);
    o.write(reinterpret_cast<const char *>(&steps), sizeof steps);
    o.write(reinterpret_cast<const char *>(data.data()), std::streamsize(data.size() * sizeof(double)));
}

inline nlohmann::json conserved_json(const Conserved &c)
{
    return {{"mass", c.mass}, {"momentum", {c.mom[0], c.mom[1], c.mom[2]}}, {"energy", c.energy}};
}

inline double rel_drift(double a, double b, double scale) { return std::abs(b - a) / std::max(scale, 1e-300); }

inline SpatialMesh mesh_of(const SolverConfig &c)
{
    SpatialMesh m;
    m.n_cells = c.n_cells;
    m.x_min = c.x_min;
    m.x_max = c.x_max;
    m.boundary = c.boundary;
    m.left = {c.left.T, {0, 0, 0}};
    m.right = {c.right.T, {0, 0, 0}};
    return m;
}

inline StepParams params_of(const SolverConfig &c)
{
    StepParams p;
    p.model = c.model;
    p.law = c.law;
    p.kn = c.kn;
    p.theta = c.theta;
    p.order = c.order;
    p.splitting = c.splitting;
    return p;
}

// Bimodal velocity distribution with seeded multiplicative noise and
// per-mode internal temperatures off equilibrium.
inline void perturbed_state(ReducedState &s, const VelocityGrid &g, const Gas &gas, const SolverConfig &c,
                            std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double R = gas.R(), cth = std::sqrt(R * c.T);
    double shift = 0.8 * cth;
    auto M1 = maxwellian(0.5 * c.rho, {c.u - shift, 0, 0}, 0.6 * c.T, R, g);
    auto M2 = maxwellian(0.5 * c.rho, {c.u + shift, 0, 0}, 0.6 * c.T, R, g);
    for (size_t a = 0; a < g.size(); ++a) s.F()[a] = (M1[a] + M2[a]) * (1.0 + c.perturbation * U(rng));
    for (size_t m = 0; m < s.n_modes(); ++m) {
        double Tm = c.T * (1.0 + 0.5 * c.perturbation * U(rng));
        double e = gas.mode(m).e_int(Tm);
        for (size_t a = 0; a < g.size(); ++a) s.G(m)[a] = e * s.F()[a] * (1.0 + 0.5 * c.perturbation * U(rng));
    }
}

} // namespace detail

/// Runs one configured case, writing every output into out_dir. Returns the manifest.
inline nlohmann::json run_case(const SolverConfig &c, const std::string &out_dir, std::ostream &log = std::cerr)
{
    namespace fs = std::filesystem;
    using nlohmann::json;
    fs::create_directories(out_dir);
    auto t_start = std::chrono::steady_clock::now();
    {
        std::ofstream e(out_dir + "/effective.ini");
        e << config_echo(c);
    }
    Gas gas = c.make_gas();
    json man;
    man["config_hash"] = config_hash(c);
    man["config_source"] = c.source_path;
    man["case"] = to_string(c.kind);
    man["model"] = to_string(c.model);
    man["kn"] = c.kn;
    man["seed"] = c.seed;
    man["rng"] = "mt19937_64";
    man["grid"] = {{"n", c.n}, {"span", c.span}, {"nodes", std::size_t(c.n) * c.n * c.n}, {"n_cells", c.n_cells}};
    json files = json::array();
    std::ofstream ent(out_dir + "/entropy.jsonl");
    files.push_back("effective.ini");
    files.push_back("entropy.jsonl");
    int snap_id = 0;
    auto snapshot = [&](const Solver &s, const std::string &tag) {
        char name[64];
        if (tag.empty()) std::snprintf(name, sizeof name, "snapshot_%04d.csv", snap_id++);
        else std::snprintf(name, sizeof name, "snapshot_%s.csv", tag.c_str());
        detail::write_snapshot(out_dir + "/" + name, s);
        files.push_back(name);
    };
    auto entropy_record = [&](const Solver &s, double dissipation, bool has_dissipation) {
        EntropyReport total;
        for (int i = 0; i < s.n_cells(); ++i) {
            auto r = tpkin::H_total(s.cell(i), s.grid(), s.gas());
            total.H_total += r.H_total * s.mesh().dx();
            for (int d = 0; d < 3; ++d) total.H_flux[d] += r.H_flux[d] * s.mesh().dx();
        }
        json j = {{"step", s.steps()},
                  {"time", s.time()},
                  {"H_total", total.H_total},
                  {"H_flux", {total.H_flux[0], total.H_flux[1], total.H_flux[2]}},
                  {"hessian_min_det", hessian_min_det(s.cell(s.n_cells() / 2), s.gas(), 37)}};
        j["dissipation"] = has_dissipation ? json(dissipation) : json(nullptr);
        ent << j.dump() << "\n";
        ent.flush();
    };

    json results;
    if (c.kind == CaseKind::couette || c.kind == CaseKind::fourier) {
        bool couette = c.kind == CaseKind::couette;
        ChannelSetup cs;
        cs.gas = gas;
        cs.rho0 = c.rho;
        cs.T0 = c.T;
        cs.x_min = c.x_min;
        cs.length = c.x_max - c.x_min;
        Moments ref;
        ref.rho = c.rho;
        ref.T = c.T;
        ref.p = c.rho * gas.R() * c.T;
        cs.tau = tau_law(ref, c.law, c.model, 1.0); // law evaluated once at the reference state
        cs.model = c.model;
        cs.kn = c.kn;
        cs.n_cells = c.n_cells;
        cs.n_v = c.n;
        cs.span = c.span;
        cs.wall_speed = c.u_wall;
        cs.delta_T = c.delta_T;
        cs.theta = c.theta;
        cs.cfl = c.cfl;
        cs.window = c.window;
        cs.threshold = c.threshold;
        cs.max_steps = c.max_steps;
        cs.order = c.order;
        long windows = 0;
        cs.progress = [&](long step, double change) {
            log << "step " << step << "  relative flux change " << change << "\n";
        };
        cs.observer = [&](const Solver &s) {
            ++windows;
            entropy_record(s, 0.0, false);
            // snapshots on windows 1, 2, 4, 8, ...
            if ((windows & (windows - 1)) == 0 && snap_id < c.snapshots) snapshot(s, "");
        };
        cs.finish = [&](const Solver &s) {
            snapshot(s, "final");
            detail::write_checkpoint(out_dir + "/checkpoint.bin", s);
            files.push_back("checkpoint.bin");
        };
        ChannelResult r = run_channel(cs, couette);
        auto pred = predict(c.model, r.tau_eff, r.p_core, gas, r.T_core);
        results = {{"converged", r.converged},
                   {"steps", r.steps},
                   {"time", r.time},
                   {"extrapolations", r.extrapolations},
                   {"core_gradient", r.gradient},
                   {"core_flux", r.flux},
                   {"measured", r.coefficient},
                   {"predicted", couette ? pred.mu : pred.kappa},
                   {"ratio", r.coefficient / (couette ? pred.mu : pred.kappa)},
                   {"last_relative_change", r.last_change}};
        if (!r.converged) log << "warning: steady state not reached within max_steps\n";
    } else {
        // relax, sod, custom: fixed end time
        Vec3 center{c.u_ref, 0, 0};
        if (c.kind == CaseKind::relax && c.u_ref == 0.0) center[0] = c.u;
        auto grid = build_grid(center, c.grid_temperature(), gas.R(), c.n, c.span);
        Solver solver(gas, grid, detail::mesh_of(c), detail::params_of(c));
        std::mt19937_64 rng(c.seed);
        auto eq = [&](const SideState &st, ReducedState &s) {
            set_equilibrium(s, project_maxwellian(st.rho, {st.u, 0, 0}, st.T, gas.R(), grid), gas);
        };
        double xs = c.x_min + c.x_split * (c.x_max - c.x_min);
        SideState left = c.left, right = c.right;
        if (c.kind == CaseKind::sod) left.u = right.u = 0.0;
        if (c.kind == CaseKind::relax) {
            ReducedState proto(grid.size(), gas.n_modes());
            detail::perturbed_state(proto, grid, gas, c, rng);
            solver.fill([&](int, ReducedState &s) { s = proto; });
        } else {
            solver.fill([&](int i, ReducedState &s) { eq(solver.mesh().x(i) < xs ? left : right, s); });
            eq(left, solver.ghost(-1));
            eq(left, solver.ghost(-2));
            eq(right, solver.ghost(c.n_cells));
            eq(right, solver.ghost(c.n_cells + 1));
        }
        Conserved c0 = solver.totals();
        double dt0 = solver.max_dt(c.cfl);
        if (c.dt_max > 0.0) dt0 = std::min(dt0, c.dt_max);
        std::vector<double> snap_times;
        for (int k = 1; k <= c.snapshots; ++k) snap_times.push_back(c.t_end * k / c.snapshots);
        if (c.snapshots > 0) snapshot(solver, "");
        entropy_record(solver, 0.0, false);
        size_t next = 0;
        bool monotone = true;
        double H_prev = NAN;
        while (solver.time() < c.t_end * (1 - 1e-14)) {
            double target = next < snap_times.size() ? snap_times[next] : c.t_end;
            double dt = std::min(dt0, target - solver.time());
            bool diag = c.entropy_every > 0 && (solver.steps() + 1) % c.entropy_every == 0;
            double Hb = 0, Ha = 0;
            std::function<void(bool)> hook;
            if (diag)
                hook = [&](bool after) {
                    double h = 0;
                    for (int i = 0; i < solver.n_cells(); ++i)
                        h += tpkin::H_total(solver.cell(i), grid, gas).H_total * solver.mesh().dx();
                    (after ? Ha : Hb) = h;
                };
            solver.step(dt, hook);
            if (diag) {
                entropy_record(solver, (Ha - Hb) / dt, true);
                if (Ha > Hb + 1e-12 * std::max(1.0, std::abs(Hb))) monotone = false;
            }
            if (c.kind == CaseKind::relax) {
                double H = solver.H_total();
                if (std::isfinite(H_prev) && H > H_prev + 1e-12 * std::max(1.0, std::abs(H_prev))) monotone = false;
                H_prev = H;
            }
            if (next < snap_times.size() && solver.time() >= snap_times[next] * (1 - 1e-14)) {
                snapshot(solver, "");
                ++next;
            }
        }
        Conserved c1 = solver.totals();
        double E0 = std::abs(c0.energy);
        results = {{"steps", solver.steps()},
                   {"time", solver.time()},
                   {"clipped_nodes", solver.clipped_nodes()},
                   {"entropy_non_increasing_in_collisions", monotone},
                   {"totals_initial", detail::conserved_json(c0)},
                   {"totals_final", detail::conserved_json(c1)}};
        if (c.boundary == BoundaryKind::periodic) {
            double rm = detail::rel_drift(c0.mass, c1.mass, std::abs(c0.mass));
            double rp = 0;
            // momentum drift relative to the momentum scale rho * sqrt(RT)
            double pscale = std::abs(c0.mass) * std::sqrt(gas.R() * c.grid_temperature());
            for (int d = 0; d < 3; ++d) rp = std::max(rp, detail::rel_drift(c0.mom[d], c1.mom[d], pscale));
            results["relative_drift"] = {
                {"mass", rm}, {"momentum", rp}, {"energy", detail::rel_drift(c0.energy, c1.energy, E0)}};
        }
        if (c.kind == CaseKind::sod) {
            double gamma = gas.c_p(c.grid_temperature()) / gas.c_v(c.grid_temperature());
            PrimState L{left.rho, 0.0, left.rho * gas.R() * left.T}, Rt{right.rho, 0.0, right.rho * gas.R() * right.T};
            RiemannSolver rs(L, Rt, gamma);
            auto ms = solver.moments(false);
            double dx = solver.mesh().dx(), l1r = 0, l1u = 0, l1T = 0;
            for (int i = 0; i < c.n_cells; ++i) {
                auto ex = rs.sample((solver.mesh().x(i) - xs) / solver.time());
                l1r += std::abs(ms[i].rho - ex.rho) * dx;
                l1u += std::abs(ms[i].u[0] - ex.u) * dx;
                l1T += std::abs(ms[i].T - ex.p / (ex.rho * gas.R())) * dx;
            }
            results["l1_error"] = {{"rho", l1r}, {"u", l1u}, {"T", l1T}};
            results["star_pressure"] = rs.p_star();
        }
        detail::write_checkpoint(out_dir + "/checkpoint.bin", solver);
        files.push_back("checkpoint.bin");
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    man["wall_clock_s"] = wall;
    man["results"] = results;
    man["files"] = files;
    std::ofstream(out_dir + "/manifest.json") << man.dump(2) << "\n";
    return man;
}

} // namespace tpkin
