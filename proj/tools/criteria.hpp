#pragma once

// Acceptance criteria shared by the acceptance binary and the `suite` command.
// Every tolerance is pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include <tpkin/chapman.hpp>
#include <tpkin/entropy.hpp>

namespace tpkin::acceptance {

using nlohmann::json;

namespace tol {
constexpr double gaussian_identity = 1e-6;
constexpr double gaussian_runtime_s = 5.0;
constexpr double conservation = 1e-11;
constexpr double entropy_roundoff = 1e-12;
constexpr double equilibrium_rhs = 1e-10;
constexpr double equilibrium_drift = 1e-10;
constexpr double bgk_analytic = 1e-10;
constexpr double entropy_identity = 1e-12;
constexpr double eigen_order = 1.9;
constexpr double mu_bgk_lo = 0.95, mu_bgk_hi = 1.05;
constexpr double mu_fp_lo = 0.475, mu_fp_hi = 0.525;
constexpr double pr_bgk_lo = 0.95, pr_bgk_hi = 1.05;
constexpr double pr_fp_lo = 1.40, pr_fp_hi = 1.60;
constexpr double alpha_exact = 1e-12;
constexpr double sod_star_pressure = 1e-6;
constexpr double sod_classical_p_star = 0.30313; // Toro's tabulated value
// recorded L1(rho) at Kn = 0.002 on 200 cells, 32^3 velocities, with margin
constexpr double sod_golden_l1_rho = 1.38e-2; // frozen run at Kn 0.002 was 1.2523e-2, plus 10%
constexpr double vib_closed_form = 1e-12;
} // namespace tol

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    json data = json::object();
};

inline std::string fmt(const char *f, double x)
{
    char b[64];
    std::snprintf(b, sizeof b, f, x);
    return b;
}

// Gas configurations exercised by the homogeneous checks, nondimensional (R = 1).
struct GasCase {
    std::string name;
    Gas gas;
};

inline std::vector<GasCase> energy_model_cases()
{
    const double R = 1.0, lo = 0.05, hi = 50.0;
    return {
        {"rotational", Gas(R, {EnergyModel::rotational(R, lo, hi)}, lo, hi)},
        {"vibrational", Gas(R, {EnergyModel::vibrational(R, 2.0, lo, hi)}, lo, hi)},
        {"polynomial", Gas(R, {EnergyModel::polynomial(R, {0.0, 1.0, 0.15, 0.02}, lo, hi)}, lo, hi)},
    };
}

inline GasCase two_mode_case()
{
    const double R = 1.0, lo = 0.05, hi = 50.0;
    return {"rotational+vibrational",
            Gas(R, {EnergyModel::rotational(R, lo, hi), EnergyModel::vibrational(R, 2.0, lo, hi)}, lo, hi)};
}

/// Off-equilibrium homogeneous state: drifting bimodal F with seeded noise,
/// internal modes at temperatures away from the translational one.
inline ReducedState relaxation_start(const VelocityGrid &g, const Gas &gas, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    ReducedState s(g.size(), gas.n_modes());
    auto M1 = maxwellian(0.6, {-0.5, 0.3, 0.0}, 0.7, gas.R(), g);
    auto M2 = maxwellian(0.4, {0.9, -0.2, 0.1}, 0.5, gas.R(), g);
    for (size_t a = 0; a < g.size(); ++a) s.F()[a] = (M1[a] + M2[a]) * (1.0 + 0.2 * U(rng));
    for (size_t m = 0; m < gas.n_modes(); ++m) {
        double e = gas.mode(m).e_int(m == 0 ? 1.6 : 0.6);
        for (size_t a = 0; a < g.size(); ++a) s.G(m)[a] = e * s.F()[a] * (1.0 + 0.1 * U(rng));
    }
    return s;
}

inline double l1_distance(const ReducedState &a, const ReducedState &b, const VelocityGrid &g)
{
    double s = 0;
    for (size_t k = 0; k < a.data().size(); ++k) s += std::abs(a.data()[k] - b.data()[k]);
    return s * g.weight();
}

// ---------------------------------------------------------------------------

inline CriterionResult criterion_1()
{
    CriterionResult r{1, "Gaussian quadrature identities, span 6, n = 32"};
    std::array<std::array<double, 3>, 3> C{{{0.3, -0.5, 0.2}, {0.6, -0.1, 0.4}, {-0.3, 0.15, -0.2}}};
    auto t0 = std::chrono::steady_clock::now();
    auto rep = gaussian_identity_suite(build_grid({0, 0, 0}, 1.0, 1.0, 32, 6.0), C);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    auto wide = gaussian_identity_suite(build_grid({0, 0, 0}, 1.0, 1.0, 32, 8.0), C);
    for (auto &it : rep.items) r.data["span6"][it.name] = it.error;
    r.data["span8_max_error"] = wide.max_error();
    r.data["runtime_s"] = secs;
    r.passed = rep.passed(tol::gaussian_identity) && secs < tol::gaussian_runtime_s;
    std::string worst;
    double we = -1;
    for (auto &it : rep.items)
        if (it.error > we) {
            we = it.error;
            worst = it.name;
        }
    r.detail = "max error " + fmt("%.2e", we) + " at " + worst + " (tol 1e-06), runtime " + fmt("%.2f", secs) +
               " s; span-8 grid max error " + fmt("%.2e", wide.max_error());
    return r;
}

struct RelaxRun {
    double drift_mass = 0, drift_mom = 0, drift_energy = 0;
    double worst_H_increase = -INFINITY;
    bool monotone = true;
};

// 0D relaxation with the collision stepper alone.
inline RelaxRun homogeneous_run(const Gas &gas, CollisionModel model, int steps, unsigned seed)
{
    auto g = build_grid({0.2, 0, 0}, 1.0, 1.0, 32, 6.0);
    std::mt19937_64 rng(seed);
    ReducedState s = relaxation_start(g, gas, rng);
    const double tau = 1.0, dt = 0.05;
    Conserved c0 = conserved(s, g);
    double H = H_total(s, g, gas).H_total;
    RelaxRun out;
    for (int k = 0; k < steps; ++k) {
        if (model == CollisionModel::bgk) bgk_step_exact(s, g, gas, dt, tau);
        else fp_step(s, g, gas, dt, tau, 1.0);
        double Hn = H_total(s, g, gas).H_total;
        double inc = Hn - H;
        out.worst_H_increase = std::max(out.worst_H_increase, inc);
        if (inc > tol::entropy_roundoff * std::max(1.0, std::abs(H))) out.monotone = false;
        H = Hn;
    }
    Conserved c1 = conserved(s, g);
    // momentum drift is measured against rho * sqrt(R T), the thermal momentum scale
    double pscale = c0.mass * std::sqrt(gas.R() * 1.0);
    out.drift_mass = std::abs(c1.mass - c0.mass) / c0.mass;
    for (int d = 0; d < 3; ++d) out.drift_mom = std::max(out.drift_mom, std::abs(c1.mom[d] - c0.mom[d]) / pscale);
    out.drift_energy = std::abs(c1.energy - c0.energy) / std::abs(c0.energy);
    return out;
}

struct HomogeneousTable {
    std::vector<std::tuple<std::string, CollisionModel, RelaxRun>> rows;
};

inline const HomogeneousTable &homogeneous_table()
{
    static HomogeneousTable t = [] {
        HomogeneousTable h;
        auto cases = energy_model_cases();
        cases.push_back(two_mode_case());
        unsigned seed = 2024;
        for (auto &gc : cases)
            for (auto m : {CollisionModel::bgk, CollisionModel::fp})
                h.rows.emplace_back(gc.name, m, homogeneous_run(gc.gas, m, 1000, seed++));
        return h;
    }();
    return t;
}

inline CriterionResult criterion_2()
{
    CriterionResult r{2, "Conservation in 0D relaxation, 1000 steps, both models, three energy models"};
    double worst = 0;
    r.passed = true;
    for (auto &[name, model, run] : homogeneous_table().rows) {
        if (name == two_mode_case().name) continue;
        double w = std::max({run.drift_mass, run.drift_mom, run.drift_energy});
        worst = std::max(worst, w);
        r.data[to_string(model) + "/" + name] = {
            {"mass", run.drift_mass}, {"momentum", run.drift_mom}, {"energy", run.drift_energy}};
        if (!(w <= tol::conservation)) r.passed = false;
    }
    r.detail = "worst relative drift " + fmt("%.2e", worst) + " (tol 1e-11)";
    return r;
}

inline CriterionResult criterion_3()
{
    CriterionResult r{3, "H non-increasing at every step, incl. rotation+vibration"};
    r.passed = true;
    double worst = -INFINITY;
    for (auto &[name, model, run] : homogeneous_table().rows) {
        worst = std::max(worst, run.worst_H_increase);
        r.data[to_string(model) + "/" + name] = {{"monotone", run.monotone}, {"largest_step_change", run.worst_H_increase}};
        if (!run.monotone) r.passed = false;
    }
    r.detail = "largest per-step change of H " + fmt("%.2e", worst) + " over 8 runs (allowance +1e-12)";
    return r;
}

inline CriterionResult criterion_4()
{
    CriterionResult r{4, "Equilibrium is a fixed point of both operators"};
    r.passed = true;
    double worst_rhs = 0, worst_drift = 0;
    auto cases = energy_model_cases();
    cases.push_back(two_mode_case());
    for (auto &gc : cases) {
        auto g = build_grid({0.3, -0.1, 0}, 1.2, 1.0, 32, 6.0);
        ReducedState eq(g.size(), gc.gas.n_modes());
        set_equilibrium(eq, project_maxwellian(1.1, {0.3, -0.1, 0.05}, 1.2, 1.0, g), gc.gas);
        double rho = conserved(eq, g).mass;
        for (auto m : {CollisionModel::bgk, CollisionModel::fp}) {
            ReducedState d = m == CollisionModel::bgk ? bgk_rhs(eq, g, gc.gas, 1.0) : fp_rhs(eq, g, gc.gas, 1.0);
            double n1 = 0;
            for (double x : d.data()) n1 += std::abs(x);
            n1 *= g.weight() / rho;
            ReducedState s = eq;
            for (int k = 0; k < 100; ++k) {
                if (m == CollisionModel::bgk) bgk_step_exact(s, g, gc.gas, 0.1, 1.0);
                else fp_step(s, g, gc.gas, 0.1, 1.0, 1.0);
            }
            double drift = l1_distance(s, eq, g) / rho;
            worst_rhs = std::max(worst_rhs, n1);
            worst_drift = std::max(worst_drift, drift);
            r.data[to_string(m) + "/" + gc.name] = {{"rhs_l1", n1}, {"drift_after_100", drift}};
            if (!(n1 <= tol::equilibrium_rhs && drift <= tol::equilibrium_drift)) r.passed = false;
        }
    }
    r.detail = "worst |rhs|_1/rho " + fmt("%.2e", worst_rhs) + ", worst drift after 100 steps " +
               fmt("%.2e", worst_drift) + " (tol 1e-10)";
    return r;
}

inline CriterionResult criterion_5()
{
    CriterionResult r{5, "BGK relaxation matches the analytic exponential"};
    Gas gas = energy_model_cases()[1].gas;
    auto g = build_grid({0.2, 0, 0}, 1.0, 1.0, 32, 6.0);
    std::mt19937_64 rng(77);
    ReducedState s = relaxation_start(g, gas, rng);
    ReducedState s0 = s;
    Moments m = compute_moments(s, g, gas, false);
    auto pm = project_maxwellian(m, g, gas.R());
    ReducedState eq(g.size(), gas.n_modes());
    set_equilibrium(eq, pm, gas);
    const double tau = 0.7, dt = 0.037;
    const std::vector<int> outputs{1, 5, 20, 50, 120};
    double scale = 0;
    for (double x : s0.data()) scale = std::max(scale, std::abs(x));
    double worst = 0;
    int k = 0;
    for (int target : outputs) {
        for (; k < target; ++k) bgk_step_exact(s, g, gas, dt, tau);
        double decay = std::exp(-k * dt / tau);
        double err = 0;
        for (size_t a = 0; a < s.data().size(); ++a) {
            double exact = eq.data()[a] + (s0.data()[a] - eq.data()[a]) * decay;
            err = std::max(err, std::abs(s.data()[a] - exact));
        }
        err /= scale;
        r.data["t=" + fmt("%.4g", k * dt)] = err;
        worst = std::max(worst, err);
    }
    r.passed = worst <= tol::bgk_analytic;
    r.detail = "worst pointwise error / max|F0| " + fmt("%.2e", worst) + " at 5 times (tol 1e-10)";
    return r;
}

inline CriterionResult criterion_6()
{
    CriterionResult r{6, "Entropy Hessian identities, positivity and determinant at 100 random states"};
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double R = 1.0;
    std::vector<GasCase> cases = energy_model_cases();
    cases.push_back(two_mode_case());
    cases.push_back({"rotational+vibrational+polynomial",
                     Gas(R,
                         {EnergyModel::rotational(R, 0.05, 50), EnergyModel::vibrational(R, 3.0, 0.05, 50),
                          EnergyModel::polynomial(R, {0.0, 0.5, 0.1}, 0.05, 50)},
                         0.05, 50)});
    double worst_id = 0, worst_det = 0;
    bool pd = true;
    for (auto &gc : cases) {
        for (int k = 0; k < 100; ++k) {
            double F = std::exp(std::log(1e-4) * U(rng)) * 3.0;
            std::vector<double> G(gc.gas.n_modes());
            for (size_t m = 0; m < G.size(); ++m) G[m] = F * gc.gas.mode(m).e_int(0.1 + 10.0 * U(rng));
            Eigen::MatrixXd H = hessian(F, G.data(), gc.gas);
            double s1 = F * H(0, 0);
            for (size_t m = 0; m < G.size(); ++m) s1 += G[m] * H(0, 1 + m);
            worst_id = std::max(worst_id, std::abs(s1 - 1.0));
            double prod = 1.0 / F;
            for (size_t m = 0; m < G.size(); ++m) {
                double a = F * H(0, 1 + m), b = G[m] * H(1 + m, 1 + m);
                worst_id = std::max(worst_id, std::abs(a + b) / std::max(std::abs(a), std::abs(b)));
                prod *= H(1 + m, 1 + m);
            }
            double det = H.determinant();
            worst_det = std::max(worst_det, std::abs(det - prod) / std::abs(prod));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
            if (!(es.eigenvalues().minCoeff() > 0.0)) pd = false;
        }
    }
    r.passed = worst_id <= tol::entropy_identity && worst_det <= tol::entropy_identity && pd;
    r.data = {{"identity_error", worst_id}, {"determinant_relative_error", worst_det}, {"positive_definite", pd}};
    r.detail = "identity error " + fmt("%.2e", worst_id) + ", det relative error " + fmt("%.2e", worst_det) +
               ", positive definite: " + (pd ? "yes" : "no") + " (tol 1e-12, 500 states, 1-3 modes)";
    return r;
}

inline CriterionResult criterion_7()
{
    CriterionResult r{7, "FP eigenrelations and closure converge at order >= 1.9 (n = 24, 32, 48)"};
    Gas gas(1.0, {EnergyModel::vibrational(1.0, 2.0, 0.05, 50)}, 0.05, 50);
    const double T = 1.0;
    const std::vector<int> ns{24, 32, 48};
    std::vector<EigenResiduals> stated, consistent;
    std::vector<double> h;
    for (int n : ns) {
        auto g = build_grid({0, 0, 0}, 1.0, 1.0, n, 6.0);
        h.push_back(g.dv(0));
        stated.push_back(eigen_residuals(g, gas, T, -1.0 / 3.0, 0.5));
        consistent.push_back(eigen_residuals(g, gas, T, -1.0 / 3.0, -0.5));
    }
    auto orders = [&](auto get, const std::vector<EigenResiduals> &v) {
        double lo = INFINITY;
        json arr = json::array();
        for (size_t i = 0; i + 1 < v.size(); ++i) {
            double p = observed_order(get(v[i]), get(v[i + 1]), h[i], h[i + 1]);
            lo = std::min(lo, p);
            arr.push_back(p);
        }
        return std::make_pair(lo, arr);
    };
    struct Item {
        const char *name;
        std::function<double(const EigenResiduals &)> get;
    };
    std::vector<Item> items{{"L_F(A)+3A", [](auto &e) { return e.LF_A; }},
                            {"L_F(B)+2B", [](auto &e) { return e.LF_B; }},
                            {"L_G(A,At)+3At", [](auto &e) { return e.LG_A; }},
                            {"L_G(B,Bt)+2Bt", [](auto &e) { return e.LG_B; }},
                            {"closure F (a=-1/3, b=1/2)", [](auto &e) { return e.closure_F; }},
                            {"closure G (a=-1/3, b=1/2)", [](auto &e) { return e.closure_G; }}};
    r.passed = true;
    std::string summary;
    for (auto &it : items) {
        auto [lo, arr] = orders(it.get, stated);
        json res = json::array();
        for (auto &e : stated) res.push_back(it.get(e));
        r.data[it.name] = {{"residuals", res}, {"orders", arr}};
        if (!(lo >= tol::eigen_order)) r.passed = false;
        summary += std::string(summary.empty() ? "" : ", ") + it.name + " " + fmt("%.2f", lo);
    }
    // information only: the sign that the residual equation requires
    auto [loF, arrF] = orders([](auto &e) { return e.closure_F; }, consistent);
    auto [loG, arrG] = orders([](auto &e) { return e.closure_G; }, consistent);
    r.data["info: closure with b=-1/2"] = {{"orders_F", arrF}, {"orders_G", arrG}};
    r.detail = "min orders: " + summary + "; info: b=-1/2 closure orders " + fmt("%.2f", loF) + "/" +
               fmt("%.2f", loG);
    return r;
}

/// One transport-coefficient measurement.
struct ChannelRow {
    std::string model, kase;
    double kn = 0, predicted = 0, measured = 0, ratio = 0;
    bool converged = false;
    long steps = 0;
    int extrapolations = 0;
    double p_core = 0, T_core = 0;
};

inline ChannelRow channel_row(CollisionModel model, bool couette, const std::function<void(long, double)> &progress)
{
    ChannelSetup cs;
    cs.model = model;
    cs.progress = progress;
    ChannelResult res = run_channel(cs, couette);
    Gas gas = channel_gas();
    auto pred = predict(model, res.tau_eff, res.p_core, gas, res.T_core);
    ChannelRow row;
    row.model = to_string(model);
    row.kase = couette ? "couette" : "fourier";
    row.kn = cs.kn;
    row.predicted = couette ? pred.mu : pred.kappa;
    row.measured = res.coefficient;
    row.ratio = row.measured / row.predicted;
    row.converged = res.converged;
    row.steps = res.steps;
    row.extrapolations = res.extrapolations;
    row.p_core = res.p_core;
    row.T_core = res.T_core;
    return row;
}

inline json channel_row_json(const ChannelRow &r)
{
    return {{"model", r.model},         {"case", r.kase},         {"kn", r.kn},
            {"predicted", r.predicted}, {"measured", r.measured}, {"ratio", r.ratio},
            {"converged", r.converged}, {"steps", r.steps},       {"extrapolations", r.extrapolations},
            {"p_core", r.p_core},       {"T_core", r.T_core}};
}

/// Alpha from independently written heat capacities.
inline double alpha_oracle(const std::string &kind, double T)
{
    if (kind == "monatomic") return 2.0 / 3.0;
    if (kind == "rotational") return 0.4;
    if (kind == "vibrational") {
        double x = 2.0 / T, ex = std::exp(x);
        double cv = 1.5 + x * x * ex / ((ex - 1) * (ex - 1));
        return (cv + 1.0) / cv - 1.0;
    }
    // polynomial e_int = T + 0.15 T^2 + 0.02 T^3
    double cv = 1.5 + 1.0 + 0.3 * T + 0.06 * T * T;
    return (cv + 1.0) / cv - 1.0;
}

inline CriterionResult criterion_8(std::vector<ChannelRow> *rows_out = nullptr,
                                   const std::function<void(const std::string &)> &log = {})
{
    CriterionResult r{8, "Transport coefficients from Couette and Fourier runs (Kn = 0.005)"};
    // alpha: pure algebra against the oracle
    double worst_alpha = 0;
    std::vector<GasCase> cases = energy_model_cases();
    cases.insert(cases.begin(), {"monatomic", Gas(1.0, {}, 0.05, 50)});
    for (auto &gc : cases)
        for (double T : {0.5, 1.0, 4.0})
            for (auto m : {CollisionModel::bgk, CollisionModel::fp}) {
                double a = predict(m, 1.0, 1.0, gc.gas, T).alpha;
                worst_alpha = std::max(worst_alpha, std::abs(a - alpha_oracle(gc.name, T)));
            }
    r.data["alpha_max_error"] = worst_alpha;

    std::vector<ChannelRow> rows;
    for (auto m : {CollisionModel::bgk, CollisionModel::fp})
        for (bool couette : {true, false}) {
            std::string tag = to_string(m) + (couette ? " couette" : " fourier");
            auto t0 = std::chrono::steady_clock::now();
            rows.push_back(channel_row(m, couette, [&](long step, double change) {
                if (log && step % 2000 == 0) log(tag + ": step " + std::to_string(step) + ", change " + fmt("%.2e", change));
            }));
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (log)
                log(tag + ": " + (rows.back().converged ? "steady" : "NOT steady") + " after " +
                    std::to_string(rows.back().steps) + " steps, " + fmt("%.0f", secs) + " s, ratio " +
                    fmt("%.4f", rows.back().ratio));
        }
    // ratios against tau p; Pr from the matched Couette viscosity rescaled to the Fourier core pressure
    auto mu_ratio = [](const ChannelRow &c) { return c.measured / (c.kn * c.p_core); };
    Gas gas = channel_gas();
    auto pr_eff = [&](const ChannelRow &c, const ChannelRow &f) {
        double mu = c.measured * f.p_core / c.p_core;
        return mu * gas.c_p(f.T_core) / f.measured;
    };
    double mb = mu_ratio(rows[0]), mf = mu_ratio(rows[2]);
    double pb = pr_eff(rows[0], rows[1]), pf = pr_eff(rows[2], rows[3]);
    bool steady = true;
    for (auto &row : rows) steady = steady && row.converged;
    r.passed = steady && mb >= tol::mu_bgk_lo && mb <= tol::mu_bgk_hi && mf >= tol::mu_fp_lo && mf <= tol::mu_fp_hi &&
               pb >= tol::pr_bgk_lo && pb <= tol::pr_bgk_hi && pf >= tol::pr_fp_lo && pf <= tol::pr_fp_hi &&
               worst_alpha <= tol::alpha_exact;
    json jr = json::array();
    for (auto &row : rows) jr.push_back(channel_row_json(row));
    r.data["runs"] = jr;
    r.data["mu_over_tau_p"] = {{"bgk", mb}, {"fp", mf}};
    r.data["Pr_eff"] = {{"bgk", pb}, {"fp", pf}};
    r.detail = "mu/(tau p) BGK " + fmt("%.4f", mb) + " [0.95,1.05], FP " + fmt("%.4f", mf) + " [0.475,0.525]; Pr BGK " +
               fmt("%.4f", pb) + " [0.95,1.05], FP " + fmt("%.4f", pf) + " [1.40,1.60]; alpha error " +
               fmt("%.1e", worst_alpha) + (steady ? "" : "; a run did not reach steady state");
    if (rows_out) *rows_out = rows;
    return r;
}

inline CriterionResult criterion_9(const std::function<void(const std::string &)> &log = {})
{
    CriterionResult r{9, "Euler limit: Sod L1(rho) decreases with Kn; oracle star pressure"};
    RiemannSolver rs({1.0, 0.0, 1.0}, {0.125, 0.0, 0.1}, 1.4);
    double p_bis = rs.star_pressure_bisection();
    double dp = std::abs(p_bis - tol::sod_classical_p_star);
    std::vector<double> kns{0.05, 0.01, 0.002}, l1;
    json runs = json::array();
    for (double kn : kns) {
        SodSetup ss;
        ss.kn = kn;
        auto res = run_sod(ss);
        l1.push_back(res.l1_rho);
        runs.push_back({{"kn", kn}, {"l1_rho", res.l1_rho}, {"l1_u", res.l1_u}, {"l1_T", res.l1_T}, {"steps", res.steps}});
        if (log) log("sod Kn=" + fmt("%g", kn) + ": L1(rho) " + fmt("%.4e", res.l1_rho));
    }
    bool decreasing = l1[1] < l1[0] && l1[2] < l1[1];
    bool golden = l1[2] <= tol::sod_golden_l1_rho;
    r.passed = decreasing && dp <= tol::sod_star_pressure && golden;
    r.data = {{"runs", runs}, {"p_star_bisection", p_bis}, {"p_star_newton", rs.p_star()}, {"golden_l1_rho", tol::sod_golden_l1_rho}};
    r.detail = "L1(rho) " + fmt("%.4e", l1[0]) + " > " + fmt("%.4e", l1[1]) + " > " + fmt("%.4e", l1[2]) +
               (decreasing ? "" : " (NOT monotone)") + "; p* " + fmt("%.9f", p_bis) + " vs 0.30313 (tol 1e-6)" +
               "; golden bound " + fmt("%.1e", tol::sod_golden_l1_rho) + (golden ? "" : " EXCEEDED");
    return r;
}

/// Closed-form kinetic entropy for one rotational and one vibrational mode.
inline double closed_form_rot_vib(double F, double Grot, double Gvib, double R, double T0)
{
    double q = R * T0;
    return F * std::log(F) + F * std::log(F / Grot) + F * std::log(q * F / (q * F + Gvib)) +
           (Gvib / q) * std::log(Gvib / (q * F + Gvib));
}

inline CriterionResult criterion_10()
{
    CriterionResult r{10, "Vibrational entropy: generic density equals the closed form"};
    const double R = 1.0, T0 = 2.0;
    Gas gas = Gas(R, {EnergyModel::rotational(R, 0.05, 50), EnergyModel::vibrational(R, T0, 0.05, 50)}, 0.05, 50);
    // constant matching at one reference state fixes each mode's s_ref
    {
        double F = 0.7, G[2] = {0.7 * 1.3, 0.7 * gas.mode(1).e_int(1.3)};
        double gen = H_density(F, G, gas);
        double cf = closed_form_rot_vib(F, G[0], G[1], R, T0);
        // the whole offset goes to the first mode; it is zero up to round-off here
        gas = Gas(R,
                  {[&] {
                       auto m = EnergyModel::rotational(R, 0.05, 50);
                       m.set_s_ref(R * (gen - cf) / F);
                       return m;
                   }(),
                   EnergyModel::vibrational(R, T0, 0.05, 50)},
                  0.05, 50);
        r.data["s_ref_rot"] = gas.mode(0).s_ref();
    }
    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
        double F = 0.01 + 2.0 * U(rng);
        double G[2] = {F * (0.1 + 5.0 * U(rng)), F * gas.mode(1).e_int(0.1 + 8.0 * U(rng))};
        double gen = H_density(F, G, gas);
        double cf = closed_form_rot_vib(F, G[0], G[1], R, T0);
        worst = std::max(worst, std::abs(gen - cf) / std::max(1.0, std::abs(cf)));
    }
    r.passed = worst <= tol::vib_closed_form;
    r.data["max_error"] = worst;
    r.detail = "max |generic - closed form| / max(1,|H|) " + fmt("%.2e", worst) + " at 100 states (tol 1e-12)";
    return r;
}

} // namespace tpkin::acceptance
