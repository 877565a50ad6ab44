#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "state.hpp"

namespace tpkin {

enum class CollisionModel { bgk, fp };

inline std::string to_string(CollisionModel m) { return m == CollisionModel::bgk ? "bgk" : "fp"; }

/// Relaxation-time law. tau_eff = Kn * tau.
struct TauLaw {
    enum class Mode { constant, power } mode = Mode::constant;
    double tau = 1.0;
    double mu_ref = 1.0;
    double T_ref = 1.0;
    double omega = 0.0;
};

/// In power mode tau is chosen so that the model's shear viscosity
/// (tau p for BGK, tau p / 2 for FP) follows mu_ref (T / T_ref)^omega.
inline double tau_law(const Moments &m, const TauLaw &law, CollisionModel model, double kn)
{
    if (!(m.p > 0.0)) throw DomainError("tau_law: pressure must be positive");
    double tau = law.tau;
    if (law.mode == TauLaw::Mode::power) {
        double mu = law.mu_ref * std::pow(m.T / law.T_ref, law.omega);
        tau = (model == CollisionModel::bgk ? 1.0 : 2.0) * mu / m.p;
    }
    return kn * tau;
}

/// Time derivatives (M - F) / tau and (e_int^i(T) M - G^i) / tau.
inline ReducedState bgk_rhs(const ReducedState &s, const VelocityGrid &g, const Gas &gas, double tau_eff)
{
    Moments m = compute_moments(s, g, gas, false);
    auto pm = project_maxwellian(m, g, gas.R());
    ReducedState d(s.nv(), s.n_modes());
    pm.fill(d.F());
    for (size_t i = 0; i < s.n_modes(); ++i) {
        double ei = gas.mode(i).e_int(m.T);
        for (size_t a = 0; a < s.nv(); ++a) d.G(i)[a] = (ei * d.F()[a] - s.G(i)[a]) / tau_eff;
    }
    for (size_t a = 0; a < s.nv(); ++a) d.F()[a] = (d.F()[a] - s.F()[a]) / tau_eff;
    return d;
}

/// Exact relaxation over dt at frozen equilibrium.
inline void bgk_step_exact(ReducedState &s, const VelocityGrid &g, const Gas &gas, double dt, double tau_eff)
{
    if (!(dt > 0.0) || !(tau_eff > 0.0)) throw StepSizeError("bgk_step: dt and tau_eff must be positive");
    Moments m = compute_moments(s, g, gas, false);
    auto pm = project_maxwellian(m, g, gas.R());
    double x = std::exp(-dt / tau_eff);
    std::vector<double> M(s.nv());
    pm.fill(M.data());
    double *F = s.F();
    for (size_t a = 0; a < s.nv(); ++a) F[a] = M[a] + (F[a] - M[a]) * x;
    for (size_t i = 0; i < s.n_modes(); ++i) {
        double ei = gas.mode(i).e_int(m.T);
        double *G = s.G(i);
        for (size_t a = 0; a < s.nv(); ++a) {
            double Ge = ei * M[a];
            G[a] = Ge + (G[a] - Ge) * x;
        }
    }
}

} // namespace tpkin
