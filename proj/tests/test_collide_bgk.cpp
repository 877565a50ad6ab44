#include <gtest/gtest.h>

#include <cmath>

#include <tpkin/collide_bgk.hpp>
#include <tpkin/entropy.hpp>

using namespace tpkin;

namespace {

const double kR = 1.0;

std::vector<Gas> gases()
{
    return {Gas(kR, {EnergyModel::rotational(kR, 0.05, 50)}, 0.05, 50),
            Gas(kR, {EnergyModel::vibrational(kR, 2.0, 0.05, 50)}, 0.05, 50),
            Gas(kR, {EnergyModel::polynomial(kR, {0.0, 1.0, 0.15, 0.02}, 0.05, 50)}, 0.05, 50),
            Gas(kR, {EnergyModel::rotational(kR, 0.05, 50), EnergyModel::vibrational(kR, 2.0, 0.05, 50)}, 0.05,
                50)};
}

// two drifting Maxwellians with internal energy out of balance with translation
ReducedState bimodal(const VelocityGrid &g, const Gas &gas)
{
    ReducedState s(g.size(), gas.n_modes());
    auto M1 = maxwellian(0.6, {0.8, 0.1, 0}, 0.7, kR, g), M2 = maxwellian(0.4, {-0.9, 0, 0.2}, 1.2, kR, g);
    for (size_t a = 0; a < g.size(); ++a) {
        s.F()[a] = M1[a] + M2[a];
        for (size_t m = 0; m < gas.n_modes(); ++m)
            s.G(m)[a] = gas.mode(m).e_int(m == 0 ? 0.4 : 1.6) * M1[a] + gas.mode(m).e_int(0.6) * M2[a];
    }
    return s;
}

struct Totals {
    double mass, mx, my, mz, energy;
};

Totals totals(const ReducedState &s, const VelocityGrid &g)
{
    Totals t{};
    t.mass = g.integrate(s.F());
    t.mx = g.integrate_with(s.F(), [](const Vec3 &v) { return v[0]; });
    t.my = g.integrate_with(s.F(), [](const Vec3 &v) { return v[1]; });
    t.mz = g.integrate_with(s.F(), [](const Vec3 &v) { return v[2]; });
    t.energy = g.integrate_with(s.F(), [](const Vec3 &v) { return 0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); });
    for (size_t m = 0; m < s.n_modes(); ++m) t.energy += g.integrate(s.G(m));
    return t;
}

} // namespace

TEST(BgkRhs, VanishesAtEquilibrium)
{
    Gas gas = gases()[3];
    auto g = build_grid({0, 0, 0}, 1.0, kR, 24, 6.0);
    ReducedState s(g.size(), 2);
    set_equilibrium(s, project_maxwellian(1.1, {0.2, 0, 0}, 0.9, kR, g), gas);
    auto d = bgk_rhs(s, g, gas, 0.5);
    double peak = *std::max_element(s.F(), s.F() + g.size());
    for (size_t c = 0; c < d.n_components(); ++c)
        for (size_t a = 0; a < g.size(); ++a) ASSERT_NEAR(d.component(c)[a], 0.0, 1e-12 * peak);
}

TEST(BgkRhs, ConservesCollisionInvariants)
{
    for (const Gas &gas : gases()) {
        auto g = build_grid({0, 0, 0}, 1.0, kR, 24, 6.0);
        auto s = bimodal(g, gas);
        auto d = bgk_rhs(s, g, gas, 0.3);
        Totals t = totals(d, g);
        EXPECT_NEAR(t.mass, 0.0, 1e-13);
        EXPECT_NEAR(t.mx, 0.0, 1e-13);
        EXPECT_NEAR(t.my, 0.0, 1e-13);
        EXPECT_NEAR(t.mz, 0.0, 1e-13);
        EXPECT_NEAR(t.energy, 0.0, 1e-13);
    }
}

TEST(BgkRhs, InternalTargetIsEquilibriumEnergyTimesMaxwellian)
{
    Gas gas = gases()[1];
    auto g = build_grid({0, 0, 0}, 1.0, kR, 16, 6.0);
    auto s = bimodal(g, gas);
    const double tau = 0.7;
    auto d = bgk_rhs(s, g, gas, tau);
    Moments m = compute_moments(s, g, gas, false);
    auto M = project_maxwellian(m, g, kR).values();
    double ei = gas.mode(0).e_int(m.T);
    for (size_t a = 0; a < g.size(); a += 37) {
        EXPECT_NEAR(d.F()[a], (M[a] - s.F()[a]) / tau, 1e-13);
        EXPECT_NEAR(d.G(0)[a], (ei * M[a] - s.G(0)[a]) / tau, 1e-13);
    }
}

TEST(BgkStep, HalvesDeviationAfterLn2Tau)
{
    Gas gas = gases()[0];
    auto g = build_grid({0, 0, 0}, 1.0, kR, 16, 6.0);
    auto s = bimodal(g, gas);
    Moments m = compute_moments(s, g, gas, false);
    auto M = project_maxwellian(m, g, kR).values();
    double ei = gas.mode(0).e_int(m.T);
    auto s0 = s;
    bgk_step_exact(s, g, gas, 0.4 * std::log(2.0), 0.4);
    for (size_t a = 0; a < g.size(); ++a) {
        ASSERT_NEAR(s.F()[a] - M[a], 0.5 * (s0.F()[a] - M[a]), 1e-14);
        ASSERT_NEAR(s.G(0)[a] - ei * M[a], 0.5 * (s0.G(0)[a] - ei * M[a]), 1e-14);
    }
}

TEST(BgkStep, InfiniteStepLandsOnEquilibrium)
{
    Gas gas = gases()[3];
    auto g = build_grid({0, 0, 0}, 1.0, kR, 16, 6.0);
    auto s = bimodal(g, gas);
    Moments m = compute_moments(s, g, gas, false);
    auto M = project_maxwellian(m, g, kR).values();
    bgk_step_exact(s, g, gas, 1e300, 1.0);
    for (size_t a = 0; a < g.size(); ++a) {
        ASSERT_DOUBLE_EQ(s.F()[a], M[a]);
        for (size_t k = 0; k < 2; ++k) ASSERT_NEAR(s.G(k)[a], gas.mode(k).e_int(m.T) * M[a], 1e-15);
    }
}

TEST(BgkStep, HomogeneousRelaxationFollowsExponential)
{
    Gas gas = gases()[3];
    auto g = build_grid({0, 0, 0}, 1.0, kR, 16, 6.0);
    auto s = bimodal(g, gas);
    const auto s0 = s;
    Moments m = compute_moments(s, g, gas, false);
    auto M = project_maxwellian(m, g, kR).values();
    const double tau = 1.0, dt = 0.05;
    double t = 0, worst = 0;
    for (int out = 1; out <= 5; ++out) {
        for (int k = 0; k < 20 * out; ++k) {
            bgk_step_exact(s, g, gas, dt, tau);
            t += dt;
        }
        double x = std::exp(-t / tau);
        for (size_t a = 0; a < g.size(); ++a) worst = std::max(worst, std::abs(s.F()[a] - (M[a] + (s0.F()[a] - M[a]) * x)));
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(BgkStep, ConservesAndDissipatesForEveryEnergyModel)
{
    for (const Gas &gas : gases()) {
        auto g = build_grid({0, 0, 0}, 1.0, kR, 20, 6.0);
        auto s = bimodal(g, gas);
        Totals t0 = totals(s, g);
        double H = H_total(s, g, gas).H_total;
        for (double dt : {0.01, 0.1, 1.0, 10.0, 0.05, 0.3}) {
            bgk_step_exact(s, g, gas, dt, 0.5);
            Totals t = totals(s, g);
            EXPECT_NEAR(t.mass / t0.mass, 1.0, 1e-12);
            EXPECT_NEAR(t.mx, t0.mx, 1e-12);
            EXPECT_NEAR(t.my, t0.my, 1e-12);
            EXPECT_NEAR(t.mz, t0.mz, 1e-12);
            EXPECT_NEAR(t.energy / t0.energy, 1.0, 1e-12);
            double Hn = H_total(s, g, gas).H_total;
            EXPECT_LE(Hn, H + 1e-13);
            H = Hn;
        }
    }
}

TEST(BgkStep, EquilibriumIsFixedPoint)
{
    Gas gas = gases()[2];
    auto g = build_grid({0, 0, 0}, 1.0, kR, 16, 6.0);
    ReducedState s(g.size(), 1);
    set_equilibrium(s, project_maxwellian(1.0, {0.1, 0.2, 0}, 1.4, kR, g), gas);
    auto s0 = s;
    for (int k = 0; k < 10; ++k) bgk_step_exact(s, g, gas, 0.3, 1.0);
    for (size_t c = 0; c < 2; ++c)
        for (size_t a = 0; a < g.size(); ++a)
            ASSERT_NEAR(s.component(c)[a], s0.component(c)[a], 1e-12 * std::max(1.0, s0.component(c)[a]));
}

TEST(RelaxationTime, ConstantAndPowerLaws)
{
    Moments m;
    m.p = 2.0;
    m.T = 1.0;
    TauLaw law;
    law.tau = 1e-4;
    EXPECT_DOUBLE_EQ(tau_law(m, law, CollisionModel::bgk, 0.01), 1e-6);

    law.mode = TauLaw::Mode::power;
    law.mu_ref = 0.3;
    law.T_ref = 1.0;
    law.omega = 0.0;
    EXPECT_DOUBLE_EQ(tau_law(m, law, CollisionModel::bgk, 1.0), 0.15);
    EXPECT_DOUBLE_EQ(tau_law(m, law, CollisionModel::fp, 1.0), 0.3);

    law.omega = 1.0;
    double t1 = tau_law(m, law, CollisionModel::bgk, 1.0);
    m.T = 2.0;
    EXPECT_DOUBLE_EQ(tau_law(m, law, CollisionModel::bgk, 1.0), 2 * t1);

    m.p = 0.0;
    EXPECT_THROW(tau_law(m, law, CollisionModel::bgk, 1.0), DomainError);
}
