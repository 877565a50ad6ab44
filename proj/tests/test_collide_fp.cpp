#include <gtest/gtest.h>

#include <cmath>

#include <tpkin/chapman.hpp>
#include <tpkin/collide_fp.hpp>
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

// anisotropic Gaussian with directional temperatures (Tx, Ty, Tz)
ReducedState anisotropic(const VelocityGrid &g, const Gas &gas, Vec3 Tdir, double T_int)
{
    ReducedState s(g.size(), gas.n_modes());
    auto F = g.tabulate([&](const Vec3 &v) {
        double e = 0, nrm = 1;
        for (int d = 0; d < 3; ++d) {
            e += v[d] * v[d] / (2 * kR * Tdir[d]);
            nrm *= std::sqrt(2 * M_PI * kR * Tdir[d]);
        }
        return std::exp(-e) / nrm;
    });
    for (size_t a = 0; a < g.size(); ++a) {
        s.F()[a] = F[a];
        for (size_t m = 0; m < gas.n_modes(); ++m) s.G(m)[a] = gas.mode(m).e_int(T_int) * F[a];
    }
    return s;
}

double second_moment(const VelocityGrid &g, const double *F, int d)
{
    return g.integrate_with(F, [d](const Vec3 &v) { return v[d] * v[d]; });
}

Vec3 totals_mom(const ReducedState &s, const VelocityGrid &g)
{
    Vec3 m;
    for (int d = 0; d < 3; ++d) m[d] = g.integrate_with(s.F(), [d](const Vec3 &v) { return v[d]; });
    return m;
}

double total_energy(const ReducedState &s, const VelocityGrid &g)
{
    double e = g.integrate_with(s.F(), [](const Vec3 &v) { return 0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); });
    for (size_t m = 0; m < s.n_modes(); ++m) e += g.integrate(s.G(m));
    return e;
}

} // namespace

TEST(FpRhs, VanishesAtEquilibrium)
{
    Gas gas = gases()[3];
    auto g = build_grid({0, 0, 0}, 1.0, kR, 24, 6.0);
    ReducedState s(g.size(), 2);
    set_equilibrium(s, project_maxwellian(1.1, {0.2, -0.1, 0}, 0.9, kR, g), gas);
    auto d = fp_rhs(s, g, gas, 0.5);
    double peak = *std::max_element(s.F(), s.F() + g.size());
    for (size_t c = 0; c < d.n_components(); ++c)
        for (size_t a = 0; a < g.size(); ++a) ASSERT_NEAR(d.component(c)[a], 0.0, 1e-12 * peak);
}

TEST(FpRhs, ConservesCollisionInvariants)
{
    for (const Gas &gas : gases()) {
        auto g = build_grid({0, 0, 0}, 1.0, kR, 24, 6.0);
        auto s = bimodal(g, gas);
        auto d = fp_rhs(s, g, gas, 0.3);
        EXPECT_NEAR(g.integrate(d.F()), 0.0, 1e-13);
        for (double m : totals_mom(d, g)) EXPECT_NEAR(m, 0.0, 1e-13);
        EXPECT_NEAR(total_energy(d, g), 0.0, 1e-13);
    }
}

TEST(FpRhs, TranslationalEnergyFollowsExchangeLaw)
{
    Gas gas = gases()[0];
    auto g = build_grid({0, 0, 0}, 1.0, kR, 32, 6.0);
    auto s = anisotropic(g, gas, {1.3, 1.3, 1.3}, 0.6);
    const double tau = 0.4;
    Moments m = compute_moments(s, g, gas, false);
    auto d = fp_rhs(s, g, gas, tau);
    double rate = 0.5 * (second_moment(g, d.F(), 0) + second_moment(g, d.F(), 1) + second_moment(g, d.F(), 2));
    double expect = 2.0 / tau * (1.5 * m.rho * kR * m.T - m.rho * m.e_tr);
    EXPECT_LT(expect, 0.0); // hot translation gives energy to the internal mode
    EXPECT_NEAR(rate, expect, 1e-10 * std::abs(expect));
}

TEST(FpRhs, AnisotropyDecaysAtTwiceCollisionRate)
{
    Gas gas = gases()[0];
    const double tau = 0.4;
    auto ratio = [&](int n) {
        auto g = build_grid({0, 0, 0}, 1.0, kR, n, 6.0);
        auto s = anisotropic(g, gas, {1.2, 0.8, 1.0}, 1.0);
        auto d = fp_rhs(s, g, gas, tau);
        double diff = second_moment(g, s.F(), 0) - second_moment(g, s.F(), 1);
        double rate = second_moment(g, d.F(), 0) - second_moment(g, d.F(), 1);
        return rate / (-2.0 / tau * diff);
    };
    // the stencil error is O(dv^2): about 1% at n = 32
    double e32 = std::abs(ratio(32) - 1.0), e48 = std::abs(ratio(48) - 1.0);
    EXPECT_LT(e32, 0.02);
    EXPECT_GT(std::log(e32 / e48) / std::log(1.5), 1.8);
}

TEST(FpStep, ConservesAndDissipatesForEveryEnergyModel)
{
    for (const Gas &gas : gases()) {
        auto g = build_grid({0, 0, 0}, 1.0, kR, 20, 6.0);
        auto s = bimodal(g, gas);
        double mass0 = g.integrate(s.F()), e0 = total_energy(s, g);
        Vec3 mom0 = totals_mom(s, g);
        double H = H_total(s, g, gas).H_total;
        for (double dt : {0.01, 0.1, 1.0, 0.05, 0.3, 3.0}) {
            fp_step(s, g, gas, dt, 0.5, 0.5);
            EXPECT_NEAR(g.integrate(s.F()) / mass0, 1.0, 1e-12);
            Vec3 mom = totals_mom(s, g);
            for (int k = 0; k < 3; ++k) EXPECT_NEAR(mom[k], mom0[k], 1e-12);
            EXPECT_NEAR(total_energy(s, g) / e0, 1.0, 1e-12);
            double Hn = H_total(s, g, gas).H_total;
            EXPECT_LE(Hn, H + 1e-13);
            H = Hn;
        }
    }
}

TEST(FpStep, EquilibriumUnchangedOverManySteps)
{
    Gas gas = gases()[3];
    auto g = build_grid({0, 0, 0}, 1.0, kR, 16, 6.0);
    ReducedState s(g.size(), 2);
    set_equilibrium(s, project_maxwellian(1.0, {0.1, 0, -0.2}, 1.2, kR, g), gas);
    auto s0 = s;
    for (int k = 0; k < 100; ++k) fp_step(s, g, gas, 0.1, 0.7, 0.5);
    for (size_t c = 0; c < 3; ++c)
        for (size_t a = 0; a < g.size(); ++a)
            ASSERT_NEAR(s.component(c)[a], s0.component(c)[a], 1e-12 * std::max(1.0, s0.component(c)[a]));
}

TEST(FpStep, LongStepPutsInternalEnergyInEquilibrium)
{
    Gas gas = gases()[1];
    auto g = build_grid({0, 0, 0}, 1.0, kR, 16, 6.0);
    auto s = bimodal(g, gas);
    Moments m = compute_moments(s, g, gas, false);
    fp_step(s, g, gas, 1e6, 1.0, 1.0);
    double ei = gas.mode(0).e_int(m.T);
    for (size_t a = 0; a < g.size(); ++a)
        if (s.F()[a] > 1e-200) ASSERT_NEAR(s.G(0)[a] / s.F()[a], ei, 1e-8 * ei);
}

TEST(FpStep, DirectionalTemperaturesRelaxExponentially)
{
    Gas gas = gases()[0];
    auto g = build_grid({0, 0, 0}, 1.0, kR, 24, 6.0);
    auto s = anisotropic(g, gas, {1.2, 0.8, 1.0}, 1.0);
    const double tau = 1.0, dt = 0.02;
    double d0 = second_moment(g, s.F(), 0) - second_moment(g, s.F(), 1);
    for (int k = 0; k < 25; ++k) fp_step(s, g, gas, dt, tau, 0.5);
    double d1 = second_moment(g, s.F(), 0) - second_moment(g, s.F(), 1);
    // stencil error at n = 24 is a couple of percent of the rate
    EXPECT_NEAR(d1 / d0 / std::exp(-2.0 * 0.5 / tau), 1.0, 0.03);
}

TEST(FpStep, ConvergesToTheMaxwellianPair)
{
    Gas gas = gases()[3];
    auto g = build_grid({0, 0, 0}, 1.0, kR, 16, 6.0);
    auto s = bimodal(g, gas);
    Moments m = compute_moments(s, g, gas, false);
    for (int k = 0; k < 120; ++k) fp_step(s, g, gas, 0.5, 1.0, 1.0);
    auto M = project_maxwellian(m, g, kR).values();
    double l1 = 0, l1g = 0;
    for (size_t a = 0; a < g.size(); ++a) {
        l1 += std::abs(s.F()[a] - M[a]);
        l1g += std::abs(s.G(1)[a] - gas.mode(1).e_int(m.T) * M[a]);
    }
    EXPECT_LT(l1 * g.weight() / m.rho, 1e-8);
    EXPECT_LT(l1g * g.weight() / (m.rho * gas.mode(1).e_int(m.T)), 1e-8);
}

TEST(FpStep, RejectsBadStep)
{
    Gas gas = gases()[0];
    auto g = build_grid({0, 0, 0}, 1.0, kR, 8, 6.0);
    ReducedState s(g.size(), 1);
    set_equilibrium(s, project_maxwellian(1.0, {0, 0, 0}, 1.0, kR, g), gas);
    EXPECT_ANY_THROW(fp_step(s, g, gas, -0.1, 1.0));
}

TEST(LinearizedOperator, EigenrelationsConvergeAtSecondOrder)
{
    Gas gas(kR, {EnergyModel::vibrational(kR, 2.0, 0.05, 50)}, 0.05, 50);
    auto ga = build_grid({0, 0, 0}, 1.0, 1.0, 24, 6.0), gb = build_grid({0, 0, 0}, 1.0, 1.0, 48, 6.0);
    auto ra = eigen_residuals(ga, gas, 1.0, -1.0 / 3.0, 0.5), rb = eigen_residuals(gb, gas, 1.0, -1.0 / 3.0, 0.5);
    EXPECT_GE(observed_order(ra.LF_A, rb.LF_A, ga.dv(0), gb.dv(0)), 1.9);
    EXPECT_GE(observed_order(ra.LF_B, rb.LF_B, ga.dv(0), gb.dv(0)), 1.9);
    EXPECT_GE(observed_order(ra.LG_A, rb.LG_A, ga.dv(0), gb.dv(0)), 1.9);
    EXPECT_GE(observed_order(ra.LG_B, rb.LG_B, ga.dv(0), gb.dv(0)), 1.9);
    EXPECT_LT(rb.LF_A, 0.1);
}
