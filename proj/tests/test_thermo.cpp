#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <tpkin/thermo.hpp>

using namespace tpkin;

namespace {
const double kE = std::exp(1.0);

std::vector<EnergyModel> analytic_models()
{
    return {EnergyModel::rotational(287.0), EnergyModel::vibrational(287.0, 3371.0),
            EnergyModel::polynomial(287.0, {0.0, 287.0, 0.05, 1e-5})};
}
} // namespace

TEST(EnergyLaw, RotationalIsLinear)
{
    auto m = EnergyModel::rotational(287.0);
    EXPECT_DOUBLE_EQ(m.e_int(300.0), 86100.0);
    EXPECT_DOUBLE_EQ(m.c_v_int(1234.0), 287.0);
    EXPECT_NEAR(m.T_int(287.0 * 500.0), 500.0, 1e-12 * 500.0);
}

TEST(EnergyLaw, VibrationalAtCharacteristicTemperature)
{
    const double R = 287.0, T0 = 3371.0;
    auto m = EnergyModel::vibrational(R, T0);
    EXPECT_NEAR(m.e_int(T0), R * T0 / (kE - 1.0), 1e-12 * R * T0);
    EXPECT_NEAR(m.e_int(T0) / (R * T0), 0.581977, 1e-6);
    EXPECT_NEAR(m.c_v_int(T0) / R, kE / ((kE - 1) * (kE - 1)), 1e-12);
    EXPECT_NEAR(m.c_v_int(T0) / R, 0.9207, 1e-4);
    EXPECT_NEAR(m.T_int(R * T0 / (kE - 1.0)), T0, 1e-10 * T0);
}

TEST(EnergyLaw, TabulatedMidpointOfLinearSegment)
{
    auto m = EnergyModel::tabulated(1.0, {200.0, 400.0}, {100.0, 300.0});
    EXPECT_NEAR(m.e_int(300.0), 200.0, 1e-12);
    EXPECT_DOUBLE_EQ(m.T_int(100.0), 200.0);
    EXPECT_DOUBLE_EQ(m.T_int(300.0), 400.0);
}

TEST(EnergyLaw, TabulatedHitsKnotsAndStaysMonotone)
{
    std::vector<double> T{100, 200, 300, 500, 800, 1200}, e{10, 30, 35, 90, 300, 310};
    auto m = EnergyModel::tabulated(1.0, T, e);
    for (size_t k = 0; k < T.size(); ++k) {
        EXPECT_NEAR(m.e_int(T[k]), e[k], 1e-12 * e[k]);
        EXPECT_NEAR(m.T_int(e[k]), T[k], 1e-8 * T[k]);
    }
    double prev = -1;
    for (int i = 0; i <= 2000; ++i) {
        double t = 100.0 + 1100.0 * i / 2000.0;
        double v = m.e_int(t);
        EXPECT_GT(m.c_v_int(t), 0.0) << t;
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(EnergyLaw, TableFileWithComments)
{
    std::string path = testing::TempDir() + "/table.dat";
    {
        std::ofstream o(path);
        o << "# T e_int\n100 50\n\n200 120 # inline\n400 300\n";
    }
    auto m = EnergyModel::load_table(1.0, path);
    EXPECT_DOUBLE_EQ(m.t_min(), 100.0);
    EXPECT_DOUBLE_EQ(m.t_max(), 400.0);
    EXPECT_NEAR(m.e_int(200.0), 120.0, 1e-12);
}

TEST(EnergyLaw, RejectsBadInput)
{
    EXPECT_THROW(EnergyModel::tabulated(1.0, {1, 1}, {1, 2}), DomainError);
    EXPECT_THROW(EnergyModel::tabulated(1.0, {1, 2}, {2, 1}), DomainError);
    EXPECT_THROW(EnergyModel::polynomial(1.0, {0.0, -1.0}), DomainError);
    EXPECT_THROW(EnergyModel::vibrational(1.0, -3.0), DomainError);
    auto m = EnergyModel::rotational(1.0, 10.0, 100.0);
    EXPECT_THROW(m.e_int(5.0), RangeError);
    EXPECT_THROW(m.e_int(101.0), RangeError);
}

TEST(EnergyEntropy, ClosedFormValues)
{
    const double R = 287.0, T0 = 3371.0;
    EXPECT_NEAR(EnergyModel::rotational(R).s_int(R), R * std::log(R), 1e-12 * R * std::log(R));
    EXPECT_NEAR(EnergyModel::vibrational(R, T0).s_int(R * T0), 2.0 * R * std::log(2.0), 1e-12 * R);
}

TEST(EnergyEntropy, DerivativeIsInverseTemperature)
{
    auto models = analytic_models();
    models.push_back(EnergyModel::tabulated(287.0, {100, 300, 600, 1500, 5000}, {3e4, 8e4, 2e5, 4.5e5, 1.6e6}));
    for (auto &m : models) {
        for (double T : {150.0, 400.0, 1000.0, 3000.0}) {
            double e = m.e_int(T);
            double h = 1e-4 * e;
            double ds = (m.s_int(e + h) - m.s_int(e - h)) / (2 * h);
            EXPECT_NEAR(ds * m.T_int(e), 1.0, 1e-6) << to_string(m.kind()) << " T=" << T;
        }
    }
}

TEST(EnergyEntropy, ReferenceConstantShiftsOnly)
{
    auto m = EnergyModel::vibrational(1.0, 2.0, 0.05, 50);
    double s0 = m.s_int(0.7);
    m.set_s_ref(3.25);
    EXPECT_DOUBLE_EQ(m.s_int(0.7), s0 + 3.25);
}

TEST(GasProperties, MonatomicAndRotationalInversion)
{
    const double R = 287.0;
    Gas mono(R);
    EXPECT_NEAR(mono.T_of_e(450.0 * R), 300.0, 1e-12 * 300.0);
    EXPECT_THROW(mono.T_of_e(4.5 * R), RangeError); // 3 K is below the default T_min
    EXPECT_DOUBLE_EQ(mono.c_p(500.0), 2.5 * R);
    Gas rot(R, {EnergyModel::rotational(R)});
    EXPECT_NEAR(rot.T_of_e(2.5 * R * 350.0), 350.0, 1e-12 * 350.0);
}

TEST(GasProperties, VibrationalInversionRecoversT0)
{
    const double R = 287.0, T0 = 3371.0;
    Gas g(R, {EnergyModel::vibrational(R, T0)});
    double e = 1.5 * R * T0 + R * T0 / (kE - 1.0);
    EXPECT_NEAR(g.T_of_e(e), T0, 1e-10 * T0);
}

TEST(GasProperties, InverseConsistencyAndMonotonicity)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(20.0, 15000.0);
    const double R = 287.0;
    std::vector<Gas> gases{Gas(R, {EnergyModel::rotational(R)}),
                           Gas(R, {EnergyModel::rotational(R), EnergyModel::vibrational(R, 3371.0)}),
                           Gas(R, {EnergyModel::polynomial(R, {0.0, 287.0, 0.05, 1e-5})})};
    for (auto &g : gases)
        for (int k = 0; k < 200; ++k) {
            double T1 = U(rng), T2 = U(rng);
            EXPECT_NEAR(g.T_of_e(g.e_of_T(T1)), T1, 1e-10 * T1);
            if (T1 < T2) EXPECT_LT(g.e_int(T1), g.e_int(T2));
            EXPECT_NEAR(g.c_p(T1) - g.c_v(T1), R, 1e-12 * R);
        }
    Gas tab(1.0, {EnergyModel::tabulated(1.0, {100, 300, 600, 1500}, {50, 200, 450, 1800})}, 100, 1500);
    for (double T : {120.0, 333.0, 777.0, 1400.0}) EXPECT_NEAR(tab.T_of_e(tab.e_of_T(T)), T, 1e-8 * T);
}

TEST(GasProperties, RangeIsIntersectionAndEnforced)
{
    Gas g(1.0, {EnergyModel::rotational(1.0, 20, 500), EnergyModel::vibrational(1.0, 2.0, 50, 1000)}, 10, 20000);
    EXPECT_DOUBLE_EQ(g.t_min(), 50.0);
    EXPECT_DOUBLE_EQ(g.t_max(), 500.0);
    EXPECT_THROW(g.T_of_e(g.e_of_T(500.0) * 2), Error);
    EXPECT_THROW(g.e_int(10.0), RangeError);
}
