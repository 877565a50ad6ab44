#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <tpkin/run.hpp>

using namespace tpkin;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("tpkin_cfg_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string write(const std::string &name, const std::string &text) const
    {
        std::ofstream(path / name) << text;
        return (path / name).string();
    }
};

std::string read(const fs::path &p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string error_of(const std::string &path, const ConfigOverrides &ov = {})
{
    try {
        parse_config(path, ov);
    } catch (const ConfigError &e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(Config, MinimalRelaxFillsDefaults)
{
    TempDir d;
    auto c = parse_config(d.write("relax.ini", "[case]\ntype = relax\n"));
    EXPECT_EQ(c.kind, CaseKind::relax);
    EXPECT_EQ(c.n, 32);
    EXPECT_DOUBLE_EQ(c.span, 6.0);
    EXPECT_EQ(c.splitting, Splitting::strang);
    EXPECT_EQ(c.n_cells, 1);
    EXPECT_EQ(c.boundary, BoundaryKind::periodic);
    EXPECT_EQ(c.provenance.at("case.type"), "file");
    EXPECT_EQ(c.provenance.at("grid.n"), "default");
    EXPECT_GT(c.t_end, 0.0);
}

TEST(Config, CouetteWithoutWallSpeedNamesTheKey)
{
    TempDir d;
    auto msg = error_of(d.write("c.ini", "[case]\ntype = couette\n"));
    EXPECT_NE(msg.find("[case].u_wall"), std::string::npos) << msg;
    auto ok = parse_config(d.write("c2.ini", "[case]\ntype = couette\nu_wall = 0.1\n"));
    EXPECT_EQ(ok.n_cells, 100);
    EXPECT_EQ(ok.boundary, BoundaryKind::diffuse_wall);
}

TEST(Config, UnknownKeysAndSectionsRejected)
{
    TempDir d;
    auto msg = error_of(d.write("a.ini", "[grid]\nbogus = 3\n"));
    EXPECT_NE(msg.find("[grid].bogus"), std::string::npos) << msg;
    msg = error_of(d.write("b.ini", "[nonsense]\nn = 3\n"));
    EXPECT_NE(msg.find("[nonsense]"), std::string::npos) << msg;
    msg = error_of(d.write("c.ini", "[grid]\nn = 4\n"));
    EXPECT_NE(msg.find("[grid].n"), std::string::npos) << msg;
    msg = error_of(d.write("e.ini", "[grid]\nspan = wide\n"));
    EXPECT_NE(msg.find("[grid].span"), std::string::npos) << msg;
    msg = error_of(d.write("f.ini", "[case]\ntype = sod\n[gas]\nmodes = rotational, vibrational\n"));
    EXPECT_NE(msg.find("[gas].modes"), std::string::npos) << msg;
    msg = error_of(d.write("g.ini", "[case]\ntype = relax\n"), {{"case.nothing", "1"}});
    EXPECT_NE(msg.find("[case].nothing"), std::string::npos) << msg;
}

TEST(Config, OverrideBeatsFileAndRecordsProvenance)
{
    TempDir d;
    auto path = d.write("k.ini", "[case]\ntype = relax\nkn = 0.5\n");
    auto c = parse_config(path, {{"case.kn", "0.125"}});
    EXPECT_DOUBLE_EQ(c.kn, 0.125);
    EXPECT_EQ(c.provenance.at("case.kn"), "cli");
    auto echo = config_echo(c);
    EXPECT_NE(echo.find("kn = 0.125  ; cli"), std::string::npos) << echo;
    // the hash ignores where a value came from
    auto same = parse_config(d.write("k2.ini", "[case]\ntype = relax\nkn = 0.125\n"));
    EXPECT_EQ(config_hash(same), config_hash(c));
    EXPECT_NE(config_hash(parse_config(path)), config_hash(c));
}

TEST(Config, GasModelsFromConfig)
{
    TempDir d;
    auto c = parse_config(d.write("g.ini", "[gas]\nR = 287\nmodes = rotational, vibrational, polynomial\n"
                                           "theta_vib = 3371\npoly_coeffs = 0, 10, 0.01\n"));
    Gas gas = c.make_gas();
    ASSERT_EQ(gas.n_modes(), 3u);
    EXPECT_DOUBLE_EQ(gas.mode(0).e_int(300.0), 287.0 * 300.0);
    EXPECT_NEAR(gas.mode(1).e_int(3371.0 / 4), 287.0 * 3371.0 / (std::exp(4.0) - 1.0), 1e-9);
    EXPECT_THROW(gas.mode(1).e_int(3371.0), RangeError); // outside the tabulated range
    EXPECT_DOUBLE_EQ(gas.mode(2).e_int(100.0), 10.0 * 100.0 + 0.01 * 1e4);
    auto mono = parse_config(d.write("m.ini", "[gas]\nmodes = none\n")).make_gas();
    EXPECT_EQ(mono.n_modes(), 0u);
}

TEST(RunCase, RelaxWritesManifestAndIsBitReproducible)
{
    TempDir d;
    auto path = d.write("r.ini", "[case]\ntype = relax\nmodel = fp\nseed = 7\n[grid]\nn = 10\n[output]\nsnapshots = 2\n");
    auto c = parse_config(path);
    std::ostringstream log;
    auto m1 = run_case(c, (d.path / "one").string(), log);
    auto m2 = run_case(c, (d.path / "two").string(), log);
    for (auto name : {"manifest.json", "effective.ini", "entropy.jsonl"}) EXPECT_TRUE(fs::exists(d.path / "one" / name)) << name;
    EXPECT_EQ(m1["config_hash"], m2["config_hash"]);
    EXPECT_EQ(m1["seed"], 7);
    int csv = 0;
    for (auto &e : fs::directory_iterator(d.path / "one")) {
        if (e.path().extension() != ".csv") continue;
        ++csv;
        EXPECT_EQ(read(e.path()), read(d.path / "two" / e.path().filename())) << e.path();
    }
    EXPECT_GE(csv, 2);
    EXPECT_EQ(read(d.path / "one" / "entropy.jsonl"), read(d.path / "two" / "entropy.jsonl"));
    // the homogeneous relaxation conserves and dissipates
    auto &r = m1["results"];
    for (auto q : {"mass", "momentum", "energy"}) EXPECT_LT(r["relative_drift"][q].get<double>(), 1e-12) << r.dump();
    EXPECT_TRUE(r["entropy_non_increasing_in_collisions"].get<bool>()) << r.dump();
}
