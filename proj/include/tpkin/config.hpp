#pragma once

// INI configuration: sections [gas], [grid], [mesh], [case], [output].
// Requires Boost.PropertyTree (header-only).

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "collide_bgk.hpp"
#include "errors.hpp"
#include "thermo.hpp"
#include "transport.hpp"

namespace tpkin {

enum class CaseKind { relax, couette, fourier, sod, custom };

inline std::string to_string(CaseKind k)
{
    switch (k) {
    case CaseKind::relax: return "relax";
    case CaseKind::couette: return "couette";
    case CaseKind::fourier: return "fourier";
    case CaseKind::sod: return "sod";
    case CaseKind::custom: return "custom";
    }
    return "?";
}

inline CaseKind parse_case(const std::string &s)
{
    if (s == "relax") return CaseKind::relax;
    if (s == "couette") return CaseKind::couette;
    if (s == "fourier") return CaseKind::fourier;
    if (s == "sod") return CaseKind::sod;
    if (s == "custom") return CaseKind::custom;
    throw ConfigError("[case].type: unknown case '" + s + "' (relax|couette|fourier|sod|custom)");
}

inline CollisionModel parse_model(const std::string &s)
{
    if (s == "bgk") return CollisionModel::bgk;
    if (s == "fp") return CollisionModel::fp;
    throw ConfigError("[case].model: unknown collision model '" + s + "' (bgk|fp)");
}

/// Primitive state for piecewise-constant initial data.
struct SideState {
    double rho = 1.0, u = 0.0, T = 1.0;
};

struct SolverConfig {
    // [gas]
    double R = 1.0;
    std::vector<std::string> modes{"rotational"};
    double theta_vib = 2.0;
    std::vector<double> poly_coeffs;
    std::string table;
    double T_min = 1e-3, T_max = 1e3;
    // [grid]
    int n = 32;
    double span = 6.0;
    double u_ref = 0.0, T_ref = 0.0; // T_ref <= 0: case temperature
    // [mesh]
    int n_cells = 1;
    double x_min = 0.0, x_max = 1.0;
    BoundaryKind boundary = BoundaryKind::periodic;
    // [case]
    CaseKind kind = CaseKind::relax;
    CollisionModel model = CollisionModel::bgk;
    double kn = 1.0;
    TauLaw law;
    double rho = 1.0, T = 1.0, u = 0.0;
    double u_wall = 0.0, delta_T = 0.0;
    SideState left{1.0, 0.0, 1.0}, right{0.125, 0.0, 0.8};
    double x_split = 0.5;
    double t_end = 0.0; // <= 0: case default
    double cfl = 0.9;
    double dt_max = 0.0; // <= 0: no cap
    Splitting splitting = Splitting::strang;
    int order = 2;
    double theta = 1.0;
    unsigned long long seed = 12345;
    double perturbation = 0.3;
    int window = 100;
    double threshold = 1e-6;
    long max_steps = 200000;
    // [output]
    std::string output_dir = "out";
    int snapshots = 5;
    int entropy_every = 10;

    /// "section.key" -> "file", "default" or "cli".
    std::map<std::string, std::string> provenance;
    std::string source_path;

    Gas make_gas() const;
    /// Temperature used to size the velocity grid.
    double grid_temperature() const;
};

namespace detail {

inline const std::map<std::string, std::set<std::string>> &config_schema()
{
    static const std::map<std::string, std::set<std::string>> s = {
        {"gas", {"R", "modes", "theta_vib", "poly_coeffs", "table", "T_min", "T_max"}},
        {"grid", {"n", "span", "u_ref", "T_ref"}},
        {"mesh", {"n_cells", "x_min", "x_max", "boundary"}},
        {"case",
         {"type", "model", "kn", "tau", "tau_mode", "mu_ref", "T_mu_ref", "omega", "rho", "T", "u", "u_wall",
          "delta_T", "rho_left", "u_left", "T_left", "rho_right", "u_right", "T_right", "x_split", "t_end", "cfl",
          "dt_max", "splitting", "order", "theta", "seed", "perturbation", "window", "threshold", "max_steps"}},
        {"output", {"dir", "snapshots", "entropy_every"}},
    };
    return s;
}

inline std::vector<std::string> split_list(const std::string &s)
{
    std::vector<std::string> out;
    std::string tok;
    for (char ch : s) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!tok.empty()) out.push_back(tok);
            tok.clear();
        } else {
            tok += ch;
        }
    }
    if (!tok.empty()) out.push_back(tok);
    return out;
}

inline double to_double(const std::string &key, const std::string &v)
{
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception &) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

inline long to_long(const std::string &key, const std::string &v)
{
    try {
        size_t pos = 0;
        long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception &) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
}

// 64-bit FNV-1a, stable across platforms
inline std::uint64_t fnv1a(const std::string &s)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace detail

inline Gas SolverConfig::make_gas() const
{
    std::vector<EnergyModel> ms;
    for (auto &m : modes) {
        if (m == "rotational") ms.push_back(EnergyModel::rotational(R, T_min, T_max));
        else if (m == "vibrational") ms.push_back(EnergyModel::vibrational(R, theta_vib, T_min, T_max));
        else if (m == "polynomial") ms.push_back(EnergyModel::polynomial(R, poly_coeffs, T_min, T_max));
        else if (m == "tabulated") ms.push_back(EnergyModel::load_table(R, table));
        else throw ConfigError("[gas].modes: unknown energy model '" + m + "'");
    }
    return Gas(R, ms, T_min, T_max);
}

inline double SolverConfig::grid_temperature() const
{
    if (T_ref > 0.0) return T_ref;
    if (kind == CaseKind::sod || kind == CaseKind::custom) return std::max(left.T, right.T);
    return T;
}

/// Key-value overrides applied after the file, e.g. {"case.kn", "0.01"}.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

/// Parses and validates a configuration. An empty path gives the defaults
/// (relax case) plus the overrides.
inline SolverConfig parse_config(const std::string &path, const ConfigOverrides &overrides = {})
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    if (!path.empty()) {
        try {
            pt::read_ini(path, tree);
        } catch (const pt::ini_parser_error &e) {
            throw ConfigError(std::string("cannot read config: ") + e.what());
        }
    }
    const auto &schema = detail::config_schema();
    std::map<std::string, std::string> values, source;
    for (auto &sec : tree) {
        auto it = schema.find(sec.first);
        if (it == schema.end()) throw ConfigError("[" + sec.first + "]: unknown section");
        if (!sec.second.data().empty()) throw ConfigError("[" + sec.first + "]: malformed section");
        for (auto &kv : sec.second) {
            std::string key = "[" + sec.first + "]." + kv.first;
            if (!it->second.count(kv.first)) throw ConfigError(key + ": unknown key");
            values[sec.first + "." + kv.first] = kv.second.data();
            source[sec.first + "." + kv.first] = "file";
        }
    }
    for (auto &[k, v] : overrides) {
        auto dot = k.find('.');
        if (dot == std::string::npos) throw ConfigError("override '" + k + "': expected section.key");
        auto it = schema.find(k.substr(0, dot));
        if (it == schema.end() || !it->second.count(k.substr(dot + 1)))
            throw ConfigError("[" + k.substr(0, dot) + "]." + k.substr(dot + 1) + ": unknown key");
        values[k] = v;
        source[k] = "cli";
    }

    SolverConfig c;
    c.source_path = path;
    auto has = [&](const std::string &k) { return values.count(k) > 0; };
    auto label = [](const std::string &k) {
        auto dot = k.find('.');
        return "[" + k.substr(0, dot) + "]." + k.substr(dot + 1);
    };
    auto num = [&](const std::string &k, double &dst) {
        if (has(k)) dst = detail::to_double(label(k), values[k]);
    };
    auto integer = [&](const std::string &k, auto &dst) {
        if (has(k)) dst = static_cast<std::remove_reference_t<decltype(dst)>>(detail::to_long(label(k), values[k]));
    };
    auto str = [&](const std::string &k, std::string &dst) {
        if (has(k)) dst = values[k];
    };

    // case first: it sets defaults elsewhere
    if (has("case.type")) c.kind = parse_case(values["case.type"]);
    switch (c.kind) {
    case CaseKind::relax:
        c.n_cells = 1;
        c.boundary = BoundaryKind::periodic;
        c.kn = 1.0;
        break;
    case CaseKind::couette:
    case CaseKind::fourier:
        c.n_cells = 100;
        c.boundary = BoundaryKind::diffuse_wall;
        c.kn = 0.005;
        c.theta = 0.5;
        break;
    case CaseKind::sod:
        c.n_cells = 200;
        c.boundary = BoundaryKind::inflow_outflow;
        c.kn = 0.01;
        c.theta = 0.5;
        c.left = {1.0, 0.0, 1.0};
        c.right = {0.125, 0.0, 0.8};
        c.u_ref = 0.45;
        break;
    case CaseKind::custom:
        c.n_cells = 100;
        c.boundary = BoundaryKind::inflow_outflow;
        c.kn = 0.01;
        break;
    }

    num("gas.R", c.R);
    if (has("gas.modes")) {
        c.modes = detail::split_list(values["gas.modes"]);
        if (c.modes.size() == 1 && c.modes[0] == "none") c.modes.clear();
    }
    num("gas.theta_vib", c.theta_vib);
    if (has("gas.poly_coeffs")) {
        c.poly_coeffs.clear();
        for (auto &t : detail::split_list(values["gas.poly_coeffs"]))
            c.poly_coeffs.push_back(detail::to_double("[gas].poly_coeffs", t));
    }
    str("gas.table", c.table);
    num("gas.T_min", c.T_min);
    num("gas.T_max", c.T_max);

    integer("grid.n", c.n);
    num("grid.span", c.span);
    num("grid.u_ref", c.u_ref);
    num("grid.T_ref", c.T_ref);

    integer("mesh.n_cells", c.n_cells);
    num("mesh.x_min", c.x_min);
    num("mesh.x_max", c.x_max);
    if (has("mesh.boundary")) {
        const auto &b = values["mesh.boundary"];
        if (b == "periodic") c.boundary = BoundaryKind::periodic;
        else if (b == "diffuse_wall") c.boundary = BoundaryKind::diffuse_wall;
        else if (b == "inflow_outflow") c.boundary = BoundaryKind::inflow_outflow;
        else throw ConfigError("[mesh].boundary: unknown boundary '" + b + "'");
    }

    if (has("case.model")) c.model = parse_model(values["case.model"]);
    num("case.kn", c.kn);
    num("case.tau", c.law.tau);
    if (has("case.tau_mode")) {
        const auto &m = values["case.tau_mode"];
        if (m == "constant") c.law.mode = TauLaw::Mode::constant;
        else if (m == "power") c.law.mode = TauLaw::Mode::power;
        else throw ConfigError("[case].tau_mode: expected constant or power, got '" + m + "'");
    }
    num("case.mu_ref", c.law.mu_ref);
    num("case.T_mu_ref", c.law.T_ref);
    num("case.omega", c.law.omega);
    num("case.rho", c.rho);
    num("case.T", c.T);
    num("case.u", c.u);
    num("case.u_wall", c.u_wall);
    num("case.delta_T", c.delta_T);
    num("case.rho_left", c.left.rho);
    num("case.u_left", c.left.u);
    num("case.T_left", c.left.T);
    num("case.rho_right", c.right.rho);
    num("case.u_right", c.right.u);
    num("case.T_right", c.right.T);
    num("case.x_split", c.x_split);
    num("case.t_end", c.t_end);
    num("case.cfl", c.cfl);
    num("case.dt_max", c.dt_max);
    if (has("case.splitting")) {
        const auto &s = values["case.splitting"];
        if (s == "strang") c.splitting = Splitting::strang;
        else if (s == "lie") c.splitting = Splitting::lie;
        else throw ConfigError("[case].splitting: expected strang or lie, got '" + s + "'");
    }
    integer("case.order", c.order);
    num("case.theta", c.theta);
    if (has("case.seed")) {
        long s = detail::to_long("[case].seed", values["case.seed"]);
        if (s < 0) throw ConfigError("[case].seed: must be non-negative");
        c.seed = static_cast<unsigned long long>(s);
    }
    num("case.perturbation", c.perturbation);
    integer("case.window", c.window);
    num("case.threshold", c.threshold);
    integer("case.max_steps", c.max_steps);

    str("output.dir", c.output_dir);
    integer("output.snapshots", c.snapshots);
    integer("output.entropy_every", c.entropy_every);

    // validation
    auto need = [](bool ok, const std::string &key, const std::string &msg) {
        if (!ok) throw ConfigError(key + ": " + msg);
    };
    need(c.R > 0.0, "[gas].R", "must be positive (J/(kg K))");
    need(c.T_min > 0.0 && c.T_max > c.T_min, "[gas].T_min", "need 0 < T_min < T_max (K)");
    need(c.theta_vib > 0.0, "[gas].theta_vib", "must be positive (K)");
    for (auto &m : c.modes) {
        if (m == "polynomial") need(!c.poly_coeffs.empty(), "[gas].poly_coeffs", "required by the polynomial model");
        if (m == "tabulated") need(!c.table.empty(), "[gas].table", "required by the tabulated model");
    }
    need(c.n >= 8, "[grid].n", "must be at least 8");
    need(c.span >= 3.0, "[grid].span", "must be at least 3");
    need(c.n_cells >= 1, "[mesh].n_cells", "must be at least 1");
    need(c.x_max > c.x_min, "[mesh].x_max", "must exceed x_min (m)");
    need(c.kn > 0.0, "[case].kn", "must be positive");
    need(c.law.tau > 0.0, "[case].tau", "must be positive (s)");
    need(c.law.mu_ref > 0.0, "[case].mu_ref", "must be positive (Pa s)");
    need(c.law.T_ref > 0.0, "[case].T_mu_ref", "must be positive (K)");
    need(c.rho > 0.0, "[case].rho", "must be positive (kg/m^3)");
    need(c.T > 0.0, "[case].T", "must be positive (K)");
    need(c.left.rho > 0.0 && c.right.rho > 0.0, "[case].rho_left", "side densities must be positive");
    need(c.left.T > 0.0 && c.right.T > 0.0, "[case].T_left", "side temperatures must be positive");
    need(c.cfl > 0.0 && c.cfl <= 1.0, "[case].cfl", "must lie in (0, 1]");
    need(c.order == 1 || c.order == 2, "[case].order", "must be 1 or 2");
    need(c.theta >= 0.5 && c.theta <= 1.0, "[case].theta", "must lie in [0.5, 1]");
    need(c.perturbation >= 0.0 && c.perturbation < 1.0, "[case].perturbation", "must lie in [0, 1)");
    need(c.window >= 1, "[case].window", "must be positive");
    need(c.threshold > 0.0, "[case].threshold", "must be positive");
    need(c.max_steps >= 1, "[case].max_steps", "must be positive");
    need(c.snapshots >= 0, "[output].snapshots", "must be non-negative");
    need(c.entropy_every >= 0, "[output].entropy_every", "must be non-negative");
    switch (c.kind) {
    case CaseKind::relax:
        need(c.n_cells == 1 || c.boundary == BoundaryKind::periodic, "[mesh].boundary",
             "relax case needs a periodic mesh");
        break;
    case CaseKind::couette:
        need(has("case.u_wall"), "[case].u_wall", "couette case needs the wall speed");
        need(c.u_wall != 0.0, "[case].u_wall", "must be nonzero (m/s)");
        need(c.boundary == BoundaryKind::diffuse_wall, "[mesh].boundary", "couette case needs diffuse_wall");
        break;
    case CaseKind::fourier:
        need(has("case.delta_T"), "[case].delta_T", "fourier case needs the wall temperature difference");
        need(c.delta_T > 0.0 && c.delta_T < 2.0 * c.T, "[case].delta_T", "must lie in (0, 2T) (K)");
        need(c.boundary == BoundaryKind::diffuse_wall, "[mesh].boundary", "fourier case needs diffuse_wall");
        break;
    case CaseKind::sod:
        for (auto &m : c.modes)
            need(m == "rotational", "[gas].modes", "sod case needs a calorically perfect gas (rotational or none)");
        need(c.boundary == BoundaryKind::inflow_outflow, "[mesh].boundary", "sod case needs inflow_outflow");
        break;
    case CaseKind::custom: break;
    }
    if (c.t_end <= 0.0) {
        // case defaults, in units of the case's own scales
        if (c.kind == CaseKind::relax) c.t_end = 5.0 * c.kn * c.law.tau;
        else if (c.kind == CaseKind::sod) c.t_end = 0.2 * (c.x_max - c.x_min) / std::sqrt(c.R * c.left.T);
        else if (c.kind == CaseKind::custom) c.t_end = 0.1 * (c.x_max - c.x_min) / std::sqrt(c.R * c.grid_temperature());
    }

    for (auto &[sec, keys] : schema)
        for (auto &k : keys) {
            std::string full = sec + "." + k;
            c.provenance[full] = source.count(full) ? source[full] : "default";
        }
    return c;
}

/// Effective configuration as INI text; every key carries its provenance.
inline std::string config_echo(const SolverConfig &c)
{
    std::ostringstream o;
    o.precision(17);
    auto line = [&](const std::string &sec, const std::string &key, const auto &val) {
        auto it = c.provenance.find(sec + "." + key);
        o << key << " = " << val << "  ; " << (it == c.provenance.end() ? "derived" : it->second) << "\n";
    };
    auto join = [](const auto &v) {
        std::ostringstream s;
        s.precision(17);
        for (size_t i = 0; i < v.size(); ++i) s << (i ? " " : "") << v[i];
        return s.str();
    };
    auto bname = [](BoundaryKind b) {
        return b == BoundaryKind::periodic ? "periodic" : b == BoundaryKind::diffuse_wall ? "diffuse_wall"
                                                                                         : "inflow_outflow";
    };
    o << "; effective configuration" << (c.source_path.empty() ? "" : " from " + c.source_path) << "\n";
    o << "[gas]\n";
    line("gas", "R", c.R);
    line("gas", "modes", c.modes.empty() ? std::string("none") : join(c.modes));
    line("gas", "theta_vib", c.theta_vib);
    if (!c.poly_coeffs.empty()) line("gas", "poly_coeffs", join(c.poly_coeffs));
    if (!c.table.empty()) line("gas", "table", c.table);
    line("gas", "T_min", c.T_min);
    line("gas", "T_max", c.T_max);
    o << "\n[grid]\n";
    line("grid", "n", c.n);
    line("grid", "span", c.span);
    line("grid", "u_ref", c.u_ref);
    line("grid", "T_ref", c.grid_temperature());
    o << "\n[mesh]\n";
    line("mesh", "n_cells", c.n_cells);
    line("mesh", "x_min", c.x_min);
    line("mesh", "x_max", c.x_max);
    line("mesh", "boundary", bname(c.boundary));
    o << "\n[case]\n";
    line("case", "type", to_string(c.kind));
    line("case", "model", to_string(c.model));
    line("case", "kn", c.kn);
    line("case", "tau", c.law.tau);
    line("case", "tau_mode", c.law.mode == TauLaw::Mode::constant ? "constant" : "power");
    line("case", "mu_ref", c.law.mu_ref);
    line("case", "T_mu_ref", c.law.T_ref);
    line("case", "omega", c.law.omega);
    line("case", "rho", c.rho);
    line("case", "T", c.T);
    line("case", "u", c.u);
    line("case", "u_wall", c.u_wall);
    line("case", "delta_T", c.delta_T);
    line("case", "rho_left", c.left.rho);
    line("case", "u_left", c.left.u);
    line("case", "T_left", c.left.T);
    line("case", "rho_right", c.right.rho);
    line("case", "u_right", c.right.u);
    line("case", "T_right", c.right.T);
    line("case", "x_split", c.x_split);
    line("case", "t_end", c.t_end);
    line("case", "cfl", c.cfl);
    line("case", "dt_max", c.dt_max);
    line("case", "splitting", c.splitting == Splitting::strang ? "strang" : "lie");
    line("case", "order", c.order);
    line("case", "theta", c.theta);
    line("case", "seed", c.seed);
    line("case", "perturbation", c.perturbation);
    line("case", "window", c.window);
    line("case", "threshold", c.threshold);
    line("case", "max_steps", c.max_steps);
    o << "\n[output]\n";
    line("output", "dir", c.output_dir);
    line("output", "snapshots", c.snapshots);
    line("output", "entropy_every", c.entropy_every);
    return o.str();
}

inline std::string config_hash(const SolverConfig &c)
{
    // provenance comments are stripped so overrides and file values hash alike
    std::istringstream in(config_echo(c));
    std::string line, body;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == ';') continue;
        auto sc = line.find("  ;");
        body += line.substr(0, sc) + "\n";
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(detail::fnv1a(body)));
    return buf;
}

} // namespace tpkin
