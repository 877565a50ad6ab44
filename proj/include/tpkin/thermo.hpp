#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace tpkin {

enum class EnergyKind { rotational, vibrational, polynomial, tabulated };

inline std::string to_string(EnergyKind k)
{
    switch (k) {
    case EnergyKind::rotational: return "rotational";
    case EnergyKind::vibrational: return "vibrational";
    case EnergyKind::polynomial: return "polynomial";
    case EnergyKind::tabulated: return "tabulated";
    }
    return "?";
}

namespace detail {

inline std::string num(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

/// Safeguarded Newton on a monotone increasing f over [lo, hi]; solves f(T) = target.
template <class Fn, class Dfn>
double monotone_root(Fn f, Dfn df, double target, double lo, double hi, double tol_abs,
                     const char *what)
{
    double flo = f(lo) - target;
    double fhi = f(hi) - target;
    if (flo > 0.0 || fhi < 0.0)
        throw RangeError(std::string(what) + ": target " + num(target) + " outside attainable range");
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    double T = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        double r = f(T) - target;
        if (std::abs(r) <= tol_abs + 1e-14 * std::abs(target)) return T;
        if (r > 0.0) hi = T; else lo = T;
        double d = df(T);
        double Tn = (d > 0.0) ? T - r / d : 0.5 * (lo + hi);
        if (!(Tn > lo && Tn < hi)) Tn = 0.5 * (lo + hi);
        if (std::abs(Tn - T) <= 1e-15 * T) return Tn;
        T = Tn;
        if (hi - lo <= 4e-16 * hi) return T;
    }
    throw NumericalError(std::string(what) + ": root finder did not converge for target " + num(target));
}

} // namespace detail

/// Internal-energy law of one mode of a thermally perfect gas.
class EnergyModel {
public:
    static EnergyModel rotational(double R, double t_min = 10.0, double t_max = 20000.0)
    {
        EnergyModel m(EnergyKind::rotational, R, t_min, t_max);
        return m;
    }

    static EnergyModel vibrational(double R, double T0, double t_min = 10.0, double t_max = 20000.0)
    {
        if (!(T0 > 0.0)) throw DomainError("vibrational model needs T0 > 0");
        EnergyModel m(EnergyKind::vibrational, R, t_min, t_max);
        m.T0_ = T0;
        return m;
    }

    /// e_int(T) = sum_k c_k T^k.
    static EnergyModel polynomial(double R, std::vector<double> coeffs, double t_min = 10.0,
                                  double t_max = 20000.0)
    {
        EnergyModel m(EnergyKind::polynomial, R, t_min, t_max);
        m.poly_ = std::move(coeffs);
        if (m.poly_.empty()) throw DomainError("polynomial model needs coefficients");
        for (int i = 0; i <= 1000; ++i) {
            double T = t_min + (t_max - t_min) * i / 1000.0;
            if (!(m.c_v_int(T) > 0.0))
                throw DomainError("polynomial model has c_v_int <= 0 at T = " + detail::num(T));
        }
        return m;
    }

    /// Monotone cubic through (T_k, e_k); range is the knot span.
    static EnergyModel tabulated(double R, std::vector<double> T, std::vector<double> e)
    {
        if (T.size() != e.size() || T.size() < 2)
            throw DomainError("tabulated model needs at least two (T, e_int) pairs");
        for (size_t k = 1; k < T.size(); ++k) {
            if (!(T[k] > T[k - 1])) throw DomainError("tabulated temperatures must be strictly increasing");
            if (!(e[k] > e[k - 1])) throw DomainError("tabulated energies must be strictly increasing");
        }
        EnergyModel m(EnergyKind::tabulated, R, T.front(), T.back());
        m.kT_ = std::move(T);
        m.ke_ = std::move(e);
        m.build_pchip();
        return m;
    }

    static EnergyModel load_table(double R, const std::string &path)
    {
        std::ifstream in(path);
        if (!in) throw DomainError("cannot open energy table " + path);
        std::vector<double> T, e;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            double a, b;
            if (!(ls >> a)) continue;
            if (!(ls >> b)) throw DomainError(path + ":" + std::to_string(lineno) + ": expected two columns");
            T.push_back(a);
            e.push_back(b);
        }
        return tabulated(R, std::move(T), std::move(e));
    }

    EnergyKind kind() const { return kind_; }
    double R() const { return R_; }
    double T0() const { return T0_; }
    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }
    double s_ref() const { return s_ref_; }
    void set_s_ref(double s) { s_ref_ = s; }
    void set_range(double lo, double hi)
    {
        if (kind_ == EnergyKind::tabulated) throw DomainError("tabulated range is fixed by its knots");
        if (!(lo > 0.0 && hi > lo)) throw DomainError("invalid temperature range");
        t_min_ = lo;
        t_max_ = hi;
    }
    const std::vector<double> &coefficients() const { return poly_; }

    double e_int(double T) const
    {
        check_T(T);
        return e_raw(T);
    }

    double c_v_int(double T) const
    {
        check_T(T);
        return cv_raw(T);
    }

    double e_min() const { return e_raw(t_min_); }
    double e_max() const { return e_raw(t_max_); }

    /// Inverse of e_int.
    double T_int(double e) const
    {
        switch (kind_) {
        case EnergyKind::rotational:
            if (!(e > 0.0)) throw DomainError("rotational T_int needs e_int > 0, got " + detail::num(e));
            return e / R_;
        case EnergyKind::vibrational:
            if (!(e > 0.0)) throw DomainError("vibrational T_int needs e_int > 0, got " + detail::num(e));
            return T0_ / std::log1p(R_ * T0_ / e);
        case EnergyKind::polynomial:
            return detail::monotone_root([&](double T) { return e_raw(T); },
                                         [&](double T) { return cv_raw(T); }, e, t_min_, t_max_,
                                         1e-300, "polynomial T_int");
        case EnergyKind::tabulated:
            return table_inverse(e);
        }
        return 0.0;
    }

    /// Entropy of the mode as a function of its energy, s' = 1/T_int.
    double s_int(double e) const
    {
        switch (kind_) {
        case EnergyKind::rotational:
            if (!(e > 0.0)) throw DomainError("rotational s_int needs e_int > 0, got " + detail::num(e));
            return R_ * std::log(e) + s_ref_;
        case EnergyKind::vibrational: {
            if (!(e > 0.0)) throw DomainError("vibrational s_int needs e_int > 0, got " + detail::num(e));
            double q = R_ * T0_;
            return (e / T0_ + R_) * std::log1p(e / q) - (e / T0_) * std::log(e / q) + s_ref_;
        }
        case EnergyKind::polynomial: {
            double T = T_int(e);
            return poly_entropy(T) - poly_entropy(t_min_) + s_ref_;
        }
        case EnergyKind::tabulated: {
            double T = T_int(e);
            size_t k = segment_of_T(T);
            return ks_[k] + segment_entropy(k, T) + s_ref_;
        }
        }
        return 0.0;
    }

private:
    EnergyModel(EnergyKind k, double R, double lo, double hi) : kind_(k), R_(R), t_min_(lo), t_max_(hi)
    {
        if (!(R > 0.0)) throw DomainError("gas constant must be positive");
        if (!(lo > 0.0 && hi > lo)) throw DomainError("invalid temperature range");
    }

    void check_T(double T) const
    {
        if (!(T >= t_min_ * (1 - 1e-14)))
            throw RangeError(to_string(kind_) + ": T = " + detail::num(T) + " below T_min = " + detail::num(t_min_));
        if (!(T <= t_max_ * (1 + 1e-14)))
            throw RangeError(to_string(kind_) + ": T = " + detail::num(T) + " above T_max = " + detail::num(t_max_));
    }

    double e_raw(double T) const
    {
        switch (kind_) {
        case EnergyKind::rotational: return R_ * T;
        case EnergyKind::vibrational: return R_ * T0_ / std::expm1(T0_ / T);
        case EnergyKind::polynomial: {
            double s = 0.0;
            for (size_t k = poly_.size(); k-- > 0;) s = s * T + poly_[k];
            return s;
        }
        case EnergyKind::tabulated: {
            size_t k = segment_of_T(T);
            double t = T - kT_[k];
            return ke_[k] + t * (kd_[k] + t * (c2_[k] + t * c3_[k]));
        }
        }
        return 0.0;
    }

    double cv_raw(double T) const
    {
        switch (kind_) {
        case EnergyKind::rotational: return R_;
        case EnergyKind::vibrational: {
            double x = T0_ / T;
            double em = std::expm1(x);
            return R_ * x * x * std::exp(x) / (em * em);
        }
        case EnergyKind::polynomial: {
            double s = 0.0;
            for (size_t k = poly_.size(); k-- > 1;) s = s * T + double(k) * poly_[k];
            return s;
        }
        case EnergyKind::tabulated: {
            size_t k = segment_of_T(T);
            double t = T - kT_[k];
            return kd_[k] + t * (2.0 * c2_[k] + 3.0 * t * c3_[k]);
        }
        }
        return 0.0;
    }

    double poly_entropy(double T) const
    {
        double s = poly_.size() > 1 ? poly_[1] * std::log(T) : 0.0;
        for (size_t k = 2; k < poly_.size(); ++k)
            s += double(k) * poly_[k] * std::pow(T, double(k - 1)) / double(k - 1);
        return s;
    }

    size_t segment_of_T(double T) const
    {
        auto it = std::upper_bound(kT_.begin(), kT_.end(), T);
        size_t k = (it == kT_.begin()) ? 0 : size_t(it - kT_.begin()) - 1;
        return std::min(k, kT_.size() - 2);
    }

    // Fritsch-Butland slopes with shape-preserving end conditions.
    void build_pchip()
    {
        size_t n = kT_.size();
        std::vector<double> h(n - 1), del(n - 1);
        for (size_t k = 0; k + 1 < n; ++k) {
            h[k] = kT_[k + 1] - kT_[k];
            del[k] = (ke_[k + 1] - ke_[k]) / h[k];
        }
        kd_.assign(n, 0.0);
        if (n == 2) {
            kd_[0] = kd_[1] = del[0];
        } else {
            for (size_t k = 1; k + 1 < n; ++k) {
                double w1 = 2 * h[k] + h[k - 1], w2 = h[k] + 2 * h[k - 1];
                kd_[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
            }
            auto edge = [](double h0, double h1, double m0, double m1) {
                double d = ((2 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
                if (d <= 0.0) return 0.0;
                if (std::abs(d) > 3 * std::abs(m0)) return 3 * m0;
                return d;
            };
            kd_[0] = edge(h[0], h[1], del[0], del[1]);
            kd_[n - 1] = edge(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
        }
        c2_.resize(n - 1);
        c3_.resize(n - 1);
        ks_.assign(n, 0.0);
        for (size_t k = 0; k + 1 < n; ++k) {
            c2_[k] = (3 * del[k] - 2 * kd_[k] - kd_[k + 1]) / h[k];
            c3_[k] = (kd_[k] + kd_[k + 1] - 2 * del[k]) / (h[k] * h[k]);
        }
        for (size_t k = 0; k + 1 < n; ++k) ks_[k + 1] = ks_[k] + segment_entropy(k, kT_[k + 1]);
    }

    // Integral of c_v(T)/T over [T_k, T] inside segment k.
    double segment_entropy(size_t k, double T) const
    {
        double Tk = kT_[k];
        double p2 = 3 * c3_[k];
        double p1 = 2 * c2_[k] - 6 * c3_[k] * Tk;
        double p0 = kd_[k] - 2 * c2_[k] * Tk + 3 * c3_[k] * Tk * Tk;
        return p0 * std::log(T / Tk) + p1 * (T - Tk) + 0.5 * p2 * (T * T - Tk * Tk);
    }

    double table_inverse(double e) const
    {
        if (!(e >= ke_.front() - 1e-14 * std::abs(ke_.front())))
            throw RangeError("tabulated: e_int = " + detail::num(e) + " below table minimum " + detail::num(ke_.front()));
        if (!(e <= ke_.back() + 1e-14 * std::abs(ke_.back())))
            throw RangeError("tabulated: e_int = " + detail::num(e) + " above table maximum " + detail::num(ke_.back()));
        auto it = std::upper_bound(ke_.begin(), ke_.end(), e);
        size_t k = (it == ke_.begin()) ? 0 : size_t(it - ke_.begin()) - 1;
        k = std::min(k, ke_.size() - 2);
        if (e == ke_[k]) return kT_[k];
        double lo = kT_[k], hi = kT_[k + 1];
        e = std::clamp(e, ke_[k], ke_[k + 1]);
        return detail::monotone_root([&](double T) { return e_raw(T); }, [&](double T) { return cv_raw(T); },
                                     e, lo, hi, 0.0, "tabulated T_int");
    }

    EnergyKind kind_;
    double R_;
    double t_min_, t_max_;
    double T0_ = 0.0;
    double s_ref_ = 0.0;
    std::vector<double> poly_;
    std::vector<double> kT_, ke_, kd_, c2_, c3_, ks_;
};

/// State point of the gas at temperature T.
struct ThermoPoint {
    double T, e_tr, e_int, e, c_v, c_p;
};

/// Thermally perfect gas: translation plus zero or more independent internal modes.
class Gas {
public:
    Gas() = default;
    explicit Gas(double R, std::vector<EnergyModel> modes = {}, double t_min = 10.0, double t_max = 20000.0)
        : R_(R), modes_(std::move(modes)), t_min_(t_min), t_max_(t_max)
    {
        if (!(R > 0.0)) throw DomainError("gas constant must be positive");
        for (auto &m : modes_) {
            t_min_ = std::max(t_min_, m.t_min());
            t_max_ = std::min(t_max_, m.t_max());
        }
        if (!(t_max_ > t_min_)) throw DomainError("energy modes have disjoint validity ranges");
    }

    double R() const { return R_; }
    size_t n_modes() const { return modes_.size(); }
    const EnergyModel &mode(size_t i) const { return modes_[i]; }
    const std::vector<EnergyModel> &modes() const { return modes_; }
    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }

    double e_int(double T) const
    {
        check_T(T);
        double s = 0.0;
        for (auto &m : modes_) s += m.e_int(T);
        return s;
    }
    double e_of_T(double T) const { return 1.5 * R_ * T + e_int(T); }
    double c_v_int(double T) const
    {
        check_T(T);
        double s = 0.0;
        for (auto &m : modes_) s += m.c_v_int(T);
        return s;
    }
    double c_v(double T) const { return 1.5 * R_ + c_v_int(T); }
    double c_p(double T) const { return c_v(T) + R_; }

    ThermoPoint point(double T) const
    {
        double ei = e_int(T);
        double cv = c_v(T);
        return {T, 1.5 * R_ * T, ei, 1.5 * R_ * T + ei, cv, cv + R_};
    }

    /// Temperature from total specific energy.
    double T_of_e(double e) const
    {
        if (modes_.empty()) return checked(e / (1.5 * R_), e);
        if (modes_.size() == 1 && modes_[0].kind() == EnergyKind::rotational) return checked(e / (2.5 * R_), e);
        auto f = [&](double T) {
            double s = 1.5 * R_ * T;
            for (auto &m : modes_) s += m.e_int(T);
            return s;
        };
        auto df = [&](double T) {
            double s = 1.5 * R_;
            for (auto &m : modes_) s += m.c_v_int(T);
            return s;
        };
        return detail::monotone_root(f, df, e, t_min_, t_max_, 1e-300, "T_of_e");
    }

private:
    void check_T(double T) const
    {
        if (!(T >= t_min_ * (1 - 1e-14)))
            throw RangeError("gas: T = " + detail::num(T) + " below T_min = " + detail::num(t_min_));
        if (!(T <= t_max_ * (1 + 1e-14)))
            throw RangeError("gas: T = " + detail::num(T) + " above T_max = " + detail::num(t_max_));
    }
    double checked(double T, double e) const
    {
        if (!(T >= t_min_ * (1 - 1e-14) && T <= t_max_ * (1 + 1e-14)))
            throw RangeError("T_of_e: e = " + detail::num(e) + " maps outside [" + detail::num(t_min_) + ", " +
                             detail::num(t_max_) + "]");
        return T;
    }

    double R_ = 1.0;
    std::vector<EnergyModel> modes_;
    double t_min_ = 10.0, t_max_ = 20000.0;
};

} // namespace tpkin
