#ifndef TOPREC_GEOMETRY_HPP
#define TOPREC_GEOMETRY_HPP

#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "elliptic.hpp"

namespace toprec {

// Polynomial in x, y with q-series coefficients: (i, j) -> coefficient of x^i y^j.
struct BiPoly {
    std::map<std::pair<int, int>, QSeries> c;

    int y_degree() const {
        int d = 0;
        for (const auto& [k, v] : c)
            if (!v.is_zero() || !v.exact()) d = std::max(d, k.second);
        return d;
    }

    TSeries evaluate(const TSeries& x, const TSeries& y) const {
        const int t = std::min(x.trunc(), y.trunc());
        std::vector<TSeries> xp{TSeries::monomial(QSeries(1), 0, t)}, yp{xp[0]};
        TSeries r = TSeries::zero(t);
        for (const auto& [k, v] : c) {
            while (static_cast<int>(xp.size()) <= k.first) xp.push_back(xp.back() * x);
            while (static_cast<int>(yp.size()) <= k.second) yp.push_back(yp.back() * y);
            r = r + (xp[k.first] * yp[k.second]).scaled(v);
        }
        return r;
    }
};

// Polynomial in x with q-series coefficients, low degree first.
using XPoly = std::vector<QSeries>;

inline TSeries eval_xpoly(const XPoly& p, const TSeries& x) {
    TSeries r = TSeries::zero(x.trunc());
    for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + TSeries::monomial(*it, 0, x.trunc());
    return r;
}

inline QSeries eval_xpoly(const XPoly& p, const QSeries& x) {
    QSeries r = QSeries::zero(kExact);
    for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
    return r;
}

inline XPoly xpoly_mul(const XPoly& a, const XPoly& b) {
    if (a.empty() || b.empty()) return {};
    XPoly r(a.size() + b.size() - 1, QSeries::zero(kExact));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

struct HyperellipticSplit {
    XPoly h, g;  // (y + h)^2 = g
};

inline HyperellipticSplit hyperelliptic_split(const BiPoly& H) {
    if (H.y_degree() != 2) throw NotHyperelliptic("curve is not quadratic in y");
    auto lead = H.c.find({0, 2});
    if (lead == H.c.end() || !(lead->second == QSeries(1)))
        throw NotHyperelliptic("y^2 coefficient must be 1 and independent of x");
    for (const auto& [k, v] : H.c)
        if (k.second == 2 && k.first != 0 && !v.is_zero()) throw NotHyperelliptic("x-dependent y^2 coefficient");
    int deg = 0;
    for (const auto& [k, v] : H.c) deg = std::max(deg, k.first);
    XPoly b(deg + 1, QSeries::zero(kExact)), c0(deg + 1, QSeries::zero(kExact));
    for (const auto& [k, v] : H.c) {
        if (k.second == 1) b[k.first] += v;
        if (k.second == 0) c0[k.first] += v;
    }
    while (b.size() > 1 && b.back().is_zero() && b.back().exact()) b.pop_back();
    HyperellipticSplit s;
    for (auto& v : b) s.h.push_back(v * make_rational(1, 2));
    s.g = xpoly_mul(s.h, s.h);
    if (s.g.size() < c0.size()) s.g.resize(c0.size(), QSeries::zero(kExact));
    for (std::size_t i = 0; i < c0.size(); ++i) s.g[i] -= c0[i];
    while (s.g.size() > 1 && s.g.back().is_zero() && s.g.back().exact()) s.g.pop_back();
    return s;
}

// Local data of the uniformization at a point of the elliptic curve.
struct LocalXY {
    TSeries x, y;
};

struct OpenMirrorMap {
    // X = c3 * x * Q^c * z^c1 with z the curve parameter
    Rational c{1, 3}, c1{-1, 3}, c3{-1};
};

class GeometryData {
public:
    std::string name, subfamily, frame;
    int order = 0;
    std::shared_ptr<const EllipticData> ell;
    BiPoly curve;
    HyperellipticSplit split;
    std::map<std::string, ModularElement> params;
    // curve parameter entering the closed mirror map (KP2: the x^3 coefficient)
    QSeries z;
    // torsion shift of X = P(u + eps), eps = eps_a + eps_b * (m tau)
    Rational eps_a{0}, eps_b{0};
    std::vector<int> ramification;
    WpPoint open_point;  // (P, P') at the open GW point, in the shifted variable
    bool open_point_torsion_claim = false;
    std::string tau_frame;  // j-consistency frame, when documented
    OpenMirrorMap mirror_open;
    std::function<LocalXY(const TSeries& wp, const TSeries& dwp)> uniformize;

    // P and P' at u_r + eps + T for a ramification label r
    std::pair<TSeries, TSeries> wp_local(int r, int t_trunc) const {
        auto key = std::make_pair(r, t_trunc);
        auto it = wp_cache_.find(key);
        if (it != wp_cache_.end()) return it->second;
        TSeries p;
        if (eps_a == 0 && eps_b == 0) {
            if (r == kOrigin) throw DegenerateRamification("origin is a pole of the uniformization");
            p = wp_taylor_at_2torsion(r, t_trunc + 1, *ell);
        } else {
            Rational a = eps_a + ((r & 1) ? make_rational(1, 2) : Rational(0));
            Rational b = eps_b + ((r & 2) ? make_rational(1, 2) : Rational(0));
            WpPoint w = wp_at_torsion_point(a, b, *ell);
            p = wp_taylor(w.wp, w.dwp, t_trunc + 1, *ell);
        }
        auto res = std::make_pair(p.truncated(t_trunc), p.derivative().truncated(t_trunc));
        wp_cache_.emplace(key, res);
        return res;
    }

    LocalXY local_xy(int r, int t_trunc) const {
        auto [p, dp] = wp_local(r, t_trunc);
        return uniformize(p, dp);
    }

    LocalXY open_point_xy(int t_trunc) const {
        TSeries p = wp_taylor(open_point.wp, open_point.dwp, t_trunc + 1, *ell);
        return uniformize(p.truncated(t_trunc), p.derivative().truncated(t_trunc));
    }

    // Residual of H(x(T), y(T)) at the ramification point r.
    TSeries curve_residual(int r, int t_trunc) const {
        LocalXY l = local_xy(r, t_trunc);
        return curve.evaluate(l.x, l.y);
    }

    // y* = -y - 2h(x)
    TSeries involution(const LocalXY& l) const {
        return -l.y - eval_xpoly(split.h, l.x).scaled(QSeries(2));
    }

    const ModularElement& param(const std::string& k) const {
        auto it = params.find(k);
        if (it == params.end()) throw ConfigError("geometry has no parameter " + k);
        return it->second;
    }

private:
    mutable std::map<std::pair<int, int>, std::pair<TSeries, TSeries>> wp_cache_;
};

namespace detail {

inline QSeries series_of(const std::string& n, int m, int order) { return theta_eta_catalog(n, m, order).series; }

inline TSeries tconst(const QSeries& c, int t_trunc) { return TSeries::monomial(c, 0, t_trunc); }

inline ModularElement me(const QSeries& s, Rational w, const std::string& tag) { return {s, w, 0, tag, false}; }

// KP2 ingredients: a = Theta_A2, b = eta^3/eta(3 tau), c = 3 eta(3 tau)^3/eta
struct KP2Series {
    QSeries a, b, c;
};

inline KP2Series kp2_series(int order) {
    QSeries e1 = series_of("eta", 1, order), e3 = series_of("eta", 3, order);
    QSeries a = series_of("thetaA2", 1, order);
    QSeries b = pow(e1, 3) * e3.inverse();
    QSeries c = pow(e3, 3) * e1.inverse() * Rational(3);
    return {a, b, c};
}

inline GeometryData make_kp2(const std::string& frame, int order) {
    GeometryData g;
    g.name = "KP2";
    g.subfamily = "default";
    g.frame = frame;
    g.order = order;
    auto s = kp2_series(order);
    QSeries phi, kappa;
    if (frame == "lr") {
        // Fricke image of the appendix normalization: lattice (1, 3 tau)
        g.ell = std::make_shared<EllipticData>(3, order);
        phi = s.a * s.c.inverse();
        kappa = s.c.inverse() * (Coeff::root_of_unity24(10) * Coeff::cbrt2(-4) * Coeff::monomial(Rational(3), -1));
    } else if (frame == "appendix") {
        g.ell = std::make_shared<EllipticData>(1, order);
        phi = s.a * s.b.inverse();
        kappa = s.b.inverse() * (Coeff::zeta6() * Coeff::cbrt2(-4) * Coeff::sqrt3() * Coeff::pi_pow(-1));
    } else {
        throw UnsupportedSubfamily("KP2 frame must be lr or appendix");
    }
    g.params["a"] = me(s.a, 1, "thetaA2");
    g.params["b"] = me(s.b, 1, "eta^3/eta_3tau");
    g.params["c"] = me(s.c, 1, "3eta_3tau^3/eta");
    g.params["phi"] = me(phi, 0, "phi");
    g.params["kappa"] = me(kappa, -1, "kappa");
    QSeries phi3 = pow(phi, 3);
    g.z = phi3.inverse() * make_rational(-1, 27);
    g.params["q1"] = me(g.z, 0, "q1");
    g.params["q1_mirror"] = me(g.z * Rational(27), 0, "q1_mirror");
    g.curve.c[{0, 2}] = QSeries(1);
    g.curve.c[{0, 1}] = QSeries(1);
    g.curve.c[{1, 1}] = QSeries(1);
    g.curve.c[{3, 0}] = g.z;
    g.split = hyperelliptic_split(g.curve);
    g.ramification = {kHalf, kTauHalf, kOnePlusTauHalf};

    QSeries k2 = kappa * kappa, k3 = k2 * kappa;
    QSeries ax = k2 * phi * (Coeff::cbrtm4() * Rational(-3));
    QSeries bx = phi3 * make_rational(-9, 4);
    g.uniformize = [ax, bx, k3](const TSeries& p, const TSeries& dp) {
        const int t = p.trunc();
        TSeries x = p.scaled(ax) + tconst(bx, t);
        TSeries y = dp.scaled(k3) - (x + tconst(QSeries(1), t)).scaled(QSeries(Coeff(make_rational(1, 2))));
        return LocalXY{x, y};
    };
    // x = 0, y = -1
    QSeries wp0 = phi * phi * (k2 * Coeff::cbrtm4()).inverse() * make_rational(-3, 4);
    QSeries dwp0 = k3.inverse() * make_rational(-1, 2);
    g.open_point = {wp0, dwp0};
    g.open_point_torsion_claim = true;
    g.params["open_wp"] = me(wp0, 2, "wp(s0)");
    g.params["open_dwp"] = me(dwp0, 3, "wp'(s0)");
    return g;
}

// Shared chain for the curves handled by successive coordinate changes:
//   alpha = lam P + mu, beta = k^3 P' - (la * alpha + lb),
//   x = (alpha + nu) / beta, y = -1/2 + x (alpha x - c1) - h(x).
struct ChainData {
    QSeries lam, mu, k3, la, lb, nu, c1;
    XPoly h;
};

inline void install_chain(GeometryData& g, const ChainData& d) {
    g.uniformize = [d](const TSeries& p, const TSeries& dp) {
        const int t = p.trunc();
        TSeries alpha = p.scaled(d.lam) + tconst(d.mu, t);
        TSeries beta = dp.scaled(d.k3) - alpha.scaled(d.la) - tconst(d.lb, t);
        TSeries x = (alpha + tconst(d.nu, t)) * beta.inverse();
        x = x.truncated(t);
        TSeries y = tconst(QSeries(Coeff(make_rational(-1, 2))), t) + x * (alpha * x - tconst(d.c1, t)) -
                    eval_xpoly(d.h, x);
        return LocalXY{x, y.truncated(t)};
    };
    // open GW point: alpha = -nu and beta = -2 (la alpha + lb)
    QSeries alpha0 = -d.nu;
    QSeries wp0 = (alpha0 - d.mu) * d.lam.inverse();
    QSeries dwp0 = -(alpha0 * d.la + d.lb) * d.k3.inverse();
    g.open_point = {wp0, dwp0};
    g.params["open_wp"] = me(wp0, 2, "wp(s0)");
    g.params["open_dwp"] = me(dwp0, 3, "wp'(s0)");
}

inline GeometryData make_kp1xp1(int order) {
    GeometryData g;
    g.name = "KP1xP1";
    g.subfamily = "q1=q2";
    g.frame = "tau";
    g.order = order;
    g.ell = std::make_shared<EllipticData>(1, order);
    QSeries e1 = series_of("eta", 1, order), e4 = series_of("eta", 4, order);
    QSeries s = pow(e1, 8) * pow(e4, 8).inverse() * make_rational(-1, 256);
    QSeries t2 = series_of("theta2", 2, order);
    QSeries kappa = (t2 * t2).inverse() * (Coeff::cbrt2(-7) * Coeff::pi_pow(-1));
    QSeries q1 = s, q2 = s;
    g.params["s"] = me(s, 0, "s");
    g.params["q1"] = me(q1, 0, "q1");
    g.params["q2"] = me(q2, 0, "q2");
    g.params["kappa"] = me(kappa, -1, "kappa");
    g.z = q1;
    g.curve.c[{0, 2}] = QSeries(1);
    g.curve.c[{0, 1}] = QSeries(1);
    g.curve.c[{1, 1}] = QSeries(1);
    g.curve.c[{2, 1}] = q1;
    g.curve.c[{2, 0}] = q2;
    g.split = hyperelliptic_split(g.curve);
    ChainData d;
    QSeries k2 = kappa * kappa;
    d.lam = k2 * Coeff::cbrt2(2);
    d.mu = (QSeries(-1) - q1 * Rational(2) + q2 * Rational(4)) * make_rational(1, 12);
    d.k3 = k2 * kappa;
    d.la = QSeries(Coeff(make_rational(1, 2)));
    d.lb = q1 * make_rational(1, 4);
    d.nu = q1 * make_rational(1, 2) - q2;
    d.c1 = QSeries(Coeff(make_rational(1, 2)));
    d.h = g.split.h;
    install_chain(g, d);
    g.eps_a = make_rational(1, 8);
    g.eps_b = make_rational(1, 4);
    g.ramification = {kOrigin, kHalf, kTauHalf, kOnePlusTauHalf};
    g.tau_frame = "tau";
    return g;
}

inline GeometryData make_kf1(int order) {
    GeometryData g;
    g.name = "KF1";
    g.subfamily = "q1=1";
    g.frame = "tau";
    g.order = order;
    g.ell = std::make_shared<EllipticData>(1, order);
    QSeries e1 = series_of("eta", 1, order), e2 = series_of("eta", 2, order), e4 = series_of("eta", 4, order);
    QSeries s = pow(e1, 8) * pow(e4, 8).inverse() * make_rational(1, 256);
    QSeries kappa = e2 * e2 * pow(e4, 4).inverse() * (Coeff::cbrt2(-13) * Coeff::pi_pow(-1));
    QSeries q1(1), q2 = s;
    g.params["s"] = me(s, 0, "s");
    g.params["q1"] = me(q1, 0, "q1");
    g.params["q2"] = me(q2, 0, "q2");
    g.params["kappa"] = me(kappa, -1, "kappa");
    g.z = q2;
    g.curve.c[{0, 2}] = QSeries(1);
    g.curve.c[{0, 1}] = QSeries(1);
    g.curve.c[{1, 1}] = QSeries(1);
    g.curve.c[{1, 0}] = q1;
    g.curve.c[{2, 1}] = q2;
    g.split = hyperelliptic_split(g.curve);
    ChainData d;
    QSeries k2 = kappa * kappa;
    d.lam = k2 * Coeff::cbrt2(2);
    d.mu = (QSeries(Coeff(make_rational(1, 4))) + q2 * make_rational(1, 2)) * make_rational(-1, 3);
    d.k3 = k2 * kappa;
    d.la = QSeries(Coeff(make_rational(1, 2))) - q1;
    d.lb = q2 * make_rational(1, 4);
    d.nu = q2 * make_rational(1, 2) - q1 * q1 + q1;
    d.c1 = QSeries(Coeff(make_rational(1, 2))) - q1;
    d.h = g.split.h;
    install_chain(g, d);
    g.eps_a = make_rational(3, 8);
    g.eps_b = make_rational(1, 4);
    g.ramification = {kOrigin, kHalf, kTauHalf, kOnePlusTauHalf};
    return g;
}

inline GeometryData make_kwp112(int order) {
    GeometryData g;
    g.name = "KWP112";
    g.subfamily = "b4=0";
    g.frame = "tau";
    g.order = order;
    g.ell = std::make_shared<EllipticData>(1, order);
    QSeries t2 = pow(series_of("theta2", 2, order), 4), t3 = pow(series_of("theta3", 2, order), 4);
    QSeries th4 = series_of("theta4", 2, order);
    QSeries t4sq = th4 * th4;
    // b0^2 = 8 (theta2^4 + theta3^4) / theta4^4 at 2 tau
    QSeries b0 = sqrt(t2 + t3) * t4sq.inverse() * (Coeff::sqrt2() * Rational(2));
    QSeries b4 = QSeries::zero(kExact);
    QSeries kappa = t4sq.inverse() * (Coeff::cbrt2(-1) * Coeff::pi_pow(-1));
    QSeries b0sq = b0 * b0;
    QSeries s = (b0sq * b0sq).inverse();
    g.params["b0"] = me(b0, 0, "b0");
    g.params["b4"] = me(b4, 0, "b4");
    g.params["s"] = me(s, 0, "s");
    g.params["q1"] = me(b4, 0, "q1");
    g.params["q2"] = me(s, 0, "q2");
    g.params["kappa"] = me(kappa, -1, "kappa");
    g.z = s;
    g.curve.c[{0, 2}] = QSeries(1);
    g.curve.c[{4, 0}] = QSeries(1);
    g.curve.c[{0, 1}] = QSeries(1);
    g.curve.c[{1, 1}] = b0;
    g.split = hyperelliptic_split(g.curve);
    ChainData d;
    QSeries k2 = kappa * kappa;
    d.lam = k2 * Coeff::cbrt2(2);
    d.mu = (b0sq + b4 * Rational(2)) * make_rational(-1, 12);
    d.k3 = k2 * kappa;
    d.la = b0 * make_rational(1, 2);
    d.lb = b0 * b4 * make_rational(1, 4);
    d.nu = b4 * make_rational(1, 2);
    d.c1 = b0 * make_rational(1, 2);
    d.h = g.split.h;
    install_chain(g, d);
    g.eps_a = make_rational(1, 4);
    g.eps_b = Rational(0);
    g.ramification = {kOrigin, kHalf, kTauHalf, kOnePlusTauHalf};
    return g;
}

}  // namespace detail

inline const std::vector<std::string>& builtin_geometry_names() {
    static const std::vector<std::string> n{"KP2", "KP1xP1", "KWP112", "KF1"};
    return n;
}

// Accepted subfamily names per geometry ("" selects the first one).
inline const std::map<std::string, std::vector<std::string>>& builtin_subfamilies() {
    static const std::map<std::string, std::vector<std::string>> m{
        {"KP2", {"default", "lr", "appendix"}},
        {"KP1xP1", {"q1=q2"}},
        {"KWP112", {"b4=0"}},
        {"KF1", {"q1=1"}},
    };
    return m;
}

// Builds the geometry with all series expanded to q-order `order`.  For KP2
// the subfamily selects the frame: "default"/"lr" (large radius at i infinity)
// or "appendix".
inline GeometryData builtin_geometry(const std::string& name, const std::string& subfamily, int order) {
    auto subs = builtin_subfamilies();
    auto it = subs.find(name);
    if (it == subs.end()) throw ConfigError("unknown geometry " + name);
    std::string sub = subfamily.empty() ? it->second.front() : subfamily;
    if (std::find(it->second.begin(), it->second.end(), sub) == it->second.end())
        throw UnsupportedSubfamily(name + " has no built-in subfamily " + sub);
    if (order < 1) throw ConfigError("q-order must be positive");
    if (name == "KP2") return detail::make_kp2(sub == "appendix" ? "appendix" : "lr", order);
    if (name == "KP1xP1") return detail::make_kp1xp1(order);
    if (name == "KF1") return detail::make_kf1(order);
    return detail::make_kwp112(order);
}

// Closed mirror map T = log z + S(z).  Returns the coefficients of S in the
// curve parameter z; KP2 only.
inline std::vector<Rational> mirror_map_closed_coefficients(const GeometryData& g, int order) {
    if (g.name != "KP2") throw NotImplementedForGeometry("closed mirror map is only available for KP2");
    std::vector<Rational> s(static_cast<std::size_t>(order + 1), Rational(0));
    mpz_class f3(1), f1(1);  // (3k)!, k!
    for (int k = 1; k <= order; ++k) {
        f1 *= k;
        for (int j = 3 * k - 2; j <= 3 * k; ++j) f3 *= j;
        Rational c(f3, f1 * f1 * f1 * k);
        c.canonicalize();
        s[k] = (k % 2) ? -c : c;
    }
    return s;
}

// The same series in the mirror variable q1 = 27 z, including the constant
// log(-1) + log(-1/27) = i pi - log 27 folded into the log term.
inline std::vector<Rational> mirror_map_closed_in_q1(const GeometryData& g, int order) {
    auto s = mirror_map_closed_coefficients(g, order);
    mpz_class p(1);
    for (int k = 1; k <= order; ++k) {
        p *= 27;
        s[k] /= Rational(p);
    }
    return s;
}

// S(z(q)) as a q-series and Q = e^T = z e^{S} in the global q.
struct ClosedMirror {
    QSeries S, Q;
};

inline ClosedMirror mirror_map_closed(const GeometryData& g, int order) {
    auto co = mirror_map_closed_coefficients(g, order);
    std::vector<Coeff> f(co.begin(), co.end());
    QSeries S = compose(f, g.z);
    return {S, g.z * exp(S)};
}

// Value check (P'(s0))^2 = 4 P(s0)^3 - g2 P(s0) - g3.
inline QSeries open_point_residual(const GeometryData& g) {
    const auto& w = g.open_point;
    return w.dwp * w.dwp - (pow(w.wp, 3) * Rational(4) - g.ell->g2() * w.wp - g.ell->g3());
}

// j(s) for the KP1xP1 subfamily and the j-invariant of the curve.
inline std::pair<QSeries, QSeries> kp1xp1_j_consistency(const GeometryData& g) {
    if (g.name != "KP1xP1") throw NotImplementedForGeometry("j-consistency is specific to KP1xP1");
    const QSeries& s = g.param("s").series;
    QSeries num = pow(QSeries(1) - s * Rational(16) + s * s * Rational(16), 3);
    QSeries den = pow(s, 4) * (QSeries(1) - s * Rational(16));
    return {num * den.inverse(), j_invariant(g.order, g.ell->modulus()).series};
}

// ---------------------------------------------------------------------------
// key = value configuration.
// ---------------------------------------------------------------------------
struct Config {
    std::string geometry = "KP2";
    std::string subfamily;
    int q_order = 8;
    int t_order = 8;
    bool schiffer = false;
    std::optional<OpenMirrorMap> mirror_open;

    std::string canonical() const {
        std::ostringstream o;
        o << "geometry=" << geometry << "\nsubfamily=" << subfamily << "\nq_order=" << q_order
          << "\nt_order=" << t_order << "\nschiffer=" << (schiffer ? 1 : 0) << "\n";
        if (mirror_open)
            o << "mirror_open_c=" << mirror_open->c.get_str() << "\nmirror_open_c1=" << mirror_open->c1.get_str()
              << "\nmirror_open_c3=" << mirror_open->c3.get_str() << "\n";
        return o.str();
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline int parse_int(const std::string& k, const std::string& v) {
    try {
        std::size_t used = 0;
        int r = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer for " + k + ": " + v);
    }
}

inline Rational parse_rational(const std::string& k, const std::string& v) {
    try {
        Rational r(v);
        r.canonicalize();
        return r;
    } catch (const std::exception&) {
        throw ConfigError("invalid rational for " + k + ": " + v);
    }
}

}  // namespace detail

inline Config parse_config(std::istream& in) {
    Config c;
    std::string line;
    int lineno = 0;
    OpenMirrorMap om;
    bool have_om = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string k = detail::trim(line.substr(0, eq)), v = detail::trim(line.substr(eq + 1));
        if (k == "geometry")
            c.geometry = v;
        else if (k == "subfamily")
            c.subfamily = v;
        else if (k == "q_order")
            c.q_order = detail::parse_int(k, v);
        else if (k == "t_order")
            c.t_order = detail::parse_int(k, v);
        else if (k == "schiffer")
            c.schiffer = detail::parse_int(k, v) != 0;
        else if (k == "mirror_open_c")
            om.c = detail::parse_rational(k, v), have_om = true;
        else if (k == "mirror_open_c1")
            om.c1 = detail::parse_rational(k, v), have_om = true;
        else if (k == "mirror_open_c3")
            om.c3 = detail::parse_rational(k, v), have_om = true;
        else
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key " + k);
    }
    if (have_om) c.mirror_open = om;
    if (!builtin_subfamilies().count(c.geometry)) throw ConfigError("unknown geometry " + c.geometry);
    if (c.q_order < 1 || c.t_order < 1) throw ConfigError("orders must be positive");
    return c;
}

inline Config parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    return parse_config(f);
}

}  // namespace toprec

#endif
