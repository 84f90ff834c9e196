#ifndef TOPREC_GWEXTRACT_HPP
#define TOPREC_GWEXTRACT_HPP

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "recursion.hpp"

namespace toprec {

// Truncated power series in x_1..x_n over QSeries; terms of total degree
// >= order are dropped.
class XSeries {
public:
    using Exps = std::vector<int>;

    XSeries(int nvars, int order) : n_(nvars), order_(order) {}

    static XSeries constant(int nvars, int order, const QSeries& c) {
        XSeries r(nvars, order);
        r.add(Exps(nvars, 0), c);
        return r;
    }
    // f(x_slot) for a univariate power series f
    static XSeries univariate(int nvars, int order, int slot, const TSeries& f) {
        if (f.lowest_exponent() < 0) throw BranchError("univariate series with a pole");
        XSeries r(nvars, order);
        for (int e = f.lowest_exponent(); e < std::min(order, f.trunc()); ++e) {
            Exps k(nvars, 0);
            k[slot] = e;
            r.add(k, f.coeff(e));
        }
        r.order_ = std::min(order, f.trunc());
        return r;
    }
    // (f(x_i) - f(x_j)) / (x_i - x_j)
    static XSeries divided_difference(int nvars, int order, int i, int j, const TSeries& f) {
        XSeries r(nvars, order);
        for (int e = std::max(1, f.lowest_exponent()); e < std::min(order + 1, f.trunc()); ++e) {
            const QSeries& c = f.coeff(e);
            if (c.is_zero() && c.exact()) continue;
            for (int a = 0; a < e; ++a) {
                Exps k(nvars, 0);
                k[i] = a;
                k[j] = e - 1 - a;
                r.add(k, c);
            }
        }
        r.order_ = std::min(order, f.trunc() - 1);
        return r;
    }

    int nvars() const { return n_; }
    int order() const { return order_; }
    const std::map<Exps, QSeries>& terms() const { return c_; }

    QSeries coeff(const Exps& k) const {
        auto it = c_.find(k);
        return it == c_.end() ? QSeries() : it->second;
    }

    void add(const Exps& k, const QSeries& v) {
        int deg = 0;
        for (int e : k) deg += e;
        if (deg >= order_) return;
        auto it = c_.find(k);
        if (it == c_.end()) {
            if (!(v.is_zero() && v.exact())) c_.emplace(k, v);
        } else {
            it->second += v;
        }
    }

    XSeries& operator+=(const XSeries& o) {
        order_ = std::min(order_, o.order_);
        prune();
        for (const auto& [k, v] : o.c_) add(k, v);
        return *this;
    }
    friend XSeries operator+(XSeries a, const XSeries& b) { return a += b; }
    friend XSeries operator-(XSeries a, const XSeries& b) { return a += b * QSeries(-1); }

    friend XSeries operator*(const XSeries& a, const QSeries& s) {
        XSeries r(a.n_, a.order_);
        for (const auto& [k, v] : a.c_) r.add(k, v * s);
        return r;
    }
    friend XSeries operator*(const XSeries& a, const XSeries& b) {
        XSeries r(a.n_, std::min(a.order_, b.order_));
        for (const auto& [ka, va] : a.c_)
            for (const auto& [kb, vb] : b.c_) {
                Exps k(a.n_);
                int deg = 0;
                for (int s = 0; s < a.n_; ++s) deg += (k[s] = ka[s] + kb[s]);
                if (deg < r.order_) r.add(k, va * vb);
            }
        return r;
    }

    XSeries inverse() const {
        QSeries c0 = coeff(Exps(n_, 0));
        if (c0.is_zero()) throw NonInvertibleLeading("multivariate series without constant term");
        QSeries i0 = c0.inverse();
        XSeries u = *this * i0;
        u.add(Exps(n_, 0), QSeries(-1));  // u = f/c0 - 1 has no constant term
        XSeries r = constant(n_, order_, QSeries(1)), p = r;
        for (int k = 1; k < order_; ++k) {
            p = p * u * QSeries(-1);
            r += p;
        }
        return r * i0;
    }

    // Exact quotient by (x_i - x_j); the series must vanish on x_i = x_j.
    XSeries divide_by_difference(int i, int j) const {
        XSeries r(n_, order_ - 1);
        XSeries check(n_, order_);
        for (const auto& [k, v] : c_) {
            Exps d = k;
            d[j] += d[i];
            d[i] = 0;
            check.add(d, v);
            for (int a = 0; a < k[i]; ++a) {
                Exps q = k;
                q[i] = a;
                q[j] = k[j] + k[i] - 1 - a;
                r.add(q, v);
            }
        }
        for (const auto& [k, v] : check.c_)
            if (!v.is_zero()) throw InvariantViolation("series does not vanish on the diagonal");
        return r;
    }

    bool is_zero() const {
        for (const auto& [k, v] : c_)
            if (!v.is_zero()) return false;
        return true;
    }

private:
    void prune() {
        for (auto it = c_.begin(); it != c_.end();) {
            int deg = 0;
            for (int e : it->first) deg += e;
            it = deg >= order_ ? c_.erase(it) : std::next(it);
        }
    }

    int n_, order_;
    std::map<Exps, QSeries> c_;
};

namespace detail {

inline TSeries t_sqrt_unit(const TSeries& f) {
    // s^2 = f with s(0) = 1
    if (f.lowest_exponent() != 0 || !(f.coeff(0) - QSeries(1)).is_zero())
        throw BranchError("square root needs constant term 1");
    const int t = f.trunc();
    std::vector<QSeries> s{QSeries(1)};
    for (int k = 1; k < t; ++k) {
        QSeries acc = f.coeff(k);
        for (int j = 1; j < k; ++j) acc -= s[j] * s[k - j];
        s.push_back(acc * make_rational(1, 2));
    }
    return TSeries::from_coeffs(0, s, t);
}

inline TSeries t_log_unit(const TSeries& f) {
    if (f.lowest_exponent() != 0 || !(f.coeff(0) - QSeries(1)).is_zero())
        throw BranchError("logarithm needs constant term 1");
    return (f.derivative() * f.inverse()).truncated(f.trunc() - 1).primitive();
}

inline QSeries xpoly_coeff(const XPoly& p, int k) {
    return k < static_cast<int>(p.size()) ? p[k] : QSeries::zero(kExact);
}

}  // namespace detail

// f(s) for f with non-negative integral exponents and s of positive valuation.
inline QSeries substitute(const QSeries& f, const QSeries& s) {
    std::vector<Coeff> c;
    for (const auto& [e, v] : f.terms()) {
        if (e < 0 || e % kDen) throw BranchError("substitution needs integral non-negative exponents");
        const std::size_t k = static_cast<std::size_t>(e / kDen);
        if (c.size() <= k) c.resize(k + 1);
        c[k] = v;
    }
    QSeries r = compose(c, s);
    if (!f.exact()) {
        const int tf = f.trunc() / kDen + (f.trunc() % kDen ? 1 : 0);
        r = r.truncated(std::min(r.trunc(), tf * s.valuation()));
    }
    return r;
}

// Compositional inverse of v = b1 w + b2 w^2 + ... in integral exponents.
inline QSeries revert(const QSeries& v) {
    if (v.terms().empty() || v.valuation() != kDen) throw NonInvertibleLeading("reversion needs valuation one");
    if (v.exact()) throw NonInvertibleLeading("reversion needs a truncation");
    const Coeff b1 = v.terms().front().second;
    const Coeff ib1 = b1.inverse();
    QSeries rest = v - QSeries::monomial(b1, kDen);
    QSeries w0 = QSeries::monomial(Coeff(1), kDen, v.trunc());
    QSeries w = w0 * ib1;
    const int steps = v.trunc() / kDen + 1;
    for (int it = 0; it < steps; ++it) w = (w0 - substitute(rest, w)) * ib1;
    return w.truncated(v.trunc());
}

// ---------------------------------------------------------------------------
// Algebraic route.
// ---------------------------------------------------------------------------

struct AlgebraicBranch {
    TSeries y, log_minus_y;
};

// Root of H(x, y) = 0 with y(0) = -1 via the quadratic formula.
inline AlgebraicBranch disk_potential_algebraic(const BiPoly& H, int x_order) {
    if (H.y_degree() != 2) throw NotHyperelliptic("curve is not quadratic in y");
    auto col = [&](int j) {
        std::vector<QSeries> c;
        for (int i = 0; i < x_order; ++i) {
            auto it = H.c.find({i, j});
            c.push_back(it == H.c.end() ? QSeries::zero(kExact) : it->second);
        }
        return TSeries::from_coeffs(0, c, x_order);
    };
    TSeries A = col(2), B = col(1), C = col(0);
    TSeries D = B * B - A * C * TSeries::monomial(QSeries(4), 0, x_order);
    QSeries d0 = D.coeff(0);
    QSeries s0 = B.coeff(0) - A.coeff(0) * Rational(2);
    if (!(s0 * s0 - d0).is_zero() || s0.is_zero()) throw BranchError("no root with y(0) = -1");
    TSeries root = detail::t_sqrt_unit((D * TSeries::monomial(d0.inverse(), 0, x_order)).truncated(x_order));
    TSeries y = ((root.scaled(s0) - B) * A.inverse() * TSeries::monomial(QSeries(Coeff(make_rational(1, 2))), 0, x_order))
                    .truncated(x_order);
    if (!(y.coeff(0) + QSeries(1)).is_zero()) throw BranchError("no root with y(0) = -1");
    AlgebraicBranch r;
    r.y = y;
    r.log_minus_y = detail::t_log_unit(y.scaled(QSeries(-1)));
    return r;
}

// KP2 curve y^2 + (1 + x) y + z x^3 with z a formal variable (z^k at q^k).
inline BiPoly kp2_formal_curve(int param_order) {
    BiPoly H;
    H.c[{0, 2}] = QSeries(1);
    H.c[{0, 1}] = QSeries(1);
    H.c[{1, 1}] = QSeries(1);
    H.c[{3, 0}] = QSeries::monomial(Coeff(1), kDen, param_order * kDen);
    return H;
}

// ---------------------------------------------------------------------------
// Modular route: expansions at the open GW point.
// ---------------------------------------------------------------------------

struct OpenPointExpansion {
    int x_order = 0;
    TSeries x_of_w, y_of_w, w_of_x, dw_dx;
    QSeries c2;  // (dx/du)^2 / g(x), constant along the curve
};

inline OpenPointExpansion open_point_expansion(const GeometryData& g, int x_order) {
    OpenPointExpansion e;
    e.x_order = x_order;
    const int t = x_order + 1;
    LocalXY l = g.open_point_xy(t + 1);
    if (!l.x.coeff(0).is_zero()) throw UnresolvedPoint("x does not vanish at the open point");
    if (!(l.y.coeff(0) + QSeries(1)).is_zero()) throw UnresolvedPoint("y is not -1 at the open point");
    std::vector<QSeries> xc;
    for (int k = 1; k < t; ++k) xc.push_back(l.x.coeff(k));
    e.x_of_w = TSeries::from_coeffs(1, xc, t);
    e.y_of_w = l.y.truncated(t);
    e.w_of_x = reversion(e.x_of_w);
    e.dw_dx = e.w_of_x.derivative().truncated(x_order);
    QSeries w0 = l.y.coeff(0) + detail::xpoly_coeff(g.split.h, 0);
    e.c2 = l.x.coeff(1) * l.x.coeff(1) * (w0 * w0).inverse();
    return e;
}

namespace detail {

// P(s0 - u_r) and P'(s0 - u_r)
inline WpPoint open_minus_ramification(const GeometryData& g, int r) {
    const EllipticData& ell = *g.ell;
    WpPoint ram;
    if (g.eps_a == 0 && g.eps_b == 0) {
        if (r == kOrigin) throw UnresolvedPoint("ramification at the lattice origin");
        ram = {ell.e(r), QSeries::zero(ell.qtrunc())};
    } else {
        Rational a = g.eps_a + ((r & 1) ? make_rational(1, 2) : Rational(0));
        Rational b = g.eps_b + ((r & 2) ? make_rational(1, 2) : Rational(0));
        ram = wp_at_torsion_point(a, b, ell);
    }
    return wp_addition(g.open_point, ram);
}

}  // namespace detail

// omega = A(x_1..x_n) dx_1...dx_n for a JacobiPoly without the diagonal
// symbol; eta1 takes its q-series value and Y is set to zero.
inline XSeries x_expansion_modular(const JacobiPoly& poly, int n, const GeometryData& g, const OpenPointExpansion& e,
                                   int order) {
    const EllipticData& ell = *g.ell;
    const int t = e.x_order;
    std::map<int, std::pair<TSeries, TSeries>> sym;  // label -> (P, P') in x
    auto symbols = [&](int r) -> const std::pair<TSeries, TSeries>& {
        auto it = sym.find(r);
        if (it != sym.end()) return it->second;
        WpPoint p = detail::open_minus_ramification(g, r);
        TSeries pw = wp_taylor(p.wp, p.dwp, t + 1, ell);
        TSeries P = compose(pw.truncated(t), e.w_of_x);
        TSeries dP = compose(pw.derivative().truncated(t), e.w_of_x);
        return sym.emplace(r, std::make_pair(P, dP)).first->second;
    };
    std::map<std::tuple<int, int, int, int>, XSeries> factors;
    auto factor = [&](int slot, int r, int a, int b) -> const XSeries& {
        auto key = std::make_tuple(slot, r, a, b);
        auto it = factors.find(key);
        if (it != factors.end()) return it->second;
        const auto& [P, dP] = symbols(r);
        TSeries f = TSeries::monomial(QSeries(1), 0, t);
        for (int k = 0; k < a; ++k) f = (f * P).truncated(t);
        if (b) f = (f * dP).truncated(t);
        return factors.emplace(key, XSeries::univariate(n, order, slot, f)).first->second;
    };
    const QSeries eta1 = ell.eta1();
    XSeries total(n, order);
    for (const auto& [k, c] : poly.terms()) {
        if (k.diag) throw InvariantViolation("diagonal symbol has no Taylor expansion at the open point");
        if (k.y) continue;
        XSeries m = XSeries::constant(n, order, c * pow(eta1, k.eta));
        for (int s = 0; s < n; ++s)
            if (k.byte(s)) m = m * factor(s, k.label(s), k.a(s), k.b(s));
        total += m;
    }
    XSeries jac = XSeries::constant(n, order, QSeries(1));
    for (int s = 0; s < n; ++s) jac = jac * XSeries::univariate(n, order, s, e.dw_dx);
    return total * jac;
}

// omega_{0,2} - dx1 dx2 / (x1 - x2)^2 as A(x1, x2) dx1 dx2.
inline XSeries annulus_modular(const GeometryData& g, const OpenPointExpansion& e, int order) {
    const EllipticData& ell = *g.ell;
    const int big = order + 2;
    XSeries dd = XSeries::divided_difference(2, big, 0, 1, e.w_of_x);  // (w1 - w2)/(x1 - x2)
    XSeries jac = XSeries::univariate(2, big, 0, e.dw_dx) * XSeries::univariate(2, big, 1, e.dw_dx);
    XSeries sing = jac * (dd * dd).inverse();
    sing.add({0, 0}, QSeries(-1));
    XSeries reg = sing.divide_by_difference(0, 1).divide_by_difference(0, 1);
    // regular part of P(w1 - w2) + eta1
    TSeries lau = wp_laurent_at_origin(0, 1, big + 2, ell);
    XSeries diff = XSeries::univariate(2, big, 0, e.w_of_x) - XSeries::univariate(2, big, 1, e.w_of_x);
    XSeries d2 = diff * diff, pw = XSeries::constant(2, big, QSeries(1));
    XSeries smooth = XSeries::constant(2, big, ell.eta1());
    for (int k = 2; k < lau.trunc(); k += 2) {
        pw = pw * d2;
        if (pw.is_zero()) break;
        smooth += pw * lau.coeff(k);
    }
    XSeries r = reg + smooth * jac;
    XSeries out(2, order);
    for (const auto& [k, v] : r.terms()) out.add(k, v);
    return out;
}

// The same object from the curve equation: with w = y + h(x), w^2 = g(x),
// the Kleinian bidifferential (w1 w2 + F/2) / (2 w1 w2 (x1 - x2)^2) equals
// P(u1 - u2) du1 du2 - (a2/12) dx1 dx2/(w1 w2); the normalization eta1 / c^2
// with du = dx/(c w) is the only modular input.
inline XSeries annulus_algebraic(const GeometryData& g, const OpenPointExpansion& e, int order) {
    const int big = order + 2;
    AlgebraicBranch br = disk_potential_algebraic(g.curve, big + 1);
    TSeries hx = TSeries::zero(big + 1);
    for (std::size_t k = 0; k < g.split.h.size(); ++k)
        hx = hx + TSeries::monomial(g.split.h[k], static_cast<int>(k), big + 1);
    TSeries w = (br.y + hx).truncated(big + 1);
    auto a = [&](int k) { return detail::xpoly_coeff(g.split.g, k); };
    if (g.split.g.size() > 5) throw NotHyperelliptic("g(x) has degree above four");
    XSeries x1 = XSeries::univariate(2, big, 0, TSeries::monomial(QSeries(1), 1, big + 1));
    XSeries x2 = XSeries::univariate(2, big, 1, TSeries::monomial(QSeries(1), 1, big + 1));
    XSeries one = XSeries::constant(2, big, QSeries(1));
    XSeries F = one * (a(0) * Rational(2)) + (x1 + x2) * a(1) + x1 * x2 * (a(2) * Rational(2)) +
                x1 * x2 * (x1 + x2) * a(3) + x1 * x1 * x2 * x2 * (a(4) * Rational(2));
    XSeries w1 = XSeries::univariate(2, big, 0, w), w2 = XSeries::univariate(2, big, 1, w);
    XSeries ww = w1 * w2, iww = ww.inverse();
    XSeries num = (F * QSeries(Coeff(make_rational(1, 2))) - ww) * iww * QSeries(Coeff(make_rational(1, 2)));
    XSeries reg = num.divide_by_difference(0, 1).divide_by_difference(0, 1);
    QSeries k0 = a(2) * make_rational(1, 12) + g.ell->eta1() * e.c2.inverse();
    XSeries r = reg + iww * k0;
    XSeries out(2, order);
    for (const auto& [k, v] : r.terms()) out.add(k, v);
    return out;
}

// ---------------------------------------------------------------------------
// Invariant tables.
// ---------------------------------------------------------------------------

struct InvariantTable {
    std::string geometry, route;
    int g = 0, n = 0, q_order = 0, x_order = 0;
    // (d, mu) -> n_{g,d,mu}
    std::map<std::pair<int, std::vector<int>>, Rational> entries;

    Rational at(int d, const std::vector<int>& mu) const {
        for (int m : mu)
            if (m <= 0) throw ConfigError("winding numbers must be positive");
        if (static_cast<int>(mu.size()) != n) throw ConfigError("winding vector has the wrong length");
        auto it = entries.find({d, mu});
        if (it == entries.end()) throw OrderTooLow("entry outside the computed range");
        return it->second;
    }
};

// The open and closed mirror maps in the variable v of a series: m(v) with
// X = m x, and Q as a series in v.
struct MirrorData {
    QSeries m, v_of_Q;
};

inline MirrorData mirror_in_z(const GeometryData& g, const OpenMirrorMap& om, int order) {
    if (om.c + om.c1 != 0) throw ConfigError("open mirror map needs c + c1 = 0");
    auto co = mirror_map_closed_coefficients(g, order + 1);
    std::vector<Coeff> f(co.begin(), co.end());
    QSeries z = QSeries::monomial(Coeff(1), kDen, (order + 1) * kDen);
    QSeries S = compose(f, z);
    QSeries Q = z * exp(S);
    return {exp(S * om.c) * Coeff(om.c3), revert(Q)};
}

inline MirrorData mirror_in_q(const GeometryData& g, const OpenMirrorMap& om, int order) {
    if (om.c + om.c1 != 0) throw ConfigError("open mirror map needs c + c1 = 0");
    ClosedMirror cm = mirror_map_closed(g, order + 1);
    return {exp(cm.S * om.c) * Coeff(om.c3), revert(cm.Q)};
}

// A = sum a_e(v) x^e.  With differential = true the input is the density
// of dx_1...dx_n and the winding of slot k is e_k + 1; otherwise e_k.
inline InvariantTable to_table(const XSeries& A, bool differential, const MirrorData& md, int max_winding,
                               int max_degree, Rational sign) {
    if (max_winding < 1) throw ConfigError("max winding must be at least one");
    InvariantTable t;
    t.n = A.nvars();
    t.q_order = max_degree;
    t.x_order = max_winding;
    const QSeries im = md.m.inverse();
    for (const auto& [k, v] : A.terms()) {
        std::vector<int> mu(k.size());
        int powm = 0;
        Rational denom(1);
        bool ok = true;
        for (std::size_t s = 0; s < k.size(); ++s) {
            mu[s] = k[s] + (differential ? 1 : 0);
            if (mu[s] < 1 || mu[s] > max_winding) ok = false;
            powm += mu[s];
            denom *= mu[s];
        }
        if (!ok) continue;
        QSeries c = substitute(v * pow(im, powm), md.v_of_Q);
        if (c.trunc() <= max_degree * kDen) throw OrderTooLow("q precision too low for the requested degree");
        for (int d = 0; d <= max_degree; ++d) {
            Coeff cd = c.coeff(d * kDen);
            t.entries[{d, mu}] = cd.rational_value() * sign / denom;
        }
        for (const auto& [e, cd] : c.terms())
            if (e % kDen) throw NonRational("fractional degree in an invariant series");
    }
    // windings absent from A are zero
    std::vector<int> mu(t.n, 1);
    while (true) {
        for (int d = 0; d <= max_degree; ++d) t.entries.emplace(std::make_pair(d, mu), Rational(0));
        int s = 0;
        while (s < t.n && ++mu[s] > max_winding) mu[s++] = 1;
        if (s == t.n) break;
    }
    return t;
}

inline OpenMirrorMap effective_open_map(const GeometryData& g, const std::optional<OpenMirrorMap>& om) {
    return om ? *om : g.mirror_open;
}

inline InvariantTable disk_table_algebraic(const GeometryData& g, int max_winding, int max_degree,
                                           const std::optional<OpenMirrorMap>& om = std::nullopt) {
    if (g.name != "KP2") throw NotImplementedForGeometry("invariant extraction is KP2 only");
    AlgebraicBranch br = disk_potential_algebraic(kp2_formal_curve(max_degree + 1), max_winding + 1);
    XSeries A = XSeries::univariate(1, max_winding + 1, 0, br.log_minus_y);
    InvariantTable t = to_table(A, false, mirror_in_z(g, effective_open_map(g, om), max_degree), max_winding,
                                max_degree, Rational(1));
    t.geometry = g.name;
    t.route = "algebraic";
    return t;
}

inline InvariantTable disk_table_modular(const GeometryData& g, int max_winding, int max_degree,
                                         const std::optional<OpenMirrorMap>& om = std::nullopt) {
    if (g.name != "KP2") throw NotImplementedForGeometry("invariant extraction is KP2 only");
    OpenPointExpansion e = open_point_expansion(g, max_winding + 1);
    TSeries y = compose(e.y_of_w, e.w_of_x);
    XSeries A = XSeries::univariate(1, max_winding + 1, 0, detail::t_log_unit(y.scaled(QSeries(-1))));
    InvariantTable t = to_table(A, false, mirror_in_q(g, effective_open_map(g, om), max_degree), max_winding,
                                max_degree, Rational(1));
    t.geometry = g.name;
    t.route = "modular";
    return t;
}

inline InvariantTable annulus_table(const GeometryData& g, bool algebraic, int max_winding, int max_degree,
                                    const std::optional<OpenMirrorMap>& om = std::nullopt) {
    if (g.name != "KP2") throw NotImplementedForGeometry("invariant extraction is KP2 only");
    const int order = 2 * max_winding - 1;
    OpenPointExpansion e = open_point_expansion(g, order + 3);
    XSeries A = algebraic ? annulus_algebraic(g, e, order) : annulus_modular(g, e, order);
    InvariantTable t = to_table(A, true, mirror_in_q(g, effective_open_map(g, om), max_degree), max_winding,
                                max_degree, Rational(1));
    t.geometry = g.name;
    t.g = 0;
    t.route = algebraic ? "algebraic" : "modular";
    return t;
}

// n_{g,d,mu} for 2g - 2 + n > 0 through omega_{g,n} at the open point.
inline InvariantTable extract_invariants(Recursion& rec, int gg, int n, int max_winding, int max_degree,
                                         const std::optional<OpenMirrorMap>& om = std::nullopt) {
    const GeometryData& g = rec.geometry();
    if (g.name != "KP2") throw NotImplementedForGeometry("invariant extraction is KP2 only");
    if (gg == 0 && n == 1) return disk_table_modular(g, max_winding, max_degree, om);
    if (gg == 0 && n == 2) return annulus_table(g, false, max_winding, max_degree, om);
    const int order = n * (max_winding - 1) + 1;
    OpenPointExpansion e = open_point_expansion(g, max_winding + 1);
    XSeries A = x_expansion_modular(rec.omega(gg, n), n, g, e, order);
    Rational sign((gg - 1 + n) % 2 ? -1 : 1);
    InvariantTable t =
        to_table(A, true, mirror_in_q(g, effective_open_map(g, om), max_degree), max_winding, max_degree, sign);
    t.geometry = g.name;
    t.g = gg;
    t.route = "modular";
    return t;
}

}  // namespace toprec

#endif
