#include "doctest.h"

#include <cmath>

#include "toprec/gwextract.hpp"

using namespace toprec;

namespace {

const GeometryData& kp2(int order = 8) {
    static std::map<int, GeometryData> cache;
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, builtin_geometry("KP2", "", order)).first;
    return it->second;
}

OpenMirrorMap swapped_map() { return {make_rational(-1, 3), make_rational(1, 3), Rational(-1)}; }

QSeries z_power(int k, int trunc) { return QSeries::monomial(Coeff(1), k * kDen, trunc * kDen); }

}  // namespace

TEST_CASE("XSeries arithmetic") {
    TSeries f = TSeries::monomial(QSeries(1), 1, 8) + TSeries::monomial(QSeries(3), 2, 8) +
                TSeries::monomial(QSeries(-2), 5, 8);
    XSeries x1 = XSeries::univariate(2, 7, 0, f), x2 = XSeries::univariate(2, 7, 1, f);
    XSeries dd = XSeries::divided_difference(2, 7, 0, 1, f);
    XSeries lin = XSeries::univariate(2, 7, 0, TSeries::monomial(QSeries(1), 1, 8)) -
                  XSeries::univariate(2, 7, 1, TSeries::monomial(QSeries(1), 1, 8));
    CHECK(((x1 - x2) - dd * lin).is_zero());
    CHECK((((x1 - x2).divide_by_difference(0, 1)) - dd).is_zero());
    CHECK_THROWS_AS((x1 + x2).divide_by_difference(0, 1), InvariantViolation);
    XSeries u = dd;  // constant term 1
    XSeries one = u * u.inverse();
    for (const auto& [k, v] : one.terms())
        CHECK((v - QSeries(k == XSeries::Exps{0, 0} ? 1 : 0)).is_zero());
}

TEST_CASE("series reversion and substitution") {
    QSeries v = z_power(1, 10) + z_power(2, 10) * Coeff(3) - z_power(5, 10);
    QSeries w = revert(v);
    CHECK((substitute(v, w) - z_power(1, 10)).truncated(10 * kDen).is_zero());
    CHECK((substitute(w, v) - z_power(1, 10)).truncated(10 * kDen).is_zero());
    CHECK_THROWS_AS(revert(z_power(2, 10)), NonInvertibleLeading);
}

TEST_CASE("algebraic disk branch") {
    const int xo = 10, zo = 6;
    BiPoly H = kp2_formal_curve(zo);
    AlgebraicBranch b = disk_potential_algebraic(H, xo);
    // z = 0 gives y = -1 - x
    CHECK(b.y.coeff(0).coeff(0) == Coeff(-1));
    CHECK(b.y.coeff(1).coeff(0) == Coeff(-1));
    for (int k = 2; k < xo; ++k) CHECK(b.y.coeff(k).coeff(0).is_zero());
    CHECK(b.y.coeff(3).coeff(kDen) == Coeff(1));
    // back substitution
    TSeries x = TSeries::monomial(QSeries(1), 1, xo);
    TSeries zx3 = TSeries::monomial(z_power(1, zo), 3, xo);
    TSeries res = b.y * b.y + (TSeries::monomial(QSeries(1), 0, xo) + x) * b.y + zx3;
    for (int k = 0; k < xo; ++k) CHECK(res.coeff(k).truncated(zo * kDen).is_zero());
}

TEST_CASE("algebraic branch needs a root at -1") {
    BiPoly H;
    H.c[{0, 2}] = QSeries(1);
    H.c[{0, 0}] = QSeries(-4);
    CHECK_THROWS_AS(disk_potential_algebraic(H, 4), BranchError);
}

TEST_CASE("open point expansion") {
    const auto& g = kp2();
    OpenPointExpansion e = open_point_expansion(g, 8);
    CHECK(e.x_of_w.lowest_exponent() == 1);
    TSeries id = compose(e.x_of_w, e.w_of_x);
    CHECK(id.coeff(1).coeff(0) == Coeff(1));
    for (int k = 2; k < 7; ++k) CHECK(id.coeff(k).is_zero());
    CHECK(e.c2.valuation() == 0);
}

TEST_CASE("annulus: the two routes agree on every geometry") {
    for (const char* name : {"KP2", "KP1xP1", "KF1", "KWP112"}) {
        CAPTURE(name);
        auto g = builtin_geometry(name, "", 6);
        OpenPointExpansion e = open_point_expansion(g, 8);
        XSeries a = annulus_algebraic(g, e, 5), m = annulus_modular(g, e, 5);
        CHECK_FALSE(a.is_zero());
        CHECK((a - m).is_zero());
        XSeries sw(2, 5);  // symmetric in the two points
        for (const auto& [k, v] : a.terms()) sw.add({k[1], k[0]}, v);
        CHECK((sw - a).is_zero());
    }
}

TEST_CASE("disk and annulus tables agree to order (5, 5)") {
    const auto& g = kp2();
    auto da = disk_table_algebraic(g, 5, 5), dm = disk_table_modular(g, 5, 5);
    CHECK(da.entries == dm.entries);
    CHECK(da.entries.size() == 30);
    auto aa = annulus_table(g, true, 5, 5), am = annulus_table(g, false, 5, 5);
    CHECK(aa.entries == am.entries);
    CHECK(aa.entries.size() == 150);
    // degree zero annulus invariants vanish, degree one are all -1
    for (int a = 1; a <= 5; ++a)
        for (int b = 1; b <= 5; ++b) {
            CHECK(aa.at(0, {a, b}) == Rational(0));
            CHECK(aa.at(1, {a, b}) == Rational(-1));
        }
}

TEST_CASE("disk invariants under the exchanged open map") {
    auto t = disk_table_algebraic(kp2(), 3, 5, swapped_map());
    const std::vector<Rational> expect{-1, 2, -5, 32, -286, 3038};
    for (int d = 0; d <= 5; ++d) CHECK(t.at(d, {1}) == expect[d]);
    CHECK(t.at(0, {2}) == make_rational(-1, 4));
    auto m = disk_table_modular(kp2(), 3, 5, swapped_map());
    CHECK(m.entries == t.entries);
    // the default map gives different numbers
    auto def = disk_table_algebraic(kp2(), 3, 5);
    CHECK(def.at(1, {1}) == Rational(-2));
    CHECK(def.entries != t.entries);
}

TEST_CASE("stable range invariants are rational") {
    const auto& g = kp2(9);
    Recursion rec(g);
    for (auto [gg, n] : std::vector<std::pair<int, int>>{{0, 3}, {1, 1}, {1, 2}}) {
        CAPTURE(gg);
        CAPTURE(n);
        InvariantTable t = extract_invariants(rec, gg, n, 3, 3);
        CHECK(t.g == gg);
        CHECK(t.n == n);
        CHECK(t.entries.size() == 4 * static_cast<std::size_t>(std::pow(3, n)));
    }
    InvariantTable t11 = extract_invariants(rec, 1, 1, 3, 3);
    CHECK(t11.at(0, {1}) == make_rational(1, 24));
}

TEST_CASE("table argument checks") {
    const auto& g = kp2();
    auto t = disk_table_algebraic(g, 3, 3);
    CHECK_THROWS_AS(t.at(0, {0}), ConfigError);
    CHECK_THROWS_AS(t.at(0, {1, 1}), ConfigError);
    CHECK_THROWS_AS(t.at(9, {1}), OrderTooLow);
    CHECK_THROWS_AS(disk_table_modular(g, 3, 12), OrderTooLow);
    OpenMirrorMap bad{make_rational(1, 3), make_rational(1, 3), Rational(-1)};
    CHECK_THROWS_AS(disk_table_algebraic(g, 3, 3, bad), ConfigError);
    auto other = builtin_geometry("KP1xP1", "", 4);
    CHECK_THROWS_AS(disk_table_modular(other, 3, 3), NotImplementedForGeometry);
    Recursion rec(other);
    CHECK_THROWS_AS(extract_invariants(rec, 0, 3, 2, 2), NotImplementedForGeometry);
}

TEST_CASE("modular expansion of constants and the Jacobian") {
    const auto& g = kp2();
    OpenPointExpansion e = open_point_expansion(g, 8);
    XSeries c = x_expansion_modular(eta_power(1), 0, g, e, 4);
    CHECK((c.coeff({}) - g.ell->eta1()).is_zero());
    CHECK(c.terms().size() == 1);
    // (dx/du)^2 = c^2 g(x(u)) with w = y + h(x)
    TSeries xp = e.x_of_w.derivative();
    TSeries gx = TSeries::zero(7);
    for (std::size_t k = 0; k < g.split.g.size(); ++k) {
        TSeries p = TSeries::monomial(g.split.g[k], 0, 7);
        for (std::size_t j = 0; j < k; ++j) p = (p * e.x_of_w).truncated(7);
        gx = gx + p;
    }
    TSeries lhs = (xp * xp).truncated(7), rhs = gx.scaled(e.c2).truncated(7);
    for (int k = 0; k < 7; ++k) CHECK((lhs.coeff(k) - rhs.coeff(k)).truncated(8 * kDen).is_zero());
}

TEST_CASE("annulus routes agree to (x, q) order (6, 6)") {
    const auto& g = kp2();
    OpenPointExpansion e = open_point_expansion(g, 9);
    XSeries a = annulus_algebraic(g, e, 6), m = annulus_modular(g, e, 6);
    for (const auto& [k, v] : (a - m).terms()) CHECK(v.truncated(6 * kDen).is_zero());
    for (const auto& [k, v] : a.terms()) CHECK(v.trunc() >= 6 * kDen);
}
