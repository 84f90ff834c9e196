#include "doctest.h"

#include <set>
#include <sstream>

#include "toprec/geometry.hpp"

using namespace toprec;

namespace {

int min_qtrunc(const TSeries& s) {
    int t = kExact;
    for (const auto& c : s.coeffs()) t = std::min(t, c.trunc());
    return t;
}

bool vanishes(const TSeries& s) { return s.is_zero(); }

// eta(m tau) from the product formula, with the q^{m/24} prefactor
QSeries eta_product(int m, int order) {
    QSeries p = QSeries::monomial(Coeff(1), m, order * kDen);
    for (int n = 1; n * m < order; ++n) p = p * (QSeries(1) - QSeries::monomial(Coeff(1), n * m * kDen));
    return p;
}

const std::vector<std::pair<std::string, std::string>> kAll{
    {"KP2", "lr"}, {"KP2", "appendix"}, {"KP1xP1", "q1=q2"}, {"KWP112", "b4=0"}, {"KF1", "q1=1"}};

}  // namespace

TEST_CASE("hyperelliptic split") {
    BiPoly h;
    QSeries q1 = QSeries::monomial(Coeff(1), kDen, 5 * kDen);
    h.c[{0, 2}] = QSeries(1);
    h.c[{0, 1}] = QSeries(1);
    h.c[{1, 1}] = QSeries(1);
    h.c[{3, 0}] = q1;
    auto s = hyperelliptic_split(h);
    REQUIRE(s.h.size() == 2);
    CHECK(s.h[0] == QSeries(Coeff(make_rational(1, 2))));
    CHECK(s.h[1] == QSeries(Coeff(make_rational(1, 2))));
    REQUIRE(s.g.size() == 4);
    CHECK(s.g[0] == QSeries(Coeff(make_rational(1, 4))));
    CHECK(s.g[1] == QSeries(Coeff(make_rational(1, 2))));
    CHECK(s.g[2] == QSeries(Coeff(make_rational(1, 4))));
    CHECK((s.g[3] + q1).is_zero());

    BiPoly pure;
    pure.c[{0, 2}] = QSeries(1);
    pure.c[{3, 0}] = QSeries(-4);
    auto ps = hyperelliptic_split(pure);
    for (const auto& c : ps.h) CHECK(c.is_zero());

    auto wp = builtin_geometry("KWP112", "", 4);
    auto ws = wp.split;
    const QSeries& b0 = wp.param("b0").series;
    CHECK(ws.h[0] == QSeries(Coeff(make_rational(1, 2))));
    CHECK((ws.h[1] - b0 * make_rational(1, 2)).is_zero());
    auto hh = xpoly_mul(ws.h, ws.h);
    hh.resize(5, QSeries::zero(kExact));
    hh[4] -= QSeries(1);
    for (std::size_t i = 0; i < 5; ++i) CHECK((hh[i] - ws.g[i]).is_zero());

    BiPoly cubic;
    cubic.c[{0, 3}] = QSeries(1);
    cubic.c[{1, 0}] = QSeries(1);
    CHECK_THROWS_AS(hyperelliptic_split(cubic), NotHyperelliptic);
    BiPoly lead;
    lead.c[{0, 2}] = QSeries(2);
    CHECK_THROWS_AS(hyperelliptic_split(lead), NotHyperelliptic);
}

TEST_CASE("KP2 parameters") {
    const int order = 10;
    auto g = builtin_geometry("KP2", "", order);
    CHECK(g.frame == "lr");
    const QSeries& q1m = g.param("q1_mirror").series;
    CHECK(q1m.valuation() == kDen);
    CHECK(q1m.leading() == Coeff(-27));
    // -27 eta(3 tau)^9 / (Theta^3 eta^3), Theta by direct lattice count
    std::vector<QSeries::Term> th;
    for (int n = 0; n < order; ++n) {
        long c = 0;
        for (int a = -8; a <= 8; ++a)
            for (int b = -8; b <= 8; ++b)
                if (a * a + a * b + b * b == n) ++c;
        if (c) th.emplace_back(n * kDen, Coeff(c));
    }
    QSeries theta = QSeries::from_terms(th, order * kDen);
    QSeries oracle = pow(eta_product(3, order), 9) * (pow(theta, 3) * pow(eta_product(1, order), 3)).inverse() *
                     Rational(-27);
    int t = std::min(oracle.trunc(), q1m.trunc());
    CHECK((oracle.truncated(t) - q1m.truncated(t)).is_zero());
    CHECK(t >= (order - 1) * kDen);
    CHECK((g.z * Rational(27) - q1m).is_zero());

    auto ga = builtin_geometry("KP2", "appendix", order);
    // conifold frame: q1 = (-3 phi)^{-3} tends to -1/27
    CHECK(ga.z.valuation() == 0);
    CHECK(ga.z.leading() == Coeff(make_rational(-1, 27)));
    CHECK_THROWS_AS(builtin_geometry("KP2", "bogus", 4), UnsupportedSubfamily);
    CHECK_THROWS_AS(builtin_geometry("KP1xP1", "q1=0", 4), UnsupportedSubfamily);
    CHECK_THROWS_AS(builtin_geometry("KP3", "", 4), ConfigError);
}

TEST_CASE("uniformization identities at the ramification points") {
    const int T = 8, Q = 8;
    for (const auto& [name, sub] : kAll) {
        CAPTURE(name);
        CAPTURE(sub);
        auto g = builtin_geometry(name, sub, Q + 4);
        for (int r : g.ramification) {
            CAPTURE(r);
            LocalXY l = g.local_xy(r, T);
            CHECK(min_qtrunc(l.x) >= Q * kDen);
            CHECK(min_qtrunc(l.y) >= Q * kDen);
            CHECK(vanishes(g.curve.evaluate(l.x, l.y)));
            TSeries ys = g.involution(l);
            CHECK(vanishes(g.curve.evaluate(l.x, ys)));
            TSeries sq = l.y + eval_xpoly(g.split.h, l.x);
            CHECK(vanishes(sq * sq - eval_xpoly(g.split.g, l.x)));
            // ramification: x even in T, y* the reflection of y
            for (int j = 1; j < T; j += 2) CHECK(l.x.coeff(j).is_zero());
            TSeries refl = l.y.negate_variable();
            CHECK(vanishes(refl - ys));
            // branch value is a root of g
            CHECK(eval_xpoly(g.split.g, l.x.coeff(0)).is_zero());
        }
    }
}

TEST_CASE("KWP112 branch points") {
    auto g = builtin_geometry("KWP112", "", 10);
    const QSeries& b0 = g.param("b0").series;
    QSeries b0sq = b0 * b0;
    QSeries rm = sqrt(b0sq - QSeries(8)), rp = sqrt(b0sq + QSeries(8));
    std::vector<QSeries> roots{(-b0 + rm) * make_rational(1, 4), (-b0 - rm) * make_rational(1, 4),
                               (b0 - rp) * make_rational(1, 4), (b0 + rp) * make_rational(1, 4)};
    std::set<int> used;
    for (int r : g.ramification) {
        QSeries xr = g.local_xy(r, 2).x.coeff(0);
        int hit = -1;
        for (int k = 0; k < 4; ++k) {
            int t = std::min(xr.trunc(), roots[k].trunc());
            if ((xr.truncated(t) - roots[k].truncated(t)).is_zero()) hit = k;
        }
        CHECK(hit >= 0);
        used.insert(hit);
    }
    CHECK(used.size() == 4);
    // root substitution oracle
    for (const auto& x : roots) CHECK(eval_xpoly(g.split.g, x).is_zero());
}

TEST_CASE("open GW point") {
    for (const auto& [name, sub] : kAll) {
        CAPTURE(name);
        auto g = builtin_geometry(name, sub, 10);
        CHECK(open_point_residual(g).is_zero());
        LocalXY l = g.open_point_xy(4);
        CHECK(l.x.coeff(0).is_zero());
        CHECK((l.y.coeff(0) + QSeries(1)).is_zero());
        CHECK(vanishes(g.curve.evaluate(l.x, l.y)));
    }
    auto g = builtin_geometry("KP2", "", 10);
    const QSeries& kappa = g.param("kappa").series;
    CHECK((g.open_point.dwp + pow(kappa, 3).inverse() * make_rational(1, 2)).is_zero());
    // 3-torsion: P(2 s0) = P(s0), i.e. P''^2 = 12 P P'^2
    const QSeries &p = g.open_point.wp, &dp = g.open_point.dwp;
    QSeries d2 = p * p * Rational(6) - g.ell->g2() * make_rational(1, 2);
    CHECK((d2 * d2 - p * dp * dp * Rational(12)).is_zero());
    // the same statement through the numeric group law at tau = 2i
    const std::complex<double> tau(0, 2);
    const auto P = p.evaluate(tau), dP = dp.evaluate(tau), D2 = d2.evaluate(tau);
    auto lam = D2 / dP;
    auto p2 = lam * lam / 4.0 - 2.0 * P;
    auto dp2 = -(dP + lam * (p2 - P));
    CHECK(numeric::close(p2, P, 1e-6));
    CHECK(numeric::close(dp2, -dP, 1e-6));
    // P(s0 + 2 s0) would be the sum with opposite points: the chord is vertical
    CHECK(std::abs(p2 - P) < 1e-6 * std::abs(P));
}

TEST_CASE("closed mirror map") {
    auto g = builtin_geometry("KP2", "", 8);
    auto c = mirror_map_closed_in_q1(g, 5);
    CHECK(c[1] == make_rational(-2, 9));
    CHECK(c[2] == make_rational(5, 81));
    // (3k)!/(k!^3 k) (-1/27)^k by direct factorial arithmetic
    auto fact = [](int n) {
        mpz_class f(1);
        for (int k = 2; k <= n; ++k) f *= k;
        return f;
    };
    for (int k = 1; k <= 5; ++k) {
        mpz_class p27;
        mpz_ui_pow_ui(p27.get_mpz_t(), 27, k);
        Rational e(fact(3 * k), fact(k) * fact(k) * fact(k) * k * p27);
        e.canonicalize();
        if (k % 2) e = -e;
        CHECK(c[k] == e);
    }
    auto m = mirror_map_closed(g, 8);
    // T - log z = S(z) = O(z)
    CHECK(m.S.valuation() > 0);
    CHECK(m.Q.valuation() == kDen);
    CHECK(m.Q.leading() == Coeff(-1));
    for (const char* n : {"KP1xP1", "KWP112", "KF1"})
        CHECK_THROWS_AS(mirror_map_closed(builtin_geometry(n, "", 4), 4), NotImplementedForGeometry);
}

TEST_CASE("KP1xP1 j-consistency") {
    auto g = builtin_geometry("KP1xP1", "", 10);
    auto [js, jt] = kp1xp1_j_consistency(g);
    CHECK(g.tau_frame == "tau");
    CHECK(js.trunc() >= 8 * kDen);
    int t = std::min(js.trunc(), jt.trunc());
    CHECK((js.truncated(t) - jt.truncated(t)).is_zero());
    // and not the frame 2 tau
    QSeries j2 = j_invariant(10, 2).series;
    CHECK_FALSE((js.truncated(t) - j2.truncated(t)).is_zero());
}

TEST_CASE("precision soundness") {
    for (const auto& [name, sub] : kAll) {
        CAPTURE(name);
        auto lo = builtin_geometry(name, sub, 6), hi = builtin_geometry(name, sub, 10);
        for (int r : lo.ramification) {
            auto a = lo.local_xy(r, 6), b = hi.local_xy(r, 8);
            for (int j = 0; j < 6; ++j) {
                QSeries x = a.x.coeff(j), y = b.x.coeff(j);
                CHECK((x - y.truncated(x.trunc())).is_zero());
            }
        }
    }
}

TEST_CASE("config files") {
    std::istringstream ok("# comment\ngeometry = KP1xP1\nsubfamily = q1=q2\nq_order = 6\nt_order=4\n");
    Config c = parse_config(ok);
    CHECK(c.geometry == "KP1xP1");
    CHECK(c.subfamily == "q1=q2");
    CHECK(c.q_order == 6);
    CHECK(c.t_order == 4);
    std::istringstream bad("geometry = KP2\ncolour = blue\n");
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    std::istringstream badnum("q_order = six\n");
    CHECK_THROWS_AS(parse_config(badnum), ConfigError);
    std::istringstream om("mirror_open_c = -1/3\nmirror_open_c1 = 1/3\n");
    Config o = parse_config(om);
    REQUIRE(o.mirror_open.has_value());
    CHECK(o.mirror_open->c == make_rational(-1, 3));
    CHECK(o.mirror_open->c3 == Rational(-1));
    CHECK(o.canonical() != c.canonical());
}
