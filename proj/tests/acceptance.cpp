// One line per acceptance criterion.  Exits nonzero if any line fails.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "toprec/gwextract.hpp"
#include "toprec/hae.hpp"

using namespace toprec;

namespace {

using Clock = std::chrono::steady_clock;

struct Line {
    bool pass = true;
    std::string notes;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes += (notes.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) { notes += (notes.empty() ? "" : "; ") + what; }
};

int g_failures = 0;

template <class F>
void criterion(int id, const std::string& title, double limit_s, F&& body) {
    Line line;
    auto t0 = Clock::now();
    try {
        body(line);
    } catch (const std::exception& e) {
        line.require(false, std::string("exception ") + e.what());
    }
    double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    if (limit_s > 0) {
        std::ostringstream o;
        o << "runtime " << dt << " s exceeds " << limit_s << " s";
        line.require(dt < limit_s, o.str());
    }
    if (!line.pass) ++g_failures;
    std::printf("criterion %d: %s  %s  [%.2f s]%s%s\n", id, line.pass ? "PASS" : "FAIL", title.c_str(), dt,
                line.notes.empty() ? "" : "  -- ", line.notes.c_str());
    std::fflush(stdout);
}

bool zero_to(const QSeries& s, int order) { return s.truncated(order * kDen).is_zero() && s.trunc() >= order * kDen; }

int min_qtrunc(const TSeries& s) {
    int t = kExact;
    for (const auto& c : s.coeffs()) t = std::min(t, c.trunc());
    return t;
}

bool same_to(const JacobiPoly& a, const JacobiPoly& b, int order) {
    return a.horizon() >= order * kDen && b.horizon() >= order * kDen &&
           (a.truncated(order * kDen) - b.truncated(order * kDen)).is_zero();
}

const std::vector<std::pair<std::string, std::string>> kAll{
    {"KP2", "lr"}, {"KP2", "appendix"}, {"KP1xP1", "q1=q2"}, {"KWP112", "b4=0"}, {"KF1", "q1=1"}};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

int main() {
    criterion(1, "modular catalog identities to q-order 20", 5, [](Line& l) {
        const int N = 20;
        auto th = [&](const char* n) { return theta_eta_catalog(n, 1, N).series; };
        l.require(zero_to(pow(th("theta3"), 4) - pow(th("theta2"), 4) - pow(th("theta4"), 4), N), "Jacobi quartic");
        auto tv = torsion_values(N);
        const QSeries &e1 = tv.e1.series, &e2 = tv.e2.series, &e3 = tv.e3.series;
        l.require(zero_to(e1 + e2 + e3, N), "e1+e2+e3");
        QSeries E4 = eisenstein(4, N).series, E6 = eisenstein(6, N).series;
        l.require(zero_to((e1 * e1 + e2 * e2 + e3 * e3) * Rational(2) - E4 * Coeff::monomial(make_rational(4, 3), 4), N),
                  "2 sum e^2");
        l.require(zero_to(e1 * e2 * e3 * Rational(4) - E6 * Coeff::monomial(make_rational(8, 27), 6), N), "4 e1e2e3");
    });

    criterion(2, "second derivative of P at half periods and their product, q-order 12", 0, [](Line& l) {
        const int N = 12;
        EllipticData ell(1, N);
        QSeries E4 = eisenstein(4, N).series, prod(1);
        for (int r = 1; r <= 3; ++r) {
            QSeries v = wp_value_at_2torsion(r, 2, ell).series;
            const QSeries& e = ell.e(r);
            l.require(zero_to(v - (e * e * Rational(6) - E4 * Coeff::monomial(make_rational(2, 3), 4)), N),
                      "P'' at u_" + std::to_string(r));
            prod = prod * v;
        }
        QSeries eta24 = pow(theta_eta_catalog("eta", 1, N).series, 24);
        l.require(zero_to(prod + eta24 * Coeff::monomial(make_rational(4096, 2), 12), N), "product");
    });

    criterion(3, "uniformization H = 0 at (T, q) = (8, 8); KP1xP1 j-consistency to q-order 8", 0, [](Line& l) {
        const int T = 8, Q = 8;
        for (const auto& [name, sub] : kAll) {
            auto g = builtin_geometry(name, sub, Q + 4);
            for (int r : g.ramification) {
                LocalXY p = g.local_xy(r, T);
                bool ok = min_qtrunc(p.x) >= Q * kDen && min_qtrunc(p.y) >= Q * kDen &&
                          g.curve.evaluate(p.x, p.y).is_zero() && g.curve.evaluate(p.x, g.involution(p)).is_zero();
                l.require(ok, name + "/" + sub + " at r=" + std::to_string(r));
            }
        }
        auto g = builtin_geometry("KP1xP1", "", Q + 2);
        auto [js, jt] = kp1xp1_j_consistency(g);
        l.require(js.trunc() >= Q * kDen && jt.trunc() >= Q * kDen &&
                      (js.truncated(Q * kDen) - jt.truncated(Q * kDen)).is_zero(),
                  "j-consistency");
    });

    criterion(4, "omega_{0,3} and omega_{1,1} equal the closed forms to q-order 10", 60, [](Line& l) {
        const int Q = 10;
        bool w03 = true, w11 = true, gap_only = true;
        for (const char* name : {"KP2", "KP1xP1", "KWP112", "KF1"}) {
            auto g = builtin_geometry(name, "", Q + 4);
            Recursion rec(g);
            bool a = same_to(rec.omega(0, 3), closed_form_omega03(g), Q);
            bool b = same_to(rec.omega(1, 1), closed_form_omega11(g), Q);
            bool c = same_to(rec.omega(1, 1), closed_form_omega11(g) + omega11_constant_gap(g), Q);
            l.require(a, std::string("omega_{0,3} on ") + name);
            w03 = w03 && a;
            w11 = w11 && b;
            gap_only = gap_only && c;
            // a0 and [1/Lambda]_0 from the closed forms
            for (int r : g.ramification) {
                auto d = closed_form_lambda_data(g, r);
                const auto& e = rec.local(r, 6);
                l.require((e.Lambda.coeff(2) - d.a0).truncated(Q * kDen).is_zero() &&
                              (e.inv_Lambda.coeff(0) - d.L0).truncated(Q * kDen).is_zero(),
                          std::string("a0/L0 on ") + name);
            }
        }
        l.require(w11, "omega_{1,1} differs from the printed closed form");
        if (!w11 && gap_only)
            l.note("on every geometry the difference is exactly sum_r (eta1^2 [1/L]_-2 + eta1 [1/L]_0/4): a "
                   "holomorphic differential with nonzero A-period, so the printed form breaks the normalization");
    });

    criterion(5, "structure for 2g-2+n <= 4 on KP2 (geometry q-order 6)", 0, [](Line& l) {
        auto g = builtin_geometry("KP2", "", 6);
        Recursion rec(g);
        std::ostringstream depth;
        int horizon = kExact;
        const std::vector<std::pair<int, int>> cases{{0, 3}, {1, 1}, {0, 4}, {1, 2}, {2, 1},
                                                     {0, 5}, {1, 3}, {2, 2}, {1, 4}, {0, 6}};
        for (auto [gg, n] : cases) {
            const JacobiPoly& w = rec.omega(gg, n);
            std::string tag = "(" + std::to_string(gg) + "," + std::to_string(n) + ")";
            l.require(w.horizon() >= 2 * kDen, tag + " q-horizon");
            horizon = std::min(horizon, w.horizon());
            l.require(is_symmetric(w, n), tag + " symmetry");
            auto ps = pole_stats(w, n);
            l.require(ps.max_slot <= 6 * gg + 2 * n - 4, tag + " per-slot pole");
            l.require(ps.max_sum <= 6 * gg + 4 * n - 6, tag + " summed pole");
            int wt = -1;
            l.require(uniform_weight(w, n, &wt) && wt == n, tag + " weight");
            depth << tag << ":" << quasi_depth(w) << " ";
        }
        for (int gg : {2}) {
            JacobiPoly f = rec.free_energy(gg);
            int wt = -1;
            l.require(uniform_weight(f, 0, &wt) && wt == 0, "F_" + std::to_string(gg) + " weight");
            depth << "F" << gg << ":" << quasi_depth(f);
        }
        l.note("eta1 depth " + depth.str());
        l.note("smallest q-horizon " + rational_to_string(make_rational(horizon, kDen)));
    });

    criterion(6, "genus one: dF1 = d(-1/2 log(eta(tau) eta(3 tau))) to q-order 12", 0, [](Line& l) {
        const int Q = 12;
        auto g = builtin_geometry("KP2", "", Q + 5);
        GenusOne r = genus_one_free_energy(g, Q);
        l.require(zero_to(r.dF1 - r.target, Q), "dF1 - target");
    });

    criterion(7, "holomorphic anomaly at genus two, q-order 10, ratio 3/(2 pi^2)", 120, [](Line& l) {
        const int Q = 10;
        auto g = builtin_geometry("KP2", "", Q + 4);
        HaeReport st = yy_check(g, 2, Q, kp2_propagator_ratio());
        l.require(st.residual.is_zero(), "residual nonzero with the stated ratio");
        HaeReport ctl = yy_check(g, 2, Q, Coeff(1));
        l.require(!ctl.residual.is_zero(), "negative control vanished");
        HaeReport alt = yy_check(g, 2, Q, Coeff::monomial(make_rational(1, 4), -2));
        if (alt.residual.is_zero()) l.note("residual is exactly zero to q-order 10 with ratio 1/(4 pi^2)");
        if ((st.rhs - st.lhs * Rational(6)).truncated(Q * kDen).is_zero()) l.note("the stated ratio gives rhs = 6 lhs");
    });

    criterion(8, "closed mirror map; disk and annulus two-route agreement at (5,5); rationality", 0, [](Line& l) {
        auto g = builtin_geometry("KP2", "", 10);
        auto c = mirror_map_closed_in_q1(g, 3);
        l.require(c[1] == make_rational(-2, 9), "k=1 coefficient");
        l.require(c[2] == make_rational(5, 81), "k=2 coefficient");
        auto da = disk_table_algebraic(g, 5, 5), dm = disk_table_modular(g, 5, 5);
        l.require(da.entries == dm.entries && da.entries.size() == 30, "disk routes");
        auto aa = annulus_table(g, true, 5, 5), am = annulus_table(g, false, 5, 5);
        l.require(aa.entries == am.entries && aa.entries.size() == 150, "annulus routes");
        // every table entry went through the rational projection; count them
        std::size_t emitted = da.entries.size() + dm.entries.size() + aa.entries.size() + am.entries.size();
        Recursion rec(g);
        for (auto [gg, n] : std::vector<std::pair<int, int>>{{0, 3}, {1, 1}, {1, 2}})
            emitted += extract_invariants(rec, gg, n, 3, 3).entries.size();
        l.note(std::to_string(emitted) + " rational entries");
    });

    criterion(9, "precision soundness and byte-identical CLI output", 0, [](Line& l) {
        auto lo = builtin_geometry("KP2", "", 6), hi = builtin_geometry("KP2", "", 9);
        Recursion a(lo, false, 2), b(hi, false, 5);
        for (auto [gg, n] : std::vector<std::pair<int, int>>{{0, 3}, {1, 1}, {0, 4}, {1, 2}, {2, 1}}) {
            const JacobiPoly &x = a.omega(gg, n), &y = b.omega(gg, n);
            l.require((x - y.truncated(x.horizon())).is_zero() && y.horizon() > x.horizon(),
                      "omega_" + std::to_string(gg) + std::to_string(n) + " at higher order");
        }
        l.require((a.free_energy(2) - b.free_energy(2).truncated(a.free_energy(2).horizon())).is_zero(), "F_2");
        for (const auto& [name, sub] : kAll) {
            auto p = builtin_geometry(name, sub, 6), q = builtin_geometry(name, sub, 10);
            for (int r : p.ramification) {
                auto u = p.local_xy(r, 6), v = q.local_xy(r, 8);
                for (int j = 0; j < 6; ++j)
                    l.require((u.x.coeff(j) - v.x.coeff(j).truncated(u.x.coeff(j).trunc())).is_zero(), name + " x(T)");
            }
        }
#ifdef TOPREC_CLI
        const std::string cli = TOPREC_CLI;
        const std::string base = "acceptance_cli";
        for (const char* args : {"omega --geometry kp2 --g 1 --n 2 --q-order 5",
                                 "invariants --geometry kp2 --g 0 --n 2 --max-winding 3 --max-degree 3 --format csv"}) {
            std::string c1 = cli + " " + args + " --out " + base + ".1 2>/dev/null";
            std::string c2 = cli + " " + args + " --out " + base + ".2 2>/dev/null";
            int r1 = std::system(c1.c_str()), r2 = std::system(c2.c_str());
            std::string s1 = slurp(base + ".1"), s2 = slurp(base + ".2");
            l.require(r1 == 0 && r2 == 0 && !s1.empty() && s1 == s2, std::string("CLI run: ") + args);
        }
        std::remove((base + ".1").c_str());
        std::remove((base + ".2").c_str());
#else
        l.require(false, "CLI path not configured");
#endif
    });

    return g_failures == 0 ? 0 : 1;
}
