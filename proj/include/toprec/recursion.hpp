#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <tuple>
#include <vector>

#include "geometry.hpp"

namespace toprec {

// Renames slots of every monomial: slot k -> target[k].
inline JacobiPoly remap_slots(const JacobiPoly& p, const std::array<int, kMaxSlots>& target) {
    JacobiPoly r;
    r.set_elliptic(p.elliptic());
    r.set_horizon(p.horizon());
    for (const auto& [k, c] : p.terms()) {
        MonoKey n = k;
        n.slots = 0;
        for (int s = 0; s < kMaxSlots; ++s) {
            if (!k.byte(s)) continue;
            if (target[s] < 0 || target[s] >= kMaxSlots) throw InvariantViolation("slot remap out of range");
            n.slots |= std::uint64_t(k.byte(s)) << (8 * target[s]);
        }
        r.add(n, c);
    }
    return r;
}

inline JSeries remap_slots(const JSeries& s, const std::array<int, kMaxSlots>& target) {
    return s.map([&](const JacobiPoly& p) { return remap_slots(p, target); });
}

// Largest pole order at u_r produced by localizing the listed slots at r.
inline int localized_pole(const JacobiPoly& p, const std::vector<int>& slots, int r) {
    int worst = 0;
    for (const auto& [k, c] : p.terms()) {
        int s = 0;
        for (int slot : slots)
            if (k.byte(slot) && k.label(slot) == r) s += k.pole(slot);
        worst = std::max(worst, s);
    }
    return worst;
}

struct LocalExpansion {
    int label = 0;
    TSeries x, y, ystar, dx;        // at u_r + T
    TSeries Lambda, inv_Lambda;     // lambda - lambda*, and its inverse
    TSeries dinv_lambda;            // primitive of Lambda/2, zero constant
};

// Expansion of lambda - lambda* = log(y/y*) dx/x at a ramification point.
inline TSeries lambda_from_local(const TSeries& x, const TSeries& y, const TSeries& ystar, int t_trunc) {
    TSeries p = y - ystar, s = y + ystar;
    if (p.lowest_exponent() != 1) throw DegenerateRamification("y - y* must vanish to order one");
    if (s.lowest_exponent() != 0) throw DegenerateRamification("y + y* vanishes at the ramification point");
    TSeries w = (p * s.inverse()).truncated(t_trunc);
    TSeries w2 = w * w;
    TSeries sum = TSeries::zero(t_trunc), pw = w;
    for (int k = 0; 2 * k + 1 < t_trunc; ++k) {
        sum = sum + pw.scaled(QSeries(Coeff(make_rational(2, 2 * k + 1))));
        pw = (pw * w2).truncated(t_trunc);
    }
    TSeries dlogx = x.derivative() * x.inverse();
    return (sum * dlogx).truncated(t_trunc);
}

class Recursion {
public:
    Recursion(const GeometryData& g, bool schiffer = false, int t_margin = 2)
        : geo_(g), ell_(*g.ell), loc_(*g.ell), schiffer_(schiffer), margin_(t_margin) {}

    const GeometryData& geometry() const { return geo_; }
    bool schiffer() const { return schiffer_; }

    // Local data at r with Lambda known to T^{t_trunc - 1}.
    const LocalExpansion& local(int r, int t_trunc) {
        auto it = local_.find(r);
        if (it != local_.end() && it->second.first >= t_trunc) return it->second.second;
        const int work = t_trunc + 4 + margin_;
        LocalXY l = geo_.local_xy(r, work);
        LocalExpansion e;
        e.label = r;
        e.x = l.x;
        e.y = l.y;
        e.ystar = geo_.involution(l);
        e.dx = l.x.derivative();
        e.Lambda = lambda_from_local(e.x, e.y, e.ystar, work - 1);
        if (e.Lambda.lowest_exponent() != 2) throw DegenerateRamification("Lambda must start at T^2");
        e.inv_Lambda = e.Lambda.inverse();
        e.dinv_lambda = e.Lambda.primitive().scaled(QSeries(Coeff(make_rational(1, 2))));
        local_[r] = {work - 5, e};
        return local_[r].second;
    }

    // d^{-1}S numerator: eta-hat T + sum_j P(0,r,2j) T^{2j+1}/(2j+1)!
    JSeries kernel_numerator(int r, int t_trunc) {
        std::vector<JacobiPoly> c;
        mpz_class fact(1);
        for (int e = 1; e < t_trunc; ++e) {
            fact *= e;
            if (e % 2 == 0) {
                c.emplace_back();
                continue;
            }
            JacobiPoly term = wp_symbol(0, r, e - 1, ell_);
            term = term * Rational(mpz_class(1), fact);
            if (e == 1) term += eta_hat_power(1, schiffer_);
            term.set_elliptic(&ell_);
            c.push_back(term);
        }
        return JSeries::from_coeffs(1, c, t_trunc);
    }

    // K(u0, u_r + T) to T^{t_trunc - 1}; starts at T^{-1}.
    JSeries kernel(int r, int t_trunc) {
        const auto& e = local(r, t_trunc + 1);
        JSeries num = kernel_numerator(r, t_trunc + 2);
        JSeries inv = e.inv_Lambda.truncated(t_trunc - 1).map([](const QSeries& q) { return JacobiPoly(q); });
        return (num * inv).truncated(t_trunc);
    }

    // omega_{g,n} as a polynomial in P^{(m)}(u_k - u_r), eta1 (and Y).
    const JacobiPoly& omega(int g, int n) {
        if (g < 0 || n < 1 || (g == 0 && n == 1)) throw ConfigError("omega needs 2g-2+n > 0 or (g,n) = (0,2)");
        if (n > kMaxSlots) throw ConfigError("too many arguments for the packed representation");
        auto key = std::make_pair(g, n);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        JacobiPoly res;
        if (g == 0 && n == 2) {
            MonoKey d;
            d.diag = 1;
            res = JacobiPoly::term(d, QSeries(1)) + eta_hat_power(1, schiffer_);
        } else {
            res = compute(g, n);
        }
        res.set_elliptic(&ell_);
        return memo_.emplace(key, res).first->second;
    }

    // F_g = 1/(2-2g) sum_r Res (d^{-1} lambda) omega_{g,1}, g >= 2
    JacobiPoly free_energy(int g, Rational constant = 0) {
        if (g < 2) throw ConfigError("free_energy needs g >= 2");
        const JacobiPoly& w = omega(g, 1);
        JacobiPoly total;
        total.set_elliptic(&ell_);
        for (int r : geo_.ramification) {
            const int pole = localized_pole(w, {0}, r);
            JSeries lw = loc_.localize(w, {{0, r, 1}}, identity_remap(), 1);
            const auto& e = local(r, pole + 1);
            TSeries phi = e.dinv_lambda.truncated(pole + 1);
            if (constant != 0) phi = phi + TSeries::monomial(QSeries(Coeff(constant)), 0, phi.trunc());
            for (int i = phi.lowest_exponent(); i < phi.trunc(); ++i) {
                const int j = -1 - i;
                if (j < lw.lowest_exponent()) break;
                total += lw.coeff(j) * phi.coeff(i);
            }
        }
        return total * make_rational(1, 2 - 2 * g);
    }

    // Localized omega with the listed slots at r; other slots keep their indices.
    JSeries localized(int g, int n, const std::vector<Localizer::Site>& sites, int t_trunc) {
        std::vector<int> sig;
        for (const auto& s : sites) sig.push_back(s.slot * 8 + s.label * 2 + (s.sign > 0));
        auto key = std::make_tuple(g, n, sig, t_trunc);
        auto it = lcache_.find(key);
        if (it != lcache_.end()) return it->second;
        JSeries r = loc_.localize(omega(g, n), sites, identity_remap(), t_trunc);
        lcache_.emplace(key, r);
        return r;
    }

    Localizer& localizer() { return loc_; }

private:
    // omega_{0,2}(v, u_k) with v = u_r + sign T, slot k holding u_k.
    JSeries bergman_local(int k, int r, int sign, int t_trunc) {
        std::vector<JacobiPoly> c;
        mpz_class fact(1);
        for (int m = 0; m < t_trunc; ++m) {
            if (m > 0) fact *= m;
            JacobiPoly t = wp_symbol(k, r, m, ell_) * Rational(mpz_class(1), fact);
            // P(u_k - v) = sum P^{(m)}(u_k - u_r) (-sign T)^m / m!
            if (sign > 0 && m % 2) t = -t;
            if (m == 0) t += eta_hat_power(1, schiffer_);
            t.set_elliptic(&ell_);
            c.push_back(t);
        }
        return JSeries::from_coeffs(0, c, t_trunc);
    }

    // Local factor omega_{g',|J|+1}(v or v*, u_J) in output slots J.
    struct Factor {
        JSeries s;
        int pole;
    };

    int factor_pole(int g, int n, int r) {
        if (g == 0 && n == 2) return 0;
        return localized_pole(omega(g, n), {0}, r);
    }

    JSeries factor(int g, const std::vector<int>& J, int r, int sign, int t_trunc) {
        const int n = static_cast<int>(J.size()) + 1;
        if (g == 0 && n == 2) return bergman_local(J[0], r, sign, t_trunc);
        JSeries s = localized(g, n, {{0, r, sign}}, t_trunc);
        std::array<int, kMaxSlots> target;
        target.fill(-1);
        for (std::size_t k = 0; k < J.size(); ++k) target[k + 1] = J[k];
        return remap_slots(s, target);
    }

    JacobiPoly compute(int g, int n) {
        // output slot 0 is u_0, slots 1..n-1 the remaining arguments
        std::vector<int> I;
        for (int k = 1; k < n; ++k) I.push_back(k);
        JacobiPoly total;
        total.set_elliptic(&ell_);
        for (int r : geo_.ramification) {
            // collect the bracket G(v) as a list of products, then sum to T^0
            std::vector<std::pair<JSeries, JSeries>> prods;
            std::vector<JSeries> singles;
            int gpole = 0;
            if (g >= 1) {
                if (g == 1 && n == 1) {
                    // omega_{0,2}(v, v*) = P(2T) + eta-hat
                    TSeries p2 = wp_laurent_at_origin(0, 2, 1, ell_);
                    JSeries d = p2.map([](const QSeries& q) { return JacobiPoly(q); });
                    d = d + JSeries::monomial(eta_hat_power(1, schiffer_), 0, 1);
                    singles.push_back(d);
                    gpole = std::max(gpole, 2);
                } else {
                    const JacobiPoly& w = omega(g - 1, n + 1);
                    const int pole = localized_pole(w, {0, 1}, r);
                    JSeries s = localized(g - 1, n + 1, {{0, r, 1}, {1, r, -1}}, 1);
                    std::array<int, kMaxSlots> target;
                    target.fill(-1);
                    for (int k = 2; k < n + 1; ++k) target[k] = k - 1;
                    singles.push_back(remap_slots(s, target));
                    gpole = std::max(gpole, pole);
                }
            }
            const int nsub = static_cast<int>(I.size());
            for (int g1 = 0; g1 <= g; ++g1)
                for (int mask = 0; mask < (1 << nsub); ++mask) {
                    std::vector<int> J, Jc;
                    for (int k = 0; k < nsub; ++k) (mask >> k & 1 ? J : Jc).push_back(I[k]);
                    const int g2 = g - g1;
                    if (g1 == 0 && J.empty()) continue;
                    if (g2 == 0 && Jc.empty()) continue;
                    const int p1 = factor_pole(g1, static_cast<int>(J.size()) + 1, r);
                    const int p2 = factor_pole(g2, static_cast<int>(Jc.size()) + 1, r);
                    JSeries a = factor(g1, J, r, 1, 1 + p2);
                    JSeries b = factor(g2, Jc, r, -1, 1 + p1);
                    prods.emplace_back(a, b);
                    gpole = std::max(gpole, p1 + p2);
                }
            JSeries G = JSeries::zero(1);
            for (const auto& s : singles) G = G + s.truncated(1);
            for (const auto& [a, b] : prods) G = G + (a * b).truncated(1);
            if (G.is_zero()) continue;
            JSeries K = kernel(r, std::max(0, -G.lowest_exponent()));
            for (int i = K.lowest_exponent(); i < K.trunc(); ++i) {
                const int j = -1 - i;
                if (j < G.lowest_exponent()) break;
                total += K.coeff(i) * G.coeff(j);
            }
            (void)gpole;
        }
        return total;
    }

    const GeometryData& geo_;
    const EllipticData& ell_;
    Localizer loc_;
    bool schiffer_;
    int margin_;
    std::map<int, std::pair<int, LocalExpansion>> local_;
    std::map<std::pair<int, int>, JacobiPoly> memo_;
    std::map<std::tuple<int, int, std::vector<int>, int>, JSeries> lcache_;
};

// ---------------------------------------------------------------------------
// Structural checks.
// ---------------------------------------------------------------------------

// Applies a permutation of slots; perm[k] is the new index of slot k.
inline JacobiPoly permute(const JacobiPoly& p, const std::vector<int>& perm) {
    std::array<int, kMaxSlots> t;
    t.fill(-1);
    for (std::size_t k = 0; k < perm.size(); ++k) t[k] = perm[k];
    return remap_slots(p, t);
}

// Invariance under the transposition (0 1) and the cycle (0 1 ... n-1),
// which generate the symmetric group.
inline bool is_symmetric(const JacobiPoly& p, int n) {
    if (n < 2) return true;
    std::vector<int> swap01(n), cycle(n);
    for (int k = 0; k < n; ++k) {
        swap01[k] = k;
        cycle[k] = (k + 1) % n;
    }
    std::swap(swap01[0], swap01[1]);
    return (permute(p, swap01) - p).is_zero() && (permute(p, cycle) - p).is_zero();
}

struct PoleStats {
    int max_slot = 0, max_sum = 0;
};

inline PoleStats pole_stats(const JacobiPoly& p, int n) {
    PoleStats s;
    for (const auto& [k, c] : p.terms()) {
        int sum = 0;
        for (int j = 0; j < n; ++j) {
            s.max_slot = std::max(s.max_slot, k.pole(j));
            sum += k.pole(j);
        }
        s.max_sum = std::max(s.max_sum, sum);
    }
    return s;
}

// Weight of each monomial: pi-degree of the coefficient plus 2 per P, 3 per
// P', 2 per eta1 or Y.  Returns false when some coefficient is not
// pi-homogeneous or two monomials disagree.
inline bool uniform_weight(const JacobiPoly& p, int n, int* weight) {
    bool set = false;
    int w0 = 0;
    for (const auto& [k, c] : p.terms()) {
        int w = 0;
        if (!c.weight_homogeneous(&w)) return false;
        for (int j = 0; j < n; ++j) w += 2 * k.a(j) + 3 * k.b(j);
        w += 2 * (k.eta + k.y + k.diag);
        if (!set) {
            w0 = w;
            set = true;
        } else if (w != w0) {
            return false;
        }
    }
    if (weight) *weight = set ? w0 : 0;
    return true;
}

// Highest combined power of eta1 and Y.
inline int quasi_depth(const JacobiPoly& p) {
    int d = 0;
    for (const auto& [k, c] : p.terms()) d = std::max(d, k.eta + k.y);
    return d;
}

// ---------------------------------------------------------------------------
// Closed forms coded from the coefficient formulas, independent of the
// series inversion used by the recursion.
// ---------------------------------------------------------------------------

struct LaurentInverseData {
    QSeries a0, a1, a2, Lm2, L0;
};

inline LaurentInverseData closed_form_lambda_data(const GeometryData& g, int r) {
    LocalXY l = g.local_xy(r, 7);
    TSeries ys = g.involution(l);
    auto X = [&](int j) { return l.x.coeff(j); };
    auto dX = [&](int j) { return l.x.coeff(j + 1) * Rational(j + 1); };
    auto P = [&](int j) { return l.y.coeff(j) - ys.coeff(j); };
    auto S = [&](int j) { return l.y.coeff(j) + ys.coeff(j); };
    QSeries xs0 = X(0) * S(0);
    QSeries inv0 = xs0.inverse();
    QSeries m1 = X(1) * S(0) + X(0) * S(1);
    QSeries m2 = X(2) * S(0) + X(1) * S(1) + X(0) * S(2);
    // coefficients of 1/(x (y+y*))
    QSeries F0 = inv0, F1 = -(m1 * inv0 * inv0), F2 = (m1 * m1 - xs0 * m2) * pow(inv0, 3);
    LaurentInverseData d;
    d.a0 = P(1) * dX(1) * F0 * Rational(2);
    d.a1 = (P(1) * dX(1) * F1 + (P(1) * dX(2) + P(2) * dX(1)) * F0) * Rational(2);
    d.a2 = (P(1) * dX(1) * F2 + (P(1) * dX(2) + P(2) * dX(1)) * F1 +
            (P(1) * dX(3) + P(2) * dX(2) + P(3) * dX(1)) * F0) *
               Rational(2) +
           pow(P(1), 3) * dX(1) * (pow(S(0), 3) * X(0)).inverse() * make_rational(2, 3);
    QSeries ia0 = d.a0.inverse();
    d.Lm2 = ia0;
    d.L0 = -(d.a2 * ia0 * ia0) + d.a1 * d.a1 * pow(ia0, 3);
    return d;
}

inline JacobiPoly closed_form_omega03(const GeometryData& g) {
    const EllipticData& ell = *g.ell;
    JacobiPoly total;
    total.set_elliptic(&ell);
    for (int r : g.ramification) {
        auto d = closed_form_lambda_data(g, r);
        JacobiPoly prod = JacobiPoly(d.Lm2 * Rational(2));
        for (int k = 0; k < 3; ++k) prod = prod * (wp_symbol(k, r, 0, ell) + eta_power(1));
        total += prod;
    }
    return total;
}

inline JacobiPoly closed_form_omega11(const GeometryData& g) {
    const EllipticData& ell = *g.ell;
    JacobiPoly total;
    total.set_elliptic(&ell);
    for (int r : g.ramification) {
        auto d = closed_form_lambda_data(g, r);
        total += wp_symbol(0, r, 2, ell) * (d.Lm2 * make_rational(1, 24));
        total += (wp_symbol(0, r, 0, ell) * eta_power(1)) * d.Lm2;
        total += wp_symbol(0, r, 0, ell) * (d.L0 * make_rational(1, 4));
    }
    return total;
}

// sum_r (eta1^2 [1/Lambda]_{-2} + eta1 [1/Lambda]_0 / 4): the constant by
// which the recursion output for omega_{1,1} and the closed form can differ.
inline JacobiPoly omega11_constant_gap(const GeometryData& g) {
    JacobiPoly total;
    total.set_elliptic(g.ell.get());
    for (int r : g.ramification) {
        auto d = closed_form_lambda_data(g, r);
        total += eta_power(2) * d.Lm2;
        total += eta_power(1) * (d.L0 * make_rational(1, 4));
    }
    return total;
}

// ---------------------------------------------------------------------------
// Genus one.
// ---------------------------------------------------------------------------

struct GenusOne {
    QSeries dF1;        // q d/dq of the holomorphic limit of F1
    QSeries target;     // q d/dq of -(1/2) log(eta(tau) eta(3 tau))
    QSeries wp2_prod;   // prod_r P''(u_r)
    QSeries disc_check; // prod_r P''(u_r) + (1/2)(2 pi)^12 eta(tau_ell)^24
};

inline QSeries dlog(const QSeries& f) { return f.derivative() * f.inverse(); }

inline GenusOne genus_one_free_energy(const GeometryData& g, int order) {
    if (g.name != "KP2" || g.frame != "lr") throw NotImplementedForGeometry("genus one free energy is KP2 (lr) only");
    const EllipticData& ell = *g.ell;
    const QSeries& phi = g.param("phi").series;
    GenusOne r;
    r.wp2_prod = QSeries(1);
    QSeries sum = QSeries::zero(kExact);
    QSeries scale = phi.inverse() * make_rational(-1, 3);  // x of the phi-scaled normalization
    for (int lab : g.ramification) {
        LocalXY l = g.local_xy(lab, 4);
        QSeries y1 = l.y.coeff(1), x2 = l.x.coeff(2) * scale;
        sum += dlog(y1 * y1 * x2.inverse());
        r.wp2_prod = r.wp2_prod * wp_value_at_2torsion(lab, 2, ell).series;
    }
    QSeries eta_ell = theta_eta_catalog("eta", ell.modulus(), order + 1).series;
    r.dF1 = -dlog(eta_ell) - sum * make_rational(1, 24);
    QSeries e2 = eisenstein(2, order).series, e2_3 = eisenstein(2, order, 3).series;
    r.target = (e2 + e2_3 * Rational(3)) * make_rational(-1, 48);
    QSeries disc = pow(theta_eta_catalog("eta", ell.modulus(), order).series, 24);
    r.disc_check = r.wp2_prod + disc * Coeff::monomial(Rational(2048), 12);
    return r;
}

}  // namespace toprec
