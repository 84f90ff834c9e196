#pragma once

#include <map>
#include <string>
#include <vector>

#include "series.hpp"

namespace toprec {

struct ModularElement {
    QSeries series;
    Rational weight{0};  // eta and theta constants have weight 1/2
    int quasi_depth = 0;
    std::string tag;
    // true when every coefficient carries pi^weight
    bool pi_graded = false;

    friend ModularElement operator*(const ModularElement& a, const ModularElement& b) {
        return {a.series * b.series, a.weight + b.weight, a.quasi_depth + b.quasi_depth, a.tag + "*" + b.tag,
                a.pi_graded && b.pi_graded};
    }
    friend ModularElement operator+(const ModularElement& a, const ModularElement& b) {
        if (a.weight != b.weight) throw InvariantViolation("sum of elements of different weight");
        return {a.series + b.series, a.weight, std::max(a.quasi_depth, b.quasi_depth), a.tag + "+" + b.tag,
                a.pi_graded && b.pi_graded};
    }
    friend ModularElement operator-(const ModularElement& a, const ModularElement& b) {
        if (a.weight != b.weight) throw InvariantViolation("difference of elements of different weight");
        return {a.series - b.series, a.weight, std::max(a.quasi_depth, b.quasi_depth), a.tag + "-" + b.tag,
                a.pi_graded && b.pi_graded};
    }
    ModularElement scaled(const Coeff& c, int pi_weight_shift, const std::string& t) const {
        ModularElement r = *this;
        r.series = series * c;
        r.tag = t;
        r.pi_graded = pi_graded && pi_weight_shift == 0;
        return r;
    }
    ModularElement pow(int n) const {
        ModularElement r{toprec::pow(series, n), weight * n, quasi_depth * n, tag + "^" + std::to_string(n),
                         pi_graded};
        return r;
    }
};

namespace detail {

inline Rational bernoulli(int n) {
    static std::vector<Rational> cache{Rational(1)};
    while (static_cast<int>(cache.size()) <= n) {
        const int m = static_cast<int>(cache.size());
        // sum_{k<m} C(m+1,k) B_k = -(m+1) B_m
        Rational s(0);
        mpz_class binom(1);
        for (int k = 0; k < m; ++k) {
            s += Rational(binom) * cache[k];
            binom = binom * (m + 1 - k) / (k + 1);
        }
        cache.push_back(-s / (m + 1));
    }
    return cache[n];
}

inline std::vector<mpz_class> divisor_sums(int k, int n_max) {
    std::vector<mpz_class> s(static_cast<std::size_t>(n_max + 1), mpz_class(0));
    for (int d = 1; d <= n_max; ++d) {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(k));
        for (int n = d; n <= n_max; n += d) s[n] += p;
    }
    return s;
}

inline int order_to_trunc(int order) { return order * kDen; }

}  // namespace detail

// E_k(m tau) = 1 - (2k/B_k) sum sigma_{k-1}(n) q^{mn}, truncated at q^order.
inline ModularElement eisenstein(int k, int order, int m = 1) {
    if (k < 2 || k % 2) throw ConfigError("Eisenstein weight must be even and >= 2");
    const int tr = detail::order_to_trunc(order);
    const Rational f = -Rational(2 * k) / detail::bernoulli(k);
    const int nmax = (order - 1) / m;
    auto sig = detail::divisor_sums(k - 1, std::max(nmax, 0));
    std::vector<QSeries::Term> t{{0, Coeff(1)}};
    for (int n = 1; n <= nmax; ++n) t.emplace_back(n * m * kDen, Coeff(f * Rational(sig[n])));
    std::string tag = "E" + std::to_string(k) + (m == 1 ? "" : "_" + std::to_string(m) + "tau");
    return {QSeries::from_terms(std::move(t), tr), Rational(k), k == 2 ? 1 : 0, tag, false};
}

// Theta constants (nome e^{2 pi i tau}): theta2 = sum q^{(n+1/2)^2/2}, theta3 =
// sum q^{n^2/2}, theta4 = sum (-1)^n q^{n^2/2}; eta; and the A2 lattice theta
// sum q^{a^2+ab+b^2}.  All at argument m tau.
inline ModularElement theta_eta_catalog(const std::string& name, int m, int order) {
    if (m < 1 || m > 4) throw ConfigError("argument multiplier must be in 1..4");
    const int tr = detail::order_to_trunc(order);
    std::vector<QSeries::Term> t;
    Rational w(1, 2);
    if (name == "theta2") {
        for (long n = 0;; ++n) {
            const long e = 3 * (2 * n + 1) * (2 * n + 1) * m;
            if (e >= tr) break;
            t.emplace_back(static_cast<int>(e), Coeff(2));
        }
    } else if (name == "theta3" || name == "theta4") {
        t.emplace_back(0, Coeff(1));
        for (long n = 1;; ++n) {
            const long e = 12 * n * n * m;
            if (e >= tr) break;
            long c = (name == "theta4" && n % 2) ? -2 : 2;
            t.emplace_back(static_cast<int>(e), Coeff(c));
        }
    } else if (name == "eta") {
        // Euler pentagonal theorem: eta = sum_k (-1)^k q^{(6k-1)^2/24}
        for (long k = -200; k <= 200; ++k) {
            const long e = (6 * k - 1) * (6 * k - 1) * m;
            if (e >= tr) continue;
            t.emplace_back(static_cast<int>(e), Coeff(k % 2 ? -1 : 1));
        }
    } else if (name == "thetaA2") {
        w = 1;
        const int nmax = (order - 1) / m;
        std::vector<long> cnt(static_cast<std::size_t>(nmax + 1), 0);
        const long bound = 2 * static_cast<long>(std::sqrt(double(nmax))) + 3;
        for (long a = -bound; a <= bound; ++a)
            for (long b = -bound; b <= bound; ++b) {
                long n = a * a + a * b + b * b;
                if (n <= nmax) ++cnt[n];
            }
        for (int n = 0; n <= nmax; ++n)
            if (cnt[n]) t.emplace_back(n * m * kDen, Coeff(cnt[n]));
    } else {
        throw ConfigError("unknown catalog entry " + name);
    }
    std::string tag = name + (m == 1 ? "" : "_" + std::to_string(m) + "tau");
    return {QSeries::from_terms(std::move(t), tr), w, 0, tag, false};
}

struct TorsionValues {
    ModularElement e1, e2, e3, eta1;
};

// Values of the Weierstrass function of the lattice (1, m tau) at the half
// periods 1/2, m tau/2, (1 + m tau)/2, and eta1 = (pi^2/3) E2(m tau).
inline TorsionValues torsion_values(int order, int m = 1) {
    auto t2 = theta_eta_catalog("theta2", m, order).pow(4);
    auto t3 = theta_eta_catalog("theta3", m, order).pow(4);
    auto t4 = theta_eta_catalog("theta4", m, order).pow(4);
    const Coeff c = Coeff::monomial(make_rational(1, 3), 2);  // 2 zeta(2)
    const std::string sfx = m == 1 ? "" : "_" + std::to_string(m) + "tau";
    TorsionValues tv;
    tv.e1 = {(t3.series + t4.series) * c, Rational(2), 0, "e1" + sfx, true};
    tv.e2 = {-(t2.series + t3.series) * c, Rational(2), 0, "e2" + sfx, true};
    tv.e3 = {(t2.series - t4.series) * c, Rational(2), 0, "e3" + sfx, true};
    auto e2 = eisenstein(2, order, m);
    tv.eta1 = {e2.series * c, Rational(2), 1, "eta1" + sfx, true};
    return tv;
}

inline ModularElement g2_form(int order, int m = 1) {
    auto e4 = eisenstein(4, order, m);
    return {e4.series * Coeff::monomial(make_rational(4, 3), 4), Rational(4), 0, "g2", true};
}
inline ModularElement g3_form(int order, int m = 1) {
    auto e6 = eisenstein(6, order, m);
    return {e6.series * Coeff::monomial(make_rational(8, 27), 6), Rational(6), 0, "g3", true};
}

// j = 1728 g2^3 / (g2^3 - 27 g3^2)
inline ModularElement j_invariant(int order, int m = 1) {
    auto g2 = g2_form(order + 2, m).series;
    auto g3 = g3_form(order + 2, m).series;
    QSeries c = pow(g2, 3);
    QSeries d = c - pow(g3, 2) * Rational(27);
    QSeries j = c * d.inverse() * Rational(1728);
    return {j.truncated(detail::order_to_trunc(order)), Rational(0), 0, "j", true};
}

// q d/dq.  Generators use the Ramanujan system; anything else is rejected so
// that callers explicitly opt in to the termwise fallback.
inline ModularElement ramanujan_derivative(const ModularElement& el) {
    if (el.series.exact() && el.series.terms().size() <= 1 &&
        (el.series.terms().empty() || el.series.terms()[0].first == 0))
        return {QSeries(), el.weight + 2, el.quasi_depth + 1, "D(" + el.tag + ")", el.pi_graded};
    const int order = el.series.trunc() / kDen;
    auto gen = [&](int k) { return eisenstein(k, order).series; };
    QSeries d;
    if (el.tag == "E2") {
        d = (gen(2) * gen(2) - gen(4)) * make_rational(1, 12);
    } else if (el.tag == "E4") {
        d = (gen(2) * gen(4) - gen(6)) * make_rational(1, 3);
    } else if (el.tag == "E6") {
        d = (gen(2) * gen(6) - gen(4) * gen(4)) * make_rational(1, 2);
    } else {
        throw UnknownGenerator("no derivative rule for " + el.tag);
    }
    return {d, el.weight + 2, el.quasi_depth + 1, "D(" + el.tag + ")", false};
}

inline ModularElement termwise_derivative(const ModularElement& el) {
    return {el.series.derivative(), el.weight + 2, el.quasi_depth + 1, "D(" + el.tag + ")", el.pi_graded};
}

// Every generator of the catalog, in a fixed order, for regression dumps.
inline std::vector<ModularElement> catalog_dump(int order) {
    std::vector<ModularElement> out;
    for (int k : {2, 4, 6})
        for (int m : {1, 2, 3, 4}) out.push_back(eisenstein(k, order, m));
    for (const char* n : {"theta2", "theta3", "theta4", "eta", "thetaA2"})
        for (int m : {1, 2, 3, 4}) out.push_back(theta_eta_catalog(n, m, order));
    for (int m : {1, 3}) {
        auto tv = torsion_values(order, m);
        out.push_back(tv.e1);
        out.push_back(tv.e2);
        out.push_back(tv.e3);
        out.push_back(tv.eta1);
    }
    out.push_back(g2_form(order));
    out.push_back(g3_form(order));
    out.push_back(j_invariant(order));
    return out;
}

}  // namespace toprec
