#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "modforms.hpp"

namespace toprec {

using TSeries = TLaurent<QSeries>;

// Torsion labels of the 2-torsion group, in canonical order.
enum Label : int { kOrigin = 0, kHalf = 1, kTauHalf = 2, kOnePlusTauHalf = 3 };
inline constexpr std::array<const char*, 4> kLabelNames{"origin", "1/2", "tau/2", "(1+tau)/2"};

// u_r - u_r' in the group of half periods (Klein four group)
inline int torsion_difference(int r, int rp) {
    if (r < 0 || r > 3 || rp < 0 || rp > 3) throw UnknownTorsionDifference("labels outside the 2-torsion group");
    return r ^ rp;
}

// ---------------------------------------------------------------------------
// Weierstrass data of the lattice (1, m tau).
// ---------------------------------------------------------------------------

class EllipticData {
public:
    EllipticData(int modulus, int order) : modulus_(modulus), order_(order) {
        auto tv = torsion_values(order, modulus);
        e_[0] = QSeries();
        e_[1] = tv.e1.series;
        e_[2] = tv.e2.series;
        e_[3] = tv.e3.series;
        eta1_ = tv.eta1.series;
        g2_ = g2_form(order, modulus).series;
        g3_ = g3_form(order, modulus).series;
    }

    int modulus() const { return modulus_; }
    int order() const { return order_; }
    int qtrunc() const { return order_ * kDen; }
    const QSeries& g2() const { return g2_; }
    const QSeries& g3() const { return g3_; }
    const QSeries& eta1() const { return eta1_; }
    const QSeries& e(int r) const {
        if (r < 1 || r > 3) throw UnknownTorsionDifference("no finite value at the origin");
        return e_[r];
    }

    // P'^2 = 4 P^3 - g2 P - g3 reduction and the polynomial form of d^m/du^m P
    // as a map (a, b) -> coefficient of P^a P'^b, b in {0, 1}.
    using Poly2 = std::map<std::pair<int, int>, QSeries>;

    static void poly_add(Poly2& p, int a, int b, const QSeries& c) {
        if (c.is_zero() && c.exact()) return;
        auto it = p.find({a, b});
        if (it == p.end())
            p.emplace(std::make_pair(a, b), c);
        else
            it->second += c;
    }

    // Replaces P'^b factors with b >= 2.
    Poly2 reduce(const Poly2& in) const {
        Poly2 out;
        for (const auto& [k, c] : in) {
            auto [a, b] = k;
            if (b < 2) {
                poly_add(out, a, b, c);
                continue;
            }
            Poly2 sub;
            poly_add(sub, a + 3, b - 2, c * Rational(4));
            poly_add(sub, a + 1, b - 2, -(c * g2_));
            poly_add(sub, a, b - 2, -(c * g3_));
            for (const auto& [k2, c2] : reduce(sub)) poly_add(out, k2.first, k2.second, c2);
        }
        return out;
    }

    const Poly2& derivative_poly(int m) const {
        while (static_cast<int>(dpoly_.size()) <= m) {
            if (dpoly_.empty()) {
                Poly2 p;
                poly_add(p, 1, 0, QSeries(1));
                dpoly_.push_back(p);
                continue;
            }
            const Poly2& prev = dpoly_.back();
            Poly2 next;
            for (const auto& [k, c] : prev) {
                auto [a, b] = k;
                if (a > 0) poly_add(next, a - 1, b + 1, c * Rational(a));
                if (b > 0) {
                    // b P^a P'^{b-1} (6 P^2 - g2/2)
                    poly_add(next, a + 2, b - 1, c * Rational(6 * b));
                    poly_add(next, a, b - 1, -(c * g2_ * make_rational(b, 2)));
                }
            }
            dpoly_.push_back(reduce(next));
        }
        return dpoly_[m];
    }

private:
    int modulus_, order_;
    std::array<QSeries, 4> e_;
    QSeries eta1_, g2_, g3_;
    mutable std::vector<Poly2> dpoly_;
};

// 2 zeta(2n) = (-1)^{n+1} (2 pi)^{2n} B_{2n} / (2n)!
inline Coeff two_zeta_even(int two_n) {
    const int n = two_n / 2;
    Rational b = detail::bernoulli(two_n);
    mpz_class fact(1);
    for (int k = 2; k <= two_n; ++k) fact *= k;
    mpz_class p2;
    mpz_ui_pow_ui(p2.get_mpz_t(), 2, static_cast<unsigned long>(two_n));
    Rational c = Rational(p2) * b / Rational(fact);
    if (n % 2 == 0) c = -c;
    return Coeff::monomial(c, two_n);
}

// d^m/dT^m P(c T) truncated at T^t_trunc, with E_{2k+2} regular terms.
inline TSeries wp_laurent_at_origin(int m, long c, int t_trunc, const EllipticData& ell) {
    const int base_trunc = t_trunc + m;  // T-truncation of P(u) before differentiation
    std::vector<QSeries> coeffs;
    const int lo = -2;
    for (int j = lo; j < base_trunc; ++j) {
        if (j == -2) {
            coeffs.push_back(QSeries(1));
        } else if (j >= 2 && j % 2 == 0) {
            const int k = j / 2;
            auto ek = eisenstein(2 * k + 2, ell.order(), ell.modulus()).series;
            coeffs.push_back(ek * (two_zeta_even(2 * k + 2) * Rational(2 * k + 1)));
        } else {
            coeffs.push_back(QSeries::zero(ell.qtrunc()));
        }
    }
    TSeries s = TSeries::from_coeffs(lo, coeffs, base_trunc);
    for (int k = 0; k < m; ++k) s = s.derivative();
    if (c != 1) s = s.scale_variable(Rational(c));
    return s;
}

// Taylor expansion of P(p + T) from (P(p), P'(p)) via P'' = 6 P^2 - g2/2.
inline TSeries wp_taylor(const QSeries& p0, const QSeries& p1, int t_trunc, const EllipticData& ell) {
    std::vector<QSeries> c;
    if (t_trunc > 0) c.push_back(p0);
    if (t_trunc > 1) c.push_back(p1);
    for (int j = 0; j + 2 < t_trunc; ++j) {
        // [f^2]_j
        QSeries s = QSeries::zero(kExact);
        for (int i = 0; i <= j; ++i) s += c[i] * c[j - i];
        s = s * Rational(6);
        if (j == 0) s -= ell.g2() * make_rational(1, 2);
        c.push_back(s * make_rational(1, (j + 2) * (j + 1)));
    }
    return TSeries::from_coeffs(0, c, t_trunc);
}

inline TSeries wp_taylor_at_2torsion(int r, int t_trunc, const EllipticData& ell) {
    return wp_taylor(ell.e(r), QSeries::zero(ell.qtrunc()), t_trunc, ell);
}

// P^{(m)}(u_r) for a half period r
inline ModularElement wp_value_at_2torsion(int r, int m, const EllipticData& ell) {
    if (r < 1 || r > 3) throw UnknownTorsionDifference("value at a non-finite half period");
    TSeries t = wp_taylor_at_2torsion(r, m + 1, ell);
    mpz_class fact(1);
    for (int k = 2; k <= m; ++k) fact *= k;
    QSeries v = t.coeff(m) * Rational(fact);
    return {v, Rational(m + 2), 0, "wp" + std::to_string(m) + "(" + kLabelNames[r] + ")", true};
}

struct WpPoint {
    QSeries wp, dwp;
};

// P(a - b) and P'(a - b) by the group law
inline WpPoint wp_addition(const WpPoint& a, const WpPoint& b) {
    QSeries den = a.wp - b.wp;
    if (den.is_zero()) throw DegenerateDifference("P(a) = P(b) to truncation");
    QSeries lam = (a.dwp + b.dwp) * den.inverse();
    QSeries x3 = lam * lam * make_rational(1, 4) - a.wp - b.wp;
    // points (x_a, y_a) and (x_b, -y_b); sum has y = -(y_a + lam (x3 - x_a))
    QSeries y3 = -(a.dwp + lam * (x3 - a.wp));
    return {x3, y3};
}

// P and P' at the point z = a + b (m tau) of the lattice (1, m tau), with
// a, b rational of denominator dividing 24 and the imaginary part reduced to
// 0 <= b < 1.
inline WpPoint wp_at_torsion_point(Rational a, Rational b, const EllipticData& ell) {
    // reduce modulo the lattice and use evenness
    auto frac = [](Rational x) {
        mpz_class f;
        mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
        return Rational(x - Rational(f));
    };
    a = frac(a);
    b = frac(b);
    if (b == 0 && a == 0) throw DegenerateDifference("torsion point at the origin");
    Rational a24 = a * 24, bq = b * ell.modulus() * kDen;  // exponent numerator of q^{b m}
    if (a24.get_den() != 1 || bq.get_den() != 1)
        throw UnknownTorsionDifference("torsion point outside the 1/24 lattice");
    const long ak = a24.get_num().get_si();
    const long be = bq.get_num().get_si();
    const int tr = ell.qtrunc();
    const long qm = static_cast<long>(ell.modulus()) * kDen;  // numerator of q_ell
    auto root = [&](long k) { return Coeff::root_of_unity24(((ak * k) % 24 + 24) % 24); };
    // in units of (2 pi i)^2 and (2 pi i)^3
    std::vector<QSeries::Term> p, dp;
    p.emplace_back(0, Coeff(make_rational(1, 12)));
    if (b == 0) {
        // zeta/(1-zeta)^2 and zeta(1+zeta)/(1-zeta)^3 with zeta a root of unity
        Coeff z = root(1);
        Coeff om = Coeff(1) - z;
        Coeff inv = om.inverse();
        p.emplace_back(0, z * inv * inv);
        dp.emplace_back(0, z * (Coeff(1) + z) * inv * inv * inv);
    } else {
        for (long k = 1; k * be < tr; ++k) {
            p.emplace_back(static_cast<int>(k * be), root(k) * Rational(k));
            dp.emplace_back(static_cast<int>(k * be), root(k) * Rational(k * k));
        }
    }
    for (long n = 1; n * qm - be < tr; ++n) {
        for (long k = 1;; ++k) {
            const long ep = k * (n * qm + be), em = k * (n * qm - be), e0 = k * n * qm;
            if (em >= tr) break;
            // k (zeta^k + zeta^{-k} - 2) q^{nk}
            if (ep < tr) {
                p.emplace_back(static_cast<int>(ep), root(k) * Rational(k));
                dp.emplace_back(static_cast<int>(ep), root(k) * Rational(k * k));
            }
            p.emplace_back(static_cast<int>(em), root(-k) * Rational(k));
            dp.emplace_back(static_cast<int>(em), root(-k) * Rational(-k * k));
            if (e0 < tr) p.emplace_back(static_cast<int>(e0), Coeff(-2 * k));
        }
    }
    const Coeff two_pi_i = Coeff::monomial(Rational(2), 1, 1);
    QSeries wp = QSeries::from_terms(p, tr) * (two_pi_i * two_pi_i);
    QSeries dwp = QSeries::from_terms(dp, tr) * (two_pi_i * two_pi_i * two_pi_i);
    return {wp, dwp};
}

// ---------------------------------------------------------------------------
// Double precision oracle: lattice sums over rows, each row summed in closed
// form (sum_m 1/(z-m)^2 = pi^2/sin^2(pi z)).
// ---------------------------------------------------------------------------
namespace numeric {

using cplx = std::complex<double>;

inline cplx wp(cplx z, cplx tau, int rows = 40) {
    const double pi = std::acos(-1.0);
    auto csc2 = [&](cplx w) {
        cplx s = std::sin(pi * w);
        return pi * pi / (s * s);
    };
    cplx v = csc2(z) - pi * pi / 3.0;
    for (int n = 1; n <= rows; ++n)
        for (int sg : {1, -1}) {
            cplx w = double(sg * n) * tau;
            v += csc2(z - w) - csc2(w);
        }
    return v;
}

inline cplx wp_prime(cplx z, cplx tau, int rows = 40) {
    const double pi = std::acos(-1.0);
    auto row = [&](cplx w) {
        cplx s = std::sin(pi * w);
        return pi * pi * pi * std::cos(pi * w) / (s * s * s);
    };
    cplx v(0, 0);
    for (int n = -rows; n <= rows; ++n) v += row(z - double(n) * tau);
    return -2.0 * v;
}

inline bool close(cplx a, cplx b, double rel = 1e-8) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

}  // namespace numeric

// ---------------------------------------------------------------------------
// JacobiPoly: polynomial in P(k,r)^a P'(k,r)^b, eta1, Y over QSeries.
// ---------------------------------------------------------------------------

inline constexpr int kMaxSlots = 7;

struct MonoKey {
    std::uint64_t slots = 0;  // byte k: bits 0-4 power of P, bit 5 power of P', bits 6-7 label
    std::uint8_t eta = 0;
    std::uint8_t y = 0;
    std::uint8_t diag = 0;  // power of P(u_0 - u_1), used only by omega_{0,2}

    static std::uint8_t pack(int label, int a, int b) {
        if (a == 0 && b == 0) return 0;
        if (a < 0 || a > 31 || b < 0 || b > 1) throw InvariantViolation("symbol power outside the packed range");
        return static_cast<std::uint8_t>((label << 6) | (b << 5) | a);
    }
    int byte(int k) const { return static_cast<int>((slots >> (8 * k)) & 0xff); }
    int label(int k) const { return byte(k) >> 6; }
    int a(int k) const { return byte(k) & 31; }
    int b(int k) const { return (byte(k) >> 5) & 1; }
    void set(int k, int label, int a, int b) {
        slots &= ~(std::uint64_t(0xff) << (8 * k));
        slots |= std::uint64_t(pack(label, a, b)) << (8 * k);
    }
    void clear(int k) { slots &= ~(std::uint64_t(0xff) << (8 * k)); }
    int pole(int k) const { return 2 * a(k) + 3 * b(k); }

    friend bool operator<(const MonoKey& x, const MonoKey& y) {
        return std::tie(x.slots, x.eta, x.y, x.diag) < std::tie(y.slots, y.eta, y.y, y.diag);
    }
    friend bool operator==(const MonoKey& x, const MonoKey& y) {
        return x.slots == y.slots && x.eta == y.eta && x.y == y.y && x.diag == y.diag;
    }
};

class JacobiPoly {
public:
    using Map = std::map<MonoKey, QSeries>;

    JacobiPoly() = default;
    JacobiPoly(long c) {  // NOLINT(implicit)
        if (c != 0) t_.emplace(MonoKey{}, QSeries(c));
    }
    explicit JacobiPoly(const QSeries& c) {
        horizon_ = c.trunc();
        if (!c.is_zero()) t_.emplace(MonoKey{}, c);
    }
    static JacobiPoly term(const MonoKey& k, const QSeries& c) {
        JacobiPoly p;
        p.add(k, c);
        return p;
    }

    const Map& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool exact_zero() const { return t_.empty() && horizon_ >= kExact; }
    int horizon() const { return horizon_; }
    void set_horizon(int h) { horizon_ = std::min(horizon_, h); }
    // smallest truncation over stored coefficients and the horizon
    int qtrunc() const {
        int t = horizon_;
        for (const auto& [k, c] : t_) t = std::min(t, c.trunc());
        return t;
    }
    int min_valuation() const {
        int v = horizon_;
        for (const auto& [k, c] : t_) v = std::min(v, c.valuation());
        return v;
    }

    void add(const MonoKey& k, const QSeries& c) {
        if (c.is_zero()) {
            if (!c.exact()) horizon_ = std::min(horizon_, c.trunc());
            // a cancelled monomial keeps its precision in the horizon
            auto it = t_.find(k);
            if (it != t_.end()) {
                it->second += c;
                if (it->second.is_zero()) {
                    horizon_ = std::min(horizon_, it->second.trunc());
                    t_.erase(it);
                }
            }
            return;
        }
        auto it = t_.find(k);
        if (it == t_.end()) {
            t_.emplace(k, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) {
                horizon_ = std::min(horizon_, it->second.trunc());
                t_.erase(it);
            }
        }
    }

    JacobiPoly& operator+=(const JacobiPoly& o) {
        horizon_ = std::min(horizon_, o.horizon_);
        for (const auto& [k, c] : o.t_) add(k, c);
        return *this;
    }
    JacobiPoly& operator-=(const JacobiPoly& o) {
        horizon_ = std::min(horizon_, o.horizon_);
        for (const auto& [k, c] : o.t_) add(k, -c);
        return *this;
    }
    friend JacobiPoly operator+(JacobiPoly a, const JacobiPoly& b) { return a += b; }
    friend JacobiPoly operator-(JacobiPoly a, const JacobiPoly& b) { return a -= b; }
    friend JacobiPoly operator-(JacobiPoly a) {
        for (auto& [k, c] : a.t_) c = -c;
        return a;
    }
    friend JacobiPoly operator*(JacobiPoly a, const Rational& r) {
        if (r == 0) {
            a.t_.clear();
            return a;
        }
        for (auto& [k, c] : a.t_) c = c * r;
        return a;
    }
    friend JacobiPoly operator*(const JacobiPoly& a, const QSeries& s) {
        JacobiPoly r;
        r.horizon_ = std::min(trunc_add(a.horizon_, s.valuation()), trunc_add(s.trunc(), a.min_valuation()));
        for (const auto& [k, c] : a.t_) r.add(k, c * s);
        return r;
    }

    // Product of polynomials whose slot symbols do not collide (distinct slots,
    // or the same label in a slot, in which case powers add and P'^2 is
    // reduced if an elliptic handle is available).
    friend JacobiPoly operator*(const JacobiPoly& a, const JacobiPoly& b) {
        JacobiPoly r;
        r.horizon_ = std::min(trunc_add(a.horizon_, b.min_valuation()), trunc_add(b.horizon_, a.min_valuation()));
        for (const auto& [ka, ca] : a.t_)
            for (const auto& [kb, cb] : b.t_) {
                QSeries c = ca * cb;
                MonoKey k;
                k.eta = static_cast<std::uint8_t>(ka.eta + kb.eta);
                k.y = static_cast<std::uint8_t>(ka.y + kb.y);
                k.diag = static_cast<std::uint8_t>(ka.diag + kb.diag);
                bool needs_reduce = false;
                int red_slot = -1;
                for (int s = 0; s < kMaxSlots; ++s) {
                    const int ba = ka.byte(s), bb = kb.byte(s);
                    if (!ba && !bb) continue;
                    if (!bb) {
                        k.slots |= std::uint64_t(ba) << (8 * s);
                    } else if (!ba) {
                        k.slots |= std::uint64_t(bb) << (8 * s);
                    } else {
                        if (ka.label(s) != kb.label(s))
                            throw InvariantViolation("product of symbols with different labels in one slot");
                        const int pa = ka.a(s) + kb.a(s), pb = ka.b(s) + kb.b(s);
                        if (pb >= 2) {
                            needs_reduce = true;
                            red_slot = s;
                            k.set(s, ka.label(s), pa, 0);
                            // keep b power 2 pending: handled below
                        } else {
                            k.set(s, ka.label(s), pa, pb);
                        }
                    }
                }
                if (!needs_reduce) {
                    r.add(k, c);
                    continue;
                }
                if (!a.ell_ && !b.ell_) throw InvariantViolation("P'^2 reduction needs an elliptic handle");
                const EllipticData* e = a.ell_ ? a.ell_ : b.ell_;
                const int lab = k.label(red_slot), pa = k.a(red_slot);
                // P'^2 = 4 P^3 - g2 P - g3
                MonoKey k3 = k, k1 = k, k0 = k;
                k3.set(red_slot, lab, pa + 3, 0);
                k1.set(red_slot, lab, pa + 1, 0);
                k0.set(red_slot, lab, pa, 0);
                r.add(k3, c * Rational(4));
                r.add(k1, -(c * e->g2()));
                r.add(k0, -(c * e->g3()));
            }
        r.ell_ = a.ell_ ? a.ell_ : b.ell_;
        return r;
    }

    void set_elliptic(const EllipticData* e) { ell_ = e; }
    const EllipticData* elliptic() const { return ell_; }

    JacobiPoly truncated(int t) const {
        JacobiPoly r;
        r.ell_ = ell_;
        r.horizon_ = std::min(horizon_, t);
        for (const auto& [k, c] : t_) r.add(k, c.truncated(t));
        return r;
    }

    // Holomorphic limit Y -> 0.
    JacobiPoly holomorphic_limit() const {
        JacobiPoly r;
        r.ell_ = ell_;
        r.horizon_ = horizon_;
        for (const auto& [k, c] : t_)
            if (k.y == 0) r.add(k, c);
        return r;
    }

    // Formal d/d eta1.
    JacobiPoly d_eta1() const {
        JacobiPoly r;
        r.ell_ = ell_;
        r.horizon_ = horizon_;
        for (const auto& [k, c] : t_) {
            if (k.eta == 0) continue;
            MonoKey k2 = k;
            k2.eta = static_cast<std::uint8_t>(k.eta - 1);
            r.add(k2, c * Rational(k.eta));
        }
        return r;
    }

    // Substitutes eta1 (and optionally Y) by series, leaving symbols.
    JacobiPoly substitute_eta(const QSeries& eta, const QSeries* y = nullptr) const {
        JacobiPoly r;
        r.ell_ = ell_;
        r.horizon_ = horizon_;
        for (const auto& [k, c] : t_) {
            MonoKey k2 = k;
            QSeries f = c * pow(eta, k.eta);
            k2.eta = 0;
            if (y) {
                f = f * pow(*y, k.y);
                k2.y = 0;
            }
            r.add(k2, f);
        }
        return r;
    }

private:
    Map t_;
    int horizon_ = kExact;
    const EllipticData* ell_ = nullptr;
};

inline bool ring_is_zero(const JacobiPoly& a) { return a.is_zero(); }
inline bool ring_is_exact_zero(const JacobiPoly& a) { return a.exact_zero(); }

using JSeries = TLaurent<JacobiPoly>;

// P^{(m)}(u_k - u_r) in normal form
inline JacobiPoly wp_symbol(int k, int r, int m, const EllipticData& ell) {
    JacobiPoly p;
    p.set_elliptic(&ell);
    for (const auto& [ab, c] : ell.derivative_poly(m)) {
        MonoKey key;
        key.set(k, r, ab.first, ab.second);
        p.add(key, c);
    }
    return p;
}

inline JacobiPoly eta_power(int a, int yb = 0) {
    MonoKey k;
    k.eta = static_cast<std::uint8_t>(a);
    k.y = static_cast<std::uint8_t>(yb);
    return JacobiPoly::term(k, QSeries(1));
}

// eta1-hat^j = (eta1 + Y)^j, or eta1^j in Bergman mode
inline JacobiPoly eta_hat_power(int j, bool schiffer) {
    if (!schiffer) return eta_power(j);
    JacobiPoly r;
    mpz_class binom(1);
    for (int i = 0; i <= j; ++i) {
        MonoKey k;
        k.eta = static_cast<std::uint8_t>(j - i);
        k.y = static_cast<std::uint8_t>(i);
        r.add(k, QSeries(Coeff(Rational(binom))));
        binom = binom * (j - i) / (i + 1);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Localization: u_k = u_r + s T for selected slots.
// ---------------------------------------------------------------------------

class Localizer {
public:
    explicit Localizer(const EllipticData& ell) : ell_(ell) {}
    const EllipticData& elliptic() const { return ell_; }

    // P(d + T)^a P'(d + T)^b with d a torsion label (origin: Laurent)
    TSeries power_series(int d, int a, int b, int t_trunc) {
        auto key = std::make_tuple(d, a, b);
        auto it = cache_.find(key);
        if (it != cache_.end() && it->second.trunc() >= t_trunc) return it->second.truncated(t_trunc);
        const int pole = d == 0 ? 2 * a + 3 * b : 0;
        // each factor needs extra room for the poles of the others
        const int need = t_trunc + pole + 3;
        TSeries p = base(d, 0, need), dp = base(d, 1, need);
        TSeries r = TSeries::monomial(QSeries(1), 0, kExact);
        for (int j = 0; j < a; ++j) r = r * p;
        for (int j = 0; j < b; ++j) r = r * dp;
        r = r.truncated(t_trunc);
        cache_[key] = r;
        return r;
    }

    // P(d+T) (m = 0) or P'(d+T) (m = 1)
    TSeries base(int d, int m, int t_trunc) {
        auto key = std::make_pair(d, m);
        auto it = base_.find(key);
        if (it != base_.end() && it->second.trunc() >= t_trunc) return it->second.truncated(t_trunc);
        TSeries s;
        if (d == 0) {
            s = wp_laurent_at_origin(m, 1, t_trunc, ell_);
        } else {
            TSeries t = wp_taylor_at_2torsion(d, t_trunc + 1, ell_);
            s = m == 0 ? t.truncated(t_trunc) : t.derivative().truncated(t_trunc);
        }
        base_[key] = s;
        return s;
    }

    struct Site {
        int slot;
        int label;
        int sign;  // +1: u_r + T, -1: u_r - T
    };

    // Localizes the listed slots; the remaining slots are renamed through
    // remap[old] (must be defined for every slot that carries a symbol).
    JSeries localize(const JacobiPoly& poly, const std::vector<Site>& sites, const std::array<int, kMaxSlots>& remap,
                     int t_trunc) {
        std::map<int, JacobiPoly> out;  // T exponent -> coefficient
        int lowest = t_trunc;
        for (const auto& [key, coef] : poly.terms()) {
            // valuations of the factors
            std::vector<int> vals;
            int vsum = 0;
            for (const auto& s : sites) {
                const int d = torsion_difference(s.label, key.label(s.slot));
                int v = (key.byte(s.slot) && d == 0) ? -(2 * key.a(s.slot) + 3 * key.b(s.slot)) : 0;
                vals.push_back(v);
                vsum += v;
            }
            TSeries prod = TSeries::monomial(QSeries(1), 0, kExact);
            for (std::size_t i = 0; i < sites.size(); ++i) {
                const auto& s = sites[i];
                if (!key.byte(s.slot)) continue;
                const int d = torsion_difference(s.label, key.label(s.slot));
                const int need = t_trunc - (vsum - vals[i]);
                TSeries f = power_series(d, key.a(s.slot), key.b(s.slot), need);
                // P^{(m)}(u_k - u_r') with u_k = u_r + sT equals a function of (d + sT);
                // parity handles s = -1.
                if (s.sign < 0) f = f.negate_variable();
                prod = prod * f;
            }
            prod = prod.truncated(t_trunc);
            MonoKey rest;
            rest.eta = key.eta;
            rest.y = key.y;
            rest.diag = key.diag;
            for (int k = 0; k < kMaxSlots; ++k) {
                if (!key.byte(k)) continue;
                bool localized = false;
                for (const auto& s : sites)
                    if (s.slot == k) localized = true;
                if (localized) continue;
                if (remap[k] < 0) throw InvariantViolation("slot without a target in localization");
                rest.slots |= std::uint64_t(key.byte(k)) << (8 * remap[k]);
            }
            for (int j = prod.lowest_exponent(); j < prod.trunc(); ++j) {
                QSeries c = prod.coeff(j) * coef;
                auto& slot = out[j];
                slot.set_elliptic(&ell_);
                slot.add(rest, c);
                lowest = std::min(lowest, j);
            }
            // coefficients above the product's truncation are unknown
            if (prod.trunc() < t_trunc) throw OrderTooLow("localized product lost T-precision");
        }
        std::vector<JacobiPoly> coeffs;
        for (int j = lowest; j < t_trunc; ++j) {
            auto it = out.find(j);
            JacobiPoly p = it == out.end() ? JacobiPoly() : it->second;
            p.set_elliptic(&ell_);
            p.set_horizon(poly.horizon());
            coeffs.push_back(p);
        }
        return JSeries::from_coeffs(lowest, coeffs, t_trunc);
    }

private:
    const EllipticData& ell_;
    std::map<std::tuple<int, int, int>, TSeries> cache_;
    std::map<std::pair<int, int>, TSeries> base_;
};

inline std::array<int, kMaxSlots> identity_remap() {
    std::array<int, kMaxSlots> r{};
    for (int k = 0; k < kMaxSlots; ++k) r[k] = k;
    return r;
}

// Localize a single slot k at label r (u_k = u_r + T).
inline JSeries localize(const JacobiPoly& poly, int k, int r, int t_trunc, Localizer& loc, int sign = 1) {
    return loc.localize(poly, {{k, r, sign}}, identity_remap(), t_trunc);
}

}  // namespace toprec
