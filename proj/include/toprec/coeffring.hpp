#ifndef TOPREC_COEFFRING_HPP
#define TOPREC_COEFFRING_HPP

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace toprec {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    if (den == 0) throw DivisionByZero("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline std::string rational_to_string(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

// ---------------------------------------------------------------------------
// Scalar: rational times a monomial in tracked constants.
// ---------------------------------------------------------------------------

enum class Const : int { Pi = 0, I, Zeta6, Cbrt2, Sqrt3, Cbrtm4, Sqrt2 };
inline constexpr int kNumConsts = 7;

namespace detail {

struct Relation {
    int period;  // 0 means no relation
    long value;  // c^period = value
};

// sqrt2 is an extension of the base table; it is needed by the ramification
// shifts of the P1xP1, F1 and WP112 uniformizations (eighth-roots of unity).
inline constexpr std::array<Relation, kNumConsts> kRelations{{
    {0, 0},   // pi
    {2, -1},  // i
    {3, -1},  // zeta6
    {3, 2},   // cbrt2
    {2, 3},   // sqrt3
    {3, -4},  // cbrtm4
    {2, 2},   // sqrt2
}};

inline constexpr std::array<const char*, kNumConsts> kConstNames{
    "pi", "i", "zeta6", "cbrt2", "sqrt3", "cbrtm4", "sqrt2"};

}  // namespace detail

class Scalar {
public:
    using Exponents = std::array<int, kNumConsts>;

    Scalar() : q_(0) { e_.fill(0); }
    Scalar(long v) : q_(v) { e_.fill(0); }  // NOLINT(implicit)
    Scalar(Rational q) : q_(std::move(q)) {  // NOLINT(implicit)
        e_.fill(0);
        q_.canonicalize();
    }
    Scalar(Rational q, const Exponents& e) : q_(std::move(q)), e_(e) {
        q_.canonicalize();
        reduce();
    }

    static Scalar constant(Const c, int power = 1) {
        Exponents e{};
        e[static_cast<int>(c)] = power;
        return Scalar(Rational(1), e);
    }

    const Rational& rational() const { return q_; }
    const Exponents& exponents() const { return e_; }
    int exponent(Const c) const { return e_[static_cast<int>(c)]; }
    bool is_zero() const { return q_ == 0; }

    // Brings every exponent into its canonical window; zero has all-zero
    // exponents. Calling this twice changes nothing.
    void reduce() {
        if (q_ == 0) {
            e_.fill(0);
            return;
        }
        for (int c = 0; c < kNumConsts; ++c) {
            const auto& rel = detail::kRelations[c];
            if (rel.period == 0) continue;
            int quot = e_[c] / rel.period;
            int rem = e_[c] % rel.period;
            if (rem < 0) {
                rem += rel.period;
                --quot;
            }
            e_[c] = rem;
            if (quot != 0) {
                mpz_class base(rel.value);
                mpz_class p;
                mpz_pow_ui(p.get_mpz_t(), base.get_mpz_t(),
                           static_cast<unsigned long>(quot < 0 ? -quot : quot));
                if (quot > 0)
                    q_ *= p;
                else
                    q_ /= p;
            }
        }
    }

    Scalar inverse() const {
        if (q_ == 0) throw DivisionByZero("inverse of zero scalar");
        Exponents e{};
        for (int c = 0; c < kNumConsts; ++c) e[c] = -e_[c];
        Rational r = 1 / q_;
        return Scalar(r, e);
    }

    Scalar pow(int n) const {
        if (n < 0) return inverse().pow(-n);
        Scalar r(1);
        for (int k = 0; k < n; ++k) r = r * *this;
        return r;
    }

    Rational rational_part() const {
        for (int c = 0; c < kNumConsts; ++c)
            if (e_[c] != 0)
                throw NonRational("scalar carries " + std::string(detail::kConstNames[c]) +
                                  "^" + std::to_string(e_[c]));
        return q_;
    }

    std::string to_string() const {
        std::ostringstream os;
        os << rational_to_string(q_);
        for (int c = 0; c < 6; ++c) os << " * " << detail::kConstNames[c] << "^" << e_[c];
        if (e_[6] != 0) os << " * " << detail::kConstNames[6] << "^" << e_[6];
        return os.str();
    }

    std::complex<double> numeric() const;

    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        Exponents e{};
        for (int c = 0; c < kNumConsts; ++c) e[c] = a.e_[c] + b.e_[c];
        return Scalar(a.q_ * b.q_, e);
    }
    friend Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inverse(); }
    friend Scalar operator-(const Scalar& a) { return Scalar(-a.q_, a.e_); }
    friend bool operator==(const Scalar& a, const Scalar& b) {
        return a.q_ == b.q_ && a.e_ == b.e_;
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

private:
    Rational q_;
    Exponents e_{};
};

inline Scalar scalar_mul(const Scalar& a, const Scalar& b) { return a * b; }
inline Rational scalar_rational_part(const Scalar& a) { return a.rational_part(); }

inline std::complex<double> Scalar::numeric() const {
    using C = std::complex<double>;
    const double pi = std::acos(-1.0);
    C v(q_.get_d(), 0.0);
    const std::array<C, kNumConsts> base{
        C(pi, 0), C(0, 1), std::polar(1.0, pi / 3), C(std::cbrt(2.0), 0), C(std::sqrt(3.0), 0),
        std::polar(std::cbrt(4.0), pi / 3), C(std::sqrt(2.0), 0)};
    for (int c = 0; c < kNumConsts; ++c)
        if (e_[c] != 0) v *= std::pow(base[c], e_[c]);
    return v;
}

// ---------------------------------------------------------------------------
// Coeff: finite Q-linear combination of pi^p * i^a * sqrt2^b * sqrt3^c * cbrt2^d
// with a, b, c in {0,1} and d in {0,1,2}.  This is the field in which sums of
// Scalars live; zeta6 = (1 + i sqrt3)/2 and cbrtm4 = zeta6 * cbrt2^2 on the
// principal branches.
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr int kAlgDim = 24;

struct AlgMono {
    int i, s2, s3, r2;
};

inline constexpr AlgMono alg_decode(int idx) {
    return AlgMono{idx / 12, (idx / 6) % 2, (idx / 3) % 2, idx % 3};
}
inline constexpr int alg_encode(int i, int s2, int s3, int r2) {
    return i * 12 + s2 * 6 + s3 * 3 + r2;
}

struct AlgProduct {
    int idx;
    int factor;
};

struct AlgTable {
    std::array<std::array<AlgProduct, kAlgDim>, kAlgDim> mul{};
    AlgTable() {
        for (int a = 0; a < kAlgDim; ++a)
            for (int b = 0; b < kAlgDim; ++b) {
                AlgMono x = alg_decode(a), y = alg_decode(b);
                int f = 1;
                int i = x.i + y.i, s2 = x.s2 + y.s2, s3 = x.s3 + y.s3, r2 = x.r2 + y.r2;
                if (i == 2) { i = 0; f = -f; }
                if (s2 == 2) { s2 = 0; f *= 2; }
                if (s3 == 2) { s3 = 0; f *= 3; }
                if (r2 >= 3) { r2 -= 3; f *= 2; }
                mul[a][b] = {alg_encode(i, s2, s3, r2), f};
            }
    }
};

inline const AlgTable& alg_table() {
    static const AlgTable t;
    return t;
}

}  // namespace detail

class Coeff {
public:
    using Key = std::int32_t;
    struct Term {
        Key key;
        Rational c;
    };
    static constexpr int kPiBias = 1 << 12;

    static Key make_key(int pi, int alg) { return (pi + kPiBias) * detail::kAlgDim + alg; }
    static int key_pi(Key k) { return k / detail::kAlgDim - kPiBias; }
    static int key_alg(Key k) { return k % detail::kAlgDim; }

    Coeff() = default;
    Coeff(long v) {  // NOLINT(implicit)
        if (v != 0) t_.push_back({make_key(0, 0), Rational(v)});
    }
    Coeff(const Rational& q) {  // NOLINT(implicit)
        if (q != 0) t_.push_back({make_key(0, 0), q});
    }
    Coeff(const Scalar& s) { *this = from_scalar(s); }  // NOLINT(implicit)

    static Coeff monomial(const Rational& q, int pi, int i = 0, int s2 = 0, int s3 = 0, int r2 = 0) {
        Coeff r;
        if (q != 0) r.t_.push_back({make_key(pi, detail::alg_encode(i, s2, s3, r2)), q});
        return r;
    }
    static Coeff pi_pow(int p) { return monomial(Rational(1), p); }
    static Coeff imag() { return monomial(Rational(1), 0, 1); }
    static Coeff sqrt2() { return monomial(Rational(1), 0, 0, 1); }
    static Coeff sqrt3() { return monomial(Rational(1), 0, 0, 0, 1); }
    // 2^{d/3} for any integer d
    static Coeff cbrt2(int d = 1) {
        const int r = ((d % 3) + 3) % 3;
        const int whole = (d - r) / 3;
        Rational f(1);
        if (whole >= 0)
            f = Rational(mpz_class(1) << whole);
        else
            f = Rational(mpz_class(1), mpz_class(1) << -whole);
        return monomial(f, 0, 0, 0, 0, r);
    }
    static Coeff zeta6() { return monomial(make_rational(1, 2), 0) + monomial(make_rational(1, 2), 0, 1, 0, 1); }
    static Coeff cbrtm4() { return zeta6() * cbrt2(2); }

    // exp(2 pi i k / 24)
    static Coeff root_of_unity24(long k) {
        k = ((k % 24) + 24) % 24;
        Coeff c = monomial(make_rational(1, 4), 0, 0, 1, 1) + monomial(make_rational(1, 4), 0, 0, 1);
        Coeff s = monomial(make_rational(1, 4), 0, 0, 1, 1) - monomial(make_rational(1, 4), 0, 0, 1);
        Coeff z = c + imag() * s;
        Coeff r(1);
        for (long j = 0; j < k; ++j) r = r * z;
        return r;
    }

    static Coeff from_scalar(const Scalar& s) {
        if (s.is_zero()) return Coeff();
        Coeff r = monomial(s.rational(), s.exponent(Const::Pi), s.exponent(Const::I), s.exponent(Const::Sqrt2),
                           s.exponent(Const::Sqrt3), s.exponent(Const::Cbrt2));
        for (int k = 0; k < s.exponent(Const::Zeta6); ++k) r = r * zeta6();
        for (int k = 0; k < s.exponent(Const::Cbrtm4); ++k) r = r * cbrtm4();
        return r;
    }

    const std::vector<Term>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    std::size_t size() const { return t_.size(); }

    bool is_rational() const { return t_.empty() || (t_.size() == 1 && t_[0].key == make_key(0, 0)); }
    Rational rational_value() const {
        if (t_.empty()) return Rational(0);
        if (!is_rational()) throw NonRational("coefficient " + to_string() + " is not rational");
        return t_[0].c;
    }
    Scalar scalar_of_term(const Term& t) const {
        auto m = detail::alg_decode(key_alg(t.key));
        Scalar::Exponents e{};
        e[static_cast<int>(Const::Pi)] = key_pi(t.key);
        e[static_cast<int>(Const::I)] = m.i;
        e[static_cast<int>(Const::Sqrt2)] = m.s2;
        e[static_cast<int>(Const::Sqrt3)] = m.s3;
        e[static_cast<int>(Const::Cbrt2)] = m.r2;
        return Scalar(t.c, e);
    }
    // Single-monomial coefficients convert back to a Scalar.
    Scalar to_scalar() const {
        if (t_.empty()) return Scalar();
        if (t_.size() != 1) throw NonRational("coefficient is not a single monomial");
        return scalar_of_term(t_[0]);
    }

    // pi exponent range; weight-homogeneous elements have min == max
    int pi_min() const { return t_.empty() ? 0 : key_pi(t_.front().key); }
    int pi_max() const { return t_.empty() ? 0 : key_pi(t_.back().key); }
    bool pi_homogeneous() const { return t_.empty() || pi_min() == pi_max(); }

    std::string to_string() const {
        if (t_.empty()) return Scalar().to_string();
        std::string s;
        for (std::size_t k = 0; k < t_.size(); ++k) {
            if (k) s += " + ";
            s += scalar_of_term(t_[k]).to_string();
        }
        return s;
    }

    std::complex<double> numeric() const {
        std::complex<double> v(0, 0);
        for (const auto& t : t_) v += scalar_of_term(t).numeric();
        return v;
    }

    Coeff& operator+=(const Coeff& o) {
        if (o.t_.empty()) return *this;
        if (t_.empty()) { t_ = o.t_; return *this; }
        *this = merge(*this, o, 1);
        return *this;
    }
    Coeff& operator-=(const Coeff& o) {
        if (o.t_.empty()) return *this;
        *this = merge(*this, o, -1);
        return *this;
    }
    Coeff& operator*=(const Rational& q) {
        if (q == 0) { t_.clear(); return *this; }
        for (auto& t : t_) t.c *= q;
        return *this;
    }

    friend Coeff operator+(Coeff a, const Coeff& b) { return a += b; }
    friend Coeff operator-(Coeff a, const Coeff& b) { return a -= b; }
    friend Coeff operator-(Coeff a) {
        for (auto& t : a.t_) t.c = -t.c;
        return a;
    }
    friend Coeff operator*(const Coeff& a, const Coeff& b) {
        Coeff r;
        if (a.t_.empty() || b.t_.empty()) return r;
        const auto& tab = detail::alg_table();
        if (a.t_.size() == 1 && b.t_.size() == 1) {
            const auto& x = a.t_[0];
            const auto& y = b.t_[0];
            auto p = tab.mul[key_alg(x.key)][key_alg(y.key)];
            Rational c = x.c * y.c;
            if (p.factor != 1) c *= p.factor;
            r.t_.push_back({make_key(key_pi(x.key) + key_pi(y.key), p.idx), std::move(c)});
            return r;
        }
        std::vector<Term> acc;
        acc.reserve(a.t_.size() * b.t_.size());
        for (const auto& x : a.t_)
            for (const auto& y : b.t_) {
                auto p = tab.mul[key_alg(x.key)][key_alg(y.key)];
                Rational c = x.c * y.c;
                if (p.factor != 1) c *= p.factor;
                acc.push_back({make_key(key_pi(x.key) + key_pi(y.key), p.idx), std::move(c)});
            }
        std::sort(acc.begin(), acc.end(), [](const Term& u, const Term& v) { return u.key < v.key; });
        for (auto& t : acc) {
            if (!r.t_.empty() && r.t_.back().key == t.key)
                r.t_.back().c += t.c;
            else {
                if (!r.t_.empty() && r.t_.back().c == 0) r.t_.pop_back();
                r.t_.push_back(std::move(t));
            }
        }
        if (!r.t_.empty() && r.t_.back().c == 0) r.t_.pop_back();
        return r;
    }
    friend Coeff operator*(Coeff a, const Rational& q) { return a *= q; }
    friend Coeff operator*(const Rational& q, Coeff a) { return a *= q; }
    friend bool operator==(const Coeff& a, const Coeff& b) {
        if (a.t_.size() != b.t_.size()) return false;
        for (std::size_t k = 0; k < a.t_.size(); ++k)
            if (a.t_[k].key != b.t_[k].key || a.t_[k].c != b.t_[k].c) return false;
        return true;
    }
    friend bool operator!=(const Coeff& a, const Coeff& b) { return !(a == b); }

    Coeff inverse() const {
        if (t_.empty()) throw DivisionByZero("inverse of zero coefficient");
        if (!pi_homogeneous())
            throw NonInvertibleLeading("coefficient mixes powers of pi: " + to_string());
        const int p = pi_min();
        if (t_.size() == 1) return monomial_inverse(t_[0]);
        // Solve alpha * beta = 1 in the 24-dimensional algebra by elimination.
        const int n = detail::kAlgDim;
        const auto& tab = detail::alg_table();
        std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n + 1, Rational(0)));
        for (const auto& t : t_) {
            int a = key_alg(t.key);
            for (int b = 0; b < n; ++b) {
                auto pr = tab.mul[a][b];
                m[pr.idx][b] += t.c * pr.factor;
            }
        }
        m[0][n] = 1;
        for (int col = 0; col < n; ++col) {
            int piv = -1;
            for (int row = col; row < n; ++row)
                if (m[row][col] != 0) { piv = row; break; }
            if (piv < 0) throw NonInvertibleLeading("singular coefficient " + to_string());
            std::swap(m[piv], m[col]);
            Rational inv = 1 / m[col][col];
            for (int k = col; k <= n; ++k) m[col][k] *= inv;
            for (int row = 0; row < n; ++row) {
                if (row == col || m[row][col] == 0) continue;
                Rational f = m[row][col];
                for (int k = col; k <= n; ++k) m[row][k] -= f * m[col][k];
            }
        }
        Coeff r;
        for (int b = 0; b < n; ++b)
            if (m[b][n] != 0) r.t_.push_back({make_key(-p, b), m[b][n]});
        return r;
    }

    Coeff pow(int n) const {
        if (n < 0) return inverse().pow(-n);
        Coeff r(1), base = *this;
        while (n) {
            if (n & 1) r = r * base;
            n >>= 1;
            if (n) base = base * base;
        }
        return r;
    }

    // Exact square root for single-monomial rational coefficients whose
    // radicals stay inside the basis.
    Coeff sqrt_monomial() const {
        if (t_.empty()) return Coeff();
        if (t_.size() != 1) throw BranchError("square root of a non-monomial coefficient");
        const auto& t = t_[0];
        auto m = detail::alg_decode(key_alg(t.key));
        int p = key_pi(t.key);
        if (p % 2 != 0 || m.i || m.s2 || m.s3 || m.r2)
            throw BranchError("square root outside the tracked constants: " + to_string());
        if (t.c < 0) throw BranchError("square root of a negative rational");
        mpz_class num = t.c.get_num(), den = t.c.get_den();
        if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
            throw BranchError("rational " + rational_to_string(t.c) + " is not a perfect square");
        mpz_class sn, sd;
        mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
        mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
        return monomial(Rational(sn, sd), p / 2);
    }

private:
    static Coeff monomial_inverse(const Term& t) {
        auto m = detail::alg_decode(key_alg(t.key));
        int comp = detail::alg_encode(m.i, m.s2, m.s3, (3 - m.r2) % 3);
        auto pr = detail::alg_table().mul[key_alg(t.key)][comp];
        Coeff r;
        Rational c = 1 / (t.c * pr.factor);
        r.t_.push_back({make_key(-key_pi(t.key), comp), c});
        return r;
    }

    static Coeff merge(const Coeff& a, const Coeff& b, int sign) {
        Coeff r;
        r.t_.reserve(a.t_.size() + b.t_.size());
        std::size_t i = 0, j = 0;
        while (i < a.t_.size() || j < b.t_.size()) {
            if (j == b.t_.size() || (i < a.t_.size() && a.t_[i].key < b.t_[j].key)) {
                r.t_.push_back(a.t_[i++]);
            } else if (i == a.t_.size() || b.t_[j].key < a.t_[i].key) {
                r.t_.push_back({b.t_[j].key, sign > 0 ? b.t_[j].c : Rational(-b.t_[j].c)});
                ++j;
            } else {
                Rational c = sign > 0 ? Rational(a.t_[i].c + b.t_[j].c) : Rational(a.t_[i].c - b.t_[j].c);
                if (c != 0) r.t_.push_back({a.t_[i].key, std::move(c)});
                ++i;
                ++j;
            }
        }
        return r;
    }

    std::vector<Term> t_;
};

}  // namespace toprec

#endif
