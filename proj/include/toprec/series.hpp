#ifndef TOPREC_SERIES_HPP
#define TOPREC_SERIES_HPP

#include <algorithm>
#include <climits>
#include <complex>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "coeffring.hpp"
#include "errors.hpp"

namespace toprec {

// Exponents of q are stored as numerators over this denominator.
inline constexpr int kDen = 24;
// Truncation sentinel for series known exactly.
inline constexpr int kExact = INT_MAX / 4;

inline int trunc_add(int a, int b) {
    if (a >= kExact || b >= kExact) return kExact;
    long s = static_cast<long>(a) + b;
    return s >= kExact ? kExact : static_cast<int>(s);
}

template <class C>
class QSeriesT {
public:
    using Term = std::pair<int, C>;

    QSeriesT() : trunc_(kExact) {}
    explicit QSeriesT(const C& c, int trunc = kExact) : trunc_(trunc) {
        if (!c.is_zero() && 0 < trunc_) t_.emplace_back(0, c);
    }
    QSeriesT(long v) : QSeriesT(C(v)) {}  // NOLINT(implicit)

    static QSeriesT zero(int trunc) {
        QSeriesT s;
        s.trunc_ = trunc;
        return s;
    }
    static QSeriesT monomial(const C& c, int n, int trunc = kExact) {
        QSeriesT s;
        s.trunc_ = trunc;
        if (!c.is_zero() && n < trunc) s.t_.emplace_back(n, c);
        return s;
    }
    // Builds from unsorted pairs, merging duplicates.
    static QSeriesT from_terms(std::vector<Term> terms, int trunc) {
        std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
        QSeriesT s;
        s.trunc_ = trunc;
        for (auto& t : terms) {
            if (t.first >= trunc) break;
            if (!s.t_.empty() && s.t_.back().first == t.first)
                s.t_.back().second += t.second;
            else {
                if (!s.t_.empty() && s.t_.back().second.is_zero()) s.t_.pop_back();
                s.t_.push_back(std::move(t));
            }
        }
        if (!s.t_.empty() && s.t_.back().second.is_zero()) s.t_.pop_back();
        return s;
    }

    const std::vector<Term>& terms() const { return t_; }
    int trunc() const { return trunc_; }
    bool exact() const { return trunc_ >= kExact; }
    // Zero to the known precision.
    bool is_zero() const { return t_.empty(); }
    int valuation() const { return t_.empty() ? trunc_ : t_.front().first; }
    const C& leading() const {
        if (t_.empty()) throw NonInvertibleLeading("series vanishes to its truncation");
        return t_.front().second;
    }

    C coeff(int n) const {
        if (n >= trunc_) throw OrderTooLow("coefficient q^" + std::to_string(n) + "/24 beyond truncation " +
                                           std::to_string(trunc_) + "/24");
        auto it = std::lower_bound(t_.begin(), t_.end(), n, [](const Term& t, int k) { return t.first < k; });
        if (it != t_.end() && it->first == n) return it->second;
        return C();
    }

    QSeriesT truncated(int n) const {
        QSeriesT s;
        s.trunc_ = std::min(n, trunc_);
        for (const auto& t : t_) {
            if (t.first >= s.trunc_) break;
            s.t_.push_back(t);
        }
        return s;
    }

    // gcd of exponent offsets from the leading term (0 for monomials)
    int lattice_step() const {
        int g = 0;
        for (const auto& t : t_) g = std::gcd(g, t.first - t_.front().first);
        return g;
    }

    QSeriesT& operator+=(const QSeriesT& o) { return *this = combine(*this, o, false); }
    QSeriesT& operator-=(const QSeriesT& o) { return *this = combine(*this, o, true); }
    friend QSeriesT operator+(const QSeriesT& a, const QSeriesT& b) { return combine(a, b, false); }
    friend QSeriesT operator-(const QSeriesT& a, const QSeriesT& b) { return combine(a, b, true); }
    friend QSeriesT operator-(QSeriesT a) {
        for (auto& t : a.t_) t.second = -t.second;
        return a;
    }
    friend QSeriesT operator*(QSeriesT a, const C& c) {
        if (c.is_zero()) {
            a.t_.clear();
            return a;
        }
        for (auto& t : a.t_) t.second = t.second * c;
        return a;
    }
    friend QSeriesT operator*(const C& c, QSeriesT a) { return std::move(a) * c; }
    friend QSeriesT operator*(QSeriesT a, const Rational& c) {
        if (c == 0) {
            a.t_.clear();
            return a;
        }
        for (auto& t : a.t_) t.second *= c;
        return a;
    }
    friend QSeriesT operator*(const Rational& c, QSeriesT a) { return std::move(a) * c; }
    friend QSeriesT operator*(const QSeriesT& a, const QSeriesT& b) { return multiply(a, b); }
    QSeriesT& operator*=(const QSeriesT& b) { return *this = multiply(*this, b); }

    // Equality of known coefficients; truncations must match.
    friend bool operator==(const QSeriesT& a, const QSeriesT& b) {
        if (a.trunc_ != b.trunc_ || a.t_.size() != b.t_.size()) return false;
        for (std::size_t k = 0; k < a.t_.size(); ++k)
            if (a.t_[k].first != b.t_[k].first || a.t_[k].second != b.t_[k].second) return false;
        return true;
    }

    static QSeriesT multiply(const QSeriesT& a, const QSeriesT& b) {
        const int tr = std::min(trunc_add(a.trunc_, b.valuation()), trunc_add(b.trunc_, a.valuation()));
        QSeriesT r;
        r.trunc_ = tr;
        if (a.t_.empty() || b.t_.empty()) return r;
        if (a.t_.size() == 1 || b.t_.size() == 1) {
            const QSeriesT& m = a.t_.size() == 1 ? a : b;
            const QSeriesT& o = a.t_.size() == 1 ? b : a;
            const int s = m.t_[0].first;
            for (const auto& t : o.t_) {
                if (t.first + s >= tr) break;
                r.t_.emplace_back(t.first + s, t.second * m.t_[0].second);
            }
            return r;
        }
        const int lo = a.t_.front().first + b.t_.front().first;
        const long hi = tr >= kExact ? static_cast<long>(a.t_.back().first) + b.t_.back().first + 1 : tr;
        const int g = std::gcd(a.lattice_step(), b.lattice_step());
        const int step = g == 0 ? 1 : g;
        const long size = (hi - lo + step - 1) / step;
        if (size <= 0) return r;
        std::vector<C> acc(static_cast<std::size_t>(size));
        for (const auto& x : a.t_) {
            if (x.first + b.t_.front().first >= hi) break;
            for (const auto& y : b.t_) {
                const long e = static_cast<long>(x.first) + y.first;
                if (e >= hi) break;
                acc[static_cast<std::size_t>((e - lo) / step)] += x.second * y.second;
            }
        }
        for (long k = 0; k < size; ++k)
            if (!acc[k].is_zero()) r.t_.emplace_back(static_cast<int>(lo + k * step), std::move(acc[k]));
        return r;
    }

    // Multiplicative inverse; exact non-monomial inputs need an explicit horizon.
    QSeriesT inverse(int trunc_for_exact = kExact) const {
        if (t_.empty()) throw NonInvertibleLeading("inverse of a series that vanishes to its truncation");
        const int v = t_.front().first;
        const C c0inv = t_.front().second.inverse();
        if (t_.size() == 1 && exact() && trunc_for_exact >= kExact) return monomial(c0inv, -v);
        int out = exact() ? trunc_for_exact : trunc_ - 2 * v;
        if (out >= kExact) throw NonInvertibleLeading("inverse of an exact series needs a truncation");
        if (!exact()) out = std::min(out, trunc_for_exact);
        QSeriesT r;
        r.trunc_ = out;
        int step = lattice_step();
        if (step == 0) step = 1;
        // b_j for offsets j = 0, step, 2 step, ...
        std::vector<C> b;
        for (long j = 0; -v + j < out; j += step) {
            C s;
            if (j == 0) {
                s = c0inv;
            } else {
                for (std::size_t k = 1; k < t_.size(); ++k) {
                    const int off = t_[k].first - v;
                    if (off > j) break;
                    const C& bj = b[static_cast<std::size_t>((j - off) / step)];
                    if (!bj.is_zero()) s += t_[k].second * bj;
                }
                s = -(s * c0inv);
            }
            b.push_back(s);
        }
        for (std::size_t j = 0; j < b.size(); ++j)
            if (!b[j].is_zero()) r.t_.emplace_back(static_cast<int>(-v + static_cast<long>(j) * step), b[j]);
        return r;
    }

    // q d/dq
    QSeriesT derivative() const {
        QSeriesT r;
        r.trunc_ = trunc_;
        for (const auto& t : t_)
            if (t.first != 0) r.t_.emplace_back(t.first, t.second * make_rational(t.first, kDen));
        return r;
    }

    // Inverse of q d/dq on series without constant term.
    QSeriesT primitive() const {
        QSeriesT r;
        r.trunc_ = trunc_;
        for (const auto& t : t_) {
            if (t.first == 0) throw BranchError("primitive of a series with a constant term");
            r.t_.emplace_back(t.first, t.second * make_rational(kDen, t.first));
        }
        return r;
    }

    template <class F>
    QSeriesT map_coeffs(F f) const {
        QSeriesT r;
        r.trunc_ = trunc_;
        for (const auto& t : t_) {
            C c = f(t.second);
            if (!c.is_zero()) r.t_.emplace_back(t.first, std::move(c));
        }
        return r;
    }

    // q -> q^m for a positive integer m.
    QSeriesT rescaled(int m) const {
        QSeriesT r;
        r.trunc_ = exact() ? kExact : trunc_ * m;
        for (const auto& t : t_) r.t_.emplace_back(t.first * m, t.second);
        return r;
    }

    // "(c)*q^(e)" terms joined by " + ", followed by the O-term when truncated.
    std::string to_string() const {
        auto expo = [](long n) {
            Rational e(n, kDen);
            e.canonicalize();
            return e.get_str();
        };
        std::string s;
        for (const auto& t : t_) {
            if (!s.empty()) s += " + ";
            s += "(" + t.second.to_string() + ")";
            if (t.first != 0) s += "*q^(" + expo(t.first) + ")";
        }
        if (!exact()) s += (s.empty() ? "" : " + ") + std::string("O(q^(") + expo(trunc_) + "))";
        return s.empty() ? "0" : s;
    }

    // Evaluation at a point tau of the upper half plane.
    std::complex<double> evaluate(std::complex<double> tau) const {
        const std::complex<double> twopii(0, 2 * std::acos(-1.0));
        std::complex<double> s(0, 0);
        for (const auto& t : t_) s += t.second.numeric() * std::exp(twopii * tau * (double(t.first) / kDen));
        return s;
    }

    // All known coefficients are pi-homogeneous of one common degree.
    bool weight_homogeneous(int* w = nullptr) const {
        bool set = false;
        int p = 0;
        for (const auto& t : t_) {
            if (!t.second.pi_homogeneous()) return false;
            if (!set) {
                p = t.second.pi_min();
                set = true;
            } else if (t.second.pi_min() != p) {
                return false;
            }
        }
        if (w && set) *w = p;
        return true;
    }

private:
    static QSeriesT combine(const QSeriesT& a, const QSeriesT& b, bool negate) {
        QSeriesT r;
        r.trunc_ = std::min(a.trunc_, b.trunc_);
        r.t_.reserve(a.t_.size() + b.t_.size());
        std::size_t i = 0, j = 0;
        while (true) {
            const bool ai = i < a.t_.size() && a.t_[i].first < r.trunc_;
            const bool bj = j < b.t_.size() && b.t_[j].first < r.trunc_;
            if (!ai && !bj) break;
            if (ai && (!bj || a.t_[i].first < b.t_[j].first)) {
                r.t_.push_back(a.t_[i++]);
            } else if (bj && (!ai || b.t_[j].first < a.t_[i].first)) {
                r.t_.emplace_back(b.t_[j].first, negate ? -b.t_[j].second : b.t_[j].second);
                ++j;
            } else {
                C c = negate ? a.t_[i].second - b.t_[j].second : a.t_[i].second + b.t_[j].second;
                if (!c.is_zero()) r.t_.emplace_back(a.t_[i].first, std::move(c));
                ++i;
                ++j;
            }
        }
        return r;
    }

    std::vector<Term> t_;
    int trunc_;
};

using QSeries = QSeriesT<Coeff>;

template <class C>
QSeriesT<C> pow(const QSeriesT<C>& a, int n) {
    if (n < 0) return pow(a.inverse(), -n);
    QSeriesT<C> r(C(1)), base = a;
    while (n) {
        if (n & 1) r = r * base;
        n >>= 1;
        if (n) base = base * base;
    }
    return r;
}

template <class C>
QSeriesT<C> invert(const QSeriesT<C>& a) {
    return a.inverse();
}

template <class C>
QSeriesT<C> sqrt(const QSeriesT<C>& a) {
    if (a.terms().empty()) throw BranchError("square root of a series vanishing to its truncation");
    const int v = a.valuation();
    if (v % 2 != 0) throw BranchError("square root of a series with odd leading exponent");
    if (a.exact() && a.terms().size() > 1) throw BranchError("square root of an exact series needs a truncation");
    const C b0 = a.leading().sqrt_monomial();
    const C inv2b0 = (b0 * Rational(2)).inverse();
    int step = a.lattice_step();
    if (step == 0) step = 1;
    const int out = a.exact() ? kExact : a.trunc() - v / 2;
    if (a.exact()) return QSeriesT<C>::monomial(b0, v / 2);
    std::vector<C> b{b0};
    for (long j = step; v / 2 + j < out; j += step) {
        C s = a.coeff(static_cast<int>(v + j));
        for (long k = step; k < j; k += step) s -= b[k / step] * b[(j - k) / step];
        b.push_back(s * inv2b0);
    }
    std::vector<std::pair<int, C>> terms;
    for (std::size_t k = 0; k < b.size(); ++k)
        if (!b[k].is_zero()) terms.emplace_back(static_cast<int>(v / 2 + static_cast<long>(k) * step), b[k]);
    return QSeriesT<C>::from_terms(std::move(terms), out);
}

template <class C>
QSeriesT<C> log_unit(const QSeriesT<C>& a) {
    if (a.terms().empty() || a.valuation() != 0 || a.leading() != C(1))
        throw BranchError("logarithm requires constant term 1");
    for (const auto& t : a.terms())
        if (t.first < 0) throw BranchError("logarithm of a series with negative exponents");
    if (a.exact() && a.terms().size() > 1) throw BranchError("logarithm of an exact series needs a truncation");
    if (a.exact()) return QSeriesT<C>();
    return (a.derivative() * a.inverse()).primitive();
}

// exp of a series with non-negative exponents; a constant term is accepted
// when it is a rational multiple r*(i pi) with 12 r integral.
template <class C>
QSeriesT<C> exp(const QSeriesT<C>& a) {
    C c0 = C(1);
    QSeriesT<C> rest = a;
    for (const auto& t : a.terms()) {
        if (t.first < 0) throw BranchError("exp of a series with negative exponents");
    }
    if (!a.terms().empty() && a.terms().front().first == 0) {
        const C& k = a.terms().front().second;
        // rational multiple of i pi
        C ratio = k * (C::imag() * C::pi_pow(1)).inverse();
        if (!ratio.is_rational()) throw BranchError("exp of a non-trivial constant term");
        Rational r = ratio.rational_value() * 12;
        if (r.get_den() != 1) throw BranchError("exp(i pi r) outside the tracked roots of unity");
        c0 = C::root_of_unity24(r.get_num().get_si());
        rest = a - QSeriesT<C>(k);
    }
    if (rest.terms().empty()) return QSeriesT<C>(c0, rest.trunc());
    if (a.exact()) throw BranchError("exp of an exact non-constant series needs a truncation");
    const int step = std::gcd(rest.lattice_step(), rest.valuation());
    const int out = rest.trunc();
    std::vector<C> b{C(1)};
    for (long j = step; j < out; j += step) {
        C s;
        for (const auto& t : rest.terms()) {
            if (t.first > j) break;
            const C& bj = b[(j - t.first) / step];
            if (!bj.is_zero()) s += t.second * bj * Rational(t.first);
        }
        b.push_back(s * make_rational(1, j));
    }
    std::vector<std::pair<int, C>> terms;
    for (std::size_t k = 0; k < b.size(); ++k)
        if (!b[k].is_zero()) terms.emplace_back(static_cast<int>(k * step), b[k] * c0);
    return QSeriesT<C>::from_terms(std::move(terms), out);
}

// Substitutes z = s(q) (positive valuation) into sum_k f[k] z^k.
template <class C>
QSeriesT<C> compose(const std::vector<C>& f, const QSeriesT<C>& s) {
    if (s.valuation() <= 0 && !s.terms().empty()) throw BranchError("composition needs positive valuation");
    QSeriesT<C> r = QSeriesT<C>::zero(kExact);
    QSeriesT<C> p(C(1));
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (k > 0) p = p * s;
        if (!f[k].is_zero()) r += p * f[k];
        if (p.terms().empty() && k > 0) break;
    }
    // the unrepresented tail sum_{k >= len} f_k z^k is O(q^{len * v})
    const int tail = static_cast<int>(std::min<long>(kExact, static_cast<long>(f.size()) * s.valuation()));
    return r.truncated(std::min(tail, r.trunc()));
}

// ---------------------------------------------------------------------------
// TLaurent: dense truncated Laurent series in T.
// ---------------------------------------------------------------------------

template <class C>
bool ring_is_zero(const QSeriesT<C>& a) {
    return a.is_zero();
}
inline bool ring_is_zero(const Coeff& a) { return a.is_zero(); }
// Zero with no precision loss attached; only these may be skipped in products.
template <class C>
bool ring_is_exact_zero(const QSeriesT<C>& a) {
    return a.is_zero() && a.exact();
}
inline bool ring_is_exact_zero(const Coeff& a) { return a.is_zero(); }

template <class R>
class TLaurent {
public:
    TLaurent() : val_(0), trunc_(kExact) {}
    // zero + O(T^trunc)
    static TLaurent zero(int trunc) {
        TLaurent s;
        s.val_ = trunc;
        s.trunc_ = trunc;
        return s;
    }
    static TLaurent monomial(const R& c, int e, int trunc) {
        TLaurent s;
        s.trunc_ = trunc;
        s.val_ = e;
        if (e < trunc) s.c_.push_back(c);
        s.normalize();
        return s;
    }
    static TLaurent from_coeffs(int val, std::vector<R> c, int trunc) {
        TLaurent s;
        s.val_ = val;
        s.c_ = std::move(c);
        s.trunc_ = trunc;
        if (static_cast<long>(s.val_) + static_cast<long>(s.c_.size()) > trunc)
            s.c_.resize(std::max(0, trunc - s.val_));
        s.normalize();
        return s;
    }

    int lowest_exponent() const { return val_; }
    int trunc() const { return trunc_; }
    const std::vector<R>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }

    R coeff(int j) const {
        if (j >= trunc_) throw OrderTooLow("T^" + std::to_string(j) + " beyond truncation " + std::to_string(trunc_));
        if (j < val_ || j >= val_ + static_cast<int>(c_.size())) return R();
        return c_[j - val_];
    }

    TLaurent truncated(int t) const {
        TLaurent s = *this;
        s.trunc_ = std::min(t, trunc_);
        if (s.val_ >= s.trunc_) {
            s.c_.clear();
            s.val_ = s.trunc_;
            return s;
        }
        if (s.val_ + static_cast<int>(s.c_.size()) > s.trunc_) s.c_.resize(s.trunc_ - s.val_);
        s.normalize();
        return s;
    }

    friend TLaurent operator+(const TLaurent& a, const TLaurent& b) { return combine(a, b, false); }
    friend TLaurent operator-(const TLaurent& a, const TLaurent& b) { return combine(a, b, true); }
    TLaurent& operator+=(const TLaurent& b) { return *this = combine(*this, b, false); }
    TLaurent& operator-=(const TLaurent& b) { return *this = combine(*this, b, true); }
    friend TLaurent operator-(TLaurent a) {
        for (auto& x : a.c_) x = -x;
        return a;
    }
    template <class S>
    TLaurent scaled(const S& s) const {
        TLaurent r = *this;
        for (auto& x : r.c_) x = x * s;
        r.normalize();
        return r;
    }

    friend TLaurent operator*(const TLaurent& a, const TLaurent& b) {
        const int va = a.val_, vb = b.val_;
        const int tr = std::min(trunc_add(a.trunc_, vb), trunc_add(b.trunc_, va));
        if (a.c_.empty() || b.c_.empty()) return zero(tr);
        const int lo = va + vb;
        int hi = tr;
        if (tr >= kExact) hi = lo + static_cast<int>(a.c_.size() + b.c_.size()) - 1;
        std::vector<R> out(static_cast<std::size_t>(std::max(0, hi - lo)));
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (ring_is_exact_zero(a.c_[i])) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) {
                const std::size_t k = i + j;
                if (static_cast<int>(k) + lo >= hi) break;
                if (ring_is_exact_zero(b.c_[j])) continue;
                out[k] += a.c_[i] * b.c_[j];
            }
        }
        return from_coeffs(lo, std::move(out), tr);
    }

    // Leading coefficient must be invertible in the ring.
    TLaurent inverse() const {
        if (c_.empty()) throw NonInvertibleLeading("inverse of a T-series vanishing to its truncation");
        if (trunc_ >= kExact && c_.size() > 1) throw NonInvertibleLeading("inverse of an exact T-polynomial");
        const R inv0 = c_[0].inverse();
        const int out = trunc_ >= kExact ? -val_ + 1 : trunc_ - 2 * val_;
        const int n = out + val_;
        std::vector<R> b;
        b.reserve(std::max(0, n));
        for (int j = 0; j < n; ++j) {
            if (j == 0) {
                b.push_back(inv0);
                continue;
            }
            R s;
            for (int k = 1; k <= j && k < static_cast<int>(c_.size()); ++k) {
                if (ring_is_exact_zero(c_[k]) || ring_is_exact_zero(b[j - k])) continue;
                s += c_[k] * b[j - k];
            }
            b.push_back(-(s * inv0));
        }
        return from_coeffs(-val_, std::move(b), out);
    }

    R residue() const {
        if (trunc_ < 0) throw OrderTooLow("residue needs truncation >= 0");
        return coeff(-1);
    }

    // d/dT
    TLaurent derivative() const {
        std::vector<R> out;
        for (std::size_t k = 0; k < c_.size(); ++k) out.push_back(c_[k] * Rational(val_ + static_cast<int>(k)));
        return from_coeffs(val_ - 1, std::move(out), trunc_ >= kExact ? kExact : trunc_ - 1);
    }

    // Primitive with zero constant term.
    TLaurent primitive() const {
        std::vector<R> out;
        for (std::size_t k = 0; k < c_.size(); ++k) {
            const int e = val_ + static_cast<int>(k);
            if (e == -1) {
                if (!ring_is_zero(c_[k])) throw BranchError("primitive of a series with a T^-1 term");
                out.push_back(R());
                continue;
            }
            out.push_back(c_[k] * make_rational(1, e + 1));
        }
        return from_coeffs(val_ + 1, std::move(out), trunc_ >= kExact ? kExact : trunc_ + 1);
    }

    // T -> c T for a rational c
    TLaurent scale_variable(const Rational& c) const {
        TLaurent r = *this;
        for (std::size_t k = 0; k < r.c_.size(); ++k) {
            const int e = val_ + static_cast<int>(k);
            Rational f;
            mpq_class base = c;
            mpq_class p(1);
            const int ae = e < 0 ? -e : e;
            for (int j = 0; j < ae; ++j) p *= base;
            if (e < 0) p = 1 / p;
            f = p;
            r.c_[k] = r.c_[k] * f;
        }
        r.normalize();
        return r;
    }
    TLaurent negate_variable() const { return scale_variable(Rational(-1)); }

    // max over k of power: T^k in range
    template <class F>
    auto map(F f) const -> TLaurent<decltype(f(std::declval<R>()))> {
        using S = decltype(f(std::declval<R>()));
        std::vector<S> out;
        for (const auto& x : c_) out.push_back(f(x));
        return TLaurent<S>::from_coeffs(val_, std::move(out), trunc_);
    }

private:
    void normalize() {
        std::size_t lead = 0;
        while (lead < c_.size() && ring_is_zero(c_[lead])) ++lead;
        if (lead == c_.size()) {
            c_.clear();
            val_ = trunc_;
            return;
        }
        if (lead) {
            c_.erase(c_.begin(), c_.begin() + static_cast<long>(lead));
            val_ += static_cast<int>(lead);
        }
        while (!c_.empty() && ring_is_zero(c_.back())) c_.pop_back();
    }

    static TLaurent combine(const TLaurent& a, const TLaurent& b, bool negate) {
        const int tr = std::min(a.trunc_, b.trunc_);
        int lo = std::min(a.c_.empty() ? tr : a.val_, b.c_.empty() ? tr : b.val_);
        int hi = std::max(a.val_ + static_cast<int>(a.c_.size()), b.val_ + static_cast<int>(b.c_.size()));
        hi = std::min(hi, tr);
        if (lo >= hi) return zero(tr);
        std::vector<R> out(static_cast<std::size_t>(hi - lo));
        for (std::size_t k = 0; k < a.c_.size(); ++k) {
            int e = a.val_ + static_cast<int>(k);
            if (e >= hi) break;
            out[e - lo] = a.c_[k];
        }
        for (std::size_t k = 0; k < b.c_.size(); ++k) {
            int e = b.val_ + static_cast<int>(k);
            if (e >= hi) break;
            if (negate)
                out[e - lo] -= b.c_[k];
            else
                out[e - lo] += b.c_[k];
        }
        return from_coeffs(lo, std::move(out), tr);
    }

    int val_;
    std::vector<R> c_;
    int trunc_;
};

// Compositional inverse of a(T) = a1 T + a2 T^2 + ...
template <class R>
TLaurent<R> reversion(const TLaurent<R>& a) {
    if (a.is_zero() || a.lowest_exponent() != 1)
        throw NonInvertibleLeading("reversion needs zero constant term and a nonzero linear term");
    const int n = a.trunc();
    if (n >= kExact) throw NonInvertibleLeading("reversion of an exact polynomial needs a truncation");
    const R inv1 = a.coeff(1).inverse();
    // b = sum_{k<n} b_k T^k; solve order by order
    std::vector<R> b(static_cast<std::size_t>(std::max(n, 2)));
    b[1] = inv1;
    for (int m = 2; m < n; ++m) {
        // coefficient of T^m in sum_k a_k b(T)^k with b_m still zero
        TLaurent<R> bt = TLaurent<R>::from_coeffs(0, b, m + 1);
        TLaurent<R> p = bt;
        R s;
        for (int k = 2; k <= m; ++k) {
            p = p * bt;
            R ak = a.coeff(k);
            if (ring_is_zero(ak)) continue;
            R pm = p.coeff(m);
            if (!ring_is_zero(pm)) s += ak * pm;
        }
        b[m] = -(s * inv1);
    }
    b.resize(static_cast<std::size_t>(n));
    return TLaurent<R>::from_coeffs(0, std::move(b), n);
}

// Composition a(b(T)) with b of positive valuation, a a power series.
template <class R>
TLaurent<R> compose(const TLaurent<R>& a, const TLaurent<R>& b) {
    if (a.lowest_exponent() < 0) throw BranchError("composition of a Laurent series with poles");
    if (!b.is_zero() && b.lowest_exponent() < 1) throw BranchError("inner series must vanish at T = 0");
    const int vb = b.is_zero() ? b.trunc() : b.lowest_exponent();
    int tr = a.trunc() >= kExact ? kExact : a.trunc() * vb;
    tr = std::min(tr, b.trunc());
    TLaurent<R> r = TLaurent<R>::zero(tr);
    TLaurent<R> p = TLaurent<R>::monomial(R(1), 0, tr);
    const int top = std::min(a.trunc(), tr);
    for (int k = 0; k < top; ++k) {
        if (k > 0) p = (p * b).truncated(tr);
        R ak = a.coeff(k);
        if (!ring_is_zero(ak)) r += p.scaled(ak);
        if (p.is_zero()) break;
    }
    return r.truncated(tr);
}

}  // namespace toprec

#endif
