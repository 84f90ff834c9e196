#pragma once

#include <string>

#include "recursion.hpp"

namespace toprec {

struct HaeReport {
    std::string geometry;
    int g = 0;
    QSeries lhs, rhs, residual;
    Coeff propagator_ratio;
};

// The ratio of Y-derivatives of the propagator and of the eta1 generator.
inline Coeff kp2_propagator_ratio() { return Coeff::monomial(make_rational(3, 2), -2); }

inline JacobiPoly d_eta1(const JacobiPoly& p) { return p.d_eta1(); }

// Partial derivative in the generator of a polynomial in eta1 whose
// coefficients are indexed by the power.
inline std::vector<QSeries> d_eta1(const std::vector<QSeries>& poly) {
    std::vector<QSeries> r;
    for (std::size_t k = 1; k < poly.size(); ++k) r.push_back(poly[k] * Rational(static_cast<long>(k)));
    return r;
}

// Derivative in the flat coordinate t0 = T/3, with Q = exp(T).
class FlatDerivative {
public:
    FlatDerivative(const GeometryData& g, int order) {
        if (g.name != "KP2") throw NotImplementedForGeometry("flat derivative is implemented for KP2");
        ClosedMirror cm = mirror_map_closed(g, order);
        inv_dlogQ_ = dlog(cm.Q).inverse() * Rational(3);
    }
    QSeries operator()(const QSeries& f) const { return f.derivative() * inv_dlogQ_; }
    // d_t0 = scale() * q d/dq
    const QSeries& scale() const { return inv_dlogQ_; }

private:
    QSeries inv_dlogQ_;
};

// Value of d F_g / d eta1 with eta1 at its holomorphic q-series value.
inline QSeries eta1_derivative_value(const JacobiPoly& F, const EllipticData& ell) {
    QSeries eta1 = ell.eta1();
    QSeries r = QSeries::zero(kExact);
    for (const auto& [k, c] : F.terms()) {
        if (k.slots) throw InvariantViolation("free energy has point slots");
        if (k.y) throw InvariantViolation("free energy has a Schiffer variable");
        if (k.eta > 0) r += c * Rational(static_cast<long>(k.eta)) * pow(eta1, k.eta - 1);
    }
    return r;
}

// Closed-sector identity at genus two:
//   dF2/d eta1 = (ratio/2) (d_t0^2 F1 + (d_t0 F1)^2).
inline HaeReport yy_check(const GeometryData& g, int gg, int q_order, const Coeff& ratio) {
    if (g.name != "KP2") throw NotImplementedForGeometry("anomaly check is implemented for KP2");
    if (gg != 2) throw ConfigError("anomaly check is implemented at genus two");
    Recursion rec(g);
    HaeReport rep;
    rep.geometry = g.name;
    rep.g = gg;
    rep.propagator_ratio = ratio;
    rep.lhs = eta1_derivative_value(rec.free_energy(2), *g.ell);
    FlatDerivative d(g, q_order + 1);
    GenusOne g1 = genus_one_free_energy(g, q_order + 1);
    QSeries dF1 = g1.dF1 * d.scale();  // d_t0 F1
    rep.rhs = (d(dF1) + dF1 * dF1) * ratio * make_rational(1, 2);
    rep.residual = (rep.lhs - rep.rhs).truncated(q_order * kDen);
    if (rep.residual.trunc() < q_order * kDen) throw OrderTooLow("geometry precision below the requested q-order");
    return rep;
}

}  // namespace toprec
