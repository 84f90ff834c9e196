#include "doctest.h"

#include <random>

#include "toprec/coeffring.hpp"

using namespace toprec;

namespace {

Scalar random_scalar(std::mt19937& rng) {
    std::uniform_int_distribution<int> num(-40, 40), den(1, 12), ex(-5, 5);
    Scalar::Exponents e{};
    for (auto& x : e) x = ex(rng);
    int n = num(rng);
    if (n == 0) n = 1;
    return Scalar(make_rational(n, den(rng)), e);
}

Coeff random_coeff(std::mt19937& rng) {
    Coeff c;
    std::uniform_int_distribution<int> count(1, 4);
    int k = count(rng);
    for (int j = 0; j < k; ++j) {
        Scalar s = random_scalar(rng);
        Scalar::Exponents e = s.exponents();
        e[0] = 2;  // keep pi-homogeneous so inverses exist
        c += Coeff(Scalar(s.rational(), e));
    }
    return c;
}

}  // namespace

TEST_CASE("scalar relations") {
    Scalar pi = Scalar::constant(Const::Pi);
    CHECK(pi.pow(2) * pi.pow(-1) == pi);
    Scalar r4 = Scalar::constant(Const::Cbrtm4);
    CHECK(r4 * r4 * r4 == Scalar(-4));
    CHECK(Scalar::constant(Const::Zeta6).pow(3) == Scalar(-1));
    CHECK(Scalar::constant(Const::I).pow(2) == Scalar(-1));
    CHECK(Scalar::constant(Const::Sqrt3).pow(2) == Scalar(3));
    CHECK(Scalar::constant(Const::Cbrt2).pow(3) == Scalar(2));
    CHECK(Scalar::constant(Const::Sqrt2).pow(2) == Scalar(2));
    CHECK(Scalar::constant(Const::Cbrt2).pow(-1) * Scalar(2) == Scalar::constant(Const::Cbrt2).pow(2));
}

TEST_CASE("scalar rational part") {
    CHECK(scalar_rational_part(Scalar(make_rational(3, 2))) == make_rational(3, 2));
    CHECK(scalar_rational_part(Scalar(make_rational(-45, 8))) == make_rational(-45, 8));
    CHECK_THROWS_AS(scalar_rational_part(Scalar::constant(Const::Pi, 2)), NonRational);
}

TEST_CASE("scalar zero and rendering") {
    Scalar z(Rational(0), Scalar::Exponents{3, 1, 2, 1, 1, 2, 1});
    CHECK(z.is_zero());
    CHECK(z == Scalar());
    Scalar s(make_rational(-3, 4), Scalar::Exponents{2, 1, 0, 2, 1, 0, 0});
    CHECK(s.to_string() == "-3/4 * pi^2 * i^1 * zeta6^0 * cbrt2^2 * sqrt3^1 * cbrtm4^0");
    Scalar t(make_rational(1, 2), Scalar::Exponents{0, 0, 0, 0, 0, 0, 1});
    CHECK(t.to_string() == "1/2 * pi^0 * i^0 * zeta6^0 * cbrt2^0 * sqrt3^0 * cbrtm4^0 * sqrt2^1");
    CHECK_THROWS_AS(Scalar().inverse(), DivisionByZero);
}

TEST_CASE("scalar multiplication properties") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        Scalar a = random_scalar(rng), b = random_scalar(rng), c = random_scalar(rng);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * b == b * a);
        // reducing before or after the product gives the same value
        Scalar::Exponents raw{};
        for (int k = 0; k < kNumConsts; ++k) raw[k] = a.exponents()[k] + b.exponents()[k];
        CHECK(Scalar(a.rational() * b.rational(), raw) == a * b);
        Scalar d = a;
        d.reduce();
        CHECK(d == a);
        CHECK(a * a.inverse() == Scalar(1));
    }
}

TEST_CASE("coeff field embedding") {
    Coeff z6 = Coeff::zeta6();
    CHECK(z6.pow(3) == Coeff(-1));
    CHECK(z6.pow(6) == Coeff(1));
    CHECK(Coeff::cbrtm4().pow(3) == Coeff(-4));
    CHECK(Coeff::root_of_unity24(1).pow(24) == Coeff(1));
    CHECK(Coeff::root_of_unity24(6) == Coeff::imag());
    CHECK(Coeff::root_of_unity24(4) == z6);
    CHECK(Coeff::root_of_unity24(3) * Coeff::sqrt2() == Coeff(1) + Coeff::imag());
    // numeric value of an embedded scalar matches the direct product
    std::mt19937 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        Scalar s = random_scalar(rng);
        auto a = Coeff(s).numeric(), b = s.numeric();
        CHECK(std::abs(a - b) < 1e-9 * (1 + std::abs(b)));
    }
}

TEST_CASE("coeff ring axioms and inverses") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        Coeff a = random_coeff(rng), b = random_coeff(rng), c = random_coeff(rng);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a * b == b * a);
        if (!a.is_zero()) CHECK(a * a.inverse() == Coeff(1));
    }
    CHECK_THROWS_AS(Coeff().inverse(), DivisionByZero);
    CHECK_THROWS_AS((Coeff::pi_pow(1) + Coeff(1)).inverse(), NonInvertibleLeading);
}
