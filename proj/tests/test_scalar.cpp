#include "mlh/dual.hpp"
#include "mlh/quadnum.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mlh;

namespace {

QuadNum rnd_quad(std::mt19937_64& rng, std::int64_t disc) {
    auto r = [&]() {
        long num = long(rng() % 21) - 10;
        long den = long(rng() % 9) + 1;
        return Rational(num, den);
    };
    return QuadNum(r(), r(), disc);
}

} // namespace

TEST_CASE("metallic numbers: closed forms") {
    QuadNum golden = metallic_sigma(1, 1);
    CHECK(golden.a() == Rational(1, 2));
    CHECK(golden.b() == Rational(1, 2));
    CHECK(golden.disc() == 5);

    QuadNum silver = metallic_sigma(2, 1);
    CHECK(silver.a() == Rational(1));
    CHECK(silver.b() == Rational(1, 2));
    CHECK(silver.disc() == 8); // carried unreduced: 1 + (1/2) sqrt(8) = 1 + sqrt(2)
    CHECK(silver.to_double() == doctest::Approx(1.0 + std::sqrt(2.0)));
}

TEST_CASE("metallic numbers: defining equation, exact, p,q <= 20") {
    for (long p = 1; p <= 20; ++p)
        for (long q = 1; q <= 20; ++q) {
            QuadNum s = metallic_sigma(p, q);
            QuadNum r = s * s - QuadNum(p) * s - QuadNum(q);
            CHECK(r.is_zero());
        }
}

TEST_CASE("metallic numbers: domain errors") {
    CHECK_THROWS_AS(metallic_sigma(0, 1), domain_error);
    CHECK_THROWS_AS(metallic_sigma(1, 0), domain_error);
}

TEST_CASE("conjugate is the other root") {
    QuadNum s = metallic_sigma(1, 1);
    QuadNum c = quad_conjugate(s);
    CHECK(c.a() == Rational(1, 2));
    CHECK(c.b() == Rational(-1, 2)); // (1 - sqrt 5)/2

    for (long p = 1; p <= 6; ++p)
        for (long q = 1; q <= 6; ++q) {
            QuadNum sig = metallic_sigma(p, q);
            QuadNum con = quad_conjugate(sig);
            CHECK((con + sig) == QuadNum(p));
            CHECK((con * sig) == QuadNum(-q));
        }
}

TEST_CASE("field operations") {
    QuadNum s = metallic_sigma(1, 1);
    CHECK((QuadNum(1) / s) == s - QuadNum(1)); // 1/sigma = sigma - 1

    // sigma * (p - sigma) = -q
    for (long p = 1; p <= 5; ++p)
        for (long q = 1; q <= 5; ++q) {
            QuadNum sig = metallic_sigma(p, q);
            CHECK((sig * (QuadNum(p) - sig)) == QuadNum(-q));
        }

    // (1 + sqrt 2)^2 = 3 + 2 sqrt 2, by hand
    QuadNum silver = metallic_sigma(2, 1);
    QuadNum sq = silver * silver;
    CHECK(sq.to_double() == doctest::Approx(3.0 + 2.0 * std::sqrt(2.0)));
    CHECK((sq - QuadNum(2) * silver - QuadNum(1)).is_zero());

    CHECK_THROWS_AS(silver / QuadNum(0), arithmetic_error);
    CHECK_THROWS_AS(silver + metallic_sigma(1, 1), domain_error); // disc mismatch
}

TEST_CASE("field axioms on randomized triples") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        QuadNum a = rnd_quad(rng, 5), b = rnd_quad(rng, 5), c = rnd_quad(rng, 5);
        CHECK(((a + b) + c) == (a + (b + c)));
        CHECK(((a * b) * c) == (a * (b * c)));
        CHECK((a * (b + c)) == (a * b + a * c));
        CHECK((a + b) == (b + a));
        CHECK((a * b) == (b * a));
        if (!b.is_zero()) CHECK(((a / b) * b) == a);
        CHECK((a - a).is_zero());
    }
}

TEST_CASE("rational normalization") {
    Rational r(6, -4);
    CHECK(r.num() == -3);
    CHECK(r.den() == 2);
    CHECK(Rational(0, 17) == Rational(0));
    CHECK_THROWS_AS(Rational(1, 0), arithmetic_error);
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
}

TEST_CASE("dual numbers obey the Leibniz rule against finite differences") {
    // f(x, y) = x^4 - 3 x^2 y + 2 y^3 - x y + 5 (degree 4)
    auto f = [](auto x, auto y) {
        return x * x * x * x - decltype(x)(3.0) * x * x * y + decltype(x)(2.0) * y * y * y -
               x * y + decltype(x)(5.0);
    };
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const double h = 1e-6;
    for (int iter = 0; iter < 100; ++iter) {
        double x = u(rng), y = u(rng);
        DualScalar dx = DualScalar::variable(x, 0, 2);
        DualScalar dy = DualScalar::variable(y, 1, 2);
        DualScalar r = f(dx, dy);
        double fx = (f(x + h, y) - f(x - h, y)) / (2 * h);
        double fy = (f(x, y + h) - f(x, y - h)) / (2 * h);
        double scale = std::max({1.0, std::abs(fx), std::abs(fy)});
        CHECK(std::abs(r.partial(0) - fx) / scale < 1e-7);
        CHECK(std::abs(r.partial(1) - fy) / scale < 1e-7);
    }
}

TEST_CASE("dual division quotient rule") {
    DualScalar x = DualScalar::variable(1.7, 0, 1);
    DualScalar r = (x * x + DualScalar(1.0)) / x; // f = x + 1/x, f' = 1 - 1/x^2
    CHECK(r.v == doctest::Approx(1.7 + 1.0 / 1.7));
    CHECK(r.partial(0) == doctest::Approx(1.0 - 1.0 / (1.7 * 1.7)));
}
