#include "cassels/padic.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace cassels;
using namespace cassels::numth;

TEST_SUITE("padic") {

TEST_CASE("padic_sqrt examples") {
    auto r = padic_sqrt(25, 5, 4);
    REQUIRE(r);
    CHECK(r->valuation() == 1);
    CHECK((r->unit() % 5 == 1 || r->unit() % 5 == 4));

    auto s = padic_sqrt(2, 7, 1);
    REQUIRE(s);
    CHECK((s->unit() % 7 == 3 || s->unit() % 7 == 4));

    CHECK_FALSE(padic_sqrt(5, 2, 3));
    CHECK_FALSE(padic_sqrt(3, 5, 10));
    CHECK_FALSE(padic_sqrt(Rational(2, 9), 2, 10));
    CHECK_THROWS_AS(padic_sqrt(2, 7, kPrecisionCap + 1), PrecisionError);
}

TEST_CASE("padic_sqrt squares back to q") {
    std::mt19937_64 rng(77);
    int checked = 0;
    for (long p : {2L, 3L, 5L, 13L}) {
        while (checked < 50 * (p == 2 ? 1 : p == 3 ? 2 : p == 5 ? 3 : 4)) {
            const Rational base(oracle::random_nonzero(rng, 500), std::abs(oracle::random_nonzero(rng, 60)));
            // a local square that is not a global square: base^2 * (1 + p^3 t)
            const long t = oracle::random_nonzero(rng, 20);
            Rational q = base * base * (1 + oracle::ipow(p, 3) * t);
            q.canonicalize();
            const long prec = 30;
            auto w = padic_sqrt(q, p, prec);
            REQUIRE(w);
            const PAdicNumber sq = *w * *w;
            const PAdicNumber target = PAdicNumber::from_rational(q, p, prec);
            CHECK(sq.valuation() == target.valuation());
            CHECK(agree(sq, target));
            CHECK(sq.precision() >= prec - 2);
            ++checked;
        }
    }
}

TEST_CASE("arithmetic and precision tracking") {
    const Integer p = 3;
    const PAdicNumber a = PAdicNumber::from_rational(Rational(10, 9), p, 20);
    CHECK(a.valuation() == -2);
    const PAdicNumber b = PAdicNumber::from_rational(Rational(1, 9), p, 20);
    // 10/9 - 1/9 = 1
    const PAdicNumber d = a - b;
    CHECK(d.valuation() == 0);
    CHECK(agree(d, PAdicNumber::from_rational(1, p, 20)));
    // cancellation to zero is refused
    CHECK_THROWS_AS(a - a, PrecisionError);
    CHECK_THROWS_AS(a.plus(Rational(-10, 9)), PrecisionError);
    // scaling by exact rationals keeps precision
    CHECK(a.scaled(Rational(27, 5)).precision() == a.precision());
    CHECK(a.scaled(Rational(27, 5)).valuation() == 1);
}

TEST_CASE("hilbert symbol of p-adic approximations matches the rational one") {
    std::mt19937_64 rng(9);
    for (long p : {2L, 3L, 7L}) {
        for (int t = 0; t < 100; ++t) {
            const Rational a(oracle::random_nonzero(rng, 400), std::abs(oracle::random_nonzero(rng, 30)));
            const Rational b(oracle::random_nonzero(rng, 400));
            const PAdicNumber x = PAdicNumber::from_rational(a, p, 10);
            CHECK(hilbert_symbol(x, b) == hilbert_symbol(a, b, Place::finite(p)));
        }
    }
    const PAdicNumber coarse = PAdicNumber::from_rational(5, 2, 2);
    CHECK_THROWS_AS(hilbert_symbol(coarse, Rational(3)), PrecisionError);
}

TEST_CASE("real intervals") {
    const RealInterval r = RealInterval::sqrt(2, 64);
    CHECK(r.lo * r.lo <= 2);
    CHECK(r.hi * r.hi >= 2);
    CHECK(r.width() <= Rational(1, Integer(1) << 64));
    CHECK(r.sign() == 1);
    CHECK((-r).sign() == -1);
    const RealInterval z = r - r;
    CHECK(z.sign() == 0);
    CHECK_THROWS_AS(hilbert_symbol(z, Rational(-1)), PrecisionError);
    CHECK(hilbert_symbol(-r, Rational(-1)) == -1);
    CHECK(hilbert_symbol(-r, Rational(3)) == 1);
    const RealInterval sq = r * r;
    CHECK(sq.lo <= 2);
    CHECK(sq.hi >= 2);
}

TEST_CASE("default precision") {
    CHECK(default_precision(2, 64) == 20 + 2 * 7);
    CHECK(default_precision(3, 64) == 20);
}

}
