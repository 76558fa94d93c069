#include "cassels/curve.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace cassels;
using namespace cassels::curve;

namespace {

SquareClassTriple triple(long a, long b, long c) { return SquareClassTriple::make(a, b, c); }

Point<Fp> random_point(const CurveModel<Fp>& E, std::mt19937_64& rng) {
    const std::uint64_t p = E.one.modulus();
    for (;;) {
        const Fp x = Fp::raw(rng() % p, p);
        auto y = E.f(x).sqrt();
        if (!y || y->is_zero()) continue;
        return Point<Fp>::affine(x, (rng() & 1U) ? *y : -*y);
    }
}

SplitCurve random_split_curve(std::mt19937_64& rng) {
    for (;;) {
        const long a = oracle::random_nonzero(rng, 30);
        const long b = oracle::random_nonzero(rng, 30);
        const long c = -a - b;
        if (a == b || b == c || a == c) continue;
        return SplitCurve::from_roots(a, b, c);
    }
}

std::uint64_t good_prime(const SplitCurve& E, std::mt19937_64& rng) {
    for (;;) {
        const std::uint64_t p = 50 + rng() % 2000;
        if (!numth::is_prime(Integer(static_cast<unsigned long>(p)))) continue;
        if (mpz_divisible_ui_p(Integer(2 * E.disc()).get_mpz_t(), p)) continue;
        return p;
    }
}

}  // namespace

TEST_SUITE("curve") {

TEST_CASE("from_roots normalization") {
    auto E = SplitCurve::from_roots(-1, 0, 1);
    CHECK(E.roots() == std::array<Integer, 3>{-1, 0, 1});
    CHECK(E.A() == -1);
    CHECK(E.B() == 0);
    CHECK(E.disc() == 4);
    CHECK(E.bad_primes() == std::vector<Integer>{2});

    auto F = SplitCurve::from_roots(-6, 0, 6);
    CHECK(F.A() == -36);
    CHECK(F.bad_primes() == std::vector<Integer>{2, 3});

    auto G = SplitCurve::from_roots(Rational(1, 2), 0, Rational(-1, 2));
    CHECK(G.roots() == std::array<Integer, 3>{2, 0, -2});
    CHECK(G.scale() == 2);

    auto H = SplitCurve::from_roots(1, 2, 6);  // mean 3
    CHECK(H.roots() == std::array<Integer, 3>{-2, -1, 3});
    CHECK(H.shift() == 3);
    CHECK_THROWS_AS(SplitCurve::from_roots(1, 1, 2), CurveError);
}

TEST_CASE("from_coefficients") {
    auto E = SplitCurve::from_coefficients(-1, 0);
    CHECK(E.roots() == std::array<Integer, 3>{-1, 0, 1});
    auto F = SplitCurve::from_coefficients(-36, 0);
    CHECK(F.roots() == std::array<Integer, 3>{-6, 0, 6});
    auto G = SplitCurve::from_coefficients(-7, 6);  // (x-1)(x-2)(x+3)
    CHECK(G.roots() == std::array<Integer, 3>{-3, 1, 2});
    CHECK_THROWS_WITH_AS(SplitCurve::from_coefficients(0, 1), "2-torsion not fully rational", CurveError);
    CHECK_THROWS_WITH_AS(SplitCurve::from_coefficients(-3, 2), "singular curve", CurveError);
    CHECK_THROWS_WITH_AS(SplitCurve::from_coefficients(-2, 1), "2-torsion not fully rational", CurveError);
}

TEST_CASE("group law examples") {
    auto E = SplitCurve::from_roots(-6, 0, 6);
    const auto M = rational_model(E);
    const RationalPoint P = RationalPoint::affine(-3, 9);
    const RationalPoint T = RationalPoint::affine(0, 0);
    CHECK(add(P, RationalPoint::at_infinity(), M) == P);
    CHECK(add(P, T, M) == RationalPoint::affine(12, 36));
    CHECK(translate_by_torsion(P, 1, M) == RationalPoint::affine(12, 36));

    auto E1 = SplitCurve::from_roots(-1, 0, 1);
    const auto M1 = rational_model(E1);
    CHECK(add(RationalPoint::affine(0, 0), RationalPoint::affine(0, 0), M1).infinity);
    CHECK(translate_by_torsion(torsion_point(0, M1), 1, M1) == torsion_point(2, M1));
}

TEST_CASE("descent_image examples") {
    auto E1 = SplitCurve::from_roots(-1, 0, 1);
    CHECK(descent_image(RationalPoint::at_infinity(), E1) == triple(1, 1, 1));
    CHECK(descent_image(RationalPoint::affine(0, 0), E1) == triple(1, -1, -1));
    CHECK(descent_image(RationalPoint::affine(-1, 0), E1) == triple(2, -1, -2));
    CHECK(descent_image(RationalPoint::affine(1, 0), E1) == triple(2, 1, 2));
    auto E = SplitCurve::from_roots(-6, 0, 6);
    CHECK(descent_image(RationalPoint::affine(-3, 9), E) == triple(3, -3, -1));
    CHECK_THROWS_AS(triple(2, 1, -2), CurveError);
}

TEST_CASE("point_search") {
    auto E1 = SplitCurve::from_roots(-1, 0, 1);
    auto pts = point_search(E1, 10);
    CHECK(pts.size() == 4);
    CHECK(pts[0].infinity);

    auto E = SplitCurve::from_roots(-6, 0, 6);
    auto found = point_search(E, 20);
    auto has = [&](long x, long y) {
        return std::find(found.begin(), found.end(), RationalPoint::affine(x, y)) != found.end();
    };
    CHECK(has(-3, 9));
    CHECK(has(12, 36));
    CHECK(has(18, 72));
    // f(-2) = 64, so (-2, 8) already has height 2
    auto small = point_search(E, 2);
    CHECK(small.size() == 6);
    CHECK(std::find(small.begin(), small.end(), RationalPoint::affine(-2, 8)) != small.end());
    for (const auto& P : found) CHECK(on_curve(P, rational_model(E)));
}

TEST_CASE("descent_image is a homomorphism on found points") {
    auto E = SplitCurve::from_roots(-6, 0, 6);
    const auto M = rational_model(E);
    auto pts = point_search(E, 100);
    for (const auto& P : pts) {
        for (const auto& Q : pts) {
            CHECK(descent_image(add(P, Q, M), E) == descent_image(P, E) * descent_image(Q, E));
        }
    }
}

TEST_CASE("torsion translation identities over finite fields") {
    std::mt19937_64 rng(101);
    for (int c = 0; c < 10; ++c) {
        const SplitCurve E = random_split_curve(rng);
        const std::uint64_t p = good_prime(E, rng);
        const auto M = reduce_mod(E, p);
        for (int t = 0; t < 100; ++t) {
            const auto P = random_point(M, rng);
            for (int i = 0; i < 3; ++i) {
                const auto [j, k] = cyclic_complement(i);
                const Fp ei = M.e[i], ej = M.e[j], ek = M.e[k];
                if (P.x == ei || P.x == ej || P.x == ek) continue;
                const auto Q = add(P, torsion_point(i, M), M);
                CHECK(translate_by_torsion(P, i, M) == Q);
                const Fp d = P.x - ei;
                CHECK((Q.x - ei) / d == (ej - ei) * (ek - ei) / (d * d));
                CHECK((Q.x - ei) / d == -(Q.y / P.y));
                const auto R = add(P, torsion_point(j, M), M);
                CHECK(R.x - ei == (P.x - ek) * (ej - ei) / (P.x - ej));
                CHECK(Q.y * (P.x - ek) / (P.y * (Q.x - ek)) == (P.x - ek) * (P.x - ek) * (ej - ei) / (P.y * P.y));
            }
        }
    }
}

TEST_CASE("group law is associative and commutative over F_p") {
    std::mt19937_64 rng(7);
    const SplitCurve E = random_split_curve(rng);
    const auto M = reduce_mod(E, good_prime(E, rng));
    for (int t = 0; t < 200; ++t) {
        const auto P = random_point(M, rng), Q = random_point(M, rng), R = random_point(M, rng);
        CHECK(add(P, Q, M) == add(Q, P, M));
        CHECK(add(add(P, Q, M), R, M) == add(P, add(Q, R, M), M));
        CHECK(on_curve(add(P, Q, M), M));
    }
    CHECK_THROWS_AS(reduce_mod(E, 2), CurveError);
}

}
