#include "cassels/selmer.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace cassels;
using namespace cassels::selmer;
using curve::SquareClassTriple;

namespace {

SquareClassTriple triple(long a, long b, long c) { return SquareClassTriple::make(a, b, c); }

std::set<SquareClassTriple> as_set(const std::vector<SquareClassTriple>& v) { return {v.begin(), v.end()}; }

// Local solubility witnessed directly: some x from a small search set has
// (x - e_i)/beta_i a square at v for every i, or x = e_i with the other two
// ratios squares.
bool witnessed_locally(const SplitCurve& E, const SquareClassTriple& beta, const Place& v) {
    auto ok = [&](const Rational& x) {
        for (int i = 0; i < 3; ++i) {
            const Rational r = (x - E.e(i)) / beta[i];
            if (r == 0) continue;
            if (!numth::is_square_local(r, v)) return false;
        }
        return true;
    };
    for (long d = 1; d <= 64; d *= 2) {
        for (long n = -400; n <= 400; ++n) {
            if (ok(Rational(n, d * d))) return true;
        }
    }
    return false;
}

}  // namespace

TEST_SUITE("selmer") {

TEST_CASE("candidate space") {
    auto E = SplitCurve::from_roots(-1, 0, 1);
    CHECK(candidate_space(E).size() == 4);
    auto F = SplitCurve::from_roots(-6, 0, 6);
    CHECK(candidate_space(F).size() == 6);
    for (const auto& g : candidate_space(F)) CHECK((g[0] * g[1] * g[2] > 0));
}

TEST_CASE("local solubility examples") {
    auto E = SplitCurve::from_roots(-1, 0, 1);
    for (const Place& v : {Place::infinity(), Place::finite(2), Place::finite(3), Place::finite(5)}) {
        CHECK(is_locally_soluble(TwoCovering::make(E, SquareClassTriple::trivial()), v));
    }
    CHECK_FALSE(is_locally_soluble(TwoCovering::make(E, triple(-1, -1, 1)), Place::infinity()));
    CHECK(is_locally_soluble(TwoCovering::make(E, triple(1, -1, -1)), Place::infinity()));
}

TEST_CASE("local image dimensions") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 8; ++t) {
        const long a = oracle::random_nonzero(rng, 40), b = oracle::random_nonzero(rng, 40);
        if (a == b || a == -a - b || b == -a - b) continue;
        auto E = SplitCurve::from_roots(a, b, -a - b);
        for (const Place& v : relevant_places(E)) {
            CHECK(local_image(E, v).basis.size() == expected_image_dimension(v));
        }
    }
}

TEST_CASE("y^2 = x^3 - x") {
    auto E = SplitCurve::from_roots(-1, 0, 1);
    auto S = compute_selmer(E);
    CHECK(S.dim == 2);
    const std::set<SquareClassTriple> expected{triple(1, 1, 1), triple(1, -1, -1), triple(2, -1, -2), triple(2, 1, 2)};
    CHECK(as_set(S.elements()) == expected);
    CHECK(as_set(brute_force_selmer(E)) == expected);

    // independent check of all 16 candidates at infinity and 2
    std::set<SquareClassTriple> witnessed;
    for (long b1 : {1L, -1L, 2L, -2L}) {
        for (long b2 : {1L, -1L, 2L, -2L}) {
            const auto beta = triple(b1, b2, b1 * b2);
            if (witnessed_locally(E, beta, Place::infinity()) && witnessed_locally(E, beta, Place::finite(2))) {
                witnessed.insert(beta);
            }
        }
    }
    CHECK(witnessed == expected);
}

TEST_CASE("y^2 = x^3 - 289x and y^2 = x^3 - 36x") {
    auto E = SplitCurve::from_coefficients(-289, 0);
    auto S = compute_selmer(E);
    CHECK(S.dim == 4);
    CHECK(as_set(S.elements()) == as_set(brute_force_selmer(E)));

    auto F = SplitCurve::from_coefficients(-36, 0);
    auto T = compute_selmer(F);
    CHECK(T.coordinates(curve::descent_image(curve::RationalPoint::affine(-3, 9), F)).has_value());
    CHECK(T.dim == 3);
}

TEST_CASE("Selmer groups of random curves") {
    std::mt19937_64 rng(10);
    int done = 0;
    while (done < 6) {
        const long a = oracle::random_nonzero(rng, 25), b = oracle::random_nonzero(rng, 25);
        if (a == b || a == -a - b || b == -a - b) continue;
        auto E = SplitCurve::from_roots(a, b, -a - b);
        auto S = compute_selmer(E);
        const auto elems = S.elements();
        CHECK(as_set(elems) == as_set(brute_force_selmer(E)));
        CHECK(elems.size() == (std::size_t{1} << S.dim));
        // torsion first in the basis, all torsion images inside
        for (const auto& t : S.torsion_image) CHECK(S.coordinates(t).has_value());
        // closed under products, every element soluble at every relevant place
        for (const auto& x : elems) {
            for (const auto& y : elems) {
                const auto cov = TwoCovering::make(E, x * y);
                for (const Place& v : relevant_places(E)) CHECK(is_locally_soluble(cov, v));
            }
        }
        // point images lie in the group
        for (const auto& P : curve::point_search(E, 1000)) {
            CHECK(S.coordinates(curve::descent_image(P, E)).has_value());
        }
        // every candidate is soluble at good odd primes
        for (long p : {101L, 103L, 107L}) {
            if (mpz_divisible_ui_p(Integer(E.disc()).get_mpz_t(), p)) continue;
            for (const auto& g : candidate_space(E)) CHECK(is_locally_soluble(TwoCovering::make(E, g), Place::finite(p)));
        }
        ++done;
    }
}

TEST_CASE("local points") {
    auto E = SplitCurve::from_roots(-1, 0, 1);
    const auto cov = TwoCovering::make(E, triple(1, -1, -1));

    // the real point over x = -1/2 from the description of the covering
    LocalCoveringPoint q;
    q.place = Place::infinity();
    q.x = Rational(-1, 2);
    q.precision = 64;
    q.w = {numth::RealInterval::sqrt(Rational(1, 2), 64), numth::RealInterval::sqrt(Rational(1, 2), 64),
           numth::RealInterval::sqrt(Rational(3, 2), 64)};
    CHECK(verify_local_point(cov, q));

    for (const Place& v : {Place::infinity(), Place::finite(2), Place::finite(3), Place::finite(13)}) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const auto pt = local_point(cov, v, {}, LocalPointOptions{seed, 0, 128});
            CHECK(pt.place == v);
            CHECK(verify_local_point(cov, pt));
        }
    }
    CHECK_THROWS_AS(local_point(TwoCovering::make(E, triple(-1, -1, 1)), Place::infinity(), {}), LocalPointError);
}

TEST_CASE("local points avoid given forms") {
    auto E = SplitCurve::from_roots(-6, 0, 6);
    auto S = compute_selmer(E);
    for (const auto& beta : S.elements()) {
        auto cov = TwoCovering::make(E, beta);
        std::vector<conic::TangentForm> forms;
        for (int i = 0; i < 3; ++i) {
            auto q = conic::legendre_solve(cov.conics[i].conic);
            REQUIRE(q);
            forms.push_back(conic::covering_tangent(E, cov.conics[i], *q));
        }
        for (const Place& v : {Place::infinity(), Place::finite(2), Place::finite(3), Place::finite(5)}) {
            const auto pt = local_point(cov, v, forms);
            CHECK(verify_local_point(cov, pt));
            for (const auto& f : forms) {
                const auto value = evaluate_tangent(f, pt);
                if (v.is_infinite()) {
                    CHECK(std::get<numth::RealInterval>(value).sign() != 0);
                } else {
                    CHECK(std::get<numth::PAdicNumber>(value).precision() >= pt.precision / 2);
                }
            }
        }
    }
}

}
