#include "cassels/gf2.hpp"

#include <doctest.h>

#include <random>

using namespace cassels::gf2;

namespace {

BitMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
    BitMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m.set(i, j, rng() & 1U);
    return m;
}

// Rank by counting the vectors of the row space.
std::size_t brute_rank(const BitMatrix& m) {
    std::vector<BitVector> span{BitVector(m.cols(), false)};
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const BitVector row = m.row(r);
        bool present = false;
        for (const auto& v : span) present = present || v == row;
        if (present) continue;
        const std::size_t n = span.size();
        for (std::size_t i = 0; i < n; ++i) span.push_back(add(span[i], row));
    }
    std::size_t k = 0;
    while ((std::size_t{1} << k) < span.size()) ++k;
    return k;
}

}  // namespace

TEST_SUITE("gf2") {

TEST_CASE("rank and kernel on random matrices") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 300; ++t) {
        const std::size_t r = 1 + rng() % 9;
        const std::size_t c = 1 + rng() % 9;
        const BitMatrix m = random_matrix(rng, r, c);
        const std::size_t rk = m.rank();
        CHECK(rk == brute_rank(m));
        const auto ker = m.kernel();
        CHECK(ker.size() == c - rk);
        for (const auto& v : ker) {
            for (bool b : m.apply(v)) CHECK_FALSE(b);
        }
        CHECK(rank_of(ker, c) == ker.size());
        CHECK(m.transpose().rank() == rk);
    }
}

TEST_CASE("wide matrices cross word boundaries") {
    std::mt19937_64 rng(4);
    const BitMatrix m = random_matrix(rng, 70, 130);
    const auto ker = m.kernel();
    CHECK(ker.size() == 130 - m.rank());
    for (const auto& v : ker)
        for (bool b : m.apply(v)) CHECK_FALSE(b);
}

TEST_CASE("symmetry and span") {
    BitMatrix m(2, 2);
    m.set(0, 1, true);
    CHECK_FALSE(m.is_symmetric());
    m.set(1, 0, true);
    CHECK(m.is_symmetric());
    CHECK(m.rank() == 2);
    CHECK(m.kernel().empty());
    CHECK(in_span({{true, false}, {false, true}}, {true, true}));
    CHECK_FALSE(in_span({{true, true}}, {true, false}));
    CHECK(in_span({}, {false, false}));
}

}
