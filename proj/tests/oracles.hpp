#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// Nothing here calls the closed-form routines it is used to check.

#include "cassels/numth.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

namespace oracle {

using cassels::Integer;
using cassels::Rational;

inline long vp(long n, long p) {
    long v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

inline long ipow(long p, long k) {
    long r = 1;
    while (k-- > 0) r *= p;
    return r;
}

namespace detail {

struct LiftSearch {
    __int128 a, b;
    long p;
    long k;

    static __int128 mod(__int128 x, __int128 m) {
        __int128 r = x % m;
        return r < 0 ? r + m : r;
    }

    // Coordinates in `free` slots are lifted digit by digit; the fixed slot is 1.
    bool lift(std::array<__int128, 3>& v, int fixed, long level, __int128 pm) const {
        if (level == k) return true;
        const int s = (fixed + 1) % 3;
        const int t = (fixed + 2) % 3;
        const __int128 next = pm * p;
        const __int128 vs = v[s], vt = v[t];
        for (long ds = 0; ds < p; ++ds) {
            for (long dt = 0; dt < p; ++dt) {
                v[s] = vs + ds * pm;
                v[t] = vt + dt * pm;
                const __int128 r = a * v[0] * v[0] + b * v[1] * v[1] - v[2] * v[2];
                if (mod(r, next) == 0 && lift(v, fixed, level + 1, next)) return true;
            }
        }
        v[s] = vs;
        v[t] = vt;
        return false;
    }
};

}  // namespace detail

/// +1 iff z^2 = a x^2 + b y^2 has a solution mod p^k with one of x, y, z a
/// unit, k = 2 v_p(4ab) + 3. Searches each chart with one coordinate equal to 1.
inline int hilbert_by_lifting(long a, long b, long p) {
    const long k = 2 * vp(4 * a * b, p) + 3;
    detail::LiftSearch search{a, b, p, k};
    for (int fixed = 0; fixed < 3; ++fixed) {
        std::array<__int128, 3> v{0, 0, 0};
        v[static_cast<std::size_t>(fixed)] = 1;
        if (search.lift(v, fixed, 0, 1)) return 1;
    }
    return -1;
}

/// Over R, z^2 = a x^2 + b y^2 has a nonzero solution unless a, b < 0.
inline int hilbert_real(long a, long b) { return (a < 0 && b < 0) ? -1 : 1; }

/// Exhaustive search for a nonzero integer point on a X^2 + b Y^2 + c Z^2 = 0
/// in the box |X| <= bx, |Y| <= by, |Z| <= bz.
inline std::optional<std::array<long, 3>> conic_box_search(long a, long b, long c, long bx, long by, long bz) {
    for (long z = 0; z <= bz; ++z) {
        for (long y = -by; y <= by; ++y) {
            // a X^2 = -(b y^2 + c z^2)
            const long rhs = -(b * y * y + c * z * z);
            if (rhs % a != 0) continue;
            const long x2 = rhs / a;
            if (x2 < 0) continue;
            long x = static_cast<long>(std::sqrt(static_cast<double>(x2)));
            while (x * x > x2) --x;
            while ((x + 1) * (x + 1) <= x2) ++x;
            if (x * x != x2 || x > bx) continue;
            if (x == 0 && y == 0 && z == 0) continue;
            return std::array<long, 3>{x, y, z};
        }
    }
    return std::nullopt;
}

/// Class of q != 0 in Q_p^*/Q_p^*2 as a small integer key (p = 0 for the real
/// place): sign at infinity, (v mod 2, Legendre symbol of the unit) at odd p,
/// (v mod 2, unit mod 8) at 2. Equal keys iff same square class.
inline int local_class_key(const Rational& q, long p) {
    if (p == 0) return q > 0 ? 1 : -1;
    Integer n = q.get_num(), d = q.get_den();
    long v = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p))) {
        n /= p;
        ++v;
    }
    while (mpz_divisible_ui_p(d.get_mpz_t(), static_cast<unsigned long>(p))) {
        d /= p;
        --v;
    }
    // n/d and n*d differ by the square d^2
    const Integer u = n * d;
    const int parity = static_cast<int>(((v % 2) + 2) % 2);
    if (p == 2) {
        Integer r;
        mpz_fdiv_r_ui(r.get_mpz_t(), u.get_mpz_t(), 8);
        return parity * 8 + static_cast<int>(r.get_si());
    }
    Integer r, e = (p - 1) / 2, m = p;
    mpz_powm(r.get_mpz_t(), Integer(u % m + m).get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return parity * 2 + (r == 1 ? 0 : 1);
}

inline long random_nonzero(std::mt19937_64& rng, long bound) {
    std::uniform_int_distribution<long> d(-bound, bound);
    long v = 0;
    while (v == 0) v = d(rng);
    return v;
}

}  // namespace oracle
