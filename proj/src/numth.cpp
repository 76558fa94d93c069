#include "cassels/numth.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <map>

namespace cassels::numth {

namespace {

const std::vector<unsigned long>& small_primes(unsigned long bound) {
    // Sieve once up to the default trial bound; larger bounds fall back to
    // odd trial divisors in factorize.
    static const std::vector<unsigned long> primes = [] {
        constexpr unsigned long kLimit = 1000000;
        std::vector<bool> composite(kLimit + 1, false);
        std::vector<unsigned long> out;
        for (unsigned long i = 2; i <= kLimit; ++i) {
            if (composite[i]) continue;
            out.push_back(i);
            for (unsigned long j = i * i; j <= kLimit; j += i) composite[j] = true;
        }
        return out;
    }();
    (void)bound;
    return primes;
}

Integer powm(const Integer& base, const Integer& exp, const Integer& mod) {
    Integer r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
    return r;
}

Integer mod_nonneg(const Integer& a, const Integer& m) {
    Integer r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

bool miller_rabin_base(const Integer& n, const Integer& d, unsigned long s, unsigned long a) {
    Integer x = powm(Integer(a), d, n);
    const Integer nm1 = n - 1;
    if (x == 1 || x == nm1) return true;
    for (unsigned long r = 1; r < s; ++r) {
        x = mod_nonneg(x * x, n);
        if (x == nm1) return true;
    }
    return false;
}

const Integer& deterministic_mr_limit() {
    static const Integer limit("3317044064679887385961981");
    return limit;
}

Integer gcd(const Integer& a, const Integer& b) {
    Integer g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

// Pollard rho with Brent's cycle detection. Returns a nontrivial factor or 0.
Integer brent_rho(const Integer& n, unsigned long c, unsigned long y0, unsigned long max_iter) {
    const Integer cc(c);
    auto step = [&](const Integer& v) { return mod_nonneg(v * v + cc, n); };
    Integer y(y0), x, ys, q(1), g(1);
    unsigned long r = 1, iterations = 0;
    constexpr unsigned long m = 128;
    while (g == 1) {
        x = y;
        for (unsigned long i = 0; i < r; ++i) y = step(y);
        unsigned long k = 0;
        while (k < r && g == 1) {
            ys = y;
            const unsigned long lim = std::min(m, r - k);
            for (unsigned long i = 0; i < lim; ++i) {
                y = step(y);
                q = mod_nonneg(q * abs(Integer(x - y)), n);
            }
            g = gcd(q, n);
            k += m;
            iterations += lim;
        }
        r *= 2;
        if (iterations > max_iter) return 0;
    }
    if (g == n) {
        do {
            ys = step(ys);
            g = gcd(abs(Integer(x - ys)), n);
        } while (g == 1);
    }
    if (g == n) return 0;
    return g;
}

void split_composite(const Integer& n, const FactorOptions& options, std::map<Integer, unsigned>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        ++out[n];
        return;
    }
    Integer root;
    if (mpz_perfect_square_p(n.get_mpz_t())) {
        mpz_sqrt(root.get_mpz_t(), n.get_mpz_t());
        split_composite(root, options, out);
        split_composite(root, options, out);
        return;
    }
    for (unsigned attempt = 0; attempt < options.rho_attempts; ++attempt) {
        Integer f = brent_rho(n, 1 + 2 * attempt, 2 + attempt, options.rho_iterations);
        if (f != 0) {
            split_composite(f, options, out);
            split_composite(Integer(n / f), options, out);
            return;
        }
    }
    throw FactorizationIncomplete("factorization incomplete: composite cofactor " + n.get_str());
}

}  // namespace

Place Place::finite(const Integer& p) {
    if (!is_prime(p)) throw std::invalid_argument("place: " + p.get_str() + " is not prime");
    Place v;
    v.kind_ = Kind::FinitePrime;
    v.prime_ = p;
    return v;
}

std::string Place::to_string() const { return is_infinite() ? std::string("inf") : prime_.get_str(); }

SquareClass operator*(const SquareClass& a, const SquareClass& b) {
    return squarefree_part(Integer(a.rep * b.rep));
}

Integer Factorization::value() const {
    Integer v = sign;
    for (const auto& [p, e] : factors) {
        Integer pe;
        mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
        v *= pe;
    }
    return v;
}

bool is_prime(const Integer& n) {
    if (n < 2) return false;
    for (unsigned long p : {2UL, 3UL, 5UL, 7UL, 11UL, 13UL, 17UL, 19UL, 23UL, 29UL, 31UL, 37UL, 41UL}) {
        if (n == p) return true;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
    }
    if (n < deterministic_mr_limit()) {
        Integer d = n - 1;
        unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
        mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
        for (unsigned long a : {2UL, 3UL, 5UL, 7UL, 11UL, 13UL, 17UL, 19UL, 23UL, 29UL, 31UL, 37UL, 41UL}) {
            if (!miller_rabin_base(n, d, s, a)) return false;
        }
        return true;
    }
    // Beyond the deterministic base range: Baillie-PSW plus random rounds.
    return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

Factorization factorize(const Integer& n, const FactorOptions& options) {
    if (n == 0) throw std::invalid_argument("factorize: zero has no factorization");
    Factorization result;
    result.sign = sgn(n) < 0 ? -1 : 1;
    Integer m = abs(n);
    std::map<Integer, unsigned> found;
    const auto& primes = small_primes(options.trial_bound);
    bool cofactor_prime = false;
    for (std::size_t idx = 0; idx < primes.size(); ++idx) {
        const unsigned long p = primes[idx];
        if (p > options.trial_bound) break;
        if (mpz_cmp_ui(m.get_mpz_t(), p * p) < 0) break;
        while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            ++found[Integer(p)];
            mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
        }
        // a large prime cofactor would otherwise be trial divided to the bound
        if (idx == 168 && m > 1 && is_prime(m)) {
            cofactor_prime = true;
            break;
        }
    }
    if (cofactor_prime) {
        ++found[m];
        m = 1;
    }
    if (m > 1) {
        const unsigned long last = primes.empty() ? 1 : std::min<unsigned long>(primes.back(), options.trial_bound);
        if (m <= Integer(last) * last) {
            ++found[m];
        } else {
            split_composite(m, options, found);
        }
    }
    for (auto& [p, e] : found) result.factors.emplace_back(p, e);
    return result;
}

std::vector<Integer> prime_divisors(const Integer& n) {
    std::vector<Integer> out;
    for (const auto& [p, e] : factorize(n).factors) out.push_back(p);
    return out;
}

long valuation(const Integer& n, const Integer& p) {
    if (n == 0) throw std::invalid_argument("valuation of zero");
    if (p == 2) return static_cast<long>(mpz_scan1(n.get_mpz_t(), 0));
    Integer tmp;
    return static_cast<long>(mpz_remove(tmp.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

long valuation(const Rational& q, const Integer& p) {
    return valuation(q.get_num(), p) - valuation(q.get_den(), p);
}

Integer unit_part(const Integer& n, const Integer& p) {
    if (n == 0) throw std::invalid_argument("unit part of zero");
    Integer out;
    mpz_remove(out.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
    return out;
}

SquareClass squarefree_part(const Integer& n) {
    if (n == 0) throw std::invalid_argument("squarefree_part: zero is not in a square class");
    const Factorization f = factorize(n);
    Integer rep = f.sign;
    for (const auto& [p, e] : f.factors) {
        if (e % 2 == 1) rep *= p;
    }
    return SquareClass{rep};
}

SquareClass squarefree_part(const Rational& q) {
    if (q == 0) throw std::invalid_argument("squarefree_part: zero is not in a square class");
    return squarefree_part(integral_representative(q));
}

Integer integral_representative(const Rational& q) {
    if (q == 0) throw std::invalid_argument("zero has no square class");
    return q.get_num() * q.get_den();
}

int legendre(const Integer& a, const Integer& p) {
    return mpz_legendre(a.get_mpz_t(), p.get_mpz_t());
}

std::optional<Integer> sqrt_mod_prime(const Integer& a_in, const Integer& p) {
    if (p == 2) return mod_nonneg(a_in, p);
    const Integer a = mod_nonneg(a_in, p);
    if (a == 0) return Integer(0);
    if (legendre(a, p) != 1) return std::nullopt;
    if (mod_nonneg(p, 4) == 3) return powm(a, Integer((p + 1) / 4), p);

    Integer q = p - 1;
    unsigned long s = mpz_scan1(q.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(q.get_mpz_t(), q.get_mpz_t(), s);
    Integer z = 2;
    while (legendre(z, p) != -1) ++z;

    Integer m(s);
    Integer c = powm(z, q, p);
    Integer t = powm(a, q, p);
    Integer r = powm(a, Integer((q + 1) / 2), p);
    while (t != 1) {
        unsigned long i = 0;
        Integer t2 = t;
        while (t2 != 1) {
            t2 = mod_nonneg(t2 * t2, p);
            ++i;
        }
        Integer b = c;
        for (unsigned long j = 0; j + 1 < m.get_ui() - i; ++j) b = mod_nonneg(b * b, p);
        m = i;
        c = mod_nonneg(b * b, p);
        t = mod_nonneg(t * c, p);
        r = mod_nonneg(r * b, p);
    }
    return r;
}

namespace {

int epsilon2(const Integer& u) {
    // (u - 1)/2 mod 2 for odd u
    const unsigned long r = mod_nonneg(u, 8).get_ui();
    return (r == 3 || r == 7) ? 1 : 0;
}

int omega2(const Integer& u) {
    // (u^2 - 1)/8 mod 2 for odd u
    const unsigned long r = mod_nonneg(u, 8).get_ui();
    return (r == 3 || r == 5) ? 1 : 0;
}

}  // namespace

int hilbert_symbol(const Rational& a, const Rational& b, const Place& v) {
    if (a == 0 || b == 0) throw std::invalid_argument("hilbert_symbol: arguments must be nonzero");
    if (v.is_infinite()) return (sgn(a) < 0 && sgn(b) < 0) ? -1 : 1;

    const Integer& p = v.prime();
    const Integer ia = integral_representative(a);
    const Integer ib = integral_representative(b);
    const long alpha = valuation(ia, p);
    const long beta = valuation(ib, p);
    const Integer u = unit_part(ia, p);
    const Integer w = unit_part(ib, p);

    if (p == 2) {
        const int e = epsilon2(u) * epsilon2(w) + (alpha % 2) * omega2(w) + (beta % 2) * omega2(u);
        return (e % 2 == 0) ? 1 : -1;
    }
    int sign = 1;
    if ((alpha % 2) && (beta % 2) && mod_nonneg(p, 4) == 3) sign = -sign;
    if (beta % 2) sign *= legendre(u, p);
    if (alpha % 2) sign *= legendre(w, p);
    return sign;
}

std::uint32_t local_class_bits(const Rational& q, const Place& v) {
    if (q == 0) throw std::invalid_argument("local class of zero");
    if (v.is_infinite()) return sgn(q) < 0 ? 1U : 0U;
    const Integer& p = v.prime();
    const Integer n = integral_representative(q);
    const long val = valuation(n, p);
    const Integer u = unit_part(n, p);
    std::uint32_t bits = static_cast<std::uint32_t>(val & 1);
    if (p == 2) {
        const unsigned long r = mod_nonneg(u, 8).get_ui();
        if (r == 3 || r == 7) bits |= 2U;  // -1 component
        if (r == 3 || r == 5) bits |= 4U;  // 5 component
    } else if (legendre(u, p) == -1) {
        bits |= 2U;
    }
    return bits;
}

unsigned local_class_dimension(const Place& v) {
    if (v.is_infinite()) return 1;
    return v.prime() == 2 ? 3 : 2;
}

bool is_square_local(const Rational& q, const Place& v) {
    if (q == 0) throw std::invalid_argument("is_square_local: zero");
    return local_class_bits(q, v) == 0;
}

}  // namespace cassels::numth
