#pragma once

// Exact integer/rational utilities and Hilbert symbols over Q.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cassels {

using Integer = mpz_class;
using Rational = mpq_class;

class ArithmeticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a composite cofactor survives the configured factoring effort.
class FactorizationIncomplete : public ArithmeticError {
public:
    using ArithmeticError::ArithmeticError;
};

/// Raised when a local computation cannot be decided at the current precision.
/// Callers catch it to escalate precision or resample.
class PrecisionError : public ArithmeticError {
public:
    using ArithmeticError::ArithmeticError;
};

namespace numth {

/// A place of Q: the real place or a finite prime.
class Place {
public:
    enum class Kind { RealInfinite, FinitePrime };

    static Place infinity() { return Place{}; }
    /// Throws std::invalid_argument unless `p` is prime.
    static Place finite(const Integer& p);
    static Place finite(long p) { return finite(Integer(p)); }

    Kind kind() const { return kind_; }
    bool is_infinite() const { return kind_ == Kind::RealInfinite; }
    /// Only meaningful for finite places.
    const Integer& prime() const { return prime_; }
    std::string to_string() const;

    friend bool operator==(const Place& a, const Place& b) {
        return a.kind_ == b.kind_ && (a.is_infinite() || a.prime_ == b.prime_);
    }
    /// Orders the real place first, then primes ascending.
    friend bool operator<(const Place& a, const Place& b) {
        if (a.is_infinite() != b.is_infinite()) return a.is_infinite();
        return !a.is_infinite() && cmp(a.prime_, b.prime_) < 0;
    }

private:
    Place() = default;
    Kind kind_ = Kind::RealInfinite;
    Integer prime_ = 0;
};

/// Class of a nonzero rational in Q*/Q*^2, represented by its squarefree part.
struct SquareClass {
    Integer rep = 1;

    bool is_trivial() const { return rep == 1; }
    friend bool operator==(const SquareClass& a, const SquareClass& b) { return a.rep == b.rep; }
    friend SquareClass operator*(const SquareClass& a, const SquareClass& b);
};

struct Factorization {
    int sign = 1;
    /// Primes ascending, exponents positive.
    std::vector<std::pair<Integer, unsigned>> factors;

    Integer value() const;
};

struct FactorOptions {
    unsigned long trial_bound = 1000000;
    /// Maximum number of Brent iterations per rho attempt.
    unsigned long rho_iterations = 1UL << 22;
    unsigned rho_attempts = 16;
};

bool is_prime(const Integer& n);

/// Trial division then Pollard-Brent rho. Throws FactorizationIncomplete
/// rather than ever returning a composite "prime".
Factorization factorize(const Integer& n, const FactorOptions& options = {});

/// Distinct primes dividing n (n != 0), ascending.
std::vector<Integer> prime_divisors(const Integer& n);

/// p-adic valuation. n must be nonzero.
long valuation(const Integer& n, const Integer& p);
long valuation(const Rational& q, const Integer& p);

/// Strips all factors p from n (n != 0), returning the cofactor.
Integer unit_part(const Integer& n, const Integer& p);

SquareClass squarefree_part(const Rational& q);
SquareClass squarefree_part(const Integer& n);

bool is_square_local(const Rational& q, const Place& v);

/// Square root of a modulo an odd prime p (Tonelli-Shanks); nullopt for non-residues.
std::optional<Integer> sqrt_mod_prime(const Integer& a, const Integer& p);

/// Legendre symbol (a/p) for odd prime p.
int legendre(const Integer& a, const Integer& p);

/// Quadratic Hilbert symbol (a,b)_v by the closed-form formulas.
int hilbert_symbol(const Rational& a, const Rational& b, const Place& v);

/// Reduces a nonzero rational to an integer in the same square class.
Integer integral_representative(const Rational& q);

/// Local square class of q at v as a bit vector (bit i = coordinate i):
///   real place: 1 bit (sign);
///   odd p:      2 bits (valuation parity, non-residue unit);
///   p = 2:      3 bits (valuation parity, unit = -1 class, unit = 5 class).
std::uint32_t local_class_bits(const Rational& q, const Place& v);
unsigned local_class_dimension(const Place& v);

}  // namespace numth
}  // namespace cassels
