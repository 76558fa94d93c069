#pragma once

// Finite-precision p-adic numbers and exact real enclosures: the two kinds
// of local field elements used by the local computations.

#include "cassels/numth.hpp"

#include <optional>
#include <string>
#include <variant>

namespace cassels::numth {

/// Hard cap on relative p-adic precision (digits).
inline constexpr long kPrecisionCap = 4096;

/// Default working precision at p for a curve of discriminant `disc`.
long default_precision(const Integer& p, const Integer& disc);

/// A nonzero p-adic number p^valuation * (unit + O(p^precision)).
class PAdicNumber {
public:
    /// Approximates the nonzero rational q to the given relative precision.
    static PAdicNumber from_rational(const Rational& q, const Integer& p, long precision);

    const Integer& prime() const { return prime_; }
    long valuation() const { return valuation_; }
    /// Representative of the unit part in [0, p^precision).
    const Integer& unit() const { return unit_; }
    long precision() const { return precision_; }
    long absolute_precision() const { return valuation_ + precision_; }

    /// Exact rational approximant p^valuation * unit.
    Rational approximant() const;

    PAdicNumber operator-() const;
    friend PAdicNumber operator*(const PAdicNumber& a, const PAdicNumber& b);
    /// Multiplication by an exact nonzero rational; loses no precision.
    PAdicNumber scaled(const Rational& c) const;

    /// Sum; throws PrecisionError if the result is indistinguishable from 0.
    friend PAdicNumber operator+(const PAdicNumber& a, const PAdicNumber& b);
    friend PAdicNumber operator-(const PAdicNumber& a, const PAdicNumber& b) { return a + (-b); }
    /// a + c for an exact rational c (c may be 0).
    PAdicNumber plus(const Rational& c) const;

    /// True if a - b is zero to the joint absolute precision of a and b.
    friend bool agree(const PAdicNumber& a, const PAdicNumber& b);

    std::string to_string() const;

private:
    PAdicNumber(Integer p, long valuation, Integer unit, long precision);
    Integer prime_;
    long valuation_ = 0;
    Integer unit_;
    long precision_ = 1;
};

/// Square root of q in Q_p to relative precision `precision`; nullopt iff q is
/// not a local square. Throws PrecisionError above kPrecisionCap.
std::optional<PAdicNumber> padic_sqrt(const Rational& q, const Integer& p, long precision);

/// (a, b)_p for a p-adic a and rational b. Needs >= 1 unit digit (odd p) or
/// >= 3 (p = 2); throws PrecisionError otherwise.
int hilbert_symbol(const PAdicNumber& a, const Rational& b);

/// Closed rational interval [lo, hi] enclosing a real number.
struct RealInterval {
    Rational lo;
    Rational hi;

    static RealInterval exact(const Rational& q) { return {q, q}; }
    /// Encloses sqrt(q) (q >= 0) with width at most 2^-bits.
    static RealInterval sqrt(const Rational& q, long bits);

    Rational width() const { return hi - lo; }
    bool contains_zero() const { return sgn(lo) <= 0 && sgn(hi) >= 0; }
    /// Sign when decided, 0 if the interval straddles or touches zero.
    int sign() const;

    RealInterval operator-() const { return {-hi, -lo}; }
    friend RealInterval operator+(const RealInterval& a, const RealInterval& b) {
        return {a.lo + b.lo, a.hi + b.hi};
    }
    friend RealInterval operator-(const RealInterval& a, const RealInterval& b) { return a + (-b); }
    RealInterval scaled(const Rational& c) const;
    RealInterval plus(const Rational& c) const { return {lo + c, hi + c}; }
    friend RealInterval operator*(const RealInterval& a, const RealInterval& b);

    std::string to_string() const;
};

/// Hilbert symbol at the real place; throws PrecisionError if the sign of a is undecided.
int hilbert_symbol(const RealInterval& a, const Rational& b);

/// An element of Q_v: p-adic at finite places, a real enclosure at infinity.
using LocalValue = std::variant<RealInterval, PAdicNumber>;

int hilbert_symbol(const LocalValue& a, const Rational& b, const Place& v);
LocalValue scaled(const LocalValue& a, const Rational& c);
LocalValue plus(const LocalValue& a, const Rational& c);
LocalValue add(const LocalValue& a, const LocalValue& b);
LocalValue multiply(const LocalValue& a, const LocalValue& b);
std::string to_string(const LocalValue& a);

}  // namespace cassels::numth
