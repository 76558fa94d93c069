#include "cassels/padic.hpp"

#include <algorithm>
#include <sstream>

namespace cassels::numth {

namespace {

Integer pow(const Integer& p, long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(e));
    return r;
}

Integer mod(const Integer& a, const Integer& m) {
    Integer r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

Integer inverse_mod(const Integer& a, const Integer& m) {
    Integer r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) {
        throw ArithmeticError("inverse_mod: not invertible");
    }
    return r;
}

// Unit part of q at p reduced modulo p^precision.
Integer unit_residue(const Rational& q, const Integer& p, long precision) {
    const Integer modulus = pow(p, precision);
    const Integer num = unit_part(q.get_num(), p);
    const Integer den = unit_part(q.get_den(), p);
    return mod(num * inverse_mod(den, modulus), modulus);
}

}  // namespace

long default_precision(const Integer& p, const Integer& disc) {
    return 20 + 2 * valuation(Integer(2 * disc), p);
}

PAdicNumber::PAdicNumber(Integer p, long valuation, Integer unit, long precision)
    : prime_(std::move(p)), valuation_(valuation), unit_(std::move(unit)), precision_(precision) {}

PAdicNumber PAdicNumber::from_rational(const Rational& q, const Integer& p, long precision) {
    if (q == 0) throw std::invalid_argument("PAdicNumber: zero has no unit part");
    if (precision < 1) throw std::invalid_argument("PAdicNumber: precision must be positive");
    return PAdicNumber(p, numth::valuation(q, p), unit_residue(q, p, precision), precision);
}

Rational PAdicNumber::approximant() const {
    Rational r(unit_);
    if (valuation_ >= 0) {
        r *= Rational(pow(prime_, valuation_));
    } else {
        r /= Rational(pow(prime_, -valuation_));
    }
    r.canonicalize();
    return r;
}

PAdicNumber PAdicNumber::operator-() const {
    const Integer modulus = pow(prime_, precision_);
    return PAdicNumber(prime_, valuation_, mod(Integer(-unit_), modulus), precision_);
}

PAdicNumber operator*(const PAdicNumber& a, const PAdicNumber& b) {
    if (a.prime_ != b.prime_) throw std::invalid_argument("PAdicNumber: mixed primes");
    const long prec = std::min(a.precision_, b.precision_);
    const Integer modulus = pow(a.prime_, prec);
    return PAdicNumber(a.prime_, a.valuation_ + b.valuation_, mod(Integer(a.unit_ * b.unit_), modulus), prec);
}

PAdicNumber PAdicNumber::scaled(const Rational& c) const {
    if (c == 0) throw std::invalid_argument("PAdicNumber::scaled: zero factor");
    const Integer modulus = pow(prime_, precision_);
    const Integer cu = unit_residue(c, prime_, precision_);
    return PAdicNumber(prime_, valuation_ + numth::valuation(c, prime_), mod(Integer(unit_ * cu), modulus), precision_);
}

PAdicNumber operator+(const PAdicNumber& a, const PAdicNumber& b) {
    if (a.prime_ != b.prime_) throw std::invalid_argument("PAdicNumber: mixed primes");
    const Integer& p = a.prime_;
    const long m = std::min(a.valuation_, b.valuation_);
    const long abs_prec = std::min(a.absolute_precision(), b.absolute_precision());
    if (abs_prec <= m) throw PrecisionError("p-adic sum has no significant digits");
    const Integer modulus = pow(p, abs_prec - m);
    const Integer s = mod(Integer(a.unit_ * pow(p, a.valuation_ - m) + b.unit_ * pow(p, b.valuation_ - m)), modulus);
    if (s == 0) throw PrecisionError("p-adic value indistinguishable from zero at precision " + std::to_string(abs_prec));
    const long extra = valuation(s, p);
    const long val = m + extra;
    const long prec = abs_prec - val;
    return PAdicNumber(p, val, mod(unit_part(s, p), pow(p, prec)), prec);
}

PAdicNumber PAdicNumber::plus(const Rational& c) const {
    if (c == 0) return *this;
    const long prec = std::max(1L, absolute_precision() - numth::valuation(c, prime_));
    return *this + from_rational(c, prime_, prec);
}

bool agree(const PAdicNumber& a, const PAdicNumber& b) {
    try {
        (void)(a - b);
    } catch (const PrecisionError&) {
        return true;
    }
    return false;
}

std::string PAdicNumber::to_string() const {
    std::ostringstream out;
    out << prime_.get_str() << "^" << valuation_ << "*(" << unit_.get_str() << " + O(" << prime_.get_str() << "^"
        << precision_ << "))";
    return out.str();
}

std::optional<PAdicNumber> padic_sqrt(const Rational& q, const Integer& p, long precision) {
    if (precision < 1) throw std::invalid_argument("padic_sqrt: precision must be positive");
    if (precision > kPrecisionCap) {
        throw PrecisionError("padic_sqrt: precision " + std::to_string(precision) + " exceeds cap");
    }
    if (q == 0) throw std::invalid_argument("padic_sqrt: zero");
    if (!is_square_local(q, Place::finite(p))) return std::nullopt;

    const long half_val = valuation(q, p) / 2;
    if (p == 2) {
        // the loop below fixes s modulo 2^(work - 1)
        const long work = precision + 2;
        const Integer u = unit_residue(q, p, work + 1);
        Integer s = 1;
        for (long k = 3; k <= work; ++k) {
            const Integer m = pow(p, k + 1);
            if (mod(Integer(s * s - u), m) != 0) s += pow(p, k - 1);
        }
        const Integer modulus = pow(p, precision);
        const PAdicNumber root = PAdicNumber::from_rational(Rational(mod(s, modulus)), p, precision);
        return root.scaled(half_val >= 0 ? Rational(pow(p, half_val)) : Rational(Integer(1), pow(p, -half_val)));
    }

    const Integer u = unit_residue(q, p, precision);
    Integer r = *sqrt_mod_prime(u, p);
    long known = 1;
    while (known < precision) {
        known = std::min(2 * known, precision);
        const Integer m = pow(p, known);
        // Newton step r <- r - (r^2 - u) / (2r)
        r = mod(Integer(r - (r * r - u) * inverse_mod(Integer(2 * r), m)), m);
    }
    const PAdicNumber root = PAdicNumber::from_rational(Rational(r), p, precision);
    return root.scaled(half_val >= 0 ? Rational(pow(p, half_val)) : Rational(Integer(1), pow(p, -half_val)));
}

int hilbert_symbol(const PAdicNumber& a, const Rational& b) {
    const long needed = a.prime() == 2 ? 3 : 1;
    if (a.precision() < needed) throw PrecisionError("hilbert_symbol: too few unit digits");
    return hilbert_symbol(a.approximant(), b, Place::finite(a.prime()));
}

RealInterval RealInterval::sqrt(const Rational& q, long bits) {
    if (sgn(q) < 0) throw std::invalid_argument("RealInterval::sqrt of a negative number");
    if (q == 0) return exact(Rational(0));
    const Integer& n = q.get_num();
    const Integer& d = q.get_den();
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 2, static_cast<unsigned long>(bits));
    Integer radicand = n * d * scale * scale;
    Integer root;
    mpz_sqrt(root.get_mpz_t(), radicand.get_mpz_t());
    const Integer denom = d * scale;
    Rational lo(root, denom);
    lo.canonicalize();
    if (root * root == radicand) return {lo, lo};
    Rational hi(Integer(root + 1), denom);
    hi.canonicalize();
    return {lo, hi};
}

int RealInterval::sign() const {
    if (sgn(lo) > 0) return 1;
    if (sgn(hi) < 0) return -1;
    return 0;
}

RealInterval RealInterval::scaled(const Rational& c) const {
    if (sgn(c) >= 0) return {lo * c, hi * c};
    return {hi * c, lo * c};
}

RealInterval operator*(const RealInterval& a, const RealInterval& b) {
    const Rational c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

std::string RealInterval::to_string() const { return "[" + lo.get_str() + ", " + hi.get_str() + "]"; }

int hilbert_symbol(const RealInterval& a, const Rational& b) {
    const int s = a.sign();
    if (s == 0) throw PrecisionError("hilbert_symbol: real sign undecided");
    return (s < 0 && sgn(b) < 0) ? -1 : 1;
}

int hilbert_symbol(const LocalValue& a, const Rational& b, const Place& v) {
    if (const auto* x = std::get_if<PAdicNumber>(&a)) {
        if (v.is_infinite() || x->prime() != v.prime()) throw std::invalid_argument("hilbert_symbol: place mismatch");
        return hilbert_symbol(*x, b);
    }
    if (!v.is_infinite()) throw std::invalid_argument("hilbert_symbol: place mismatch");
    return hilbert_symbol(std::get<RealInterval>(a), b);
}

LocalValue scaled(const LocalValue& a, const Rational& c) {
    return std::visit([&](const auto& x) -> LocalValue { return x.scaled(c); }, a);
}

LocalValue plus(const LocalValue& a, const Rational& c) {
    return std::visit([&](const auto& x) -> LocalValue { return x.plus(c); }, a);
}

LocalValue add(const LocalValue& a, const LocalValue& b) {
    if (a.index() != b.index()) throw std::invalid_argument("LocalValue: mixed kinds");
    if (const auto* x = std::get_if<PAdicNumber>(&a)) return *x + std::get<PAdicNumber>(b);
    return std::get<RealInterval>(a) + std::get<RealInterval>(b);
}

LocalValue multiply(const LocalValue& a, const LocalValue& b) {
    if (a.index() != b.index()) throw std::invalid_argument("LocalValue: mixed kinds");
    if (const auto* x = std::get_if<PAdicNumber>(&a)) return *x * std::get<PAdicNumber>(b);
    return std::get<RealInterval>(a) * std::get<RealInterval>(b);
}

std::string to_string(const LocalValue& a) {
    return std::visit([](const auto& x) { return x.to_string(); }, a);
}

}  // namespace cassels::numth
