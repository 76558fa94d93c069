#include "cassels/curve.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace cassels::curve {

using numth::squarefree_part;

SquareClassTriple SquareClassTriple::make(const Rational& b1, const Rational& b2, const Rational& b3) {
    SquareClassTriple t;
    t.b_ = {squarefree_part(b1), squarefree_part(b2), squarefree_part(b3)};
    if (!(t.b_[0] * t.b_[1] * t.b_[2]).is_trivial()) {
        throw CurveError("square-class triple " + t.to_string() + " violates the norm condition");
    }
    return t;
}

SquareClassTriple operator*(const SquareClassTriple& a, const SquareClassTriple& b) {
    SquareClassTriple t;
    for (std::size_t i = 0; i < 3; ++i) t.b_[i] = a.b_[i] * b.b_[i];
    return t;
}

bool operator<(const SquareClassTriple& a, const SquareClassTriple& b) {
    for (std::size_t i = 0; i < 3; ++i) {
        const int c = cmp(a.b_[i].rep, b.b_[i].rep);
        if (c != 0) return c < 0;
    }
    return false;
}

std::string SquareClassTriple::to_string() const {
    return "(" + b_[0].rep.get_str() + "," + b_[1].rep.get_str() + "," + b_[2].rep.get_str() + ")";
}

namespace {

// Smallest u > 0 with u^2 * q integral for every q.
Integer clearing_scale(const std::array<Rational, 3>& qs) {
    Integer den = 1;
    for (const auto& q : qs) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den().get_mpz_t());
    Integer u = 1;
    for (const auto& [p, e] : numth::factorize(den).factors) {
        Integer pe;
        mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), (e + 1) / 2);
        u *= pe;
    }
    return u;
}

std::vector<Integer> positive_divisors(const Integer& n) {
    std::vector<Integer> divs{1};
    for (const auto& [p, e] : numth::factorize(n).factors) {
        const std::size_t count = divs.size();
        Integer pk = 1;
        for (unsigned k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < count; ++i) divs.push_back(divs[i] * pk);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

bool is_perfect_square(const Integer& n) { return sgn(n) >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0; }

Integer isqrt(const Integer& n) {
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

}  // namespace

SplitCurve SplitCurve::from_roots(const Rational& e1, const Rational& e2, const Rational& e3) {
    if (e1 == e2 || e1 == e3 || e2 == e3) throw CurveError("singular curve: repeated root");
    const Rational shift = Rational(e1 + e2 + e3) / 3;
    const std::array<Rational, 3> centred = {Rational(e1 - shift), Rational(e2 - shift), Rational(e3 - shift)};
    const Integer u = clearing_scale(centred);
    const Rational u2 = Rational(u * u);

    SplitCurve c;
    for (std::size_t i = 0; i < 3; ++i) {
        Rational v = centred[i] * u2;
        v.canonicalize();
        c.e_[i] = v.get_num();
    }
    c.u_ = u;
    c.shift_ = shift;
    c.A_ = c.e_[0] * c.e_[1] + c.e_[0] * c.e_[2] + c.e_[1] * c.e_[2];
    c.B_ = -c.e_[0] * c.e_[1] * c.e_[2];
    const Integer d = (c.e_[0] - c.e_[1]) * (c.e_[0] - c.e_[2]) * (c.e_[1] - c.e_[2]);
    c.disc_ = d * d;
    c.bad_primes_ = numth::prime_divisors(Integer(2 * c.disc_));
    return c;
}

SplitCurve SplitCurve::from_coefficients(const Rational& A, const Rational& B) {
    const Rational disc = -4 * A * A * A - 27 * B * B;
    if (disc == 0) throw CurveError("singular curve");
    if (disc < 0) throw CurveError("2-torsion not fully rational");

    // x = X / D^2 turns f into the integral monic cubic X^3 + a X + b.
    Integer D;
    mpz_lcm(D.get_mpz_t(), A.get_den().get_mpz_t(), B.get_den().get_mpz_t());
    const Integer D2 = D * D;
    Rational a_q = A * Rational(D2 * D2);
    Rational b_q = B * Rational(D2 * D2 * D2);
    a_q.canonicalize();
    b_q.canonicalize();
    const Integer a = a_q.get_num();
    const Integer b = b_q.get_num();

    auto value = [&](const Integer& x) { return Integer(x * x * x + a * x + b); };
    std::optional<Integer> root;
    if (b == 0) {
        root = 0;
    } else {
        for (const Integer& d : positive_divisors(abs(b))) {
            if (value(d) == 0) { root = d; break; }
            if (value(Integer(-d)) == 0) { root = Integer(-d); break; }
        }
    }
    if (!root) throw CurveError("2-torsion not fully rational");

    const Integer r = *root;
    const Integer q = -3 * r * r - 4 * a;
    if (!is_perfect_square(q)) throw CurveError("2-torsion not fully rational");
    const Integer s = isqrt(q);
    std::array<Integer, 3> xs = {r, Integer((-r - s) / 2), Integer((-r + s) / 2)};
    std::sort(xs.begin(), xs.end());
    const Rational scale(D2);
    return from_roots(Rational(xs[0]) / scale, Rational(xs[1]) / scale, Rational(xs[2]) / scale);
}

std::string SplitCurve::to_string() const {
    std::ostringstream out;
    out << "y^2 = x^3";
    if (A_ != 0) out << (A_ < 0 ? " - " : " + ") << Integer(abs(A_)).get_str() << "x";
    if (B_ != 0) out << (B_ < 0 ? " - " : " + ") << Integer(abs(B_)).get_str();
    return out.str();
}

Fp::Fp(std::int64_t v, std::uint64_t p) : p_(p) {
    const std::int64_t r = v % static_cast<std::int64_t>(p);
    v_ = static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(p) : r);
}

Fp Fp::inverse() const {
    if (v_ == 0) throw std::domain_error("Fp: inverse of zero");
    Fp result = raw(1, p_);
    Fp base = *this;
    std::uint64_t e = p_ - 2;
    while (e) {
        if (e & 1U) result = result * base;
        base = base * base;
        e >>= 1U;
    }
    return result;
}

std::optional<Fp> Fp::sqrt() const {
    if (v_ == 0) return *this;
    auto r = numth::sqrt_mod_prime(Integer(static_cast<unsigned long>(v_)), Integer(static_cast<unsigned long>(p_)));
    if (!r) return std::nullopt;
    return raw(r->get_ui(), p_);
}

CurveModel<Rational> rational_model(const SplitCurve& curve) {
    return {Rational(curve.A()), Rational(curve.B()),
            {Rational(curve.e(0)), Rational(curve.e(1)), Rational(curve.e(2))}, Rational(1)};
}

CurveModel<Fp> reduce_mod(const SplitCurve& curve, std::uint64_t p) {
    if (mpz_divisible_ui_p(Integer(2 * curve.disc()).get_mpz_t(), p)) {
        throw CurveError("reduce_mod: bad reduction at " + std::to_string(p));
    }
    auto red = [&](const Integer& n) {
        Integer r;
        mpz_fdiv_r_ui(r.get_mpz_t(), n.get_mpz_t(), p);
        return Fp::raw(r.get_ui(), p);
    };
    return {red(curve.A()), red(curve.B()), {red(curve.e(0)), red(curve.e(1)), red(curve.e(2))}, Fp::raw(1, p)};
}

SquareClassTriple descent_image(const RationalPoint& P, const SplitCurve& curve) {
    if (P.infinity) return SquareClassTriple::trivial();
    std::array<Rational, 3> v;
    for (int i = 0; i < 3; ++i) {
        if (P.x == Rational(curve.e(i))) {
            const auto [j, k] = cyclic_complement(i);
            v[static_cast<std::size_t>(i)] = Rational((curve.e(i) - curve.e(j)) * (curve.e(i) - curve.e(k)));
            v[static_cast<std::size_t>(j)] = Rational(curve.e(i) - curve.e(j));
            v[static_cast<std::size_t>(k)] = Rational(curve.e(i) - curve.e(k));
            return SquareClassTriple::make(v[0], v[1], v[2]);
        }
    }
    for (int i = 0; i < 3; ++i) v[static_cast<std::size_t>(i)] = P.x - curve.e(i);
    return SquareClassTriple::make(v[0], v[1], v[2]);
}

std::vector<RationalPoint> point_search(const SplitCurve& curve, long height_bound) {
    if (height_bound < 1) throw std::invalid_argument("point_search: height bound must be positive");
    std::vector<RationalPoint> found;
    for (long d = 1; d * d <= height_bound; ++d) {
        const Integer dd(d);
        const Integer d2 = dd * dd;
        const Integer d4 = d2 * d2;
        const Integer d6 = d4 * d2;
        const Integer d3 = d2 * dd;
        for (long m = -height_bound; m <= height_bound; ++m) {
            if (d > 1 && std::gcd(m < 0 ? -m : m, d) != 1) continue;
            const Integer mm(m);
            // d^6 f(m/d^2) = m^3 + A m d^4 + B d^6
            const Integer num = mm * mm * mm + curve.A() * mm * d4 + curve.B() * d6;
            if (!is_perfect_square(num)) continue;
            const Rational x = Rational(mm, d2);
            const Integer s = isqrt(num);
            Rational y(s, d3);
            y.canonicalize();
            Rational xc = x;
            xc.canonicalize();
            found.push_back(RationalPoint::affine(xc, y));
            if (s != 0) found.push_back(RationalPoint::affine(xc, Rational(-y)));
        }
    }
    for (int i = 0; i < 3; ++i) found.push_back(RationalPoint::affine(Rational(curve.e(i)), Rational(0)));

    std::sort(found.begin(), found.end(), [](const RationalPoint& a, const RationalPoint& b) {
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    });
    found.erase(std::unique(found.begin(), found.end()), found.end());
    found.insert(found.begin(), RationalPoint::at_infinity());
    return found;
}

std::string to_string(const RationalPoint& P) {
    if (P.infinity) return "O";
    return "(" + P.x.get_str() + "," + P.y.get_str() + ")";
}

}  // namespace cassels::curve
