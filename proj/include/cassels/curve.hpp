#pragma once

// Elliptic curves y^2 = (x - e1)(x - e2)(x - e3) with rational 2-torsion.

#include "cassels/numth.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cassels::curve {

using numth::SquareClass;

class CurveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cyclic complement (j, k) of a root index i in {0, 1, 2}.
inline constexpr std::array<int, 2> cyclic_complement(int i) { return {(i + 1) % 3, (i + 2) % 3}; }

/// (b1, b2, b3) of squarefree integers with square product.
class SquareClassTriple {
public:
    SquareClassTriple() = default;
    /// Reduces each entry to its square class; throws if the product is not a square.
    static SquareClassTriple make(const Rational& b1, const Rational& b2, const Rational& b3);
    static SquareClassTriple trivial() { return {}; }

    const Integer& operator[](int i) const { return b_[static_cast<std::size_t>(i)].rep; }
    const std::array<SquareClass, 3>& entries() const { return b_; }
    bool is_trivial() const { return b_[0].is_trivial() && b_[1].is_trivial() && b_[2].is_trivial(); }

    friend SquareClassTriple operator*(const SquareClassTriple& a, const SquareClassTriple& b);
    friend bool operator==(const SquareClassTriple& a, const SquareClassTriple& b) { return a.b_ == b.b_; }
    friend bool operator<(const SquareClassTriple& a, const SquareClassTriple& b);

    std::string to_string() const;

private:
    std::array<SquareClass, 3> b_{};
};

class SplitCurve {
public:
    /// Admissible change of variables to integral roots with zero sum.
    static SplitCurve from_roots(const Rational& e1, const Rational& e2, const Rational& e3);
    /// y^2 = x^3 + A x + B; throws CurveError("singular curve") or
    /// CurveError("2-torsion not fully rational").
    static SplitCurve from_coefficients(const Rational& A, const Rational& B);

    const Integer& e(int i) const { return e_[static_cast<std::size_t>(i)]; }
    const std::array<Integer, 3>& roots() const { return e_; }
    const Integer& A() const { return A_; }
    const Integer& B() const { return B_; }
    const Integer& disc() const { return disc_; }
    /// Primes dividing 2 * disc, ascending.
    const std::vector<Integer>& bad_primes() const { return bad_primes_; }

    /// Input coordinates relate by x = u^2 (x_in - shift), y = u^3 y_in.
    const Integer& scale() const { return u_; }
    const Rational& shift() const { return shift_; }

    Rational f(const Rational& x) const { return x * x * x + A_ * x + B_; }
    std::string to_string() const;

private:
    std::array<Integer, 3> e_;
    Integer A_, B_, disc_;
    std::vector<Integer> bad_primes_;
    Integer u_ = 1;
    Rational shift_ = 0;
};

/// Prime field element with a runtime modulus (< 2^63).
class Fp {
public:
    Fp() = default;
    Fp(std::int64_t v, std::uint64_t p);
    static Fp raw(std::uint64_t v, std::uint64_t p) { Fp r; r.v_ = v; r.p_ = p; return r; }

    std::uint64_t value() const { return v_; }
    std::uint64_t modulus() const { return p_; }
    bool is_zero() const { return v_ == 0; }
    Fp inverse() const;
    std::optional<Fp> sqrt() const;

    friend Fp operator+(Fp a, Fp b) { return raw(a.v_ + b.v_ >= a.p_ ? a.v_ + b.v_ - a.p_ : a.v_ + b.v_, a.p_); }
    friend Fp operator-(Fp a, Fp b) { return raw(a.v_ >= b.v_ ? a.v_ - b.v_ : a.v_ + a.p_ - b.v_, a.p_); }
    Fp operator-() const { return raw(v_ == 0 ? 0 : p_ - v_, p_); }
    friend Fp operator*(Fp a, Fp b) {
        return raw(static_cast<std::uint64_t>(static_cast<unsigned __int128>(a.v_) * b.v_ % a.p_), a.p_);
    }
    friend Fp operator/(Fp a, Fp b) { return a * b.inverse(); }
    friend bool operator==(Fp a, Fp b) { return a.v_ == b.v_; }

private:
    std::uint64_t v_ = 0;
    std::uint64_t p_ = 2;
};

/// Coefficients of y^2 = x^3 + A x + B = prod (x - e_i) over a field F.
template <class F>
struct CurveModel {
    F A, B;
    std::array<F, 3> e;
    F one;

    F constant(long k) const { return F(one * F(k)); }
    F f(const F& x) const { return F(x * x * x + A * x + B); }
};

template <>
inline Fp CurveModel<Fp>::constant(long k) const {
    return Fp(k, one.modulus());
}

template <class F>
struct Point {
    bool infinity = true;
    F x{};
    F y{};

    static Point at_infinity() { return Point{}; }
    static Point affine(F x, F y) { return Point{false, std::move(x), std::move(y)}; }

    friend bool operator==(const Point& a, const Point& b) {
        if (a.infinity || b.infinity) return a.infinity == b.infinity;
        return a.x == b.x && a.y == b.y;
    }
};

using RationalPoint = Point<Rational>;

CurveModel<Rational> rational_model(const SplitCurve& curve);
/// Reduction modulo a prime of good reduction.
CurveModel<Fp> reduce_mod(const SplitCurve& curve, std::uint64_t p);

template <class F>
bool on_curve(const Point<F>& P, const CurveModel<F>& E) {
    return P.infinity || P.y * P.y == E.f(P.x);
}

/// Chord-tangent addition.
template <class F>
Point<F> add(const Point<F>& P, const Point<F>& Q, const CurveModel<F>& E) {
    if (P.infinity) return Q;
    if (Q.infinity) return P;
    F lambda;
    if (P.x == Q.x) {
        if (P.y == -Q.y) return Point<F>::at_infinity();
        lambda = F((E.constant(3) * P.x * P.x + E.A) / (E.constant(2) * P.y));
    } else {
        lambda = F((Q.y - P.y) / (Q.x - P.x));
    }
    F x3 = F(lambda * lambda - P.x - Q.x);
    F y3 = F(lambda * (P.x - x3) - P.y);
    return Point<F>::affine(std::move(x3), std::move(y3));
}

template <class F>
Point<F> negate(const Point<F>& P) {
    if (P.infinity) return P;
    return Point<F>::affine(P.x, F(-P.y));
}

template <class F>
Point<F> torsion_point(int i, const CurveModel<F>& E) {
    return Point<F>::affine(E.e[static_cast<std::size_t>(i)], F(E.one - E.one));
}

/// P + T_i by the closed translation formula; falls back to the group law
/// when x(P) = e_i, where the formula is singular.
template <class F>
Point<F> translate_by_torsion(const Point<F>& P, int i, const CurveModel<F>& E) {
    if (P.infinity) return torsion_point(i, E);
    const auto [j, k] = cyclic_complement(i);
    const F& ei = E.e[static_cast<std::size_t>(i)];
    const F& ej = E.e[static_cast<std::size_t>(j)];
    const F& ek = E.e[static_cast<std::size_t>(k)];
    if (P.x == ei) return add(P, torsion_point(i, E), E);
    const F d = F(P.x - ei);
    F x = F((ei * P.x + ej * ek - ei * (ej + ek)) / d);
    F y = F(-((ej - ei) * (ek - ei) * P.y) / (d * d));
    return Point<F>::affine(std::move(x), std::move(y));
}

/// Complete 2-descent map E(Q) -> square-class triples.
SquareClassTriple descent_image(const RationalPoint& P, const SplitCurve& curve);

/// All points with x = m/d^2, |m| <= bound, d^2 <= bound, plus infinity and the
/// 2-torsion, in a deterministic order.
std::vector<RationalPoint> point_search(const SplitCurve& curve, long height_bound);

std::string to_string(const RationalPoint& P);

}  // namespace cassels::curve
