#include "cassels/conic.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cassels::conic {

using numth::Place;

namespace {

constexpr int kDepthCap = 400;

Integer gcd3(const Integer& a, const Integer& b, const Integer& c) {
    Integer g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    return g;
}

Integer gcd2(const Integer& a, const Integer& b) {
    Integer g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

Integer isqrt_exact(const Integer& n) {
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    if (r * r != n) throw ArithmeticError("conic: expected a perfect square");
    return r;
}

// n = k * m^2 with k squarefree (sign carried by k).
std::pair<Integer, Integer> split_square(const Integer& n) {
    const Integer k = numth::squarefree_part(n).rep;
    return {k, isqrt_exact(Integer(n / k))};
}

// Centered root t of t^2 = A mod |B|, |B| squarefree; nullopt if none exists.
std::optional<Integer> sqrt_mod_squarefree(const Integer& A, const Integer& modulus, std::mt19937_64* rng) {
    Integer t = 0;
    Integer m = 1;
    for (const auto& [q, e] : numth::factorize(modulus).factors) {
        (void)e;
        Integer a_mod;
        mpz_fdiv_r(a_mod.get_mpz_t(), A.get_mpz_t(), q.get_mpz_t());
        Integer r;
        if (a_mod == 0 || q == 2) {
            r = a_mod;
        } else {
            auto root = numth::sqrt_mod_prime(a_mod, q);
            if (!root) return std::nullopt;
            r = *root;
            if (rng != nullptr && ((*rng)() & 1U)) r = q - r;
        }
        // CRT: t = t (mod m), t = r (mod q)
        Integer inv;
        mpz_invert(inv.get_mpz_t(), m.get_mpz_t(), q.get_mpz_t());
        Integer s = (r - t) * inv;
        mpz_fdiv_r(s.get_mpz_t(), s.get_mpz_t(), q.get_mpz_t());
        t += m * s;
        m *= q;
    }
    mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), m.get_mpz_t());
    if (2 * t > m) t -= m;
    return t;
}

using Triple = std::array<Integer, 3>;

Triple make_primitive(Triple v) {
    const Integer g = gcd3(v[0], v[1], v[2]);
    if (g == 0) throw ArithmeticError("conic: zero vector");
    for (auto& x : v) x /= g;
    return v;
}

// Nontrivial (x, y, z) with x^2 = A y^2 + B z^2 for squarefree A, B, assuming
// the equation is soluble.
Triple descend(const Integer& A, const Integer& B, std::mt19937_64* rng, int depth) {
    if (depth > kDepthCap) throw ArithmeticError("legendre_solve: descent depth cap exceeded");
    if (A == 1) return {1, 1, 0};
    if (B == 1) return {1, 0, 1};
    if (A + B == 0) return {0, 1, 1};
    if (abs(A) > abs(B)) {
        Triple s = descend(B, A, rng, depth + 1);
        return {s[0], s[2], s[1]};
    }
    const Integer absB = abs(B);
    if (absB == 1) throw ArithmeticError("legendre_solve: descent reached an insoluble base case");
    auto t = sqrt_mod_squarefree(A, absB, rng);
    if (!t) throw ArithmeticError("legendre_solve: no square root in descent");
    const Integer n = *t * *t - A;
    if (n == 0) throw ArithmeticError("legendre_solve: degenerate descent step");
    const auto [k, m] = split_square(Integer(n / B));
    const Triple s = descend(A, k, rng, depth + 1);
    return make_primitive({*t * s[0] + A * s[1], s[0] + *t * s[1], k * m * s[2]});
}

Triple shortcut(const Triple& c) {
    if (c[0] + c[1] == 0) return {1, 1, 0};
    if (c[0] + c[2] == 0) return {1, 0, 1};
    if (c[1] + c[2] == 0) return {0, 1, 1};
    return {0, 0, 0};
}

}  // namespace

ProjPoint ProjPoint::primitive(std::array<Integer, 3> v) { return ProjPoint{make_primitive(std::move(v))}; }

std::string ProjPoint::to_string() const {
    return "(" + coords[0].get_str() + ":" + coords[1].get_str() + ":" + coords[2].get_str() + ")";
}

NormalizedConic normalize(const std::array<Integer, 3>& coeffs) {
    NormalizedConic n{coeffs, {Rational(1), Rational(1), Rational(1)}};
    const Integer g = gcd3(coeffs[0], coeffs[1], coeffs[2]);
    for (auto& c : n.coeffs) c /= g;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto [k, s] = split_square(n.coeffs[i]);
        n.coeffs[i] = k;
        n.scale[i] /= s;
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < 3; ++i) {
            const std::size_t j = (i + 1) % 3;
            const std::size_t k = (i + 2) % 3;
            const Integer d = gcd2(n.coeffs[i], n.coeffs[j]);
            if (d == 1) continue;
            // a X^2 + b Y^2 + c Z^2 = d ((a/d) X^2 + (b/d) Y^2 + c d (Z/d)^2)
            n.coeffs[i] /= d;
            n.coeffs[j] /= d;
            n.coeffs[k] *= d;
            n.scale[k] *= d;
            changed = true;
        }
    }
    for (auto& s : n.scale) s.canonicalize();
    return n;
}

DiagonalConic::DiagonalConic(Integer a, Integer b, Integer c, std::optional<ConicProvenance> provenance)
    : coeffs_{std::move(a), std::move(b), std::move(c)}, provenance_(std::move(provenance)) {
    if (coeffs_[0] == 0 || coeffs_[1] == 0 || coeffs_[2] == 0) {
        throw std::invalid_argument("DiagonalConic: zero coefficient");
    }
    normalized_ = normalize(coeffs_);
}

Integer DiagonalConic::evaluate(const std::array<Integer, 3>& v) const {
    return coeffs_[0] * v[0] * v[0] + coeffs_[1] * v[1] * v[1] + coeffs_[2] * v[2] * v[2];
}

Integer DiagonalConic::bilinear(const std::array<Integer, 3>& u, const std::array<Integer, 3>& v) const {
    return coeffs_[0] * u[0] * v[0] + coeffs_[1] * u[1] * v[1] + coeffs_[2] * u[2] * v[2];
}

std::string DiagonalConic::to_string() const {
    std::ostringstream out;
    out << coeffs_[0].get_str() << " X^2 + " << coeffs_[1].get_str() << " Y^2 + " << coeffs_[2].get_str() << " Z^2";
    return out.str();
}

bool legendre_solvable(const DiagonalConic& conic) {
    // a X^2 + b Y^2 + c Z^2 = 0 is soluble in Q_v iff (-ac, -bc)_v = 1.
    const auto& n = conic.normalized().coeffs;
    const Rational u(-n[0] * n[2]);
    const Rational w(-n[1] * n[2]);
    if (numth::hilbert_symbol(u, w, Place::infinity()) != 1) return false;
    for (const Integer& p : numth::prime_divisors(Integer(2 * n[0] * n[1] * n[2]))) {
        if (numth::hilbert_symbol(u, w, Place::finite(p)) != 1) return false;
    }
    return true;
}

bool legendre_residue_criterion(const NormalizedConic& conic) {
    const auto& c = conic.coeffs;
    const int pos = (sgn(c[0]) > 0) + (sgn(c[1]) > 0) + (sgn(c[2]) > 0);
    if (pos == 0 || pos == 3) return false;
    // -bc must be a square mod |a|, and cyclically.
    for (std::size_t i = 0; i < 3; ++i) {
        const Integer modulus = abs(c[i]);
        if (modulus == 1) continue;
        const Integer target = -c[(i + 1) % 3] * c[(i + 2) % 3];
        for (const Integer& q : numth::prime_divisors(modulus)) {
            Integer r;
            mpz_fdiv_r(r.get_mpz_t(), target.get_mpz_t(), q.get_mpz_t());
            if (q == 2 || r == 0) continue;
            if (numth::legendre(r, q) != 1) return false;
        }
    }
    return true;
}

ProjPoint reparametrize(const DiagonalConic& conic, const ProjPoint& q, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coord(-3, 3);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const Triple d = {coord(rng), coord(rng), coord(rng)};
        const Integer qd = conic.evaluate(d);
        if (qd == 0) continue;
        const Integer bqd = conic.bilinear(q.coords, d);
        if (bqd == 0) continue;
        Triple r;
        for (std::size_t i = 0; i < 3; ++i) r[i] = qd * q.coords[i] - 2 * bqd * d[i];
        ProjPoint out = ProjPoint::primitive(r);
        if (out == q) continue;
        return out;
    }
    throw ArithmeticError("reparametrize: no admissible line found");
}

std::optional<ProjPoint> legendre_solve(const DiagonalConic& conic, std::uint64_t seed) {
    if (!legendre_solvable(conic)) return std::nullopt;

    std::mt19937_64 rng(seed);
    std::mt19937_64* rng_ptr = seed == 0 ? nullptr : &rng;

    Triple sol = shortcut(conic.coeffs());
    if (sol[0] == 0 && sol[1] == 0 && sol[2] == 0) {
        const NormalizedConic& n = conic.normalized();
        const Integer& a = n.coeffs[0];
        Triple normal = shortcut(n.coeffs);
        if (normal[0] == 0 && normal[1] == 0 && normal[2] == 0) {
            // a X^2 + b Y^2 + c Z^2 = 0  <=>  (aX)^2 = (-ab) Y^2 + (-ac) Z^2
            const Triple s = descend(Integer(-a * n.coeffs[1]), Integer(-a * n.coeffs[2]), rng_ptr, 0);
            normal = {s[0], a * s[1], a * s[2]};
        }
        Integer den = 1;
        std::array<Rational, 3> orig;
        for (std::size_t i = 0; i < 3; ++i) {
            orig[i] = n.scale[i] * normal[i];
            orig[i].canonicalize();
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), orig[i].get_den().get_mpz_t());
        }
        for (std::size_t i = 0; i < 3; ++i) {
            Rational v = orig[i] * den;
            v.canonicalize();
            sol[i] = v.get_num();
        }
    }
    ProjPoint q = ProjPoint::primitive(sol);
    if (conic.evaluate(q) != 0) throw ArithmeticError("legendre_solve: solution check failed");
    if (rng_ptr != nullptr) {
        q = reparametrize(conic, q, rng);
        if (conic.evaluate(q) != 0) throw ArithmeticError("legendre_solve: reparametrization check failed");
    }
    return q;
}

std::array<Integer, 3> tangent_form(const DiagonalConic& conic, const ProjPoint& q) {
    return make_primitive({conic.a() * q[0], conic.b() * q[1], conic.c() * q[2]});
}

CoveringConic conic_for(const curve::SplitCurve& curve, const curve::SquareClassTriple& beta, int i) {
    if (i < 0 || i > 2) throw std::invalid_argument("conic_for: index out of range");
    const auto [j, k] = curve::cyclic_complement(i);
    ConicProvenance prov{curve.roots(), beta, i};
    return CoveringConic{i, j, k,
                         DiagonalConic(beta[j], Integer(-beta[k]), Integer(curve.e(j) - curve.e(k)), std::move(prov))};
}

Integer TangentForm::evaluate_gamma(const std::array<Integer, 3>& gamma, const Integer& t) const {
    return gamma_coeffs[0] * gamma[static_cast<std::size_t>(j)] + gamma_coeffs[1] * gamma[static_cast<std::size_t>(k)] +
           gamma_coeffs[2] * t;
}

std::string TangentForm::to_string() const {
    std::ostringstream out;
    out << "L" << index + 1 << " = " << gamma_coeffs[0].get_str() << " G" << j + 1 << " + "
        << gamma_coeffs[1].get_str() << " G" << k + 1 << " + " << gamma_coeffs[2].get_str() << " T";
    return out.str();
}

TangentForm covering_tangent(const curve::SplitCurve& curve, const CoveringConic& h, const ProjPoint& q) {
    if (h.conic.evaluate(q) != 0) throw std::invalid_argument("covering_tangent: point not on conic");
    TangentForm tf;
    tf.index = h.index;
    tf.j = h.j;
    tf.k = h.k;
    tf.base = q;
    const Triple euler = {2 * h.conic.a() * q[0], 2 * h.conic.b() * q[1], 2 * h.conic.c() * q[2]};
    tf.content = gcd3(euler[0], euler[1], euler[2]);
    for (std::size_t m = 0; m < 3; ++m) tf.gamma_coeffs[m] = euler[m] / tf.content;
    const Integer& ej = curve.e(h.j);
    const Integer& ek = curve.e(h.k);
    tf.ambient_coeffs = {tf.gamma_coeffs[0] + tf.gamma_coeffs[1], tf.gamma_coeffs[0] * ej + tf.gamma_coeffs[1] * ek,
                         tf.gamma_coeffs[0] * ej * ej + tf.gamma_coeffs[1] * ek * ek, tf.gamma_coeffs[2]};
    return tf;
}

}  // namespace cassels::conic
