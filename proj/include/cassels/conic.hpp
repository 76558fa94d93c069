#pragma once

// Rational points on diagonal conics a X^2 + b Y^2 + c Z^2 = 0 and their
// tangent lines; the global ingredients of the pairing.

#include "cassels/curve.hpp"
#include "cassels/numth.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

namespace cassels::conic {

/// Primitive integer projective point (gcd of coordinates is 1).
struct ProjPoint {
    std::array<Integer, 3> coords;

    /// Divides out the content; throws on the zero vector.
    static ProjPoint primitive(std::array<Integer, 3> v);
    const Integer& operator[](int i) const { return coords[static_cast<std::size_t>(i)]; }
    friend bool operator==(const ProjPoint& a, const ProjPoint& b) { return a.coords == b.coords; }
    std::string to_string() const;
};

/// The conic a X^2 + b Y^2 + c Z^2 = 0 in normalized form: coefficients
/// squarefree and pairwise coprime, with X_original = scale[0] * X etc.
struct NormalizedConic {
    std::array<Integer, 3> coeffs;
    std::array<Rational, 3> scale;
};

struct ConicProvenance {
    std::array<Integer, 3> roots;
    curve::SquareClassTriple beta;
    int index = 0;
};

class DiagonalConic {
public:
    /// Throws std::invalid_argument on a zero coefficient.
    DiagonalConic(Integer a, Integer b, Integer c, std::optional<ConicProvenance> provenance = std::nullopt);

    const std::array<Integer, 3>& coeffs() const { return coeffs_; }
    const Integer& a() const { return coeffs_[0]; }
    const Integer& b() const { return coeffs_[1]; }
    const Integer& c() const { return coeffs_[2]; }
    const std::optional<ConicProvenance>& provenance() const { return provenance_; }
    const NormalizedConic& normalized() const { return normalized_; }

    Integer evaluate(const std::array<Integer, 3>& v) const;
    Integer evaluate(const ProjPoint& q) const { return evaluate(q.coords); }
    /// Symmetric bilinear form with Q(v) = B(v, v).
    Integer bilinear(const std::array<Integer, 3>& u, const std::array<Integer, 3>& v) const;

    std::string to_string() const;

private:
    std::array<Integer, 3> coeffs_;
    std::optional<ConicProvenance> provenance_;
    NormalizedConic normalized_;
};

NormalizedConic normalize(const std::array<Integer, 3>& coeffs);

/// Solvability over Q from the real place and Hilbert symbols at p | 2abc.
bool legendre_solvable(const DiagonalConic& conic);

/// Legendre's residue criterion on the normalized form (independent route).
bool legendre_residue_criterion(const NormalizedConic& conic);

/// A primitive solution, or nullopt iff the conic has no rational point.
/// seed = 0 gives the canonical descent path; other seeds randomize the
/// square-root choices and reparametrize the result through a random line.
std::optional<ProjPoint> legendre_solve(const DiagonalConic& conic, std::uint64_t seed = 0);

/// Second intersection of the conic with a random line through q.
ProjPoint reparametrize(const DiagonalConic& conic, const ProjPoint& q, std::mt19937_64& rng);

/// Primitive coefficients of the tangent line a q0 X + b q1 Y + c q2 Z at q.
std::array<Integer, 3> tangent_form(const DiagonalConic& conic, const ProjPoint& q);

/// Conic H_i of a 2-covering in the variables (Gamma_j, Gamma_k, T):
/// beta_j Gamma_j^2 - beta_k Gamma_k^2 + (e_j - e_k) T^2 = 0, with (j, k)
/// the cyclic complement of i, and Gamma_m = U1 + U2 e_m + U3 e_m^2.
struct CoveringConic {
    int index = 0;
    int j = 1;
    int k = 2;
    DiagonalConic conic;
};

CoveringConic conic_for(const curve::SplitCurve& curve, const curve::SquareClassTriple& beta, int i);

/// Tangent to H_i at a global point, in both (Gamma_j, Gamma_k, T) and
/// ambient (U1, U2, U3, T) coordinates. Coefficients are the Euler form
/// (2 b_j G_j*, -2 b_k G_k*, 2 (e_j - e_k) T*) divided by `content`.
struct TangentForm {
    int index = 0;
    int j = 1;
    int k = 2;
    ProjPoint base;
    std::array<Integer, 3> gamma_coeffs;
    std::array<Integer, 4> ambient_coeffs;
    Integer content = 1;

    /// Value at the point with Gamma coordinates (g1, g2, g3) and T.
    Integer evaluate_gamma(const std::array<Integer, 3>& gamma, const Integer& t) const;
    std::string to_string() const;
};

TangentForm covering_tangent(const curve::SplitCurve& curve, const CoveringConic& h, const ProjPoint& q);

}  // namespace cassels::conic
