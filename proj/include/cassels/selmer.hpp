#pragma once

// Complete 2-descent: local images, local solubility of 2-coverings, the
// 2-Selmer group and local points on coverings.

#include "cassels/conic.hpp"
#include "cassels/curve.hpp"
#include "cassels/gf2.hpp"
#include "cassels/padic.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace cassels::selmer {

using curve::SplitCurve;
using curve::SquareClassTriple;
using numth::Place;

class LocalPointError : public ArithmeticError {
public:
    using ArithmeticError::ArithmeticError;
};

/// A rational point on H_i together with the tangent to H_i there.
struct GlobalDatum {
    conic::ProjPoint point;
    conic::TangentForm tangent;
};

/// The 2-covering D_beta, cut out by the conics H_1, H_2, H_3 in P^3.
struct TwoCovering {
    SplitCurve curve;
    SquareClassTriple beta;
    std::array<conic::CoveringConic, 3> conics;
    std::optional<std::array<GlobalDatum, 3>> global_data;

    static TwoCovering make(const SplitCurve& curve, const SquareClassTriple& beta);
};

/// Local class of a triple at v: bits of b1 then b2 (b3 is determined).
gf2::BitVector local_class_vector(const SquareClassTriple& beta, const Place& v);

/// Image of E(Q_v)/2E(Q_v) in the local square-class triples.
struct LocalImage {
    Place place = Place::infinity();
    std::vector<gf2::BitVector> basis;

    bool contains(const SquareClassTriple& beta) const;
};

/// Expected dimension of the local image: 1 at infinity, 2 at odd p, 3 at 2.
unsigned expected_image_dimension(const Place& v);

/// Computes the local image. At infinity by sign analysis of the real
/// components; at a prime by sampling Q_p-points with rational x until the
/// expected dimension is reached.
LocalImage local_image(const SplitCurve& curve, const Place& v);

/// Thread-safe cache of local images for one curve.
class LocalImageCache {
public:
    explicit LocalImageCache(SplitCurve curve) : curve_(std::move(curve)) {}
    const LocalImage& get(const Place& v);

private:
    SplitCurve curve_;
    std::mutex mutex_;
    std::map<Place, LocalImage> images_;
};

bool is_locally_soluble(const TwoCovering& cov, const Place& v);
bool is_locally_soluble(const TwoCovering& cov, const Place& v, LocalImageCache& cache);

/// Generators of the candidate space: (b1, b2, b1 b2) with b1, b2 running
/// over products of -1 and the bad primes. The first half of the list moves
/// b1, the second half b2.
std::vector<SquareClassTriple> candidate_space(const SplitCurve& curve);

/// Places at which Selmer membership is tested: infinity and the bad primes.
std::vector<Place> relevant_places(const SplitCurve& curve);

struct SelmerGroup {
    SplitCurve curve;
    std::vector<SquareClassTriple> basis;
    std::size_t dim = 0;
    /// Images of T_0, T_1, T_2, T_3.
    std::vector<SquareClassTriple> torsion_image;

    /// All 2^dim elements, indexed by the bits of the index over the basis.
    std::vector<SquareClassTriple> elements() const;
    /// Coordinates of an element over the basis; nullopt if not in the group.
    std::optional<gf2::BitVector> coordinates(const SquareClassTriple& beta) const;
};

/// Selmer group as the kernel of the local conditions on the candidate space.
/// The basis starts with a basis of the torsion image.
SelmerGroup compute_selmer(const SplitCurve& curve);

/// Enumerates every candidate and tests it place by place; for cross-checks.
std::vector<SquareClassTriple> brute_force_selmer(const SplitCurve& curve);

/// A point (w1 : w2 : w3 : 1) on D_beta over Q_v with x - e_i = beta_i w_i^2.
struct LocalCoveringPoint {
    Place place = Place::infinity();
    Rational x;
    std::array<numth::LocalValue, 3> w;
    long precision = 0;

    std::string to_string() const;
};

struct LocalPointOptions {
    std::uint64_t seed = 0;
    /// Relative p-adic precision; 0 means the default for the curve.
    long precision = 0;
    /// Bits for real square roots.
    long real_bits = 128;
};

/// Value of a tangent form at a local point (Gamma = w, T = 1).
numth::LocalValue evaluate_tangent(const conic::TangentForm& form, const LocalCoveringPoint& q);

/// Searches for a local point at which every avoid-form is safely nonzero:
/// valuation below half the precision at a prime, decided sign at infinity.
/// Throws LocalPointError if the search is exhausted.
LocalCoveringPoint local_point(const TwoCovering& cov, const Place& v,
                               const std::vector<conic::TangentForm>& avoid, const LocalPointOptions& options = {});

/// Residual check: recovered x_v = e_i + beta_i w_i^2 agrees across i.
bool verify_local_point(const TwoCovering& cov, const LocalCoveringPoint& q);

}  // namespace cassels::selmer
