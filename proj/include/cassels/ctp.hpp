#pragma once

// The Cassels-Tate pairing on the 2-Selmer group of a curve with full
// rational 2-torsion, by local points and tangent forms on 2-coverings.

#include "cassels/gf2.hpp"
#include "cassels/selmer.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cassels::ctp {

using curve::SplitCurve;
using curve::SquareClassTriple;
using numth::Place;
using selmer::GlobalDatum;
using selmer::LocalCoveringPoint;
using selmer::SelmerGroup;
using selmer::TwoCovering;

/// An element of (1/2)Z/Z stored as a bit: 0 <-> +1, 1/2 <-> -1.
struct PairingValue {
    bool bit = false;

    static PairingValue from_sign(int s) { return PairingValue{s < 0}; }
    int sign() const { return bit ? -1 : 1; }
    std::string to_string() const { return bit ? "1/2" : "0"; }
    friend bool operator==(const PairingValue&, const PairingValue&) = default;
};

struct GlobalOptions {
    /// 0 selects the canonical conic solutions; other values randomize them.
    std::uint64_t seed = 0;
    /// Re-pick any conic point with T* = 0 so the affine cross-check applies.
    bool require_affine = true;
};

/// Solves the three conics of a Selmer element and caches the result in
/// cov.global_data. Throws ArithmeticError if a conic has no point.
const std::array<GlobalDatum, 3>& global_data(TwoCovering& cov, const GlobalOptions& options = {});

/// Good primes below this bound are always evaluated: beyond it a point of
/// the covering off the three tangent planes exists modulo p.
inline constexpr long kSmallPrimeBound = 11;

/// {inf, 2} + primes of disc + primes of every beta_i, beta'_i + primes of
/// the T* coordinates and contents of the tangent forms + good primes up to
/// kSmallPrimeBound + `extra`, sorted and without repeats.
std::vector<Place> contributing_places(const SplitCurve& curve, const SquareClassTriple& a,
                                       const SquareClassTriple& a2, const std::array<GlobalDatum, 3>& global,
                                       const std::vector<Place>& extra = {});

/// prod_i (L_i(q), beta'_i)_v at an already chosen local point q on D_a.
int local_factor_at(const TwoCovering& cov_a, const SquareClassTriple& a2, const LocalCoveringPoint& q);

/// Chooses q = local_point(cov_a, v, avoid = the L_i) and evaluates the factor.
int local_factor(const TwoCovering& cov_a, const SquareClassTriple& a2, const Place& v,
                 const selmer::LocalPointOptions& options = {});

/// Affine cross-check quantities for one index i at one local point:
/// delta = 2 (1 + (b_k w_k G'_k - b_j w_j G'_j) / s) with s = e_k - e_j and
/// G' = G* / T*; route_value = 2 s + 2 (b_k G'_k w_k - b_j G'_j w_j);
/// tangent_value is the stored tangent form at q, which equals
/// mu * route_value with mu = -T* / content.
struct DeltaWitness {
    Place place = Place::infinity();
    int index = 0;
    numth::LocalValue delta;
    numth::LocalValue route_value;
    numth::LocalValue tangent_value;
    Integer scale;
    Rational mu;
    bool scale_identity = false;   // s * delta == route_value
    bool tangent_identity = false; // mu * route_value == tangent_value
};

/// Throws PrecisionError if a quantity cancels to zero at the current
/// precision; requires T* != 0 for every global point.
std::vector<DeltaWitness> delta_crosscheck(const TwoCovering& cov_a, const LocalCoveringPoint& q);

struct DeltaSymbols {
    int delta_product = 1;      // prod_i (delta_i, beta'_i)_v
    int correction = 1;         // prod_i (s_i mu_i, beta'_i)_v
    int cassels_product = 1;    // prod_i (L_i(q), beta'_i)_v
};

DeltaSymbols delta_symbols(const std::vector<DeltaWitness>& witnesses, const SquareClassTriple& a2);

struct PairingOptions {
    std::uint64_t conic_seed = 0;
    std::uint64_t point_seed = 0;
    long precision = 0;
    std::vector<Place> extra_places;
    bool delta_check = false;
    unsigned threads = 0;   // 0 = hardware concurrency
};

/// Pairing of two Selmer elements: the product of local factors over the
/// contributing places.
PairingValue pair(const SquareClassTriple& a, const SquareClassTriple& a2, const SplitCurve& curve,
                  const PairingOptions& options = {});

struct LocalLogEntry {
    Place place = Place::infinity();
    std::size_t row = 0;
    std::size_t col = 0;
    int factor = 1;
};

struct DeltaSummary {
    std::size_t witnesses = 0;
    std::size_t scale_identity_failures = 0;
    std::size_t tangent_identity_failures = 0;
    std::size_t corrected_symbol_failures = 0;
    /// (place, pair) evaluations where prod_i (delta_i, beta'_i) alone differs
    /// from the Cassels factor; informational.
    std::size_t uncorrected_symbol_differences = 0;
    std::size_t evaluations = 0;
    std::size_t escalations = 0;
    /// Pairing matrix assembled from the delta route.
    gf2::BitMatrix matrix;
};

struct PairingMatrix {
    std::vector<SquareClassTriple> basis;
    gf2::BitMatrix entries;
    std::vector<gf2::BitVector> kernel;
    std::size_t kernel_dim = 0;
    long refined_rank_bound = 0;
    long naive_rank_bound = 0;
    std::size_t rank = 0;
    /// Global data used for each basis element.
    std::vector<std::array<GlobalDatum, 3>> global;
    std::vector<std::vector<Place>> row_places;
    std::vector<LocalLogEntry> log;
    std::optional<DeltaSummary> delta;

    /// Human-readable violations of symmetry, zero diagonal and even rank.
    std::vector<std::string> structural_issues() const;
};

PairingMatrix pairing_matrix(const SelmerGroup& group, const PairingOptions& options = {});

/// Choice-independence reruns for verify mode.
struct VerifyResult {
    bool symmetric = false;
    bool delta_ok = false;
    bool conic_reseed_equal = false;
    bool resample_equal = false;
    bool local_factors_stable = false;
    bool enlarged_places_equal = false;
    std::vector<Place> added_places;
    std::vector<std::string> messages;

    bool ok() const {
        return symmetric && delta_ok && conic_reseed_equal && resample_equal && local_factors_stable &&
               enlarged_places_equal;
    }
};

VerifyResult verify(const SelmerGroup& group, const PairingMatrix& base, const PairingOptions& options);

/// Five good primes above kSmallPrimeBound not dividing any of the data,
/// chosen deterministically from the seed.
std::vector<Place> random_good_primes(const SplitCurve& curve, const PairingMatrix& base, std::uint64_t seed,
                                      std::size_t count = 5);

}  // namespace cassels::ctp
