#include "cassels/selmer.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace cassels::selmer {

using numth::LocalValue;
using numth::PAdicNumber;
using numth::RealInterval;

namespace {

Integer power(const Integer& p, long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(e));
    return r;
}

Rational p_power(const Integer& p, long m) {
    return m >= 0 ? Rational(power(p, m)) : Rational(Integer(1), power(p, -m));
}

gf2::BitVector class_vector_of(const Rational& a, const Rational& b, const Place& v) {
    const unsigned d = numth::local_class_dimension(v);
    const std::uint32_t ba = numth::local_class_bits(a, v);
    const std::uint32_t bb = numth::local_class_bits(b, v);
    gf2::BitVector out(2 * d);
    for (unsigned t = 0; t < d; ++t) {
        out[t] = (ba >> t) & 1U;
        out[d + t] = (bb >> t) & 1U;
    }
    return out;
}

// Range of exponents m for sample points x = n p^m.
long exponent_radius(const SplitCurve& curve, const Integer& p) {
    return 2 * numth::valuation(curve.disc(), p) + 4;
}

std::vector<Integer> generators_of(const SplitCurve& curve) {
    std::vector<Integer> gens{Integer(-1)};
    for (const Integer& p : curve.bad_primes()) gens.push_back(p);
    return gens;
}

// Exponent vector of a squarefree integer over {-1} and the given primes.
gf2::BitVector exponents(const Integer& b, const std::vector<Integer>& gens) {
    gf2::BitVector out(gens.size(), false);
    Integer rest = b;
    if (sgn(rest) < 0) {
        out[0] = true;
        rest = -rest;
    }
    for (std::size_t g = 1; g < gens.size(); ++g) {
        if (mpz_divisible_p(rest.get_mpz_t(), gens[g].get_mpz_t())) {
            out[g] = true;
            rest /= gens[g];
        }
    }
    if (rest != 1) throw curve::CurveError("square class " + b.get_str() + " is not supported on the bad primes");
    return out;
}

gf2::BitVector coordinates_over(const SquareClassTriple& beta, const std::vector<Integer>& gens) {
    gf2::BitVector out = exponents(beta[0], gens);
    const gf2::BitVector second = exponents(beta[1], gens);
    out.insert(out.end(), second.begin(), second.end());
    return out;
}

SquareClassTriple triple_from(const gf2::BitVector& coords, const std::vector<Integer>& gens) {
    Integer b1 = 1, b2 = 1;
    const std::size_t n = gens.size();
    for (std::size_t g = 0; g < n; ++g) {
        if (coords[g]) b1 *= gens[g];
        if (coords[n + g]) b2 *= gens[g];
    }
    return SquareClassTriple::make(Rational(b1), Rational(b2), Rational(b1 * b2));
}

std::array<Integer, 3> sorted_roots(const SplitCurve& curve) {
    auto r = curve.roots();
    std::sort(r.begin(), r.end());
    return r;
}

}  // namespace

TwoCovering TwoCovering::make(const SplitCurve& curve, const SquareClassTriple& beta) {
    return TwoCovering{curve, beta,
                       {conic::conic_for(curve, beta, 0), conic::conic_for(curve, beta, 1),
                        conic::conic_for(curve, beta, 2)},
                       std::nullopt};
}

gf2::BitVector local_class_vector(const SquareClassTriple& beta, const Place& v) {
    return class_vector_of(Rational(beta[0]), Rational(beta[1]), v);
}

bool LocalImage::contains(const SquareClassTriple& beta) const {
    return gf2::in_span(basis, local_class_vector(beta, place));
}

unsigned expected_image_dimension(const Place& v) {
    if (v.is_infinite()) return 1;
    return v.prime() == 2 ? 3 : 2;
}

LocalImage local_image(const SplitCurve& curve, const Place& v) {
    LocalImage image;
    image.place = v;
    if (v.is_infinite()) {
        // E(R) has two components; the identity component maps to the trivial
        // class, the other one to the signs at any x strictly between the two
        // smaller roots.
        const auto s = sorted_roots(curve);
        const Rational x0 = Rational(s[0] + s[1]) / 2;
        image.basis.push_back(class_vector_of(x0 - curve.e(0), x0 - curve.e(1), v));
        return image;
    }

    const unsigned target = expected_image_dimension(v);
    auto offer = [&](const gf2::BitVector& vec) {
        if (!gf2::in_span(image.basis, vec)) image.basis.push_back(vec);
        return image.basis.size() >= target;
    };
    const auto model = curve::rational_model(curve);
    for (int i = 0; i < 3; ++i) {
        const auto img = curve::descent_image(curve::torsion_point(i, model), curve);
        if (offer(local_class_vector(img, v))) return image;
    }

    const Integer& p = v.prime();
    const long radius = exponent_radius(curve, p);
    for (long bound : {16L, 256L, 4096L}) {
        for (long step = 0; step <= 2 * radius; ++step) {
            // m = 0, -1, 1, -2, 2, ...
            const long m = (step % 2 == 0) ? step / 2 : -(step + 1) / 2;
            const Rational unit = p_power(p, m);
            for (long n = -bound; n <= bound; ++n) {
                if (n == 0) continue;
                for (int shift = -1; shift < 3; ++shift) {
                    Rational x = unit * n;
                    if (shift >= 0) x += curve.e(shift);
                    const Rational fx = curve.f(x);
                    if (fx == 0 || !numth::is_square_local(fx, v)) continue;
                    if (offer(class_vector_of(x - curve.e(0), x - curve.e(1), v))) return image;
                }
            }
        }
    }
    throw ArithmeticError("local_image: sampling did not reach dimension " + std::to_string(target) + " at " +
                          v.to_string() + " for " + curve.to_string());
}

const LocalImage& LocalImageCache::get(const Place& v) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = images_.find(v);
    if (it == images_.end()) it = images_.emplace(v, local_image(curve_, v)).first;
    return it->second;
}

bool is_locally_soluble(const TwoCovering& cov, const Place& v) {
    return local_image(cov.curve, v).contains(cov.beta);
}

bool is_locally_soluble(const TwoCovering& cov, const Place& v, LocalImageCache& cache) {
    return cache.get(v).contains(cov.beta);
}

std::vector<SquareClassTriple> candidate_space(const SplitCurve& curve) {
    std::vector<SquareClassTriple> out;
    const auto gens = generators_of(curve);
    for (const Integer& g : gens) out.push_back(SquareClassTriple::make(Rational(g), 1, Rational(g)));
    for (const Integer& g : gens) out.push_back(SquareClassTriple::make(1, Rational(g), Rational(g)));
    return out;
}

std::vector<Place> relevant_places(const SplitCurve& curve) {
    std::vector<Place> places{Place::infinity()};
    for (const Integer& p : curve.bad_primes()) places.push_back(Place::finite(p));
    return places;
}

std::vector<SquareClassTriple> SelmerGroup::elements() const {
    std::vector<SquareClassTriple> out;
    const std::size_t count = std::size_t{1} << dim;
    for (std::size_t mask = 0; mask < count; ++mask) {
        SquareClassTriple t = SquareClassTriple::trivial();
        for (std::size_t b = 0; b < dim; ++b)
            if ((mask >> b) & 1U) t = t * basis[b];
        out.push_back(t);
    }
    return out;
}

std::optional<gf2::BitVector> SelmerGroup::coordinates(const SquareClassTriple& beta) const {
    const auto gens = generators_of(curve);
    gf2::BitVector target;
    try {
        target = coordinates_over(beta, gens);
    } catch (const curve::CurveError&) {
        return std::nullopt;
    }
    // Solve sum c_b basis_b = target via the kernel of [basis | target].
    std::vector<gf2::BitVector> columns;
    for (const auto& b : basis) columns.push_back(coordinates_over(b, gens));
    columns.push_back(target);
    const gf2::BitMatrix m = gf2::BitMatrix::from_rows(columns, target.size()).transpose();
    for (const auto& k : m.kernel()) {
        if (k.back()) return gf2::BitVector(k.begin(), k.end() - 1);
    }
    return std::nullopt;
}

SelmerGroup compute_selmer(const SplitCurve& curve) {
    const auto gens = generators_of(curve);
    const auto cands = candidate_space(curve);
    const std::size_t n = cands.size();

    std::vector<gf2::BitVector> constraints;
    for (const Place& v : relevant_places(curve)) {
        const LocalImage image = local_image(curve, v);
        const std::size_t width = 2 * numth::local_class_dimension(v);
        // Annihilator of the image: functionals vanishing on it.
        std::vector<gf2::BitVector> annihilator;
        if (image.basis.empty()) {
            for (std::size_t t = 0; t < width; ++t) {
                gf2::BitVector e(width, false);
                e[t] = true;
                annihilator.push_back(e);
            }
        } else {
            annihilator = gf2::BitMatrix::from_rows(image.basis, width).kernel();
        }
        std::vector<gf2::BitVector> columns;
        for (const auto& c : cands) columns.push_back(local_class_vector(c, v));
        for (const auto& a : annihilator) {
            gf2::BitVector row(n, false);
            for (std::size_t g = 0; g < n; ++g) {
                bool acc = false;
                for (std::size_t t = 0; t < width; ++t) acc ^= (a[t] && columns[g][t]);
                row[g] = acc;
            }
            constraints.push_back(row);
        }
    }
    std::vector<gf2::BitVector> kernel;
    if (constraints.empty()) {
        for (std::size_t g = 0; g < n; ++g) {
            gf2::BitVector e(n, false);
            e[g] = true;
            kernel.push_back(e);
        }
    } else {
        kernel = gf2::BitMatrix::from_rows(constraints, n).kernel();
    }

    SelmerGroup group;
    group.curve = curve;
    group.dim = kernel.size();
    const auto model = curve::rational_model(curve);
    group.torsion_image.push_back(SquareClassTriple::trivial());
    for (int i = 0; i < 3; ++i) group.torsion_image.push_back(curve::descent_image(curve::torsion_point(i, model), curve));

    std::vector<gf2::BitVector> chosen;
    auto consider = [&](const gf2::BitVector& vec) {
        if (gf2::in_span(chosen, vec)) return;
        chosen.push_back(vec);
        group.basis.push_back(triple_from(vec, gens));
    };
    for (std::size_t t = 1; t < group.torsion_image.size(); ++t) {
        const gf2::BitVector vec = coordinates_over(group.torsion_image[t], gens);
        if (!gf2::in_span(kernel, vec)) {
            throw ArithmeticError("compute_selmer: torsion image " + group.torsion_image[t].to_string() +
                                  " fails a local condition");
        }
        consider(vec);
    }
    for (const auto& k : kernel) consider(k);
    return group;
}

std::vector<SquareClassTriple> brute_force_selmer(const SplitCurve& curve) {
    const auto gens = generators_of(curve);
    const std::size_t n = 2 * gens.size();
    std::vector<LocalImage> images;
    for (const Place& v : relevant_places(curve)) images.push_back(local_image(curve, v));
    std::vector<SquareClassTriple> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        gf2::BitVector coords(n);
        for (std::size_t b = 0; b < n; ++b) coords[b] = (mask >> b) & 1U;
        const SquareClassTriple beta = triple_from(coords, gens);
        bool ok = true;
        for (const auto& img : images) ok = ok && img.contains(beta);
        if (ok) out.push_back(beta);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string LocalCoveringPoint::to_string() const {
    std::ostringstream out;
    out << "place " << place.to_string() << ", x = " << x.get_str() << ", w = (" << numth::to_string(w[0]) << ", "
        << numth::to_string(w[1]) << ", " << numth::to_string(w[2]) << ")";
    return out.str();
}

LocalValue evaluate_tangent(const conic::TangentForm& form, const LocalCoveringPoint& q) {
    std::optional<LocalValue> acc;
    const std::array<std::pair<const Integer*, int>, 2> terms = {{{&form.gamma_coeffs[0], form.j},
                                                                   {&form.gamma_coeffs[1], form.k}}};
    for (const auto& [coeff, idx] : terms) {
        if (*coeff == 0) continue;
        LocalValue term = numth::scaled(q.w[static_cast<std::size_t>(idx)], Rational(*coeff));
        acc = acc ? numth::add(*acc, term) : term;
    }
    const Rational c(form.gamma_coeffs[2]);
    if (!acc) {
        if (q.place.is_infinite()) return RealInterval::exact(c);
        return PAdicNumber::from_rational(c, q.place.prime(), q.precision);
    }
    return numth::plus(*acc, c);
}

namespace {

bool safely_nonzero(const LocalValue& value, long precision) {
    if (const auto* x = std::get_if<PAdicNumber>(&value)) {
        const long needed = x->prime() == 2 ? 3 : 1;
        return x->precision() >= std::max(needed, precision / 2);
    }
    return std::get<RealInterval>(value).sign() != 0;
}

bool avoids(const std::vector<conic::TangentForm>& avoid, const LocalCoveringPoint& q, long precision) {
    for (const auto& form : avoid) {
        try {
            if (!safely_nonzero(evaluate_tangent(form, q), precision)) return false;
        } catch (const PrecisionError&) {
            return false;
        }
    }
    return true;
}

std::optional<LocalCoveringPoint> real_point(const TwoCovering& cov, const std::vector<conic::TangentForm>& avoid,
                                             const LocalPointOptions& options) {
    const auto s = sorted_roots(cov.curve);
    std::array<int, 3> signs{};
    for (int i = 0; i < 3; ++i) signs[static_cast<std::size_t>(i)] = sgn(cov.beta[i]);
    // Admissible region: all x - e_i > 0, or e_min < x < e_mid.
    const bool all_positive = signs[0] > 0 && signs[1] > 0 && signs[2] > 0;
    bool middle = true;
    for (int i = 0; i < 3; ++i) middle = middle && (signs[static_cast<std::size_t>(i)] > 0) == (cov.curve.e(i) == s[0]);
    if (!all_positive && !middle) return std::nullopt;

    std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<long> pick(1, 1023);
    for (int attempt = 0; attempt < 2000; ++attempt) {
        Rational x;
        if (all_positive) {
            x = Rational(s[2]) + Rational(pick(rng), 1 + pick(rng) % 16);
        } else {
            x = Rational(s[0]) + Rational(s[1] - s[0]) * Rational(pick(rng), 1024);
        }
        x.canonicalize();
        for (long bits = options.real_bits; bits <= 4096; bits *= 2) {
            LocalCoveringPoint q;
            q.place = Place::infinity();
            q.x = x;
            q.precision = bits;
            std::mt19937_64 sign_rng(rng());
            for (int i = 0; i < 3; ++i) {
                Rational r = (x - cov.curve.e(i)) / cov.beta[i];
                r.canonicalize();
                RealInterval w = RealInterval::sqrt(r, bits);
                if (sign_rng() & 1U) w = -w;
                q.w[static_cast<std::size_t>(i)] = w;
            }
            if (avoids(avoid, q, bits)) return q;
        }
    }
    throw LocalPointError("local_point: no real point avoiding the tangent forms for " + cov.beta.to_string());
}

LocalCoveringPoint padic_point(const TwoCovering& cov, const Place& v, const std::vector<conic::TangentForm>& avoid,
                               const LocalPointOptions& options) {
    const Integer& p = v.prime();
    const long radius = exponent_radius(cov.curve, p);
    long precision = options.precision > 0 ? options.precision : numth::default_precision(p, cov.curve.disc());

    std::mt19937_64 rng(options.seed * 0x2545f4914f6cdd1dULL + mpz_get_ui(p.get_mpz_t()));
    std::uniform_int_distribution<long> expo(-radius, radius);
    std::uniform_int_distribution<int> kind(-1, 2);
    long candidates_with_points = 0;
    for (long bound : {32L, 512L, 8192L}) {
        std::uniform_int_distribution<long> digit(-bound, bound);
        for (int attempt = 0; attempt < 4000; ++attempt) {
            const long n = digit(rng);
            if (n == 0) continue;
            const long m = expo(rng);
            const int shift = kind(rng);
            Rational x = p_power(p, m) * n;
            if (shift >= 0) x += cov.curve.e(shift);
            x.canonicalize();
            std::array<Rational, 3> ratios;
            bool ok = true;
            for (int i = 0; i < 3 && ok; ++i) {
                Rational r = (x - cov.curve.e(i)) / cov.beta[i];
                r.canonicalize();
                ok = r != 0 && numth::is_square_local(r, v);
                ratios[static_cast<std::size_t>(i)] = r;
            }
            if (!ok) continue;
            ++candidates_with_points;
            const std::uint64_t flips = rng();
            for (long prec = precision; prec <= numth::kPrecisionCap; prec *= 2) {
                LocalCoveringPoint q;
                q.place = v;
                q.x = x;
                q.precision = prec;
                for (int i = 0; i < 3; ++i) {
                    PAdicNumber w = *numth::padic_sqrt(ratios[static_cast<std::size_t>(i)], p, prec);
                    if ((flips >> i) & 1U) w = -w;
                    q.w[static_cast<std::size_t>(i)] = w;
                }
                if (avoids(avoid, q, prec)) return q;
                // a tangent form is small here; more digits may separate it from 0
                if (prec * 2 > numth::kPrecisionCap) break;
            }
        }
    }
    throw LocalPointError("local_point: search exhausted at " + v.to_string() + " for " + cov.beta.to_string() +
                          " on " + cov.curve.to_string() + " (" + std::to_string(candidates_with_points) +
                          " candidate x on the covering)");
}

}  // namespace

LocalCoveringPoint local_point(const TwoCovering& cov, const Place& v, const std::vector<conic::TangentForm>& avoid,
                               const LocalPointOptions& options) {
    if (v.is_infinite()) {
        auto q = real_point(cov, avoid, options);
        if (!q) throw LocalPointError("local_point: " + cov.beta.to_string() + " has no real points");
        return *q;
    }
    return padic_point(cov, v, avoid, options);
}

bool verify_local_point(const TwoCovering& cov, const LocalCoveringPoint& q) {
    for (int i = 0; i < 3; ++i) {
        const Rational target = q.x - cov.curve.e(i);
        const LocalValue& w = q.w[static_cast<std::size_t>(i)];
        const LocalValue value = numth::scaled(numth::multiply(w, w), Rational(cov.beta[i]));
        if (const auto* pv = std::get_if<PAdicNumber>(&value)) {
            if (!agree(*pv, PAdicNumber::from_rational(target, pv->prime(), pv->precision()))) return false;
        } else {
            const auto& r = std::get<RealInterval>(value);
            if (r.lo > target || r.hi < target) return false;
        }
    }
    return true;
}

}  // namespace cassels::selmer
