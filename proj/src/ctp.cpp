#include "cassels/ctp.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <random>
#include <set>
#include <thread>

namespace cassels::ctp {

using numth::LocalValue;
using numth::PAdicNumber;
using numth::RealInterval;

namespace {

void add_prime_divisors(std::set<Place>& out, const Integer& n) {
    if (n == 0) return;
    for (const Integer& p : numth::prime_divisors(n)) out.insert(Place::finite(p));
}

std::vector<conic::TangentForm> tangents_of(const std::array<GlobalDatum, 3>& global) {
    return {global[0].tangent, global[1].tangent, global[2].tangent};
}

const std::array<GlobalDatum, 3>& require_global(const TwoCovering& cov) {
    if (!cov.global_data) throw std::logic_error("global data has not been computed for " + cov.beta.to_string());
    return *cov.global_data;
}

bool local_agree(const LocalValue& a, const LocalValue& b) {
    if (const auto* x = std::get_if<PAdicNumber>(&a)) return agree(*x, std::get<PAdicNumber>(b));
    const auto& r = std::get<RealInterval>(a);
    const auto& s = std::get<RealInterval>(b);
    return r.lo <= s.hi && s.lo <= r.hi;
}

LocalValue exact_local(const Rational& c, const LocalCoveringPoint& q) {
    if (q.place.is_infinite()) return RealInterval::exact(c);
    return PAdicNumber::from_rational(c, q.place.prime(), q.precision);
}

selmer::LocalPointOptions point_options(const PairingOptions& options, std::size_t row, int escalation) {
    selmer::LocalPointOptions o;
    o.seed = options.point_seed * 1000003ULL + row + 1;
    o.precision = options.precision;
    for (int e = 0; e < escalation; ++e) {
        o.real_bits *= 2;
        if (o.precision > 0) o.precision *= 2;
    }
    return o;
}

struct RowResult {
    std::array<GlobalDatum, 3> global;
    std::vector<Place> places;
    std::vector<LocalLogEntry> log;
    std::vector<bool> bits;
    std::vector<bool> delta_bits;
    DeltaSummary delta;
};

RowResult compute_row(const SelmerGroup& group, std::size_t r, const PairingOptions& options) {
    const auto& basis = group.basis;
    TwoCovering cov = TwoCovering::make(group.curve, basis[r]);
    RowResult out;
    out.global = global_data(cov, GlobalOptions{options.conic_seed, true});
    const auto avoid = tangents_of(out.global);

    std::set<Place> places;
    for (const auto& s : basis) {
        for (const Place& v : contributing_places(group.curve, basis[r], s, out.global, options.extra_places)) {
            places.insert(v);
        }
    }
    out.places.assign(places.begin(), places.end());
    out.bits.assign(basis.size(), false);
    out.delta_bits.assign(basis.size(), false);

    for (const Place& v : out.places) {
        LocalCoveringPoint q = selmer::local_point(cov, v, avoid, point_options(options, r, 0));
        std::vector<DeltaWitness> witnesses;
        std::vector<DeltaSymbols> symbols;
        if (options.delta_check) {
            for (int escalation = 0;; ++escalation) {
                try {
                    witnesses = delta_crosscheck(cov, q);
                    symbols.clear();
                    for (const auto& s : basis) symbols.push_back(delta_symbols(witnesses, s));
                    break;
                } catch (const PrecisionError&) {
                    if (escalation >= 1) throw;
                    ++out.delta.escalations;
                    auto o = point_options(options, r, 1);
                    if (o.precision == 0 && !v.is_infinite()) {
                        o.precision = 2 * numth::default_precision(v.prime(), group.curve.disc());
                    }
                    q = selmer::local_point(cov, v, avoid, o);
                }
            }
            for (const auto& w : witnesses) {
                ++out.delta.witnesses;
                if (!w.scale_identity) ++out.delta.scale_identity_failures;
                if (!w.tangent_identity) ++out.delta.tangent_identity_failures;
            }
        }
        for (std::size_t s = 0; s < basis.size(); ++s) {
            const int factor = local_factor_at(cov, basis[s], q);
            out.log.push_back(LocalLogEntry{v, r, s, factor});
            if (factor < 0) out.bits[s] = !out.bits[s];
            if (options.delta_check) {
                const DeltaSymbols& ds = symbols[s];
                ++out.delta.evaluations;
                if (ds.cassels_product != factor || ds.delta_product * ds.correction != ds.cassels_product) {
                    ++out.delta.corrected_symbol_failures;
                }
                if (ds.delta_product != ds.cassels_product) ++out.delta.uncorrected_symbol_differences;
                if (ds.delta_product < 0) out.delta_bits[s] = !out.delta_bits[s];
            }
        }
    }
    return out;
}

}  // namespace

const std::array<GlobalDatum, 3>& global_data(TwoCovering& cov, const GlobalOptions& options) {
    if (cov.global_data) return *cov.global_data;
    std::array<GlobalDatum, 3> data;
    for (int i = 0; i < 3; ++i) {
        const auto& h = cov.conics[static_cast<std::size_t>(i)];
        const std::uint64_t seed = options.seed == 0 ? 0 : options.seed * 3 + static_cast<std::uint64_t>(i) + 1;
        auto q = conic::legendre_solve(h.conic, seed);
        if (!q) {
            throw ArithmeticError("global_data: conic H" + std::to_string(i + 1) + " of " + cov.beta.to_string() +
                                  " on " + cov.curve.to_string() + " has no rational point");
        }
        if (options.require_affine && (*q)[2] == 0) {
            std::mt19937_64 rng(options.seed + 1000 + static_cast<std::uint64_t>(i));
            for (int attempt = 0; attempt < 100 && (*q)[2] == 0; ++attempt) q = conic::reparametrize(h.conic, *q, rng);
            if ((*q)[2] == 0) throw ArithmeticError("global_data: could not leave the line T = 0");
        }
        data[static_cast<std::size_t>(i)] = GlobalDatum{*q, conic::covering_tangent(cov.curve, h, *q)};
    }
    cov.global_data = data;
    return *cov.global_data;
}

std::vector<Place> contributing_places(const SplitCurve& curve, const SquareClassTriple& a,
                                       const SquareClassTriple& a2, const std::array<GlobalDatum, 3>& global,
                                       const std::vector<Place>& extra) {
    std::set<Place> out{Place::infinity(), Place::finite(2)};
    add_prime_divisors(out, curve.disc());
    for (int i = 0; i < 3; ++i) {
        add_prime_divisors(out, a[i]);
        add_prime_divisors(out, a2[i]);
    }
    for (const auto& g : global) {
        add_prime_divisors(out, g.point[2]);
        add_prime_divisors(out, g.tangent.content);
    }
    for (long p = 3; p <= kSmallPrimeBound; p += 2) {
        if (numth::is_prime(p)) out.insert(Place::finite(p));
    }
    out.insert(extra.begin(), extra.end());
    return {out.begin(), out.end()};
}

int local_factor_at(const TwoCovering& cov_a, const SquareClassTriple& a2, const LocalCoveringPoint& q) {
    const auto& global = require_global(cov_a);
    int product = 1;
    for (int i = 0; i < 3; ++i) {
        const LocalValue value = selmer::evaluate_tangent(global[static_cast<std::size_t>(i)].tangent, q);
        product *= numth::hilbert_symbol(value, Rational(a2[i]), q.place);
    }
    return product;
}

int local_factor(const TwoCovering& cov_a, const SquareClassTriple& a2, const Place& v,
                 const selmer::LocalPointOptions& options) {
    const auto& global = require_global(cov_a);
    const auto q = selmer::local_point(cov_a, v, tangents_of(global), options);
    return local_factor_at(cov_a, a2, q);
}

std::vector<DeltaWitness> delta_crosscheck(const TwoCovering& cov_a, const LocalCoveringPoint& q) {
    const auto& global = require_global(cov_a);
    std::vector<DeltaWitness> out;
    for (int i = 0; i < 3; ++i) {
        const auto& g = global[static_cast<std::size_t>(i)];
        const int j = g.tangent.j, k = g.tangent.k;
        const Integer& tstar = g.point[2];
        if (tstar == 0) throw std::invalid_argument("delta_crosscheck: global point on T = 0");
        const Rational gj = Rational(g.point[0]) / tstar;
        const Rational gk = Rational(g.point[1]) / tstar;
        const Integer s = cov_a.curve.e(k) - cov_a.curve.e(j);

        // sum = b_k G'_k w_k - b_j G'_j w_j
        std::optional<LocalValue> sum;
        const Rational ck = cov_a.beta[k] * gk;
        const Rational cj = -cov_a.beta[j] * gj;
        if (ck != 0) sum = numth::scaled(q.w[static_cast<std::size_t>(k)], ck);
        if (cj != 0) {
            LocalValue t = numth::scaled(q.w[static_cast<std::size_t>(j)], cj);
            sum = sum ? numth::add(*sum, t) : t;
        }

        DeltaWitness w;
        w.place = q.place;
        w.index = i;
        w.scale = s;
        w.mu = Rational(-tstar, g.tangent.content);
        w.mu.canonicalize();
        w.delta = sum ? numth::plus(numth::scaled(*sum, Rational(2) / s), 2) : exact_local(2, q);
        w.route_value = sum ? numth::plus(numth::scaled(*sum, 2), Rational(2 * s)) : exact_local(Rational(2 * s), q);
        w.tangent_value = selmer::evaluate_tangent(g.tangent, q);
        w.scale_identity = local_agree(numth::scaled(w.delta, Rational(s)), w.route_value);
        w.tangent_identity = local_agree(numth::scaled(w.route_value, w.mu), w.tangent_value);
        out.push_back(std::move(w));
    }
    return out;
}

DeltaSymbols delta_symbols(const std::vector<DeltaWitness>& witnesses, const SquareClassTriple& a2) {
    DeltaSymbols out;
    for (const auto& w : witnesses) {
        const Rational b(a2[w.index]);
        out.delta_product *= numth::hilbert_symbol(w.delta, b, w.place);
        out.correction *= numth::hilbert_symbol(Rational(w.scale) * w.mu, b, w.place);
        out.cassels_product *= numth::hilbert_symbol(w.tangent_value, b, w.place);
    }
    return out;
}

PairingValue pair(const SquareClassTriple& a, const SquareClassTriple& a2, const SplitCurve& curve,
                  const PairingOptions& options) {
    TwoCovering cov = TwoCovering::make(curve, a);
    const auto& global = global_data(cov, GlobalOptions{options.conic_seed, true});
    int product = 1;
    for (const Place& v : contributing_places(curve, a, a2, global, options.extra_places)) {
        product *= local_factor(cov, a2, v, point_options(options, 0, 0));
    }
    return PairingValue::from_sign(product);
}

std::vector<std::string> PairingMatrix::structural_issues() const {
    std::vector<std::string> issues;
    if (!entries.is_symmetric()) issues.push_back("pairing matrix is not symmetric");
    for (std::size_t r = 0; r < entries.rows(); ++r) {
        if (entries.get(r, r)) issues.push_back("nonzero diagonal entry at " + std::to_string(r));
    }
    if (rank % 2 != 0) issues.push_back("pairing matrix has odd rank " + std::to_string(rank));
    return issues;
}

PairingMatrix pairing_matrix(const SelmerGroup& group, const PairingOptions& options) {
    const std::size_t n = group.basis.size();
    std::vector<RowResult> rows(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < n; r = next++) {
            try {
                rows[r] = compute_row(group, r, options);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    unsigned threads = options.threads != 0 ? options.threads : std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    PairingMatrix m;
    m.basis = group.basis;
    m.entries = gf2::BitMatrix(n, n);
    if (options.delta_check) {
        m.delta = DeltaSummary{};
        m.delta->matrix = gf2::BitMatrix(n, n);
    }
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t s = 0; s < n; ++s) {
            m.entries.set(r, s, rows[r].bits[s]);
            if (m.delta) m.delta->matrix.set(r, s, rows[r].delta_bits[s]);
        }
        m.global.push_back(rows[r].global);
        m.row_places.push_back(rows[r].places);
        m.log.insert(m.log.end(), rows[r].log.begin(), rows[r].log.end());
        if (m.delta) {
            const auto& d = rows[r].delta;
            m.delta->witnesses += d.witnesses;
            m.delta->scale_identity_failures += d.scale_identity_failures;
            m.delta->tangent_identity_failures += d.tangent_identity_failures;
            m.delta->corrected_symbol_failures += d.corrected_symbol_failures;
            m.delta->uncorrected_symbol_differences += d.uncorrected_symbol_differences;
            m.delta->evaluations += d.evaluations;
            m.delta->escalations += d.escalations;
        }
    }
    m.rank = m.entries.rank();
    m.kernel = m.entries.kernel();
    m.kernel_dim = m.kernel.size();
    m.refined_rank_bound = static_cast<long>(m.kernel_dim) - 2;
    m.naive_rank_bound = static_cast<long>(n) - 2;
    return m;
}

std::vector<Place> random_good_primes(const SplitCurve& curve, const PairingMatrix& base, std::uint64_t seed,
                                      std::size_t count) {
    std::set<Place> used;
    for (const auto& places : base.row_places) used.insert(places.begin(), places.end());
    std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
    std::uniform_int_distribution<long> pick(kSmallPrimeBound + 2, 2000);
    std::vector<Place> out;
    for (int attempt = 0; attempt < 100000 && out.size() < count; ++attempt) {
        const long p = pick(rng);
        if (!numth::is_prime(p)) continue;
        if (mpz_divisible_ui_p(Integer(2 * curve.disc()).get_mpz_t(), static_cast<unsigned long>(p))) continue;
        const Place v = Place::finite(p);
        if (used.count(v) != 0 || std::find(out.begin(), out.end(), v) != out.end()) continue;
        out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

VerifyResult verify(const SelmerGroup& group, const PairingMatrix& base, const PairingOptions& options) {
    VerifyResult v;
    v.symmetric = base.entries.is_symmetric();
    if (!v.symmetric) v.messages.push_back("matrix computed row by row is not symmetric");

    if (base.delta) {
        const auto& d = *base.delta;
        v.delta_ok = d.scale_identity_failures == 0 && d.tangent_identity_failures == 0 &&
                     d.corrected_symbol_failures == 0 && d.matrix == base.entries;
        if (!v.delta_ok) v.messages.push_back("delta-route cross-check failed");
    } else {
        PairingOptions o = options;
        o.delta_check = true;
        const PairingMatrix with_delta = pairing_matrix(group, o);
        const auto& d = *with_delta.delta;
        v.delta_ok = d.scale_identity_failures == 0 && d.tangent_identity_failures == 0 &&
                     d.corrected_symbol_failures == 0 && d.matrix == base.entries;
        if (!v.delta_ok) v.messages.push_back("delta-route cross-check failed");
    }

    PairingOptions reseed = options;
    reseed.delta_check = false;
    reseed.conic_seed = options.conic_seed * 31 + 7919;
    v.conic_reseed_equal = pairing_matrix(group, reseed).entries == base.entries;
    if (!v.conic_reseed_equal) v.messages.push_back("matrix changed after re-solving the conics");

    v.resample_equal = true;
    v.local_factors_stable = true;
    for (std::uint64_t k = 1; k <= 3; ++k) {
        PairingOptions resample = options;
        resample.delta_check = false;
        resample.point_seed = options.point_seed + k;
        const PairingMatrix again = pairing_matrix(group, resample);
        if (!(again.entries == base.entries)) v.resample_equal = false;
        if (again.log.size() != base.log.size()) {
            v.local_factors_stable = false;
        } else {
            for (std::size_t t = 0; t < again.log.size(); ++t) {
                const auto& a = again.log[t];
                const auto& b = base.log[t];
                if (!(a.place == b.place) || a.row != b.row || a.col != b.col || a.factor != b.factor) {
                    v.local_factors_stable = false;
                    break;
                }
            }
        }
    }
    if (!v.resample_equal) v.messages.push_back("matrix changed after resampling local points");
    if (!v.local_factors_stable) v.messages.push_back("a local factor changed after resampling local points");

    v.added_places = random_good_primes(group.curve, base, options.point_seed + options.conic_seed + 1);
    PairingOptions enlarged = options;
    enlarged.delta_check = false;
    enlarged.extra_places.insert(enlarged.extra_places.end(), v.added_places.begin(), v.added_places.end());
    v.enlarged_places_equal = pairing_matrix(group, enlarged).entries == base.entries;
    if (!v.enlarged_places_equal) v.messages.push_back("matrix changed after adding good primes");
    return v;
}

}  // namespace cassels::ctp
