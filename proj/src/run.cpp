#include "cassels/report.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <sstream>

#ifndef CASSELS_VERSION
#define CASSELS_VERSION "0.0.0"
#endif

namespace cassels::cli {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

Rational parse_rational(const std::string& s) {
    std::string t;
    for (char c : s)
        if (c != ' ') t += c;
    if (t.empty()) throw std::invalid_argument("empty number");
    Rational q;
    if (q.set_str(t, 10) != 0 || q.get_den() == 0) throw std::invalid_argument("not a rational number: " + s);
    q.canonicalize();
    return q;
}

// Accepts "a=-36" as well as "-36".
std::string strip_name(const std::string& s, char name) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) return s;
    std::string head = s.substr(0, eq);
    head.erase(std::remove(head.begin(), head.end(), ' '), head.end());
    if (head.size() != 1 || std::tolower(static_cast<unsigned char>(head[0])) != name) {
        throw std::invalid_argument("unexpected coefficient name in " + s);
    }
    return s.substr(eq + 1);
}

curve::SquareClassTriple combine(const std::vector<curve::SquareClassTriple>& basis, const gf2::BitVector& bits) {
    curve::SquareClassTriple t = curve::SquareClassTriple::trivial();
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) t = t * basis[i];
    return t;
}

std::string factor(const Integer& e) {
    if (e == 0) return "x";
    if (e < 0) return "(x + " + Integer(-e).get_str() + ")";
    return "(x - " + e.get_str() + ")";
}

}  // namespace

const char* version() { return CASSELS_VERSION; }

void RunConfig::validate() const {
    switch (input) {
        case InputKind::Roots:
            if (values.size() != 3) throw std::invalid_argument("--roots needs exactly three values");
            if (!label.empty()) throw std::invalid_argument("give exactly one curve input");
            break;
        case InputKind::Coefficients:
            if (values.size() != 2) throw std::invalid_argument("--coeffs needs exactly two values a,b");
            if (!label.empty()) throw std::invalid_argument("give exactly one curve input");
            break;
        case InputKind::Label:
            if (label.empty()) throw std::invalid_argument("--label needs a value");
            if (!values.empty()) throw std::invalid_argument("give exactly one curve input");
            break;
    }
    if (height_bound < 1) throw std::invalid_argument("--height-bound must be positive");
    if (precision < 0 || precision > numth::kPrecisionCap) {
        throw std::invalid_argument("--precision must lie in [0, " + std::to_string(numth::kPrecisionCap) + "]");
    }
    for (long p : extra_places) {
        if (!numth::is_prime(p)) throw std::invalid_argument("--places: " + std::to_string(p) + " is not prime");
    }
}

curve::SplitCurve parse_curve(const RunConfig& config, const LabelResolver& resolver) {
    switch (config.input) {
        case InputKind::Roots:
            return curve::SplitCurve::from_roots(parse_rational(config.values[0]), parse_rational(config.values[1]),
                                                 parse_rational(config.values[2]));
        case InputKind::Coefficients:
            return curve::SplitCurve::from_coefficients(parse_rational(strip_name(config.values[0], 'a')),
                                                        parse_rational(strip_name(config.values[1], 'b')));
        case InputKind::Label:
            if (!resolver) throw std::invalid_argument("no database available to resolve label " + config.label);
            return resolver(config.label);
    }
    throw std::logic_error("unknown input kind");
}

std::vector<std::vector<int>> Report::matrix_signs() const {
    auto out = matrix_bits;
    for (auto& row : out)
        for (auto& v : row) v = v ? -1 : 1;
    return out;
}

Report run(const RunConfig& config, const LabelResolver& resolver) {
    config.validate();
    const auto start = Clock::now();
    Report report;
    report.config = config_to_json(config);
    report.version = version();

    std::string input;
    for (std::size_t i = 0; i < config.values.size(); ++i) input += (i ? "," : "") + config.values[i];
    std::optional<curve::SplitCurve> parsed;
    try {
        parsed = parse_curve(config, resolver);
    } catch (const curve::CurveError& e) {
        throw PipelineError("curve " + (input.empty() ? config.label : input) + ": " + e.what());
    }
    const curve::SplitCurve& E = *parsed;
    const std::string where = E.to_string();
    report.curve = CurveInfo{config.input == InputKind::Label ? config.label : input,
                             E.roots(), E.A(), E.B(), E.disc(), E.scale(), E.shift()};

    auto t = Clock::now();
    selmer::SelmerGroup S;
    try {
        S = selmer::compute_selmer(E);
    } catch (const std::exception& e) {
        throw PipelineError(where + ": Selmer group: " + e.what());
    }
    report.timings.selmer_ms = ms_since(t);
    report.selmer_dim = S.dim;
    report.selmer_basis = S.basis;
    report.torsion_image = S.torsion_image;

    ctp::PairingOptions options;
    options.conic_seed = config.seed;
    options.point_seed = config.seed;
    options.precision = config.precision;
    options.delta_check = config.verify;
    options.threads = config.threads;
    for (long p : config.extra_places) options.extra_places.push_back(numth::Place::finite(p));

    t = Clock::now();
    ctp::PairingMatrix M;
    try {
        M = ctp::pairing_matrix(S, options);
    } catch (const std::exception& e) {
        throw PipelineError(where + ": pairing: " + e.what());
    }
    report.timings.pairing_ms = ms_since(t);

    const auto issues = M.structural_issues();
    if (!issues.empty()) throw PipelineError(where + ": " + issues.front());

    const std::size_t n = S.dim;
    report.matrix_bits.assign(n, std::vector<int>(n, 0));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) report.matrix_bits[r][s] = M.entries.get(r, s) ? 1 : 0;
    report.matrix_rank = M.rank;
    for (const auto& k : M.kernel) report.kernel_basis.push_back(combine(S.basis, k));
    report.naive_bound = M.naive_rank_bound;
    report.refined_bound = M.refined_rank_bound;
    for (const auto& e : M.log) report.local_log.push_back(LogLine{e.place.to_string(), e.row, e.col, e.factor});

    for (const auto& P : curve::point_search(E, config.height_bound)) {
        if (P.infinity) continue;
        const auto image = curve::descent_image(P, E);
        report.points.push_back(PointInfo{P.x, P.y, image});
        const auto coords = S.coordinates(image);
        if (!coords) throw PipelineError(where + ": image " + image.to_string() + " of a rational point is not in the Selmer group");
        for (bool b : M.entries.apply(*coords)) {
            if (b) throw PipelineError(where + ": image " + image.to_string() + " of a rational point is not in the kernel");
        }
    }

    if (M.delta) {
        const auto& d = *M.delta;
        report.delta = DeltaInfo{d.witnesses,
                                 d.evaluations,
                                 d.scale_identity_failures,
                                 d.tangent_identity_failures,
                                 d.corrected_symbol_failures,
                                 d.uncorrected_symbol_differences,
                                 d.escalations,
                                 d.matrix == M.entries};
    }
    if (config.verify) {
        t = Clock::now();
        ctp::VerifyResult v;
        try {
            v = ctp::verify(S, M, options);
        } catch (const std::exception& e) {
            throw PipelineError(where + ": verify: " + e.what());
        }
        report.timings.verify_ms = ms_since(t);
        VerifyInfo info{v.symmetric, v.delta_ok, v.conic_reseed_equal, v.resample_equal, v.local_factors_stable,
                        v.enlarged_places_equal, {}, v.messages};
        for (const auto& p : v.added_places) info.added_places.push_back(p.to_string());
        report.verify = info;
    }
    report.timings.total_ms = ms_since(start);
    return report;
}

std::string to_text(const Report& r) {
    std::ostringstream out;
    const auto& c = r.curve;
    out << "curve     y^2 = " << factor(c.e[0]) << factor(c.e[1]) << factor(c.e[2]) << "\n";
    out << "          A = " << c.A.get_str() << ", B = " << c.B.get_str() << ", disc = " << c.disc.get_str() << "\n";
    if (c.scale != 1 || c.shift != 0) {
        out << "          from input by x = ";
        if (c.scale != 1) out << c.scale.get_str() << "^2 ";
        out << "(x_in - " << c.shift.get_str() << ")\n";
    }
    out << "selmer    dim " << r.selmer_dim << ", basis";
    for (const auto& b : r.selmer_basis) out << " " << b.to_string();
    out << "\npairing   rank " << r.matrix_rank << "\n";
    for (const auto& row : r.matrix_bits) {
        out << "         ";
        for (int v : row) out << " " << (v ? "-1" : "+1");
        out << "\n";
    }
    out << "kernel   ";
    for (const auto& k : r.kernel_basis) out << " " << k.to_string();
    out << "\nbounds    naive " << r.naive_bound << ", refined " << r.refined_bound << "\n";
    out << "points    " << r.points.size() << " affine points up to the height bound\n";
    if (r.delta) {
        out << "delta     " << r.delta->witnesses << " witnesses, " << r.delta->scale_identity_failures + r.delta->tangent_identity_failures
            << " identity failures, " << r.delta->corrected_symbol_failures << " symbol failures, matrix "
            << (r.delta->matrix_agrees ? "agrees" : "DIFFERS") << "\n";
    }
    if (r.verify) {
        const auto& v = *r.verify;
        out << "verify    symmetric " << v.symmetric << ", delta " << v.delta_ok << ", reseed " << v.conic_reseed_equal
            << ", resample " << v.resample_equal << ", local factors " << v.local_factors_stable << ", extra places "
            << v.enlarged_places_equal << "\n";
        for (const auto& m : v.messages) out << "          " << m << "\n";
    }
    return out.str();
}

}  // namespace cassels::cli
