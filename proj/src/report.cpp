#include "cassels/report.hpp"

namespace cassels::cli {

using nlohmann::json;

namespace {

// Integers that fit in 53 bits go out as numbers, the rest as strings.
json integer_json(const Integer& n) {
    if (n.fits_slong_p()) {
        const long v = n.get_si();
        if (v > -(1L << 53) && v < (1L << 53)) return v;
    }
    return n.get_str();
}

Integer integer_from(const json& j) {
    if (j.is_string()) return Integer(j.get<std::string>());
    return Integer(j.get<long>());
}

json rational_json(const Rational& q) {
    if (q.get_den() == 1) return integer_json(q.get_num());
    return q.get_str();
}

Rational rational_from(const json& j) {
    if (j.is_string()) {
        Rational q(j.get<std::string>());
        q.canonicalize();
        return q;
    }
    return Rational(j.get<long>());
}

json triple_json(const curve::SquareClassTriple& t) {
    return json::array({integer_json(t[0]), integer_json(t[1]), integer_json(t[2])});
}

curve::SquareClassTriple triple_from(const json& j) {
    return curve::SquareClassTriple::make(rational_from(j.at(0)), rational_from(j.at(1)), rational_from(j.at(2)));
}

json triples_json(const std::vector<curve::SquareClassTriple>& v) {
    json out = json::array();
    for (const auto& t : v) out.push_back(triple_json(t));
    return out;
}

std::vector<curve::SquareClassTriple> triples_from(const json& j) {
    std::vector<curve::SquareClassTriple> out;
    for (const auto& t : j) out.push_back(triple_from(t));
    return out;
}

const char* input_name(InputKind k) {
    switch (k) {
        case InputKind::Roots: return "roots";
        case InputKind::Coefficients: return "coefficients";
        case InputKind::Label: return "label";
    }
    return "?";
}

}  // namespace

json config_to_json(const RunConfig& c) {
    json j;
    j["input"] = input_name(c.input);
    j["values"] = c.values;
    j["label"] = c.label;
    j["height_bound"] = c.height_bound;
    j["precision"] = c.precision;
    j["seed"] = c.seed;
    j["verify"] = c.verify;
    j["extra_places"] = c.extra_places;
    j["offline"] = c.offline;
    return j;
}

json to_json(const Report& r, bool include_timings) {
    json j;
    j["version"] = r.version;
    j["config"] = r.config;

    const auto& c = r.curve;
    j["curve"] = {{"input", c.input},
                  {"e1", integer_json(c.e[0])},
                  {"e2", integer_json(c.e[1])},
                  {"e3", integer_json(c.e[2])},
                  {"A", integer_json(c.A)},
                  {"B", integer_json(c.B)},
                  {"disc", integer_json(c.disc)},
                  {"scale", integer_json(c.scale)},
                  {"shift", rational_json(c.shift)}};

    j["selmer"] = {{"dim", r.selmer_dim},
                   {"basis", triples_json(r.selmer_basis)},
                   {"torsion_image", triples_json(r.torsion_image)}};
    j["pairing"] = {{"matrix_bits", r.matrix_bits},
                    {"matrix_signs", r.matrix_signs()},
                    {"rank", r.matrix_rank},
                    {"kernel_basis", triples_json(r.kernel_basis)}};
    j["bounds"] = {{"naive", r.naive_bound}, {"refined", r.refined_bound}};

    json points = json::array();
    for (const auto& p : r.points) {
        points.push_back({{"x", rational_json(p.x)}, {"y", rational_json(p.y)}, {"image", triple_json(p.image)}});
    }
    j["points"] = points;

    json log = json::array();
    for (const auto& e : r.local_log) {
        log.push_back({{"place", e.place}, {"element_pair", {e.row, e.col}}, {"factor", e.factor}});
    }
    j["local_log"] = log;

    if (r.delta) {
        const auto& d = *r.delta;
        j["delta_check"] = {{"witnesses", d.witnesses},
                            {"evaluations", d.evaluations},
                            {"scale_identity_failures", d.scale_identity_failures},
                            {"tangent_identity_failures", d.tangent_identity_failures},
                            {"corrected_symbol_failures", d.corrected_symbol_failures},
                            {"uncorrected_symbol_differences", d.uncorrected_symbol_differences},
                            {"escalations", d.escalations},
                            {"matrix_agrees", d.matrix_agrees}};
    } else {
        j["delta_check"] = nullptr;
    }
    if (r.verify) {
        const auto& v = *r.verify;
        j["verify"] = {{"symmetric", v.symmetric},
                       {"delta_ok", v.delta_ok},
                       {"conic_reseed_equal", v.conic_reseed_equal},
                       {"resample_equal", v.resample_equal},
                       {"local_factors_stable", v.local_factors_stable},
                       {"enlarged_places_equal", v.enlarged_places_equal},
                       {"added_places", v.added_places},
                       {"messages", v.messages}};
    } else {
        j["verify"] = nullptr;
    }
    if (include_timings) {
        j["timings"] = {{"selmer_ms", r.timings.selmer_ms},
                        {"pairing_ms", r.timings.pairing_ms},
                        {"verify_ms", r.timings.verify_ms},
                        {"total_ms", r.timings.total_ms}};
    }
    return j;
}

Report report_from_json(const json& j) {
    Report r;
    r.version = j.at("version").get<std::string>();
    r.config = j.at("config");

    const auto& c = j.at("curve");
    r.curve.input = c.at("input").get<std::string>();
    r.curve.e = {integer_from(c.at("e1")), integer_from(c.at("e2")), integer_from(c.at("e3"))};
    r.curve.A = integer_from(c.at("A"));
    r.curve.B = integer_from(c.at("B"));
    r.curve.disc = integer_from(c.at("disc"));
    r.curve.scale = integer_from(c.at("scale"));
    r.curve.shift = rational_from(c.at("shift"));

    const auto& s = j.at("selmer");
    r.selmer_dim = s.at("dim").get<std::size_t>();
    r.selmer_basis = triples_from(s.at("basis"));
    r.torsion_image = triples_from(s.at("torsion_image"));

    const auto& p = j.at("pairing");
    r.matrix_bits = p.at("matrix_bits").get<std::vector<std::vector<int>>>();
    r.matrix_rank = p.at("rank").get<std::size_t>();
    r.kernel_basis = triples_from(p.at("kernel_basis"));
    r.naive_bound = j.at("bounds").at("naive").get<long>();
    r.refined_bound = j.at("bounds").at("refined").get<long>();

    for (const auto& pt : j.at("points")) {
        r.points.push_back(PointInfo{rational_from(pt.at("x")), rational_from(pt.at("y")), triple_from(pt.at("image"))});
    }
    for (const auto& e : j.at("local_log")) {
        const auto& pair = e.at("element_pair");
        r.local_log.push_back(LogLine{e.at("place").get<std::string>(), pair.at(0).get<std::size_t>(),
                                      pair.at(1).get<std::size_t>(), e.at("factor").get<int>()});
    }

    if (const auto& d = j.at("delta_check"); !d.is_null()) {
        r.delta = DeltaInfo{d.at("witnesses").get<std::size_t>(),
                            d.at("evaluations").get<std::size_t>(),
                            d.at("scale_identity_failures").get<std::size_t>(),
                            d.at("tangent_identity_failures").get<std::size_t>(),
                            d.at("corrected_symbol_failures").get<std::size_t>(),
                            d.at("uncorrected_symbol_differences").get<std::size_t>(),
                            d.at("escalations").get<std::size_t>(),
                            d.at("matrix_agrees").get<bool>()};
    }
    if (const auto& v = j.at("verify"); !v.is_null()) {
        r.verify = VerifyInfo{v.at("symmetric").get<bool>(),
                              v.at("delta_ok").get<bool>(),
                              v.at("conic_reseed_equal").get<bool>(),
                              v.at("resample_equal").get<bool>(),
                              v.at("local_factors_stable").get<bool>(),
                              v.at("enlarged_places_equal").get<bool>(),
                              v.at("added_places").get<std::vector<std::string>>(),
                              v.at("messages").get<std::vector<std::string>>()};
    }
    if (j.contains("timings")) {
        const auto& t = j.at("timings");
        r.timings = Timings{t.at("selmer_ms").get<double>(), t.at("pairing_ms").get<double>(),
                            t.at("verify_ms").get<double>(), t.at("total_ms").get<double>()};
    }
    return r;
}

}  // namespace cassels::cli
