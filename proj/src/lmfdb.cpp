#include "cassels/lmfdb.hpp"

#include <httplib.h>

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace cassels::lmfdb {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string now_iso8601() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Integer integer_from(const json& j) {
    if (j.is_number_integer()) return Integer(j.get<long>());
    if (j.is_string()) {
        Integer n;
        if (n.set_str(j.get<std::string>(), 10) != 0) throw std::runtime_error("not an integer: " + j.dump());
        return n;
    }
    throw std::runtime_error("not an integer: " + j.dump());
}

json integer_json(const Integer& n) {
    if (n.fits_slong_p()) return n.get_si();
    return n.get_str();
}

std::array<Integer, 2> c_invariants(const std::array<Integer, 5>& a) {
    const Integer b2 = a[0] * a[0] + 4 * a[1];
    const Integer b4 = 2 * a[3] + a[0] * a[2];
    const Integer b6 = a[2] * a[2] + 4 * a[4];
    return {Integer(b2 * b2 - 24 * b4), Integer(-b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6)};
}

bool divides(const Integer& d, const Integer& n) { return mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t()) != 0; }

// The reduced integral model with invariants (c4, c6), if one exists.
std::optional<std::array<Integer, 5>> integral_model(const Integer& c4, const Integer& c6) {
    for (long t = -5; t <= 6; ++t) {
        const Integer b2 = t;
        const Integer n4 = b2 * b2 - c4;
        if (!divides(Integer(24), n4)) continue;
        const Integer b4 = n4 / 24;
        const Integer n6 = -b2 * b2 * b2 + 36 * b2 * b4 - c6;
        if (!divides(Integer(216), n6)) continue;
        const Integer b6 = n6 / 216;
        const Integer a1 = (t % 2 == 0) ? 0 : 1;
        if (!divides(Integer(4), Integer(b2 - a1))) continue;
        const Integer a2 = (b2 - a1) / 4;
        for (int s = 0; s <= 1; ++s) {
            const Integer a3 = s;
            const Integer m4 = b4 - a1 * a3;
            const Integer m6 = b6 - a3;
            if (!divides(Integer(2), m4) || !divides(Integer(4), m6)) continue;
            return std::array<Integer, 5>{a1, a2, a3, Integer(m4 / 2), Integer(m6 / 4)};
        }
    }
    return std::nullopt;
}

std::string torsion_string(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (!j.is_array()) throw std::runtime_error("bad torsion_structure: " + j.dump());
    std::string out = "[";
    for (std::size_t i = 0; i < j.size(); ++i) out += (i ? "," : "") + integer_from(j[i]).get_str();
    return out + "]";
}

std::array<Integer, 5> ainvs_from(const json& j) {
    json list = j;
    if (j.is_string()) list = json::parse(j.get<std::string>());
    if (!list.is_array() || list.size() != 5) throw std::runtime_error("bad ainvs: " + j.dump());
    std::array<Integer, 5> a;
    for (std::size_t i = 0; i < 5; ++i) a[i] = integer_from(list[i]);
    return a;
}

std::string sanitize(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-') c = '_';
    return out;
}

bool env_true(const char* name) {
    const char* v = std::getenv(name);
    return v && *v && std::string(v) != "0";
}

}  // namespace

std::pair<Integer, Integer> ExternalCurveRecord::short_model() const {
    const auto [c4, c6] = c_invariants(ainvs);
    Integer A = -27 * c4, B = -54 * c6;
    for (long p : {2L, 3L}) {
        const Integer p4 = Integer(p) * p * p * p, p6 = p4 * p * p;
        while (divides(p4, A) && divides(p6, B)) {
            A /= p4;
            B /= p6;
        }
    }
    return {A, B};
}

std::array<Integer, 5> minimal_ainvs(const Integer& A, const Integer& B) {
    Integer c4 = -48 * A, c6 = -864 * B;
    Integer g;
    mpz_gcd(g.get_mpz_t(), c4.get_mpz_t(), c6.get_mpz_t());
    for (const auto& p : numth::prime_divisors(g)) {
        const Integer p4 = p * p * p * p, p6 = p4 * p * p;
        while (divides(p4, c4) && divides(p6, c6) && integral_model(c4 / p4, c6 / p6)) {
            c4 /= p4;
            c6 /= p6;
        }
    }
    auto a = integral_model(c4, c6);
    if (!a) throw std::logic_error("no integral model for a short Weierstrass curve");
    return *a;
}

std::string cache_key(const Integer& A, const Integer& B) { return "ab_" + A.get_str() + "_" + B.get_str(); }
std::string cache_key(const std::string& label) { return "label_" + sanitize(label); }

json to_json(const ExternalCurveRecord& r) {
    json a = json::array();
    for (const auto& x : r.ainvs) a.push_back(integer_json(x));
    return json{{"label", r.label},
                {"rank", r.rank},
                {"sha_order", r.sha_order ? integer_json(*r.sha_order) : json(nullptr)},
                {"torsion_structure", r.torsion_structure},
                {"source_url", r.source_url},
                {"fetched_at", r.fetched_at},
                {"ainvs", a}};
}

ExternalCurveRecord record_from_json(const json& j) {
    try {
        ExternalCurveRecord r;
        r.label = j.at("label").get<std::string>();
        r.rank = j.at("rank").get<long>();
        if (j.contains("sha_order") && !j.at("sha_order").is_null()) r.sha_order = integer_from(j.at("sha_order"));
        r.torsion_structure = j.at("torsion_structure").get<std::string>();
        r.source_url = j.at("source_url").get<std::string>();
        r.fetched_at = j.at("fetched_at").get<std::string>();
        r.ainvs = ainvs_from(j.at("ainvs"));
        return r;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed record: ") + e.what());
    }
}

std::optional<ExternalCurveRecord> parse_response(const std::string& body, const std::string& url,
                                                  const std::string& fetched_at) {
    try {
        const json j = json::parse(body);
        const auto& data = j.at("data");
        if (!data.is_array()) throw std::runtime_error("\"data\" is not a list");
        if (data.empty()) return std::nullopt;
        const auto& d = data.at(0);
        ExternalCurveRecord r;
        if (d.contains("lmfdb_label")) {
            r.label = d.at("lmfdb_label").get<std::string>();
        } else {
            r.label = d.at("label").get<std::string>();
        }
        if (!d.at("rank").is_number_integer()) throw std::runtime_error("rank missing");
        r.rank = d.at("rank").get<long>();
        if (d.contains("sha") && !d.at("sha").is_null()) r.sha_order = integer_from(d.at("sha"));
        r.torsion_structure = d.contains("torsion_structure") ? torsion_string(d.at("torsion_structure")) : "[]";
        r.ainvs = ainvs_from(d.at("ainvs"));
        r.source_url = url;
        r.fetched_at = fetched_at;
        return r;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed response: ") + e.what());
    }
}

ClientOptions ClientOptions::from_environment() {
    ClientOptions o;
    if (const char* url = std::getenv("CASSELS_DB_URL"); url && *url) o.base_url = url;
    if (const char* dir = std::getenv("CASSELS_DB_CACHE")) {
        o.cache_dir = dir;
    } else if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) {
        o.cache_dir = std::string(xdg) + "/cassels/db";
    } else if (const char* home = std::getenv("HOME"); home && *home) {
        o.cache_dir = std::string(home) + "/.cache/cassels/db";
    }
    o.offline = env_true("CASSELS_OFFLINE");
    return o;
}

Client::Client(ClientOptions options) : options_(std::move(options)) {}

std::vector<std::string> Client::take_warnings() {
    std::lock_guard lock(mutex_);
    return std::exchange(warnings_, {});
}

void Client::warn(std::string message) { warnings_.push_back(std::move(message)); }

std::optional<ExternalCurveRecord> Client::lookup(const curve::SplitCurve& curve) {
    const auto a = minimal_ainvs(curve.A(), curve.B());
    std::string query = "ainvs=li";
    for (std::size_t i = 0; i < a.size(); ++i) query += (i ? "," : "") + a[i].get_str();
    return lookup_keyed(cache_key(curve.A(), curve.B()), query);
}

std::optional<ExternalCurveRecord> Client::lookup(const std::string& label) {
    const bool lmfdb_style = label.find('.') != std::string::npos;
    return lookup_keyed(cache_key(label), (lmfdb_style ? "lmfdb_label=" : "Clabel=") + label);
}

std::optional<ExternalCurveRecord> Client::lookup_keyed(const std::string& key, const std::string& query) {
    std::lock_guard lock(mutex_);
    if (auto r = load_cached(key)) return r;
    if (options_.offline) return std::nullopt;

    std::string url;
    const auto body = get(query, url);
    if (!body) return std::nullopt;
    try {
        auto r = parse_response(*body, url, now_iso8601());
        if (r) store(key, *r);
        return r;
    } catch (const std::exception& e) {
        warn(url + ": " + e.what());
        return std::nullopt;
    }
}

std::optional<ExternalCurveRecord> Client::load_cached(const std::string& key) {
    if (options_.cache_dir.empty()) return std::nullopt;
    const fs::path path = fs::path(options_.cache_dir) / (key + ".json");
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
        return record_from_json(json::parse(in));
    } catch (const std::exception& e) {
        warn(path.string() + ": " + e.what());
        return std::nullopt;
    }
}

void Client::store(const std::string& key, const ExternalCurveRecord& r) {
    if (options_.cache_dir.empty()) return;
    std::error_code ec;
    fs::create_directories(options_.cache_dir, ec);
    const fs::path path = fs::path(options_.cache_dir) / (key + ".json");
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        out << to_json(r).dump(2) << "\n";
        if (!out) {
            warn("cannot write cache entry " + path.string());
            return;
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) warn("cannot write cache entry " + path.string() + ": " + ec.message());
}

std::optional<std::string> Client::get(const std::string& query, std::string& url) {
    const std::string& base = options_.base_url;
    const auto scheme_end = base.find("://");
    const auto path_start = scheme_end == std::string::npos ? std::string::npos : base.find('/', scheme_end + 3);
    const std::string origin = base.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : base.substr(path_start);
    path += (path.find('?') == std::string::npos ? "?" : "&") + query + "&_format=json";
    url = origin + path;

    const auto wait = last_request_ + options_.min_interval - std::chrono::steady_clock::now();
    if (requests_ > 0 && wait > std::chrono::steady_clock::duration::zero()) std::this_thread::sleep_for(wait);
    last_request_ = std::chrono::steady_clock::now();
    ++requests_;

    try {
        httplib::Client client(origin);
        client.set_connection_timeout(options_.timeout);
        client.set_read_timeout(options_.timeout);
        client.set_follow_location(true);
        auto res = client.Get(path);
        if (!res) {
            warn(url + ": " + httplib::to_string(res.error()));
            return std::nullopt;
        }
        if (res->status != 200) {
            warn(url + ": HTTP " + std::to_string(res->status));
            return std::nullopt;
        }
        return res->body;
    } catch (const std::exception& e) {
        warn(url + ": " + e.what());
        return std::nullopt;
    }
}

std::string Comparison::to_string() const {
    std::ostringstream out;
    for (const auto& f : flags) out << f << "\n";
    for (const auto& w : warnings) out << "warning: " << w << "\n";
    return out.str();
}

Comparison compare(const cli::Report& report, const ExternalCurveRecord& record) {
    Comparison c;
    const long bound = report.refined_bound;
    if (record.rank > bound) {
        c.inconsistent = true;
        c.flags.push_back("inconsistent: refined bound " + std::to_string(bound) + " is below database rank " +
                          std::to_string(record.rank));
    } else if (record.rank == bound) {
        c.bound_sharp = true;
        c.flags.push_back("bound sharp");
    } else {
        c.gap = bound - record.rank;
        c.warnings.push_back("gap " + std::to_string(c.gap) + ": possible Sha[4] or insufficient pairing");
    }
    if (record.sha_order && *record.sha_order % 2 == 0 && report.matrix_rank == 0) {
        c.warnings.push_back("database Sha order " + record.sha_order->get_str() +
                             " is even but the pairing matrix is zero");
    }
    return c;
}

}  // namespace cassels::lmfdb
