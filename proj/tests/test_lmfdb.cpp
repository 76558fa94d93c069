#include "cassels/lmfdb.hpp"

#include <doctest.h>
#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

using namespace cassels;
using namespace cassels::lmfdb;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = CASSELS_FIXTURE_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("cassels_db_" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

// Serves one fixed reply on /api/ec_curvedata/ and records the query strings.
struct FakeDatabase {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::vector<std::string> queries;
    std::mutex mutex;

    FakeDatabase(std::string body, int status = 200) {
        server.Get("/api/ec_curvedata/", [this, body, status](const httplib::Request& req, httplib::Response& res) {
            {
                std::lock_guard lock(mutex);
                std::string q;
                for (const auto& [k, v] : req.params) q += k + "=" + v + ";";
                queries.push_back(q);
            }
            res.status = status;
            res.set_content(body, "application/json");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~FakeDatabase() {
        server.stop();
        thread.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/api/ec_curvedata/"; }
};

ClientOptions options_for(const std::string& url, const fs::path& cache) {
    ClientOptions o;
    o.base_url = url;
    o.cache_dir = cache.string();
    o.min_interval = std::chrono::milliseconds(0);
    o.timeout = std::chrono::seconds(2);
    return o;
}

cli::Report report_with(long refined, std::size_t matrix_rank = 0) {
    cli::Report r;
    r.refined_bound = refined;
    r.naive_bound = refined + static_cast<long>(matrix_rank);
    r.matrix_rank = matrix_rank;
    return r;
}

}  // namespace

TEST_SUITE("lmfdb") {

TEST_CASE("minimal models") {
    using A5 = std::array<Integer, 5>;
    CHECK(minimal_ainvs(-1, 0) == A5{0, 0, 0, -1, 0});
    CHECK(minimal_ainvs(-16, 0) == A5{0, 0, 0, -1, 0});
    CHECK(minimal_ainvs(0, 1) == A5{0, 0, 0, 0, 1});
    // 11a1 and 27a1 from their c-invariants
    CHECK(minimal_ainvs(-13392, -1080432) == A5{0, -1, 1, -10, -20});
    CHECK(minimal_ainvs(0, -432) == A5{0, 0, 1, 0, -7});

    ExternalCurveRecord r;
    r.ainvs = {0, -1, 1, -10, -20};
    const auto [A, B] = r.short_model();
    CHECK(minimal_ainvs(A, B) == r.ainvs);
    r.ainvs = {0, 0, 0, -1, 0};
    CHECK(r.short_model() == std::pair<Integer, Integer>{-1, 0});
}

TEST_CASE("parse responses") {
    const auto r = parse_response(slurp(kFixtures / "response_32.a3.json"), "u", "t");
    REQUIRE(r);
    CHECK(r->label == "32.a3");
    CHECK(r->rank == 0);
    REQUIRE(r->sha_order);
    CHECK(*r->sha_order == 1);
    CHECK(r->torsion_structure == "[2,2]");
    CHECK(r->ainvs == std::array<Integer, 5>{0, 0, 0, -1, 0});
    CHECK_FALSE(parse_response(slurp(kFixtures / "response_empty.json"), "u", "t"));
    CHECK_THROWS(parse_response(slurp(kFixtures / "response_malformed.json"), "u", "t"));
    CHECK_THROWS(parse_response(R"({"data":[{"label":"x","rank":null,"ainvs":[0,0,0,1,0]}]})", "u", "t"));
}

TEST_CASE("record cache round trip") {
    auto r = parse_response(slurp(kFixtures / "response_32.a3.json"), "https://example/x", "2026-01-01T00:00:00Z");
    REQUIRE(r);
    CHECK(record_from_json(nlohmann::json::parse(to_json(*r).dump())) == *r);
    r->sha_order.reset();
    CHECK(record_from_json(to_json(*r)) == *r);
}

TEST_CASE("offline with an empty cache") {
    TempDir dir;
    auto o = options_for("http://127.0.0.1:9/", dir.path);
    o.offline = true;
    Client client(o);
    CHECK_FALSE(client.lookup(curve::SplitCurve::from_roots(-1, 0, 1)));
    CHECK_FALSE(client.lookup("32.a3"));
    CHECK(client.requests() == 0);
}

TEST_CASE("offline with fixture cache") {
    auto o = options_for("http://127.0.0.1:9/", kFixtures / "cache");
    o.offline = true;
    Client client(o);
    const auto r = client.lookup(curve::SplitCurve::from_roots(-1, 0, 1));
    REQUIRE(r);
    CHECK(r->label == "32.a3");
    CHECK(r->rank == 0);
    const auto l = client.lookup("32.a3");
    REQUIRE(l);
    CHECK(*l == *r);
    CHECK(client.requests() == 0);
}

TEST_CASE("fetch, cache and reload") {
    FakeDatabase db(slurp(kFixtures / "response_32.a3.json"));
    TempDir dir;
    Client client(options_for(db.url(), dir.path));
    const auto r = client.lookup(curve::SplitCurve::from_roots(-1, 0, 1));
    REQUIRE(r);
    CHECK(r->rank == 0);
    CHECK(r->source_url.find("ainvs=li0,0,0,-1,0") != std::string::npos);
    REQUIRE(db.queries.size() == 1);
    CHECK(db.queries[0].find("ainvs=li0,0,0,-1,0") != std::string::npos);
    CHECK(fs::exists(dir.path / (cache_key(Integer(-1), Integer(0)) + ".json")));

    const auto again = client.lookup(curve::SplitCurve::from_roots(-1, 0, 1));
    CHECK(client.requests() == 1);
    REQUIRE(again);
    CHECK(*again == *r);

    auto offline = options_for(db.url(), dir.path);
    offline.offline = true;
    Client reader(offline);
    const auto loaded = reader.lookup(curve::SplitCurve::from_roots(-1, 0, 1));
    REQUIRE(loaded);
    CHECK(*loaded == *r);
    CHECK(client.take_warnings().empty());
}

TEST_CASE("label query") {
    FakeDatabase db(slurp(kFixtures / "response_32.a3.json"));
    TempDir dir;
    Client client(options_for(db.url(), dir.path));
    CHECK(client.lookup("32.a3"));
    CHECK(client.lookup("32a2"));
    REQUIRE(db.queries.size() == 2);
    CHECK(db.queries[0].find("lmfdb_label=32.a3") != std::string::npos);
    CHECK(db.queries[1].find("Clabel=32a2") != std::string::npos);
}

TEST_CASE("soft failures") {
    TempDir dir;
    {
        FakeDatabase db(slurp(kFixtures / "response_malformed.json"));
        Client client(options_for(db.url(), dir.path));
        CHECK_FALSE(client.lookup(curve::SplitCurve::from_roots(-1, 0, 1)));
        const auto w = client.take_warnings();
        REQUIRE(w.size() == 1);
        CHECK(w[0].find("malformed") != std::string::npos);
    }
    {
        FakeDatabase db("oops", 500);
        Client client(options_for(db.url(), dir.path));
        CHECK_FALSE(client.lookup("32.a3"));
        CHECK(client.take_warnings().size() == 1);
    }
    {
        FakeDatabase db(slurp(kFixtures / "response_empty.json"));
        Client client(options_for(db.url(), dir.path));
        CHECK_FALSE(client.lookup("1.a1"));
        CHECK(client.take_warnings().empty());
    }
    int closed_port = 0;
    {
        FakeDatabase db("");
        closed_port = db.port;
    }
    Client client(options_for("http://127.0.0.1:" + std::to_string(closed_port) + "/", dir.path));
    CHECK_FALSE(client.lookup("32.a3"));
    CHECK(client.take_warnings().size() == 1);
    CHECK(fs::is_empty(dir.path));
}

TEST_CASE("throttling") {
    FakeDatabase db(slurp(kFixtures / "response_empty.json"));
    TempDir dir;
    auto o = options_for(db.url(), dir.path);
    o.min_interval = std::chrono::milliseconds(150);
    Client client(o);
    const auto t0 = std::chrono::steady_clock::now();
    for (const char* l : {"1.a1", "2.a1", "3.a1"}) client.lookup(l);
    CHECK(std::chrono::steady_clock::now() - t0 >= std::chrono::milliseconds(300));
    CHECK(client.requests() == 3);
}

TEST_CASE("compare verdicts") {
    ExternalCurveRecord rec;
    rec.rank = 0;
    auto c = compare(report_with(0), rec);
    CHECK(c.bound_sharp);
    CHECK(c.flags == std::vector<std::string>{"bound sharp"});
    CHECK(c.warnings.empty());

    c = compare(report_with(1), rec);
    CHECK_FALSE(c.bound_sharp);
    CHECK(c.gap == 1);
    CHECK(c.warnings == std::vector<std::string>{"gap 1: possible Sha[4] or insufficient pairing"});

    rec.rank = 1;
    c = compare(report_with(0), rec);
    CHECK(c.inconsistent);

    rec.rank = 0;
    rec.sha_order = Integer(4);
    c = compare(report_with(0, 0), rec);
    CHECK(c.warnings.size() == 1);
    c = compare(report_with(0, 2), rec);
    CHECK(c.warnings.empty());
}

}
