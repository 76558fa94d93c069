#include "cassels/report.hpp"

#include <doctest.h>

using namespace cassels;
using namespace cassels::cli;

namespace {

RunConfig roots(std::vector<std::string> v) {
    RunConfig c;
    c.input = InputKind::Roots;
    c.values = std::move(v);
    c.height_bound = 200;
    return c;
}

RunConfig coeffs(std::vector<std::string> v) {
    RunConfig c;
    c.input = InputKind::Coefficients;
    c.values = std::move(v);
    c.height_bound = 200;
    return c;
}

bool in_span(const std::vector<curve::SquareClassTriple>& basis, const curve::SquareClassTriple& t) {
    const std::size_t n = basis.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        auto s = curve::SquareClassTriple::trivial();
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) s = s * basis[i];
        if (s == t) return true;
    }
    return false;
}

void check_invariants(const Report& r) {
    CHECK(r.refined_bound <= r.naive_bound);
    CHECK(r.matrix_rank % 2 == 0);
    CHECK(r.kernel_basis.size() == r.selmer_dim - r.matrix_rank);
    for (std::size_t i = 0; i < r.matrix_bits.size(); ++i) {
        CHECK(r.matrix_bits[i][i] == 0);
        for (std::size_t j = 0; j < r.matrix_bits.size(); ++j) CHECK(r.matrix_bits[i][j] == r.matrix_bits[j][i]);
    }
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("roots -1,0,1") {
    const auto r = run(roots({"-1", "0", "1"}));
    CHECK(r.selmer_dim == 2);
    for (const auto& row : r.matrix_bits)
        for (int b : row) CHECK(b == 0);
    CHECK(r.naive_bound == 0);
    CHECK(r.refined_bound == 0);
    check_invariants(r);
}

TEST_CASE("a=-36, b=0: kernel contains the image of (-3, 9)") {
    auto config = coeffs({"a=-36", "b=0"});
    const auto r = run(config);
    const auto E = parse_curve(config);
    curve::RationalPoint P;
    P.infinity = false;
    P.x = -3;
    P.y = 9;
    REQUIRE(curve::on_curve(P, curve::rational_model(E)));
    const auto image = curve::descent_image(P, E);
    CHECK_FALSE(image.is_trivial());
    CHECK(in_span(r.kernel_basis, image));
    check_invariants(r);
}

TEST_CASE("a=0, b=1 is rejected") {
    try {
        run(coeffs({"a=0", "b=1"}));
        FAIL("expected an error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("2-torsion not fully rational") != std::string::npos);
    }
}

TEST_CASE("coefficient forms agree") {
    const auto a = run(coeffs({"a=-36", "b=0"}));
    const auto b = run(coeffs({"-36", "0"}));
    CHECK(to_json(a, false)["selmer"] == to_json(b, false)["selmer"]);
    CHECK(to_json(a, false)["pairing"] == to_json(b, false)["pairing"]);
    CHECK_THROWS_AS(run(coeffs({"c=-36", "b=0"})), std::invalid_argument);
}

TEST_CASE("rational roots are rescaled") {
    const auto r = run(roots({"-1/2", "0", "1/2"}));
    CHECK(r.curve.scale != 1);
    CHECK(r.selmer_dim == 2);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(run(roots({"1", "2"})), std::invalid_argument);
    auto c = roots({"-1", "0", "1"});
    c.height_bound = 0;
    CHECK_THROWS_AS(run(c), std::invalid_argument);
    c = roots({"-1", "0", "1"});
    c.extra_places = {15};
    CHECK_THROWS_AS(run(c), std::invalid_argument);
    c = roots({"-1", "0", "1"});
    c.precision = 5000;
    CHECK_THROWS_AS(run(c), std::invalid_argument);
    RunConfig l;
    l.input = InputKind::Label;
    l.label = "32.a3";
    CHECK_THROWS_AS(run(l), std::invalid_argument);
    CHECK_THROWS_AS(run(roots({"1", "1", "2"})), PipelineError);
}

TEST_CASE("label resolution goes through the resolver") {
    RunConfig l;
    l.input = InputKind::Label;
    l.label = "any";
    l.height_bound = 100;
    const auto r = run(l, [](const std::string&) { return curve::SplitCurve::from_coefficients(-1, 0); });
    CHECK(r.selmer_dim == 2);
    CHECK(r.curve.input == "any");
}

TEST_CASE("seed is echoed and output is deterministic") {
    auto c = roots({"0", "17", "-17"});
    c.seed = 5;
    c.verify = true;
    c.threads = 1;
    const auto a = to_json(run(c), false);
    CHECK(a["config"]["seed"] == 5);
    CHECK_FALSE(a.contains("timings"));
    c.threads = 4;
    CHECK(to_json(run(c), false).dump() == a.dump());
    CHECK(to_json(run(c), false).dump() == a.dump());
}

TEST_CASE("JSON round trip") {
    auto c = roots({"0", "17", "-17"});
    c.verify = true;
    const auto r = run(c);
    const auto j = to_json(r);
    const auto back = report_from_json(nlohmann::json::parse(j.dump()));
    CHECK(to_json(back) == j);
    CHECK(back.selmer_basis == r.selmer_basis);
    CHECK(back.kernel_basis == r.kernel_basis);
    REQUIRE(back.verify);
    CHECK(back.verify->symmetric);
}

TEST_CASE("report for 289 has the expected shape") {
    auto c = roots({"0", "17", "-17"});
    c.verify = true;
    const auto r = run(c);
    CHECK(r.selmer_dim == 4);
    CHECK(r.matrix_rank == 2);
    CHECK(r.naive_bound == 2);
    CHECK(r.refined_bound == 0);
    REQUIRE(r.delta);
    CHECK(r.delta->matrix_agrees);
    CHECK(r.delta->corrected_symbol_failures == 0);
    REQUIRE(r.verify);
    CHECK(r.verify->resample_equal);
    CHECK(r.verify->conic_reseed_equal);
    CHECK(r.verify->enlarged_places_equal);
    const auto signs = r.matrix_signs();
    for (std::size_t i = 0; i < signs.size(); ++i)
        for (std::size_t k = 0; k < signs.size(); ++k) CHECK(signs[i][k] == (r.matrix_bits[i][k] ? -1 : 1));
    CHECK_FALSE(r.local_log.empty());
    const auto text = to_text(r);
    CHECK(text.find("refined 0") != std::string::npos);
}

}
