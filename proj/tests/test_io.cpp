#include <doctest.h>

#include <cstdlib>
#include <limits>
#include <random>
#include <string>

#include "hfent/complex.hpp"
#include "hfent/error.hpp"
#include "hfent/group.hpp"
#include "hfent/hilbert.hpp"
#include "hfent/io.hpp"
#include "hfent/models.hpp"

using namespace hfent;

TEST_SUITE("io") {

TEST_CASE("format_double pins the shortest faithful decimal forms") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-0.5) == "-0.5");
    CHECK(format_double(0.0) == "0");
    CHECK_THROWS_AS(format_double(std::numeric_limits<double>::infinity()), Error);
    CHECK_THROWS_AS(format_double(std::numeric_limits<double>::quiet_NaN()), Error);
}

TEST_CASE("format_double round-trips random doubles exactly") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> e(-300, 300);
    for (int i = 0; i < 500; ++i) {
        const double x = std::ldexp(u(rng), e(rng));
        const std::string s = format_double(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
    }
}

TEST_CASE("the writer emits canonical insertion-ordered JSON") {
    JsonWriter w;
    w.begin_object();
    w.key("a").value(1);
    w.key("b").begin_array().value(true).value("x\"y").value(2.5).end_array();
    w.key("c").begin_object().end_object();
    w.end_object();
    CHECK(w.str() == R"({"a":1,"b":[true,"x\"y",2.5],"c":{}})");
}

TEST_CASE("json_escape handles quotes, backslashes and control bytes") {
    CHECK(json_escape("a\nb\"c\\d") == "a\\nb\\\"c\\\\d");
    CHECK(json_escape(std::string(1, '\x01')) == "\\u0001");
    CHECK(json_escape("plain") == "plain");
}

TEST_CASE("complexes parse from the incidence form") {
    const std::string text =
        R"({"name":"seg","counts":[2,1],"boundary":{"1":[[[0,-1],[1,1]]]}})";
    const DeltaComplex X = complex_from_json(text);
    CHECK(X.name() == "seg");
    CHECK(X.count(0) == 2);
    CHECK(X.count(1) == 1);
    const DeltaComplex Y = complex_from_simplices("seg", {{{0}, {1}}, {{0, 1}}});
    REQUIRE(X.faces(1, 0).size() == Y.faces(1, 0).size());
    for (std::size_t i = 0; i < X.faces(1, 0).size(); ++i)
        CHECK(X.faces(1, 0)[i] == Y.faces(1, 0)[i]);
}

TEST_CASE("complexes parse from the vertex-tuple form") {
    const std::string text =
        R"({"name":"tri","simplices":{"0":[[0],[1],[2]],"1":[[0,1],[1,2],[0,2]],"2":[[0,1,2]]}})";
    const DeltaComplex X = complex_from_json(text);
    const DeltaComplex Y = complex_from_simplices(
        "tri", {{{0}, {1}, {2}}, {{0, 1}, {1, 2}, {0, 2}}, {{0, 1, 2}}});
    for (int n = 0; n <= 2; ++n) CHECK(X.count(n) == Y.count(n));
    REQUIRE(X.faces(2, 0).size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(X.faces(2, 0)[i] == Y.faces(2, 0)[i]);
}

TEST_CASE("a vertex-only complex needs no boundary block") {
    const DeltaComplex X = complex_from_json(R"({"counts":[4]})");
    CHECK(X.count(0) == 4);
    CHECK(X.name() == "custom");
}

TEST_CASE("complex parsing rejects malformed input") {
    CHECK_THROWS_WITH_AS(complex_from_json("{"), doctest::Contains("invalid JSON"), Error);
    CHECK_THROWS_WITH_AS(complex_from_json("[]"), doctest::Contains("top level"), Error);
    CHECK_THROWS_WITH_AS(complex_from_json(R"({"counts":[3,3],"dimension":3})"),
                         doctest::Contains("dimension disagrees"), Error);
    CHECK_THROWS_WITH_AS(complex_from_json(R"({"simplices":{"x":[[0]]}})"),
                         doctest::Contains("not a number"), Error);
    CHECK_THROWS_AS(complex_from_json(R"({"counts":[2,1],"boundary":{"5":[]}})"), Error);
}

TEST_CASE("cuts parse with defaulted region lists") {
    const CutSpec c = cut_from_json(R"({"p":1,"A_faces":[0,1],"A_psimplices":[0,1,2]})");
    CHECK(c.p == 1);
    CHECK(c.A_faces == std::vector<int>{0, 1});
    CHECK(c.A_psimplices == std::vector<int>{0, 1, 2});
    const CutSpec d = cut_from_json(R"({"p":0})");
    CHECK(d.A_faces.empty());
    CHECK(d.A_psimplices.empty());
    CHECK_THROWS_AS(cut_from_json(R"({"A_faces":[0]})"), Error);
}

TEST_CASE("models parse in regular and custom-basis form") {
    const HilbertModel m =
        model_from_json(R"({"complex":"circle_3","p":0,"group":"Z2"})");
    CHECK(m.p_dim() == 8);
    CHECK(m.p1_dim() == 8);
    CHECK(m.group().name() == "Z2");

    const HilbertModel c = model_from_json(
        R"({"complex":"circle_3","p":0,"group":"Z2","p_sites":[[0],[0,1],[1,1]]})");
    CHECK(c.p_dim() == 4);
    CHECK(c.p1_dim() == 8);

    CHECK_THROWS_AS(model_from_json(R"({"complex":"circle_3","p":0})"), Error);
    // the cap guards against runaway dimensions
    CHECK_THROWS_AS(model_from_json(R"({"complex":"circle_8","p":0,"group":"Z4"})", 100), Error);
}

TEST_CASE("complex references resolve to the library or to files") {
    const auto X = resolve_complex("torus_delta");
    CHECK(X->count(0) == 1);
    CHECK(X->count(1) == 3);
    CHECK(X->count(2) == 2);

    const std::string path = "/tmp/hfent_test_resolve.json";
    write_text_file(path, R"({"name":"seg","simplices":{"0":[[0],[1]],"1":[[0,1]]}})");
    const auto Y = resolve_complex(path);
    CHECK(Y->name() == "seg");
    CHECK(Y->count(1) == 1);

    CHECK_THROWS_WITH_AS(resolve_complex("definitely_not_a_complex"),
                         doctest::Contains("cannot read"), Error);
}

TEST_CASE("text files round-trip verbatim") {
    const std::string path = "/tmp/hfent_test_roundtrip.txt";
    const std::string body = "line one\nline two\t\xc3\xa9\n";
    write_text_file(path, body);
    CHECK(read_text_file(path) == body);
}

TEST_CASE("coordinate text is sorted and exact") {
    SparseOp op(3, 3);
    std::vector<Eigen::Triplet<std::complex<double>>> trips;
    trips.emplace_back(2, 0, std::complex<double>(1.0, 2.0));
    trips.emplace_back(0, 1, std::complex<double>(-0.5, 0.0));
    trips.emplace_back(1, 1, std::complex<double>(3.0, 0.0));
    op.setFromTriplets(trips.begin(), trips.end());
    CHECK(coo_text(op) == "0 1 -0.5 0\n1 1 3 0\n2 0 1 2\n");
}

TEST_CASE("report serialization is canonical") {
    SumRuleReport rep;
    rep.model = "fermion-z2";
    rep.complex_name = "circle_3";
    rep.cut_name = "edge";
    rep.group = "Z2";
    rep.p = 0;
    rep.mv_holds = true;
    rep.criterion_failed = false;
    rep.tol = 0.5;
    rep.max_abs_residual = 0.25;
    SumRuleRow row;
    row.energy = 1.5;
    row.s_coupled = 0.75;
    row.s_matter = 0.5;
    row.s_gauge = 0.25;
    row.residual = 0.0;
    rep.rows.push_back(row);
    rep.notes = {"a\"b"};
    rep.seed = 7;
    rep.runtime_seconds = 0.0;
    rep.pass = true;

    CHECK(sum_rule_report_json(rep) ==
          R"({"model":"fermion-z2","complex":"circle_3","cut":"edge","group":"Z2","p":0,)"
          R"("mv_holds":true,"criterion_failed":false,"tol":0.5,"max_abs_residual":0.25,)"
          R"("rows":[{"energy":1.5,"s_coupled":0.75,"s_matter":0.5,"s_gauge":0.25,"residual":0}],)"
          R"("notes":["a\"b"],"seed":7,"runtime_seconds":0,"pass":true})");

    CHECK(sum_rule_report_csv(rep) ==
          "energy,s_coupled,s_matter,s_gauge,residual\n1.5,0.75,0.5,0.25,0\n");
}

}  // TEST_SUITE
