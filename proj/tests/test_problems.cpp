#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "chatpc/errors.hpp"
#include "chatpc/problem.hpp"
#include "support/brute_dsep.hpp"

using namespace chatpc;

namespace {

const std::string kData = CHATPC_DATA_DIR;

Problem tiny3() {
    return load_problem_string(R"({
      "id": "tiny", "field": "testing", "context": "Three synthetic variables.",
      "variables": [
        {"name": "A", "description": "first"},
        {"name": "B", "description": "second"},
        {"name": "C", "description": "third"}
      ]
    })");
}

}  // namespace

TEST_CASE("bundled burglary problem loads with 5 variables and 4 edges") {
    const Problem p = load_problem_file(kData + "/problems/burglary.json");
    CHECK(p.id == "burglary");
    CHECK(p.variable_names() == std::vector<std::string>{"B", "E", "A", "J", "M"});
    REQUIRE(p.ground_truth.has_value());
    CHECK(p.ground_truth->edges().size() == 4);
    CHECK(p.ground_truth->has_edge(p.ground_truth->index_of("B"), p.ground_truth->index_of("A")));
}

TEST_CASE("bundled nao-dk-med problem is the two-edge fork") {
    const Problem p = load_problem_file(kData + "/problems/nao-dk-med.json");
    CHECK(p.variables.size() == 3);
    REQUIRE(p.ground_truth.has_value());
    CHECK(p.ground_truth->edge_names() ==
          std::vector<std::pair<std::string, std::string>>{{"NAO", "DK"}, {"NAO", "MED"}});
}

TEST_CASE("every bundled problem loads and round-trips") {
    for (const char* name : {"burglary", "cancer", "asia", "sachs", "spurious", "bk-spv",
                             "nao-dk-med"}) {
        const Problem p = load_problem_file(kData + "/problems/" + name + ".json");
        CHECK(p.variables.size() >= 2);
        const Problem again = load_problem_string(serialize_problem(p));
        CHECK(p == again);
    }
}

TEST_CASE("externally transcribed ground truths are flagged") {
    for (const char* name : {"sachs", "bk-spv"}) {
        const Problem p = load_problem_file(kData + "/problems/" + name + ".json");
        REQUIRE(p.provenance.has_value());
        CHECK(*p.provenance == "external");
    }
    CHECK(load_problem_file(kData + "/problems/sachs.json").variables.size() == 11);
}

TEST_CASE("spurious problem carries 15 designated pairs and no graph") {
    const Problem p = load_problem_file(kData + "/problems/spurious.json");
    CHECK(p.pairs.size() == 15);
    CHECK_FALSE(p.ground_truth.has_value());
    CHECK(p.variables.size() == 30);
}

TEST_CASE("schema violations are reported") {
    CHECK_THROWS_AS(load_problem_string(R"({"id": "x", "field": "f",
        "variables": [{"name":"A","description":"a"},{"name":"B","description":"b"}]})"),
                    SchemaError);  // missing context
    CHECK_THROWS_AS(load_problem_string(R"({"id":"x","field":"f","context":"c",
        "variables":[{"name":"A","description":"a"}]})"),
                    SchemaError);  // one variable
    CHECK_THROWS_AS(load_problem_string(R"({"id":"x","field":"f","context":"c",
        "variables":[{"name":"A","description":"a"},{"name":"A","description":"b"}]})"),
                    SchemaError);  // duplicate name
    CHECK_THROWS_AS(load_problem_string(R"({"id":"x","field":"f","context":"c",
        "variables":[{"name":"A","description":"a"},{"name":"B","description":""}]})"),
                    SchemaError);  // empty description
    CHECK_THROWS_AS(load_problem_string("not json"), SchemaError);
    // Graph errors propagate from ground-truth validation.
    CHECK_THROWS_AS(load_problem_string(R"({"id":"x","field":"f","context":"c",
        "variables":[{"name":"A","description":"a"},{"name":"B","description":"b"}],
        "ground_truth":{"edges":[["A","Q"]]}})"),
                    GraphError);
    CHECK_THROWS_AS(load_problem_string(R"({"id":"x","field":"f","context":"c",
        "variables":[{"name":"A","description":"a"},{"name":"B","description":"b"}],
        "pairs":[["A","Q"]]})"),
                    SchemaError);
}

TEST_CASE("ci query construction enforces its invariants") {
    CHECK_THROWS_AS(CiQuery("A", "A"), InvalidQuery);
    CHECK_THROWS_AS(CiQuery("A", "B", {"A"}), InvalidQuery);
    CHECK_THROWS_AS(CiQuery("A", "B", {"C", "C"}), InvalidQuery);
    const CiQuery q("B", "A", {"D", "C"});
    CHECK(q.canonical().x == "A");
    CHECK(q.canonical().z == std::vector<std::string>{"C", "D"});
    CHECK(q.display() == "B _||_ A | D, C");
}

TEST_CASE("enumeration: 3 variables, unlimited, both orders gives 12 queries") {
    const auto qs = enumerate_ci_statements(tiny3(), kUnlimitedCondSize, true);
    CHECK(qs.size() == 12);
    // Closed under swapping x and y.
    for (const auto& q : qs)
        CHECK(std::find(qs.begin(), qs.end(), q.swapped()) != qs.end());
    // Deterministic order: lexicographic by x, then y, then subset rank.
    CHECK(qs.front().x == "A");
    CHECK(qs.front().y == "B");
    CHECK(qs.front().z.empty());
    CHECK(qs[1].z == std::vector<std::string>{"C"});
}

TEST_CASE("enumeration: pairs only") {
    const auto qs = enumerate_ci_statements(tiny3(), 0, false);
    CHECK(qs.size() == 3);
    for (const auto& q : qs) CHECK(q.z.empty());
}

TEST_CASE("enumeration: sachs at conditioning size 1 gives 1100 ordered queries") {
    const Problem p = load_problem_file(kData + "/problems/sachs.json");
    CHECK(enumerate_ci_statements(p, 1, true).size() == 1100);  // 11*10*(1+9)
}

TEST_CASE("enumeration rejects an oversized bound") {
    CHECK_THROWS_AS(enumerate_ci_statements(tiny3(), 2, true), InvalidQuery);
}

TEST_CASE("ground-truth labels follow d-separation") {
    const Problem burglary = load_problem_file(kData + "/problems/burglary.json");
    CHECK(ground_truth_label(burglary, CiQuery("B", "E")) == CiLabel::INDEPENDENT);
    CHECK(ground_truth_label(burglary, CiQuery("B", "E", {"A"})) == CiLabel::DEPENDENT);
    const Problem cancer = load_problem_file(kData + "/problems/cancer.json");
    CHECK(ground_truth_label(cancer, CiQuery("X", "D", {"C"})) == CiLabel::INDEPENDENT);
    // Cross-checked against the independent path enumerator.
    CHECK(chatpc_test::brute_d_separated(*cancer.ground_truth, "X", "D", {"C"}));
}

TEST_CASE("ground-truth labels are symmetric in x and y") {
    const Problem p = load_problem_file(kData + "/problems/cancer.json");
    for (const auto& q : enumerate_ci_statements(p, kUnlimitedCondSize, false))
        CHECK(ground_truth_label(p, q) == ground_truth_label(p, q.swapped()));
}

TEST_CASE("label queries without ground truth are rejected") {
    const Problem p = load_problem_file(kData + "/problems/spurious.json");
    CHECK_THROWS_AS(ground_truth_label(p, CiQuery("chicken", "oil")), NoGroundTruth);
}
