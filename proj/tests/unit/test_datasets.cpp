#include <doctest.h>

#include <algorithm>
#include <set>
#include <tuple>

#include <json.hpp>

#include "featlab/datasets.hpp"
#include "featlab/error.hpp"
#include "featlab/rng.hpp"

using namespace featlab;

namespace {

std::set<std::tuple<std::size_t, std::size_t>> prompts(const ExampleList& list) {
    std::set<std::tuple<std::size_t, std::size_t>> out;
    for (const auto& e : list) out.insert({e.entity, e.relation});
    return out;
}

}  // namespace

TEST_CASE("analogical corpus, N=2 in R^8") {
    Rng rng(1);
    const auto c = build_analogical(2, 8, rng);
    CHECK(c.embeddings.size() == 6);
    CHECK(c.train_set("S1").size() == 2);
    CHECK(c.train_set("S2").size() == 2);
    CHECK(c.train_set("S3").size() == 2);
    CHECK(c.test_set.size() == 2);
    CHECK(c.test_name == "A");
    std::set<std::size_t> labels;
    for (const auto& [name, list] : c.train_sets)
        for (const auto& e : list) labels.insert(e.label);
    CHECK(labels == std::set<std::size_t>{0, 1, 2, 3});

    const auto& e = c.embeddings;
    CHECK(c.train_set("S1")[1].entity == e.id("a_2"));
    CHECK(c.train_set("S1")[1].relation == e.id("r_1"));
    CHECK(c.train_set("S1")[1].label == 1);
    CHECK(c.train_set("S2")[0].entity == e.id("a'_1"));
    CHECK(c.train_set("S2")[0].label == 0);
    CHECK(c.train_set("S3")[0].entity == e.id("a'_1"));
    CHECK(c.train_set("S3")[0].relation == e.id("r_2"));
    CHECK(c.train_set("S3")[0].label == 2);
    CHECK(c.test_set[1].entity == e.id("a_2"));
    CHECK(c.test_set[1].relation == e.id("r_2"));
    CHECK(c.test_set[1].label == 3);
    CHECK(c.label_map.at("b_1") == 0);
    CHECK(c.label_map.at("c_2") == 3);
}

TEST_CASE("analogical corpus at full scale") {
    Rng rng(2);
    const auto c = build_analogical(100, 427, rng);
    CHECK(c.embeddings.size() == 202);
    CHECK(c.label_map.size() == 200);
    std::set<std::size_t> values;
    for (const auto& [k, v] : c.label_map) values.insert(v);
    CHECK(values.size() == 200);
    CHECK(*values.rbegin() == 199);
}

TEST_CASE("capacity errors") {
    Rng rng(3);
    CHECK_THROWS_AS(build_analogical(100, 150, rng), CapacityError);
    CHECK_THROWS_AS(build_analogical(3, 7, rng), CapacityError);
    CHECK_NOTHROW(build_analogical(3, 8, rng));
    CHECK_THROWS_AS(build_two_hop(3, 8, true, rng), CapacityError);
    CHECK_NOTHROW(build_two_hop(3, 9, true, rng));
}

TEST_CASE("two-hop corpus with and without bridge") {
    Rng rng(4);
    const auto c = build_two_hop(2, 8, true, rng);
    CHECK(c.train_set("H1").size() == 2);
    CHECK(c.train_set("H2").size() == 2);
    REQUIRE(c.has_train_set("IB"));
    const auto& ib = c.train_set("IB");
    CHECK(ib.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        const std::string idx = std::to_string(i + 1);
        CHECK(ib[i].entity == c.embeddings.id("b_" + idx));
        CHECK(ib[i].relation == c.embeddings.id("r_3"));
        CHECK(ib[i].label == c.label_map.at("b_" + idx));
    }
    CHECK(c.test_name == "R");

    Rng rng2(4);
    const auto n = build_two_hop(2, 8, false, rng2);
    CHECK_FALSE(n.has_train_set("IB"));
    CHECK_THROWS_AS(n.train_set("IB"), RecipeError);
}

TEST_CASE("relation is always the last token and tokens are in the table") {
    Rng rng(5);
    for (const auto& c : {build_analogical(5, 20, rng), build_two_hop(5, 20, true, rng)}) {
        std::vector<const ExampleList*> lists{&c.test_set};
        for (const auto& [name, list] : c.train_sets) lists.push_back(&list);
        for (const auto* list : lists)
            for (const auto& e : *list) {
                CHECK(e.entity < c.embeddings.size());
                CHECK(c.embeddings.name(e.relation).rfind("r_", 0) == 0);
                CHECK(e.label < 2 * c.N);
            }
    }
}

TEST_CASE("test prompts never appear in training") {
    Rng rng(6);
    for (const auto& c : {build_analogical(10, 30, rng), build_two_hop(10, 30, true, rng)}) {
        const auto test = prompts(c.test_set);
        for (const auto& [name, list] : c.train_sets)
            for (const auto& p : prompts(list)) CHECK(test.count(p) == 0);
    }
}

TEST_CASE("multiset sizes") {
    Rng rng(7);
    const auto a = build_analogical(100, 427, rng);
    CHECK(assemble_train(a, Recipe::joint_analogical, 3).size() == 700);
    CHECK(assemble_train(a, Recipe::joint_analogical, 1).size() == 300);
    CHECK(assemble_train(a, Recipe::phase1_S1S2, 1).size() == 200);
    CHECK(assemble_train(a, Recipe::phase1_S1S3, 1).size() == 200);
    CHECK(assemble_train(a, Recipe::phase2_S3, 1).size() == 100);
    CHECK(assemble_train(a, Recipe::phase2_S2, 1).size() == 100);

    const auto b = build_two_hop(100, 427, true, rng);
    CHECK(assemble_train(b, Recipe::joint_twohop_bridge, 1).size() == 300);
    CHECK(assemble_train(b, Recipe::joint_twohop_bridge, 3).size() == 700);
    CHECK(assemble_train(b, Recipe::joint_twohop_nobridge, 1).size() == 200);
}

TEST_CASE("joint multiset replicates the similarity premises") {
    Rng rng(8);
    const auto a = build_analogical(3, 10, rng);
    const auto ms = assemble_train(a, Recipe::joint_analogical, 2);
    const auto flat = ms.expanded();
    CHECK(flat.size() == ms.size());
    std::size_t s3 = 0;
    for (const auto& e : flat)
        if (e.relation == a.embeddings.id("r_2")) ++s3;
    CHECK(s3 == 3);
    for (const auto& comp : ms.components) CHECK(comp.multiplicity >= 1);
}

TEST_CASE("recipe and corpus must agree") {
    Rng rng(9);
    const auto a = build_analogical(3, 10, rng);
    const auto nb = build_two_hop(3, 10, false, rng);
    CHECK_THROWS_AS(assemble_train(a, Recipe::joint_twohop_bridge, 1), RecipeError);
    CHECK_THROWS_AS(assemble_train(nb, Recipe::joint_twohop_bridge, 1), RecipeError);
    CHECK_THROWS_AS(assemble_train(nb, Recipe::joint_analogical, 1), RecipeError);
    CHECK_THROWS_AS(assemble_train(a, Recipe::joint_analogical, 0), RecipeError);
    CHECK(parse_recipe("phase2_S3") == Recipe::phase2_S3);
    CHECK(to_string(Recipe::joint_twohop_nobridge) == "joint_twohop_nobridge");
}

TEST_CASE("similarity pairs") {
    Rng rng(10);
    const auto a = build_analogical(3, 10, rng);
    const auto pa = a.similarity_pairs();
    REQUIRE(pa.size() == 3);
    CHECK(pa[2].first == a.embeddings.id("a_3"));
    CHECK(pa[2].second == a.embeddings.id("a'_3"));
    const auto b = build_two_hop(3, 10, true, rng);
    CHECK(b.similarity_pairs()[0].second == b.embeddings.id("b_1"));
}

TEST_CASE("json dump lists tokens, labels and sets") {
    Rng rng(11);
    const auto c = build_two_hop(2, 8, true, rng);
    const auto j = nlohmann::json::parse(corpus_to_json(c));
    CHECK(j["kind"] == "two_hop");
    CHECK(j["tokens"].size() == 7);
    CHECK(j["labels"]["c_1"] == 2);
    CHECK(j["train"]["IB"][0]["relation"] == "r_3");
    CHECK(j["test"]["R"].size() == 2);
}
