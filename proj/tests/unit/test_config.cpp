#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "featlab/config.hpp"
#include "featlab/error.hpp"

using namespace featlab;

namespace {

std::string field_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

}  // namespace

TEST_CASE("defaults hold the one-layer synthetic setup") {
    const ExperimentConfig c;
    CHECK(c.N == 100);
    CHECK(c.d == 427);
    CHECK(c.m == 50);
    CHECK(c.lambda == 20.0);
    CHECK(c.sigma0 == 0.03);
    CHECK(c.kappa == 3);
    CHECK(c.T1 == 500);
    CHECK(c.T2 == 2000);
    CHECK(c.T3 == 2000);
    CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("key = value text with comments") {
    const auto c = parse_config(
        "# sweep\n"
        "scenario = kappa_sweep\n"
        "kappas = 1, 3,5   # trailing comment\n"
        "\n"
        "eta1=0.25\n"
        "activation = relu\n"
        "seeds = 4,5\n");
    CHECK(c.scenario == Scenario::kappa_sweep);
    CHECK(c.kappas == std::vector<std::size_t>{1, 3, 5});
    CHECK(c.eta1 == 0.25);
    CHECK(c.activation == Activation::relu);
    CHECK(c.seeds == std::vector<std::uint64_t>{4, 5});
}

TEST_CASE("errors name the offending field") {
    CHECK(field_of([] { parse_config("bogus = 1\n"); }) == "bogus");
    CHECK(field_of([] { parse_config("N = -3\n"); }) == "N");
    CHECK(field_of([] { parse_config("lambda = abc\n"); }) == "lambda");
    CHECK(field_of([] { parse_config("just words\n"); }) != "");
    CHECK(field_of([] { parse_config("scenario = nope\n"); }) == "scenario");
    CHECK(field_of([] {
        ExperimentConfig c;
        c.seeds.clear();
        c.validate();
    }) == "seeds");
    CHECK(field_of([] {
        ExperimentConfig c;
        c.d = 150;
        c.validate();
    }) == "d");
    CHECK(field_of([] {
        ExperimentConfig c;
        c.scenario = Scenario::gradcheck;
        c.gc_h = 1.0;
        c.validate();
    }) == "gc_h");
    CHECK(field_of([] {
        ExperimentConfig c;
        c.eta2 = 0.0;
        c.validate();
    }) == "eta2");
}

TEST_CASE("dump reads back to the same config") {
    ExperimentConfig c;
    c.scenario = Scenario::twohop_nobridge;
    c.eta1 = 0.1 + 0.2;  // not representable in short decimal form
    c.kappas = {2, 7};
    c.seeds = {9, 10, 11};
    c.out = "x/y.json";
    c.format = ReportFormat::json;
    c.record_runtime = true;
    const auto back = parse_config(c.dump());
    CHECK(back.dump() == c.dump());
    CHECK(back.eta1 == c.eta1);
    CHECK(back.scenario == c.scenario);
    CHECK(back.format == ReportFormat::json);
}

TEST_CASE("load_config reads files and reports missing ones") {
    const std::string path = "featlab_test_config.cfg";
    {
        std::ofstream out(path);
        out << "N = 7\nd = 20\n";
    }
    ExperimentConfig base;
    base.m = 4;
    const auto c = load_config(path, base);
    CHECK(c.N == 7);
    CHECK(c.m == 4);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_config("/nonexistent/dir/cfg", base), IoError);
}

TEST_CASE("seed ranges and scenario names") {
    CHECK(seed_range(5, 3) == std::vector<std::uint64_t>{5, 6, 7});
    for (auto s : {Scenario::joint, Scenario::s_then_a, Scenario::a_then_s, Scenario::twohop_bridge,
                   Scenario::twohop_nobridge, Scenario::end_to_end, Scenario::kappa_sweep, Scenario::deep_linear,
                   Scenario::gradcheck})
        CHECK(parse_scenario(to_string(s)) == s);
}
