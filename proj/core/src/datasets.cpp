#include "featlab/datasets.hpp"

#include <json.hpp>

#include "featlab/error.hpp"

namespace featlab {

const ExampleList& Corpus::train_set(const std::string& name) const {
    for (const auto& [key, list] : train_sets)
        if (key == name) return list;
    throw RecipeError("corpus has no training set '" + name + "'");
}

bool Corpus::has_train_set(const std::string& name) const {
    for (const auto& entry : train_sets)
        if (entry.first == name) return true;
    return false;
}

Prompt Corpus::prompt(const Example& e) const {
    return Prompt{embeddings.vector(e.entity), embeddings.vector(e.relation)};
}

LabeledExample Corpus::labeled(const Example& e) const {
    return LabeledExample{prompt(e), e.label};
}

std::vector<std::pair<std::size_t, std::size_t>> Corpus::similarity_pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(N);
    const std::string partner = kind == TaskKind::analogical ? "a'_" : "b_";
    for (std::size_t i = 1; i <= N; ++i) {
        const std::string idx = std::to_string(i);
        pairs.emplace_back(embeddings.id("a_" + idx), embeddings.id(partner + idx));
    }
    return pairs;
}

namespace {

void check_capacity(std::size_t N, std::size_t dim, std::size_t tokens) {
    if (N == 0) throw CapacityError("entity-tuple count N must be positive");
    if (tokens > dim)
        throw CapacityError(std::to_string(tokens) + " tokens do not fit an orthonormal system in R^" +
                            std::to_string(dim));
    if (2 * N > dim)
        throw CapacityError(std::to_string(2 * N) + " distinct labels exceed " + std::to_string(dim) + " classes");
}

std::vector<std::string> indexed(const std::string& prefix, std::size_t N) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= N; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

void fill_labels(Corpus& c) {
    for (std::size_t i = 1; i <= c.N; ++i) {
        c.label_map["b_" + std::to_string(i)] = i - 1;
        c.label_map["c_" + std::to_string(i)] = c.N + i - 1;
    }
}

}  // namespace

Corpus build_analogical(std::size_t N, std::size_t dim, Rng& rng) {
    check_capacity(N, dim, 2 * N + 2);
    std::vector<std::string> names = indexed("a_", N);
    for (auto& n : indexed("a'_", N)) names.push_back(n);
    names.push_back("r_1");
    names.push_back("r_2");

    Corpus c;
    c.kind = TaskKind::analogical;
    c.N = N;
    c.embeddings = sample_orthonormal_system(names.size(), dim, rng).renamed(names);
    fill_labels(c);

    const std::size_t r1 = c.embeddings.id("r_1");
    const std::size_t r2 = c.embeddings.id("r_2");
    ExampleList s1, s2, s3, a;
    for (std::size_t i = 0; i < N; ++i) {
        const std::size_t ai = i;
        const std::size_t api = N + i;
        const std::size_t b = i;
        const std::size_t cc = N + i;
        s1.push_back({ai, r1, b});
        s2.push_back({api, r1, b});
        s3.push_back({api, r2, cc});
        a.push_back({ai, r2, cc});
    }
    c.train_sets = {{"S1", std::move(s1)}, {"S2", std::move(s2)}, {"S3", std::move(s3)}};
    c.test_name = "A";
    c.test_set = std::move(a);
    return c;
}

Corpus build_two_hop(std::size_t N, std::size_t dim, bool include_bridge, Rng& rng) {
    check_capacity(N, dim, 2 * N + 3);
    std::vector<std::string> names = indexed("a_", N);
    for (auto& n : indexed("b_", N)) names.push_back(n);
    names.push_back("r_1");
    names.push_back("r_2");
    names.push_back("r_3");

    Corpus c;
    c.kind = TaskKind::two_hop;
    c.N = N;
    c.has_bridge = include_bridge;
    c.embeddings = sample_orthonormal_system(names.size(), dim, rng).renamed(names);
    fill_labels(c);

    const std::size_t r1 = c.embeddings.id("r_1");
    const std::size_t r2 = c.embeddings.id("r_2");
    const std::size_t r3 = c.embeddings.id("r_3");
    ExampleList h1, h2, ib, r;
    for (std::size_t i = 0; i < N; ++i) {
        const std::size_t ai = i;
        const std::size_t bi = N + i;
        h1.push_back({ai, r1, i});
        h2.push_back({bi, r2, N + i});
        ib.push_back({bi, r3, i});
        r.push_back({ai, r2, N + i});
    }
    c.train_sets = {{"H1", std::move(h1)}, {"H2", std::move(h2)}};
    if (include_bridge) c.train_sets.emplace_back("IB", std::move(ib));
    c.test_name = "R";
    c.test_set = std::move(r);
    return c;
}

std::string to_string(Recipe r) {
    switch (r) {
        case Recipe::joint_analogical: return "joint_analogical";
        case Recipe::phase1_S1S2: return "phase1_S1S2";
        case Recipe::phase2_S3: return "phase2_S3";
        case Recipe::phase1_S1S3: return "phase1_S1S3";
        case Recipe::phase2_S2: return "phase2_S2";
        case Recipe::joint_twohop_bridge: return "joint_twohop_bridge";
        case Recipe::joint_twohop_nobridge: return "joint_twohop_nobridge";
    }
    return "?";
}

Recipe parse_recipe(const std::string& s) {
    for (Recipe r : {Recipe::joint_analogical, Recipe::phase1_S1S2, Recipe::phase2_S3, Recipe::phase1_S1S3,
                     Recipe::phase2_S2, Recipe::joint_twohop_bridge, Recipe::joint_twohop_nobridge})
        if (to_string(r) == s) return r;
    throw RecipeError("unknown recipe '" + s + "'");
}

std::size_t TrainMultiset::size() const {
    std::size_t n = 0;
    for (const auto& c : components) n += c.multiplicity * c.examples.size();
    return n;
}

ExampleList TrainMultiset::expanded() const {
    ExampleList out;
    out.reserve(size());
    for (const auto& c : components)
        for (std::size_t k = 0; k < c.multiplicity; ++k) out.insert(out.end(), c.examples.begin(), c.examples.end());
    return out;
}

TrainMultiset assemble_train(const Corpus& corpus, Recipe recipe, std::size_t kappa) {
    if (kappa == 0) throw RecipeError("kappa must be at least 1");
    const bool analogical = corpus.kind == TaskKind::analogical;
    auto need = [&](bool ok) {
        if (!ok) throw RecipeError("recipe " + to_string(recipe) + " does not apply to this corpus");
    };
    auto set = [&](const char* name) { return corpus.train_set(name); };

    TrainMultiset ms;
    switch (recipe) {
        case Recipe::joint_analogical:
            need(analogical);
            ms.components = {{set("S1"), kappa}, {set("S2"), kappa}, {set("S3"), 1}};
            break;
        case Recipe::phase1_S1S2:
            need(analogical);
            ms.components = {{set("S1"), 1}, {set("S2"), 1}};
            break;
        case Recipe::phase2_S3:
            need(analogical);
            ms.components = {{set("S3"), 1}};
            break;
        case Recipe::phase1_S1S3:
            need(analogical);
            ms.components = {{set("S1"), 1}, {set("S3"), 1}};
            break;
        case Recipe::phase2_S2:
            need(analogical);
            ms.components = {{set("S2"), 1}};
            break;
        case Recipe::joint_twohop_bridge:
            need(!analogical && corpus.has_bridge);
            ms.components = {{set("H1"), kappa}, {set("IB"), kappa}, {set("H2"), 1}};
            break;
        case Recipe::joint_twohop_nobridge:
            need(!analogical);
            ms.components = {{set("H1"), 1}, {set("H2"), 1}};
            break;
    }
    return ms;
}

std::string corpus_to_json(const Corpus& corpus) {
    nlohmann::ordered_json j;
    j["kind"] = corpus.kind == TaskKind::analogical ? "analogical" : "two_hop";
    j["N"] = corpus.N;
    j["dim"] = corpus.dim();
    j["tokens"] = corpus.embeddings.names();
    j["labels"] = corpus.label_map;
    auto dump = [&](const ExampleList& list) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& e : list)
            arr.push_back({{"entity", corpus.embeddings.name(e.entity)},
                           {"relation", corpus.embeddings.name(e.relation)},
                           {"label", e.label}});
        return arr;
    };
    for (const auto& [name, list] : corpus.train_sets) j["train"][name] = dump(list);
    j["test"][corpus.test_name] = dump(corpus.test_set);
    return j.dump(2);
}

}  // namespace featlab
