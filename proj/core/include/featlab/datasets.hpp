#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "featlab/embeddings.hpp"
#include "featlab/model.hpp"
#include "featlab/rng.hpp"

namespace featlab {

/// A prompt [entity, relation] with its class label, by token id.
struct Example {
    std::size_t entity = 0;
    std::size_t relation = 0;
    std::size_t label = 0;

    bool operator==(const Example&) const = default;
};

using ExampleList = std::vector<Example>;

enum class TaskKind { analogical, two_hop };

/// Knowledge-triple task bundle: frozen embeddings, named training sets, a
/// held-out test set and the label index map.
///
/// Analogical: tokens a_i, a'_i, r_1, r_2; train sets S1, S2, S3; test set A.
/// Two-hop:    tokens a_i, b_i, r_1, r_2, r_3; train sets H1, H2 (and IB when
///             the identity bridge is present); test set R.
/// Labels: I(b_i) = i-1, I(c_i) = N+i-1 (1-based i).
struct Corpus {
    TaskKind kind = TaskKind::analogical;
    std::size_t N = 0;
    bool has_bridge = false;
    EmbeddingTable embeddings;
    std::vector<std::pair<std::string, ExampleList>> train_sets;
    std::string test_name;
    ExampleList test_set;
    std::map<std::string, std::size_t> label_map;

    std::size_t dim() const { return embeddings.dim(); }
    const ExampleList& train_set(const std::string& name) const;
    bool has_train_set(const std::string& name) const;

    Prompt prompt(const Example& e) const;
    LabeledExample labeled(const Example& e) const;

    /// Token pairs whose value-space alignment is measured:
    /// (a_i, a'_i) for analogical, (a_i, b_i) for two-hop.
    std::vector<std::pair<std::size_t, std::size_t>> similarity_pairs() const;
};

Corpus build_analogical(std::size_t N, std::size_t dim, Rng& rng);
Corpus build_two_hop(std::size_t N, std::size_t dim, bool include_bridge, Rng& rng);

enum class Recipe {
    joint_analogical,
    phase1_S1S2,
    phase2_S3,
    phase1_S1S3,
    phase2_S2,
    joint_twohop_bridge,
    joint_twohop_nobridge,
};

std::string to_string(Recipe r);
Recipe parse_recipe(const std::string& s);

/// Multiset union of example lists, each with a replication count.
struct TrainMultiset {
    struct Component {
        ExampleList examples;
        std::size_t multiplicity = 1;
    };
    std::vector<Component> components;

    /// Effective size n = sum multiplicity * |list|.
    std::size_t size() const;
    /// The multiset with every replication written out.
    ExampleList expanded() const;
};

TrainMultiset assemble_train(const Corpus& corpus, Recipe recipe, std::size_t kappa);

/// Debug dump: token names, label map and example lists by name.
std::string corpus_to_json(const Corpus& corpus);

}  // namespace featlab
