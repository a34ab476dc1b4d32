#pragma once

#include <cstddef>
#include <vector>

#include "featlab/embeddings.hpp"
#include "featlab/metrics.hpp"
#include "featlab/rng.hpp"

namespace featlab {

/// Product network f(x) = W_L ... W_1 x of square layers.
struct LinearStack {
    std::vector<Matrix> layers;  ///< layers[0] is W_1

    std::size_t depth() const { return layers.size(); }
    std::size_t dim() const { return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().rows()); }

    static LinearStack identity(std::size_t dim, std::size_t depth);
};

/// Orthonormal inputs (columns) with class labels.
struct OrthogonalDataset {
    Matrix inputs;  ///< dim x n
    std::vector<std::size_t> labels;

    std::size_t size() const { return labels.size(); }
};

/// n orthonormal inputs in R^dim labelled in pairs: sample j has label j / 2.
OrthogonalDataset make_paired_dataset(std::size_t dim, std::size_t n, Rng& rng);

/// (W_k ... W_1) x; depth 0 returns x.
Vector forward_stack(const LinearStack& stack, const Vector& x, std::size_t upto);

/// Mean and sample std of the cosine between depth-k representations of
/// every same-label pair.
MeanStd same_label_similarity(const LinearStack& stack, const OrthogonalDataset& data, std::size_t depth);

/// Mean cross-entropy of softmax(W_L ... W_1 x) over the dataset.
double stack_loss(const LinearStack& stack, const OrthogonalDataset& data);

/// One full-batch GD step on layer `layer` (0-based); all other layers are
/// returned bit-identical.
LinearStack layerwise_step(const LinearStack& stack, const OrthogonalDataset& data, std::size_t layer,
                           double step_size);

struct LayerwiseConfig {
    std::size_t dim = 512;
    std::size_t depth = 6;
    std::size_t samples = 32;
    double step_size = 0.5;
    /// Iterations per trained layer; 0 selects round(samples / (step_size * depth)).
    std::size_t iterations_per_layer = 0;

    std::size_t resolved_iterations() const;
};

struct LayerwiseResult {
    LinearStack stack;
    /// Entry k is the depth-k same-label similarity recorded at the end of
    /// stage k (k = 0 is the raw input); length depth.
    std::vector<MeanStd> depth_similarity;
    std::vector<double> stage_loss;  ///< loss after each trained layer
    double final_loss = 0.0;
    double train_accuracy = 0.0;
};

/// Identity-initialised stack; layers 1..L-1 are trained one at a time, the
/// last layer stays at identity.
LayerwiseResult train_layerwise_linear(const LayerwiseConfig& config, Rng& rng);

}  // namespace featlab
