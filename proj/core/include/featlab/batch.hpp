#pragma once

#include <cstddef>
#include <vector>

#include "featlab/datasets.hpp"
#include "featlab/embeddings.hpp"
#include "featlab/model.hpp"

namespace featlab {

/// Column-batched view of a weighted example list. Column i holds the entity
/// token, the relation (query) token and the label of example i; `weight(i)`
/// is multiplicity / n so that weights sum to one.
struct Batch {
    Matrix entity;    ///< dim x count
    Matrix relation;  ///< dim x count
    std::vector<std::size_t> labels;
    Eigen::ArrayXd weight;

    std::size_t count() const { return labels.size(); }
};

Batch make_batch(const Corpus& corpus, const TrainMultiset& multiset);
/// Every example with equal weight 1/|list|.
Batch make_batch(const Corpus& corpus, const ExampleList& list);

/// Feature layer as seen by the batched forward pass. With identity
/// activation `weights` is the class-mean matrix (dim x dim); with relu it is
/// the full stacked (dim*m) x dim matrix.
struct FeatureView {
    const Matrix& weights;
    Activation activation;
    double lambda;
    std::size_t m;
};

struct BatchForward {
    Eigen::ArrayXd alpha_first;
    Eigen::ArrayXd alpha_last;
    Matrix x_a;  ///< dim x count
    Matrix o1;   ///< dim x count
    Matrix pre;  ///< (dim*m) x count, relu only
    Matrix f;    ///< dim x count
};

void batch_attention(const Matrix& Z, const Batch& batch, BatchForward& out);
void batch_values(const Matrix& V, BatchForward& out);
void batch_logits(const FeatureView& feature, BatchForward& out);

/// Weighted cross-entropy and the weighted residual (softmax(f) - e_y) * weight.
struct BatchLoss {
    double value = 0.0;
    Matrix residual;  ///< dim x count
    double max_abs_logit = 0.0;
};

BatchLoss batch_loss(const Batch& batch, const Matrix& f);

/// Full-batch gradients. For identity activation `W` holds the class-mean
/// gradient G: every w_{k,l} receives G.row(k) / m. For relu it holds the
/// full stacked gradient.
struct BatchGradients {
    Matrix Z, V, W;
};

BatchGradients batch_gradients(const Matrix& V, const FeatureView& feature, const Batch& batch,
                               const BatchForward& fw, const Matrix& residual, GroupSet groups);

}  // namespace featlab
