#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "featlab/datasets.hpp"
#include "featlab/embeddings.hpp"
#include "featlab/model.hpp"

namespace featlab {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  ///< sample standard deviation (n-1); 0 for a single value
};

MeanStd mean_std(const std::vector<double>& values);

/// <a, b> / (|a| |b|); throws UndefinedSimilarityError on a zero vector.
double cosine(const Vector& a, const Vector& b);

/// Cosine between the value-space images V u and V w.
double feature_similarity(const Matrix& V, const Vector& u, const Vector& w);

/// Per-pair feature similarities over token-id pairs of `table`.
std::vector<double> feature_similarities(const Matrix& V, const EmbeddingTable& table,
                                         const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

/// Fraction of examples whose true-class logit fails to strictly exceed every
/// other logit. Ties count as errors.
double zero_one_error(const ModelParams& params, const std::vector<LabeledExample>& test_set,
                      Activation activation);
double zero_one_error(const ModelParams& params, const Corpus& corpus, const ExampleList& test_set,
                      Activation activation);

/// alpha_first / alpha_last for the prompt, evaluated as exp(s1 - s2).
double attention_balance(const Matrix& Z, const Prompt& prompt);

/// Orthogonal projector onto the span of a set of vectors.
class SpanProjector {
public:
    /// `rows` holds one spanning vector per row. Directions whose Gram
    /// eigenvalue falls below `rel_tol` times the largest are discarded.
    explicit SpanProjector(const Matrix& rows, double rel_tol = 1e-10);

    std::size_t rank() const { return static_cast<std::size_t>(basis_.cols()); }
    const Matrix& basis() const { return basis_; }

    /// |r - P r| / max(|r|, 1e-30)
    double relative_residual(const Vector& r) const;

private:
    Matrix basis_;  ///< dim x rank, orthonormal columns
};

/// Relative residual of (V_t - V_0) * token outside span{w0_{k,l}}.
double span_residual(const Matrix& V_t, const Matrix& V_0, const Matrix& W_0, const Vector& token);
double span_residual(const Matrix& V_t, const Matrix& V_0, const SpanProjector& span, const Vector& token);

struct MetricSnapshot {
    std::size_t iteration = 0;
    std::string tag;
    double train_loss = 0.0;
    MeanStd feature_sim;
    double attention_min = 1.0;  ///< min alpha_first / alpha_last over train prompts
    double attention_max = 1.0;
    /// Max relative residual over the stage's prompt tokens; set while W is at init.
    std::optional<double> span_residual;
    std::optional<double> test_error;

    /// Largest deviation of the attention ratio from 1.
    double attention_deviation() const;
};

}  // namespace featlab
