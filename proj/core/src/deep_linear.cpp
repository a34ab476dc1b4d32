#include "featlab/deep_linear.hpp"

#include <cmath>

#include "featlab/error.hpp"
#include "featlab/model.hpp"

namespace featlab {

LinearStack LinearStack::identity(std::size_t dim, std::size_t depth) {
    LinearStack s;
    const auto d = static_cast<Eigen::Index>(dim);
    s.layers.assign(depth, Matrix::Identity(d, d));
    return s;
}

OrthogonalDataset make_paired_dataset(std::size_t dim, std::size_t n, Rng& rng) {
    if (n > dim) throw CapacityError(std::to_string(n) + " orthogonal inputs do not fit in R^" + std::to_string(dim));
    OrthogonalDataset data;
    data.inputs = sample_orthonormal_system(n, dim, rng).vectors();
    data.labels.resize(n);
    for (std::size_t j = 0; j < n; ++j) data.labels[j] = j / 2;
    return data;
}

Vector forward_stack(const LinearStack& stack, const Vector& x, std::size_t upto) {
    if (upto > stack.depth())
        throw IndexError("depth " + std::to_string(upto) + " out of range for a " + std::to_string(stack.depth()) +
                         "-layer stack");
    if (static_cast<std::size_t>(x.size()) != stack.dim() && upto > 0) throw ShapeError("input length mismatch");
    Vector h = x;
    for (std::size_t k = 0; k < upto; ++k) h = stack.layers[k] * h;
    return h;
}

namespace {

Matrix prefix_apply(const LinearStack& stack, const Matrix& inputs, std::size_t upto) {
    Matrix h = inputs;
    for (std::size_t k = 0; k < upto; ++k) h = stack.layers[k] * h;
    return h;
}

Matrix suffix_product(const LinearStack& stack, std::size_t after) {
    const auto d = static_cast<Eigen::Index>(stack.dim());
    Matrix b = Matrix::Identity(d, d);
    for (std::size_t k = after + 1; k < stack.depth(); ++k) b = stack.layers[k] * b;
    return b;
}

/// Mean cross-entropy and (softmax - onehot) / n.
double residual(const Matrix& f, const std::vector<std::size_t>& labels, Matrix& out) {
    out.resize(f.rows(), f.cols());
    const double n = static_cast<double>(f.cols());
    double total = 0.0;
    for (Eigen::Index i = 0; i < f.cols(); ++i) {
        const Vector col = f.col(i);
        const auto y = static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)]);
        total += log_sum_exp(col) - col(y);
        out.col(i) = softmax(col) / n;
        out(y, i) -= 1.0 / n;
    }
    return total / n;
}

}  // namespace

MeanStd same_label_similarity(const LinearStack& stack, const OrthogonalDataset& data, std::size_t depth) {
    if (depth > stack.depth()) throw IndexError("depth out of range");
    const Matrix h = prefix_apply(stack, data.inputs, depth);
    std::vector<double> sims;
    for (std::size_t i = 0; i < data.size(); ++i)
        for (std::size_t j = i + 1; j < data.size(); ++j)
            if (data.labels[i] == data.labels[j])
                sims.push_back(cosine(h.col(static_cast<Eigen::Index>(i)), h.col(static_cast<Eigen::Index>(j))));
    return mean_std(sims);
}

double stack_loss(const LinearStack& stack, const OrthogonalDataset& data) {
    Matrix r;
    return residual(prefix_apply(stack, data.inputs, stack.depth()), data.labels, r);
}

LinearStack layerwise_step(const LinearStack& stack, const OrthogonalDataset& data, std::size_t layer,
                           double step_size) {
    if (layer >= stack.depth()) throw IndexError("layer out of range");
    const Matrix h = prefix_apply(stack, data.inputs, layer);
    const Matrix b = suffix_product(stack, layer);
    Matrix r;
    residual(b * (stack.layers[layer] * h), data.labels, r);
    LinearStack out = stack;
    out.layers[layer] -= step_size * (b.transpose() * r) * h.transpose();
    return out;
}

std::size_t LayerwiseConfig::resolved_iterations() const {
    if (iterations_per_layer > 0) return iterations_per_layer;
    return static_cast<std::size_t>(
        std::llround(static_cast<double>(samples) / (step_size * static_cast<double>(depth))));
}

LayerwiseResult train_layerwise_linear(const LayerwiseConfig& config, Rng& rng) {
    if (config.depth < 2) throw ParameterError("deep linear network needs at least 2 layers");
    if (!(config.step_size > 0.0)) throw ParameterError("step size must be positive");
    const OrthogonalDataset data = make_paired_dataset(config.dim, config.samples, rng);
    const std::size_t iterations = config.resolved_iterations();

    LayerwiseResult result;
    result.stack = LinearStack::identity(config.dim, config.depth);
    result.depth_similarity.push_back(same_label_similarity(result.stack, data, 0));

    for (std::size_t layer = 0; layer + 1 < config.depth; ++layer) {
        // frozen prefix and suffix are constant within the stage
        const Matrix h = prefix_apply(result.stack, data.inputs, layer);
        const Matrix b = suffix_product(result.stack, layer);
        const Matrix bt = b.transpose();
        Matrix& w = result.stack.layers[layer];
        Matrix r;
        for (std::size_t t = 0; t < iterations; ++t) {
            residual(b * (w * h), data.labels, r);
            w -= config.step_size * (bt * r) * h.transpose();
        }
        result.stage_loss.push_back(stack_loss(result.stack, data));
        result.depth_similarity.push_back(same_label_similarity(result.stack, data, layer + 1));
    }

    const Matrix f = prefix_apply(result.stack, data.inputs, config.depth);
    Matrix r;
    result.final_loss = residual(f, data.labels, r);
    std::size_t correct = 0;
    for (Eigen::Index i = 0; i < f.cols(); ++i)
        if (is_correct(f.col(i), data.labels[static_cast<std::size_t>(i)])) ++correct;
    result.train_accuracy = static_cast<double>(correct) / static_cast<double>(f.cols());
    return result;
}

}  // namespace featlab
