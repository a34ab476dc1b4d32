#include "featlab/batch.hpp"

#include <cmath>

namespace featlab {

namespace {

Batch assemble(const Corpus& corpus, const std::vector<std::pair<const Example*, double>>& items) {
    const auto d = static_cast<Eigen::Index>(corpus.dim());
    const auto n = static_cast<Eigen::Index>(items.size());
    Batch b;
    b.entity.resize(d, n);
    b.relation.resize(d, n);
    b.labels.resize(items.size());
    b.weight.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Example& e = *items[static_cast<std::size_t>(i)].first;
        b.entity.col(i) = corpus.embeddings.vector(e.entity);
        b.relation.col(i) = corpus.embeddings.vector(e.relation);
        b.labels[static_cast<std::size_t>(i)] = e.label;
        b.weight(i) = items[static_cast<std::size_t>(i)].second;
    }
    return b;
}

}  // namespace

Batch make_batch(const Corpus& corpus, const TrainMultiset& multiset) {
    const double n = static_cast<double>(multiset.size());
    std::vector<std::pair<const Example*, double>> items;
    for (const auto& c : multiset.components)
        for (const auto& e : c.examples) items.emplace_back(&e, static_cast<double>(c.multiplicity) / n);
    return assemble(corpus, items);
}

Batch make_batch(const Corpus& corpus, const ExampleList& list) {
    const double n = static_cast<double>(list.size());
    std::vector<std::pair<const Example*, double>> items;
    for (const auto& e : list) items.emplace_back(&e, 1.0 / n);
    return assemble(corpus, items);
}

void batch_attention(const Matrix& Z, const Batch& batch, BatchForward& out) {
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(Z.rows()));
    const Matrix zq = Z * batch.relation;
    const Eigen::ArrayXd s1 = (batch.entity.cwiseProduct(zq)).colwise().sum().transpose().array() * inv_sqrt_d;
    const Eigen::ArrayXd s2 = (batch.relation.cwiseProduct(zq)).colwise().sum().transpose().array() * inv_sqrt_d;
    const Eigen::ArrayXd top = s1.max(s2);
    const Eigen::ArrayXd e1 = (s1 - top).exp();
    const Eigen::ArrayXd e2 = (s2 - top).exp();
    out.alpha_first = e1 / (e1 + e2);
    out.alpha_last = e2 / (e1 + e2);
    out.x_a = batch.entity * out.alpha_first.matrix().asDiagonal();
    out.x_a.noalias() += batch.relation * out.alpha_last.matrix().asDiagonal();
}

void batch_values(const Matrix& V, BatchForward& out) {
    out.o1.noalias() = V * out.x_a;
}

void batch_logits(const FeatureView& feature, BatchForward& out) {
    if (feature.activation == Activation::identity) {
        out.f.noalias() = feature.lambda * (feature.weights * out.o1);
        return;
    }
    out.pre.noalias() = feature.weights * out.o1;
    const auto width = static_cast<Eigen::Index>(feature.m);
    const Eigen::Index d = out.pre.rows() / width;
    const double scale = feature.lambda / static_cast<double>(feature.m);
    out.f.resize(d, out.pre.cols());
    for (Eigen::Index i = 0; i < out.pre.cols(); ++i)
        for (Eigen::Index k = 0; k < d; ++k)
            out.f(k, i) = scale * out.pre.col(i).segment(k * width, width).cwiseMax(0.0).sum();
}

BatchLoss batch_loss(const Batch& batch, const Matrix& f) {
    BatchLoss out;
    out.residual.resize(f.rows(), f.cols());
    out.max_abs_logit = f.size() > 0 ? f.cwiseAbs().maxCoeff() : 0.0;
    for (Eigen::Index i = 0; i < f.cols(); ++i) {
        const double top = f.col(i).maxCoeff();
        auto e = (f.col(i).array() - top).exp();
        const double z = e.sum();
        const auto y = static_cast<Eigen::Index>(batch.labels[static_cast<std::size_t>(i)]);
        const double w = batch.weight(i);
        out.value += w * (top + std::log(z) - f(y, i));
        out.residual.col(i) = (w / z) * e.matrix();
        out.residual(y, i) -= w;
    }
    return out;
}

BatchGradients batch_gradients(const Matrix& V, const FeatureView& feature, const Batch& batch,
                               const BatchForward& fw, const Matrix& residual, GroupSet groups) {
    BatchGradients g;
    const double lam = feature.lambda;
    const bool need_o1 = groups.has(Group::V) || groups.has(Group::Z);

    Matrix delta;  // relu: dL/d pre, (dim*m) x count
    if (feature.activation == Activation::relu && (need_o1 || groups.has(Group::W))) {
        const auto width = static_cast<Eigen::Index>(feature.m);
        const double scale = lam / static_cast<double>(feature.m);
        delta.resize(fw.pre.rows(), fw.pre.cols());
        for (Eigen::Index i = 0; i < fw.pre.cols(); ++i)
            for (Eigen::Index r = 0; r < fw.pre.rows(); ++r)
                delta(r, i) = fw.pre(r, i) > 0.0 ? scale * residual(r / width, i) : 0.0;
    }

    if (groups.has(Group::W)) {
        if (feature.activation == Activation::identity)
            g.W.noalias() = lam * (residual * fw.o1.transpose());
        else
            g.W.noalias() = delta * fw.o1.transpose();
    }
    if (!need_o1) return g;

    Matrix d_o1;
    if (feature.activation == Activation::identity)
        d_o1.noalias() = lam * (feature.weights.transpose() * residual);
    else
        d_o1.noalias() = feature.weights.transpose() * delta;

    if (groups.has(Group::V)) g.V.noalias() = d_o1 * fw.x_a.transpose();
    if (groups.has(Group::Z)) {
        const Matrix d_xa = V.transpose() * d_o1;
        const Eigen::ArrayXd c1 = batch.entity.cwiseProduct(d_xa).colwise().sum().transpose().array();
        const Eigen::ArrayXd c2 = batch.relation.cwiseProduct(d_xa).colwise().sum().transpose().array();
        const Eigen::ArrayXd mix = fw.alpha_first * c1 + fw.alpha_last * c2;
        const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(V.rows()));
        const Eigen::ArrayXd ds1 = fw.alpha_first * (c1 - mix) * inv_sqrt_d;
        const Eigen::ArrayXd ds2 = fw.alpha_last * (c2 - mix) * inv_sqrt_d;
        Matrix h = batch.entity * ds1.matrix().asDiagonal();
        h.noalias() += batch.relation * ds2.matrix().asDiagonal();
        g.Z.noalias() = h * batch.relation.transpose();
    }
    return g;
}

}  // namespace featlab
