#include "featlab/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "featlab/error.hpp"

namespace featlab {

MeanStd mean_std(const std::vector<double>& values) {
    MeanStd out;
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return out;
}

double cosine(const Vector& a, const Vector& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0)) throw UndefinedSimilarityError("cosine of a zero-norm vector");
    const double c = a.dot(b) / (na * nb);
    return std::clamp(c, -1.0, 1.0);
}

double feature_similarity(const Matrix& V, const Vector& u, const Vector& w) {
    if (V.cols() != u.size() || V.cols() != w.size()) throw ShapeError("feature_similarity: shape mismatch");
    return cosine(V * u, V * w);
}

std::vector<double> feature_similarities(const Matrix& V, const EmbeddingTable& table,
                                         const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& [u, w] : pairs) out.push_back(feature_similarity(V, table.vector(u), table.vector(w)));
    return out;
}

double zero_one_error(const ModelParams& params, const std::vector<LabeledExample>& test_set,
                      Activation activation) {
    if (test_set.empty()) throw EmptySetError("zero_one_error: empty test set");
    std::size_t wrong = 0;
    for (const auto& ex : test_set) {
        const ForwardTrace t = forward(params, ex.prompt, activation);
        if (!is_correct(t.f, ex.label)) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(test_set.size());
}

double zero_one_error(const ModelParams& params, const Corpus& corpus, const ExampleList& test_set,
                      Activation activation) {
    std::vector<LabeledExample> list;
    list.reserve(test_set.size());
    for (const auto& e : test_set) list.push_back(corpus.labeled(e));
    return zero_one_error(params, list, activation);
}

double attention_balance(const Matrix& Z, const Prompt& prompt) {
    if (Z.rows() != prompt.last.size() || Z.cols() != prompt.last.size() || prompt.first.size() != Z.rows())
        throw ShapeError("attention_balance: shape mismatch");
    const Vector zq = Z * prompt.last;
    const double gap = (prompt.first.dot(zq) - prompt.last.dot(zq)) / std::sqrt(static_cast<double>(Z.rows()));
    return std::exp(gap);
}

SpanProjector::SpanProjector(const Matrix& rows, double rel_tol) {
    const Matrix gram = rows.transpose() * rows;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    const Vector& values = eig.eigenvalues();
    const double top = values.size() > 0 ? values.maxCoeff() : 0.0;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (top > 0.0 && values(i) > rel_tol * top) keep.push_back(i);
    basis_.resize(gram.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
        basis_.col(static_cast<Eigen::Index>(j)) = eig.eigenvectors().col(keep[j]);
}

double SpanProjector::relative_residual(const Vector& r) const {
    const Vector outside = r - basis_ * (basis_.transpose() * r);
    return outside.norm() / std::max(r.norm(), 1e-30);
}

double span_residual(const Matrix& V_t, const Matrix& V_0, const SpanProjector& span, const Vector& token) {
    return span.relative_residual((V_t - V_0) * token);
}

double span_residual(const Matrix& V_t, const Matrix& V_0, const Matrix& W_0, const Vector& token) {
    return span_residual(V_t, V_0, SpanProjector(W_0), token);
}

double MetricSnapshot::attention_deviation() const {
    return std::max(std::abs(attention_min - 1.0), std::abs(attention_max - 1.0));
}

}  // namespace featlab
