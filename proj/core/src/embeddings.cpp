#include "featlab/embeddings.hpp"

#include <cmath>

#include "featlab/error.hpp"

namespace featlab {

EmbeddingTable::EmbeddingTable(Matrix vectors, std::vector<std::string> names)
    : vectors_(std::move(vectors)), names_(std::move(names)) {
    if (static_cast<std::size_t>(vectors_.cols()) != names_.size())
        throw ShapeError("embedding table: " + std::to_string(vectors_.cols()) + " vectors but " +
                         std::to_string(names_.size()) + " names");
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (!index_.emplace(names_[i], i).second)
            throw ParameterError("embedding table: duplicate token name '" + names_[i] + "'");
    }
}

std::size_t EmbeddingTable::id(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw IndexError("unknown token '" + name + "'");
    return it->second;
}

EmbeddingTable EmbeddingTable::renamed(std::vector<std::string> names) const {
    return EmbeddingTable(vectors_, std::move(names));
}

Matrix orthonormalize(const Matrix& columns) {
    Matrix q = columns;
    const Eigen::Index count = q.cols();
    for (Eigen::Index j = 0; j < count; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index i = 0; i < j; ++i) {
                const double proj = q.col(i).dot(q.col(j));
                q.col(j) -= proj * q.col(i);
            }
        }
        const double norm = q.col(j).norm();
        if (!(norm > 0.0)) throw DimensionError("orthonormalize: columns are linearly dependent");
        q.col(j) /= norm;
    }
    return q;
}

EmbeddingTable sample_orthonormal_system(std::size_t count, std::size_t dim, Rng& rng) {
    if (count == 0) throw EmptyTableError("orthonormal system: count must be positive");
    if (dim == 0) throw DimensionError("orthonormal system: dim must be positive");
    if (count > dim)
        throw DimensionError("orthonormal system: " + std::to_string(count) +
                             " vectors exceed dimension " + std::to_string(dim));

    Matrix gauss(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(count));
    for (Eigen::Index j = 0; j < gauss.cols(); ++j)
        for (Eigen::Index i = 0; i < gauss.rows(); ++i) gauss(i, j) = rng.normal();

    std::vector<std::string> names(count);
    for (std::size_t i = 0; i < count; ++i) names[i] = "t" + std::to_string(i);
    return EmbeddingTable(orthonormalize(gauss), std::move(names));
}

Matrix ModelParams::class_mean() const {
    const auto d = static_cast<Eigen::Index>(dim());
    const auto width = static_cast<Eigen::Index>(m);
    Matrix mean(d, d);
    for (Eigen::Index k = 0; k < d; ++k)
        mean.row(k) = W.middleRows(k * width, width).colwise().sum() / static_cast<double>(m);
    return mean;
}

void ModelParams::validate() const {
    const auto d = Z.rows();
    if (d == 0 || Z.cols() != d) throw ShapeError("Z must be a non-empty square matrix");
    if (V.rows() != d || V.cols() != d) throw ShapeError("V must be dim x dim");
    if (m == 0) throw ShapeError("feature width m must be positive");
    if (W.rows() != d * static_cast<Eigen::Index>(m) || W.cols() != d)
        throw ShapeError("W must be (dim*m) x dim");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda must be positive");
    if (!Z.allFinite() || !V.allFinite() || !W.allFinite())
        throw ParameterError("model parameters contain non-finite entries");
}

ModelParams init_params(std::size_t dim, std::size_t m, double lambda, double sigma0, Rng& rng) {
    if (dim == 0 || m == 0) throw ParameterError("init_params: dim and m must be positive");
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw ParameterError("init_params: sigma0 must be positive");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("init_params: lambda must be positive");

    const auto d = static_cast<Eigen::Index>(dim);
    auto draw = [&](Eigen::Index rows, Eigen::Index cols) {
        Matrix out(rows, cols);
        double* p = out.data();
        for (Eigen::Index i = 0; i < out.size(); ++i) p[i] = sigma0 * rng.normal();
        return out;
    };

    ModelParams params;
    params.Z = draw(d, d);
    params.V = draw(d, d);
    params.W = draw(d * static_cast<Eigen::Index>(m), d);
    params.lambda = lambda;
    params.m = m;
    return params;
}

}  // namespace featlab
