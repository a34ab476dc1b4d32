#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "featlab/rng.hpp"

namespace featlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Frozen token embeddings: an orthonormal set of columns with symbolic names.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    EmbeddingTable(Matrix vectors, std::vector<std::string> names);

    std::size_t dim() const { return static_cast<std::size_t>(vectors_.rows()); }
    std::size_t size() const { return static_cast<std::size_t>(vectors_.cols()); }

    const Matrix& vectors() const { return vectors_; }
    Eigen::Ref<const Vector> vector(std::size_t id) const { return vectors_.col(static_cast<Eigen::Index>(id)); }
    Eigen::Ref<const Vector> vector(const std::string& name) const { return vector(id(name)); }

    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(std::size_t id) const { return names_.at(id); }
    std::size_t id(const std::string& name) const;
    bool contains(const std::string& name) const { return index_.count(name) != 0; }

    /// Rename every token; the vectors are untouched.
    EmbeddingTable renamed(std::vector<std::string> names) const;

private:
    Matrix vectors_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Orthonormalise the columns of `columns` by modified Gram-Schmidt with a
/// second re-orthogonalisation pass. Columns must be linearly independent.
Matrix orthonormalize(const Matrix& columns);

/// Uniformly random orthonormal frame of `count` vectors in R^dim, built by
/// orthogonalising i.i.d. standard Gaussian columns. Tokens are named
/// "t0", "t1", ... until renamed by the caller.
EmbeddingTable sample_orthonormal_system(std::size_t count, std::size_t dim, Rng& rng);

/// Trainable weights of the one-block model.
///
/// `W` stacks the feature-layer vectors w_{k,l} as rows: row k*m + l holds
/// w_{k,l}, so the matrix is (dim*m) x dim.
struct ModelParams {
    Matrix Z;  ///< merged query-key, dim x dim
    Matrix V;  ///< value, dim x dim
    Matrix W;  ///< feature layer, (dim*m) x dim
    double lambda = 1.0;
    std::size_t m = 1;

    std::size_t dim() const { return static_cast<std::size_t>(Z.rows()); }

    auto feature(std::size_t k, std::size_t l) { return W.row(static_cast<Eigen::Index>(k * m + l)); }
    auto feature(std::size_t k, std::size_t l) const { return W.row(static_cast<Eigen::Index>(k * m + l)); }

    /// Row k is (1/m) sum_l w_{k,l}; with identity activation f = lambda * mean * o1.
    Matrix class_mean() const;

    /// Throws ShapeError / ParameterError when shapes disagree or an entry is not finite.
    void validate() const;
};

/// Every entry of Z, V and W drawn i.i.d. from N(0, sigma0^2), in that order,
/// each matrix filled in column-major order.
ModelParams init_params(std::size_t dim, std::size_t m, double lambda, double sigma0, Rng& rng);

}  // namespace featlab
