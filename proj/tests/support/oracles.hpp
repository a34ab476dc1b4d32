#pragma once

// Straightforward reference implementations used as test oracles. Nothing
// here calls into the library's numerics.

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "featlab/embeddings.hpp"
#include "featlab/model.hpp"

namespace oracle {

inline double dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) s += a(i) * b(i);
    return s;
}

inline Eigen::VectorXd matvec(const Eigen::MatrixXd& M, const Eigen::VectorXd& x) {
    Eigen::VectorXd y(M.rows());
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        double s = 0.0;
        for (Eigen::Index c = 0; c < M.cols(); ++c) s += M(r, c) * x(c);
        y(r) = s;
    }
    return y;
}

/// (alpha_1, alpha_2) by explicit scores and max-subtracted exponentials.
inline std::vector<double> attention(const Eigen::MatrixXd& Z, const Eigen::VectorXd& x1, const Eigen::VectorXd& x2) {
    const double d = static_cast<double>(Z.rows());
    const Eigen::VectorXd zq = matvec(Z, x2);
    const double s1 = dot(x1, zq) / std::sqrt(d);
    const double s2 = dot(x2, zq) / std::sqrt(d);
    const double top = s1 > s2 ? s1 : s2;
    const double e1 = std::exp(s1 - top), e2 = std::exp(s2 - top);
    return {e1 / (e1 + e2), e2 / (e1 + e2)};
}

/// Logits by explicit loops over classes and neurons.
inline Eigen::VectorXd logits(const featlab::ModelParams& p, const featlab::Prompt& prompt, bool relu) {
    const auto a = attention(p.Z, prompt.first, prompt.last);
    const Eigen::Index d = p.Z.rows();
    Eigen::VectorXd xa(d);
    for (Eigen::Index i = 0; i < d; ++i) xa(i) = a[0] * prompt.first(i) + a[1] * prompt.last(i);
    const Eigen::VectorXd o1 = matvec(p.V, xa);
    Eigen::VectorXd f(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        double s = 0.0;
        for (std::size_t l = 0; l < p.m; ++l) {
            double in = 0.0;
            for (Eigen::Index j = 0; j < d; ++j) in += p.W(k * static_cast<Eigen::Index>(p.m) + static_cast<Eigen::Index>(l), j) * o1(j);
            s += relu ? (in > 0.0 ? in : 0.0) : in;
        }
        f(k) = p.lambda / static_cast<double>(p.m) * s;
    }
    return f;
}

/// -log(exp(f_y) / sum exp(f_k)) written out directly.
inline double cross_entropy(const Eigen::VectorXd& f, std::size_t y) {
    double z = 0.0;
    for (Eigen::Index k = 0; k < f.size(); ++k) z += std::exp(f(k));
    return -std::log(std::exp(f(static_cast<Eigen::Index>(y))) / z);
}

inline double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return dot(a, b) / std::sqrt(dot(a, a) * dot(b, b));
}

}  // namespace oracle
